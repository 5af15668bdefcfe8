#include "normspec/lexer.hpp"

#include <cctype>
#include <unordered_set>

namespace normspec {

namespace {

const std::unordered_set<std::string>& keywordSet() {
    static const std::unordered_set<std::string> kws = {
        "Fact", "Act", "Event", "Duty", "Var", "Function", "Bool", "Physical",
        "Open", "Closed", "Extend", "Domain",
        "Identified", "by", "Related", "to",
        "Actor", "Recipient", "Holder", "Claimant",
        "Holds", "when", "Derived", "from", "Conditioned",
        "Creates", "Terminates", "Obfuscates", "Violated", "Syncs", "with",
        "When", "Where",
        "Foreach", "Forall", "Exists", "Count", "Sum", "Max", "Min",
        "Not", "Enabled", "True", "False", "Int", "String",
    };
    return kws;
}

struct Cursor {
    const std::string& src;
    const std::string& file;
    size_t pos = 0;
    int line = 1;
    int col = 1;

    bool done() const { return pos >= src.size(); }
    char peek(size_t off = 0) const { return pos + off < src.size() ? src[pos + off] : '\0'; }
    char take() {
        char c = src[pos++];
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        return c;
    }
    SourceLoc loc() const { return SourceLoc{file, line, col}; }
};

bool identStart(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool identBody(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

} // namespace

bool isKeywordText(const std::string& text) { return keywordSet().count(text) > 0; }

std::vector<Token> tokenize(const std::string& source, const std::string& filename) {
    std::vector<Token> out;
    Cursor c{source, filename};

    auto push = [&](TokenKind k, std::string text, SourceLoc loc, int64_t num = 0) {
        out.push_back(Token{k, std::move(text), num, std::move(loc)});
    };

    while (!c.done()) {
        char ch = c.peek();
        if (std::isspace(static_cast<unsigned char>(ch))) {
            c.take();
            continue;
        }
        if (ch == '/' && c.peek(1) == '/') {
            while (!c.done() && c.peek() != '\n') c.take();
            continue;
        }
        SourceLoc loc = c.loc();

        if (ch == '#') {
            c.take();
            std::string word;
            while (!c.done() && identBody(c.peek())) word += c.take();
            if (word != "include" && word != "require")
                throw ParseError(loc, "unknown directive '#" + word + "'", "#include or #require");
            push(TokenKind::Directive, "#" + word, loc);
            continue;
        }

        if (ch == '[') {
            c.take();
            std::string text = "[";
            while (!c.done() && c.peek() != ']') text += c.take();
            if (c.done()) throw ParseError(loc, "unterminated bracketed identifier", "]");
            c.take();
            text += ']';
            push(TokenKind::BracketedIdent, std::move(text), loc);
            continue;
        }

        if (ch == '"') {
            c.take();
            std::string text;
            while (!c.done() && c.peek() != '"') {
                char x = c.take();
                if (x == '\\' && !c.done()) x = c.take();
                text += x;
            }
            if (c.done()) throw ParseError(loc, "unterminated string literal", "\"");
            c.take();
            push(TokenKind::StrLit, std::move(text), loc);
            continue;
        }

        if (std::isdigit(static_cast<unsigned char>(ch))) {
            std::string digits;
            while (!c.done() && std::isdigit(static_cast<unsigned char>(c.peek()))) digits += c.take();
            push(TokenKind::IntLit, digits, loc, std::stoll(digits));
            continue;
        }

        if (identStart(ch)) {
            std::string text;
            text += c.take();
            for (;;) {
                if (!c.done() && identBody(c.peek())) {
                    text += c.take();
                    continue;
                }
                // interior hyphen joins only when a letter follows directly
                if (c.peek() == '-' && identStart(c.peek(1))) {
                    text += c.take();
                    continue;
                }
                break;
            }
            while (c.peek() == '\'') text += c.take();
            if (keywordSet().count(text))
                push(TokenKind::Keyword, std::move(text), loc);
            else
                push(TokenKind::Ident, std::move(text), loc);
            continue;
        }

        auto two = [&](const char* op) {
            c.take();
            c.take();
            push(TokenKind::Op, op, loc);
        };
        char n = c.peek(1);
        if (ch == '=' && n == '=') { two("=="); continue; }
        if (ch == '!' && n == '=') { two("!="); continue; }
        if (ch == '<' && n == '=') { two("<="); continue; }
        if (ch == '>' && n == '=') { two(">="); continue; }
        if (ch == '&' && n == '&') { two("&&"); continue; }
        if (ch == '|' && n == '|') { two("||"); continue; }
        if (ch == '.' && n == '.') { two(".."); continue; }
        if (ch == '?' && n == '-') { two("?-"); continue; }
        // A dot glued to an identifier is a projection; anything else is the
        // fragment terminator. `bid.object` projects, `end-bidding(David).`
        // terminates.
        if (ch == '.' && (identStart(n) || n == '[')) {
            c.take();
            push(TokenKind::Op, ".", loc);
            continue;
        }

        switch (ch) {
            case '<': case '>': case '+': case '-': case '*': case '/': case '=': case '?':
                c.take();
                push(TokenKind::Op, std::string(1, ch), loc);
                continue;
            case '.': case ',': case ':': case '(': case ')': case '{': case '}':
                c.take();
                push(TokenKind::Punct, std::string(1, ch), loc);
                continue;
            default:
                throw ParseError(loc, std::string("unexpected character '") + ch + "'");
        }
    }

    push(TokenKind::End, "", c.loc());
    return out;
}

} // namespace normspec
