#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "normspec/diag.hpp"

namespace normspec {

enum class TokenKind {
    Keyword,
    Ident,
    BracketedIdent, // `[valid marriage]`, spaces allowed, stored with brackets
    StrLit,
    IntLit,
    Op,        // == != <= >= < > + - * / && || = ..
    Punct,     // . , : ( ) { }
    Directive, // #include / #require
    End,
};

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    int64_t num = 0;
    SourceLoc loc;

    bool is(TokenKind k) const { return kind == k; }
    bool is(TokenKind k, const char* t) const { return kind == k && text == t; }
    bool isKeyword(const char* t) const { return is(TokenKind::Keyword, t); }
    bool isOp(const char* t) const { return is(TokenKind::Op, t); }
    bool isPunct(const char* t) const { return is(TokenKind::Punct, t); }
};

bool isKeywordText(const std::string& text);

// Full-source tokenizer. Newlines are plain whitespace; `//` comments run to
// end of line. Identifiers may contain interior hyphens (`min-price-of`) when
// the hyphen is directly followed by a letter, and trailing primes (`bid'`).
std::vector<Token> tokenize(const std::string& source, const std::string& filename);

} // namespace normspec
