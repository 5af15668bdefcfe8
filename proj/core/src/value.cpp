#include "normspec/value.hpp"

#include <cctype>

namespace normspec {

std::strong_ordering Instance::operator<=>(const Instance& o) const {
    if (auto c = type.compare(o.type) <=> 0; c != 0) return c;
    size_t n = args.size() < o.args.size() ? args.size() : o.args.size();
    for (size_t i = 0; i < n; ++i)
        if (auto c = args[i] <=> o.args[i]; c != 0) return c;
    return args.size() <=> o.args.size();
}

std::strong_ordering Value::operator<=>(const Value& o) const {
    // Literals sort before nested instances.
    if (isLiteral() != o.isLiteral())
        return isLiteral() ? std::strong_ordering::less : std::strong_ordering::greater;
    if (isLiteral()) return literal() <=> o.literal();
    return instance() <=> o.instance();
}

namespace {

bool isPlainAtom(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (size_t i = 1; i < s.size(); ++i) {
        char c = s[i];
        bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
        // interior hyphens are fine, trailing ones are not
        if (c == '-' && i + 1 < s.size()) ok = true;
        if (!ok) return false;
    }
    return true;
}

void quote(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
}

} // namespace

std::string to_string(const Literal& lit) {
    if (lit.isNum()) return std::to_string(lit.num());
    std::string out;
    if (isPlainAtom(lit.str())) return lit.str();
    quote(out, lit.str());
    return out;
}

std::string to_string(const Value& val) {
    return val.isLiteral() ? to_string(val.literal()) : to_string(val.instance());
}

std::string to_string(const Instance& inst) {
    std::string out = inst.type;
    out += '(';
    for (size_t i = 0; i < inst.args.size(); ++i) {
        if (i) out += ", ";
        out += to_string(inst.args[i]);
    }
    out += ')';
    return out;
}

} // namespace normspec
