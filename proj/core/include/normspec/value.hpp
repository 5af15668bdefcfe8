#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace normspec {

// Atomic field payload: a signed 64-bit integer or a string.
// The total order (all numbers before all strings, numbers by value, strings
// lexicographic) fixes the canonical enumeration order everywhere.
class Literal {
public:
    Literal() : v_(int64_t{0}) {}
    explicit Literal(int64_t n) : v_(n) {}
    explicit Literal(std::string s) : v_(std::move(s)) {}

    bool isNum() const { return std::holds_alternative<int64_t>(v_); }
    bool isStr() const { return std::holds_alternative<std::string>(v_); }
    int64_t num() const { return std::get<int64_t>(v_); }
    const std::string& str() const { return std::get<std::string>(v_); }

    std::strong_ordering operator<=>(const Literal& o) const {
        if (isNum() != o.isNum()) return isNum() ? std::strong_ordering::less : std::strong_ordering::greater;
        if (isNum()) return num() <=> o.num();
        return str().compare(o.str()) <=> 0;
    }
    bool operator==(const Literal& o) const { return (*this <=> o) == 0; }

private:
    std::variant<int64_t, std::string> v_;
};

struct Value;

// A fully ground member of a declared type: name plus ordered field values.
struct Instance {
    std::string type;
    std::vector<Value> args;

    Instance() = default;
    Instance(std::string t, std::vector<Value> a) : type(std::move(t)), args(std::move(a)) {}

    std::strong_ordering operator<=>(const Instance& o) const;
    bool operator==(const Instance& o) const { return (*this <=> o) == 0; }
};

// A field value: either an atomic literal or a nested instance.
struct Value {
    std::variant<Literal, Instance> v;

    Value() : v(Literal{}) {}
    Value(Literal l) : v(std::move(l)) {}
    Value(Instance i) : v(std::move(i)) {}

    bool isLiteral() const { return std::holds_alternative<Literal>(v); }
    bool isInstance() const { return std::holds_alternative<Instance>(v); }
    const Literal& literal() const { return std::get<Literal>(v); }
    const Instance& instance() const { return std::get<Instance>(v); }

    std::strong_ordering operator<=>(const Value& o) const;
    bool operator==(const Value& o) const { return (*this <=> o) == 0; }
};

// Source-style rendering: bare atoms where possible, full nesting otherwise.
// `display(object(Watch))`, `min-price-of(Watch, 100)` -> see printer.cpp for
// the quoting rule shared with the parser.
std::string to_string(const Literal& lit);
std::string to_string(const Value& val);
std::string to_string(const Instance& inst);

} // namespace normspec
