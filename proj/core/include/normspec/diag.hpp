#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace normspec {

struct SourceLoc {
    std::string file;
    int line = 0;
    int column = 0;

    std::string str() const {
        if (file.empty() && line == 0) return "<unknown>";
        return file + ":" + std::to_string(line) + ":" + std::to_string(column);
    }
};

// Base for all diagnostics raised by the language pipeline.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : Error {
    SourceLoc loc;
    std::string expected; // human-readable expected-token set

    ParseError(SourceLoc l, const std::string& msg, std::string exp = {})
        : Error(l.str() + ": " + msg), loc(std::move(l)), expected(std::move(exp)) {}
};

struct IncludeCycleError : Error {
    using Error::Error;
};

struct MissingFileError : Error {
    using Error::Error;
};

struct TypeError : Error {
    using Error::Error;
};

struct EvalError : Error {
    using Error::Error;
};

// Interrupts are not failures: they signal that reasoning needs input the
// knowledge base does not contain (open types). Callers may resolve them by
// supplying additional input and retrying.
struct EvalInterrupt : Error {
    using Error::Error;
};

// Truth of a specific instance of an open type was required but is Unknown.
struct UnknownInstanceInterrupt : EvalInterrupt {
    std::string instanceText;

    explicit UnknownInstanceInterrupt(std::string inst)
        : EvalInterrupt("unknown instance: " + inst), instanceText(std::move(inst)) {}
};

// The full extension of an open type with an infinite domain was required.
struct OpenEnumerationInterrupt : EvalInterrupt {
    std::string typeName;

    explicit OpenEnumerationInterrupt(std::string type)
        : EvalInterrupt("cannot enumerate open type with infinite domain: " + type),
          typeName(std::move(type)) {}
};

struct StratificationError : Error {
    std::string cycleText; // `a -[neg]-> b -> ... -> a`

    explicit StratificationError(std::string cycle)
        : Error("specification is not stratified: " + cycle), cycleText(std::move(cycle)) {}
};

struct FixpointBudgetError : Error {
    using Error::Error;
};

struct UniverseTooLargeError : Error {
    using Error::Error;
};

} // namespace normspec
