#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "normspec/ast.hpp"

namespace normspec {

// Maps `#include`/`#require` paths to file contents. `fromFile` is the file
// the directive appears in, for relative resolution.
struct IncludeResolver {
    std::function<std::optional<std::string>(const std::string& path, const std::string& fromFile)> load;
    std::function<std::string(const std::string& path, const std::string& fromFile)> canonical;
};

// Returns a filesystem-backed resolver rooted at the including file's directory.
IncludeResolver fileIncludeResolver();

// Parses a whole program into its top-level fragment sequence. `#include`
// splices the target's fragments in place; `#require` splices only the first
// time a canonical path is seen.
std::vector<PhrasePtr> parse_program(const std::string& source,
                                     const std::string& filename = "<input>",
                                     const IncludeResolver* resolver = nullptr);

// Parses a single expression (used by the service protocol and search specs).
ExprPtr parse_expression(const std::string& source, const std::string& filename = "<expr>");

} // namespace normspec
