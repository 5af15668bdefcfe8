#pragma once

#include <string>

#include "normspec/ast.hpp"

namespace normspec {

// Canonical source rendering. parse(print_phrase(p)) is structurally equal
// to p; printing is the one true formatter for diagnostics and goldens.
std::string print_expr(const ExprPtr& expr);
std::string print_phrase(const PhrasePtr& phrase); // includes the trailing '.'
std::string print_program(const std::vector<PhrasePtr>& phrases);

} // namespace normspec
