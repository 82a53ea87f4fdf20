#pragma once

#include "lexer.hpp"
#include "pol/regex.hpp"

namespace pol::detail {

// Parses an observation expression starting at the lexer's current token and
// stops at the first token that cannot continue it.
Regex parse_regex_expr(Lexer& lex);

}  // namespace pol::detail
