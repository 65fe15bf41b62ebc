#pragma once

#include "gasrepair/lang/ast.hpp"
#include "gasrepair/lang/lexer.hpp"

namespace gasrepair {

// Recursive-descent parser for MiniSol (grammar in docs/minisol.md).
// Throws ParseError with line/column on malformed input.
Contract parse(const std::string& source);

// Convenience for synthesized fragments used by tests and tooling.
Expr parseExpression(const std::string& source);
Stmt parseStatement(const std::string& source);

} // namespace gasrepair
