#pragma once

#include "gasrepair/lang/ast.hpp"

namespace gasrepair {

// Deterministic canonical rendering; parse(prettyPrint(c)) is structurally
// identical to c. Also the basis of content hashes.
std::string prettyPrint(const Contract& c);
std::string printExpr(const Expr& e);
std::string printStmt(const Stmt& s, int indent = 0);

uint64_t contentHash(const Contract& c);

} // namespace gasrepair
