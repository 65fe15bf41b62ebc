#pragma once

#include "gasrepair/lang/ast.hpp"

#include <map>

namespace gasrepair {

struct TypeError {
    NodeId node;
    std::string message;
};

enum class VarKind : uint8_t { State, Param, Local };

struct ScopeVar {
    std::string name;
    Type type = Type::UInt;
    VarKind kind = VarKind::Local;
};

// Static facts the mutation samplers need: the type of every expression and
// the variables in scope at every statement boundary.
struct Analysis {
    std::map<NodePath, Type> exprTypes;
    std::map<NodePath, std::vector<ScopeVar>> scopeBefore; // keyed by statement path
    std::map<NodePath, std::vector<ScopeVar>> scopeAtEnd;  // keyed by block path
};

struct CheckResult {
    std::vector<TypeError> errors;
    Analysis analysis;

    bool ok() const { return errors.empty(); }
};

// Total over parseable inputs: reports all violations, never throws.
CheckResult typecheck(const Contract& c);

struct Sites {
    std::vector<NodeId> stmtSites; // Move sources and Insert anchors
    std::vector<NodeId> exprSites; // Replace targets
};

// Document order; when hint paths are given (detector locations), sites
// overlapping a hint are listed first, preserving document order per tier.
Sites mutableSites(const Contract& c, const std::vector<NodePath>& hints = {});

// Longest proper prefix of `path` that is a statement node, if any.
std::optional<NodePath> enclosingStmtPath(const Contract& c, const NodePath& path);

} // namespace gasrepair
