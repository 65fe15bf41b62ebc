#pragma once

#include "gasrepair/lang/ast.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <set>

namespace gasrepair {

enum class EditKind : uint8_t { Move, Insert, Replace };

const char* editKindName(EditKind k);
std::optional<EditKind> editKindFromName(const std::string& s);

// One tree surgery. Paths address the tree the edit is applied to.
//  Move:    src = statement to relocate, dst = block path + insertion index
//  Insert:  dst as above, stmt = the new statement
//  Replace: src = node to swap out, expr or stmt = the new node
struct EditOp {
    EditKind kind = EditKind::Replace;
    NodePath src;
    NodePath dst;
    std::optional<Stmt> stmt;
    std::optional<Expr> expr;
};

// An edit chain rooted at the unmodified contract.
struct Patch {
    uint64_t baseHash = 0;
    std::vector<EditOp> edits;

    std::set<EditKind> kinds() const;
};

// Applies one edit in place; false leaves the contract unspecified.
bool applyEdit(Contract& c, const EditOp& e);

// Replays the chain on a copy of the base; nullopt if any edit fails.
// Each applied edit bumps the generation.
std::optional<Contract> applyPatch(const Contract& base, const Patch& p);

// Tree distance: over the union of node positions of both trees, count
// positions present in only one tree plus positions whose labels differ.
size_t treeDiff(const Contract& a, const Contract& b);

nlohmann::json patchToJson(const Patch& p);
std::optional<Patch> patchFromJson(const nlohmann::json& j, std::string* error = nullptr);

} // namespace gasrepair
