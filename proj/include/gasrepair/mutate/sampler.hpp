#pragma once

#include "gasrepair/lang/typecheck.hpp"
#include "gasrepair/mutate/patch.hpp"
#include "gasrepair/util/rng.hpp"

#include <set>

namespace gasrepair {

// The seven operator sets workers draw from. A finished candidate belongs to
// the one space whose operators it used, exactly.
struct SpaceDef {
    const char* name;
    std::set<EditKind> ops;
};

const std::vector<SpaceDef>& allSpaces(); // size 7, fixed order
size_t spaceCount();

// A candidate is valid for a space iff its edit kinds match the set exactly.
bool spaceAccepts(size_t spaceIdx, const std::set<EditKind>& sigma);

// A worker may extend a chain iff what it has used so far stays inside the
// space and at most one operator of the space is still unused; the next edit
// then comes from the unused operators first.
bool spaceEligible(size_t spaceIdx, const std::set<EditKind>& sigma);
std::vector<EditKind> nextOps(size_t spaceIdx, const std::set<EditKind>& sigma);

// Every single edit this operator kind can perform on the contract, in
// deterministic order: sites overlapping a hint first, then document order.
std::vector<EditOp> enumerateEdits(const Contract& c, EditKind kind,
                                   const std::vector<NodePath>& hints);

struct MutantResult {
    Contract tree;
    Patch patch;
};

struct MutateRequest {
    const Contract* base = nullptr;    // generation-zero contract
    const Contract* current = nullptr; // tree the chain produced so far
    Patch history;                     // chain producing `current`
    std::vector<NodePath> hints;       // detector locations on `current`
    uint64_t seed = 0;
    std::set<uint64_t>* seen = nullptr; // worker-local content hashes already emitted
};

// Draws the next fresh, well-typed mutant for the worker's space, or nullopt
// once the neighborhood is exhausted. Fresh means the new tree differs from
// every intermediate tree of the chain and from everything in `seen`.
std::optional<MutantResult> sampleMutant(size_t spaceIdx, const MutateRequest& req);

// Distance objective between the original and a candidate.
size_t mutationDistance(const Contract& base, const Contract& candidate);

} // namespace gasrepair
