#pragma once

#include "gasrepair/gas/formula.hpp"
#include "gasrepair/lang/ast.hpp"
#include "gasrepair/testgen/records.hpp"
#include "gasrepair/vm/cost.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace gasrepair {

// Declared-slot count as a polynomial over trip variables: monomial -> coeff,
// with the empty monomial as the constant part.
using CountExpr = std::map<std::vector<std::string>, int64_t>;

// One charged step, abstracted over loop iterations. The charge is applied
// once per combination of the factors in `mult`; a true flag marks a factor
// charged one extra time (loop conditions execute trips+1 times).
struct AbsStep {
    OpKind op = OpKind::Literal;
    std::vector<std::pair<std::string, bool>> mult;
    CountExpr declCount;     // VarDeclStmt only: slots before this declaration
    bool declVaries = false; // the count itself changes across iterations
};

// Statement-level signature element; `at` addresses the source tree for
// patch-location masking, `text` is position-independent content.
struct SigStep {
    NodePath at;
    std::string text;
};

struct GasPath {
    std::string function;
    std::vector<AbsStep> steps;
    std::vector<SigStep> sig;
    std::vector<std::string> loopVars; // trip variables in entry order
};

struct PathSet {
    std::vector<GasPath> paths;
};

struct PathExplosion : std::runtime_error {
    size_t cap;
    explicit PathExplosion(size_t cap_)
        : std::runtime_error("path enumeration exceeded the cap of " + std::to_string(cap_) +
                             " paths"),
          cap(cap_) {}
};

// One path per acyclic branch resolution per function. Loops are summarized
// once per body resolution with a symbolic trip variable (n1, n2, ... in
// document order of the loop); a body resolution that returns produces a
// separate first-iteration-exit path instead. Literal-false conditions are
// pruned. Throws PathExplosion above `cap` total paths.
PathSet enumeratePaths(const Contract& c, size_t cap = 512);

// Exact mirror of the interpreter's charging for one path; loop-body terms
// are multiplied by the trip variable. Storage writes of statically unknown
// values price as non-zero stores. With a quadratic memory table, memory
// growth at loop-dependent slot counts appears as opaque atoms; the linear
// (default) table never needs them.
GasFormula pathGasFormula(const GasPath& p, const CostTable& tbl);

// Probability-weighted sum over every path of every function. Empty weights
// mean uniform; otherwise one weight per path in enumeration order.
GasFormula expectedGasFormula(const Contract& c, const CostTable& tbl,
                              const std::vector<Rat>& weights = {}, size_t cap = 512);

struct LifespanEntry {
    Status status = Status::Success;
    uint64_t gasUsed = 0;
    bool replayed = false;
    std::string note; // nonempty when the replay diverged from the record
};

struct LifespanResult {
    uint64_t totalGas = 0;
    std::vector<LifespanEntry> perTx;
};

// Replays each record independently on its captured pre-state and sums the
// concrete gas; divergences are reported per transaction, never thrown.
LifespanResult lifespanGas(const Contract& c, const std::vector<TransactionRecord>& log,
                           const CostTable& tbl, uint64_t gasLimit = 1'000'000);

struct PathPartition {
    std::vector<std::pair<size_t, size_t>> joint;    // identical content (old, new)
    std::vector<std::pair<size_t, size_t>> repaired; // differ only at changed positions
    std::vector<size_t> removed;                     // old-only paths
    std::vector<size_t> fresh;                       // new-only paths
};

PathPartition classifyPaths(const PathSet& oldPaths, const PathSet& newPaths,
                            const Contract& cOld, const Contract& cNew);
PathPartition classifyPaths(const Contract& cOld, const Contract& cNew, size_t cap = 512);

struct ReducedComparison {
    DominanceVerdict verdict = DominanceVerdict::NoDominance; // old as A, new as B
    PathPartition partition;
    GasFormula fullOld, fullNew; // uniform-weight expectations
    GasFormula diffOld, diffNew; // contributions of the non-joint paths
    size_t reusedFormulas = 0;   // joint paths whose formula was shared, not rebuilt
};

// Dominance comparison that shares formulas across syntactically identical
// paths instead of rebuilding them; the verdict always equals the one from
// comparing the two full expected-gas formulas.
ReducedComparison reducedCompare(const Contract& cOld, const Contract& cNew,
                                 const CostTable& tbl, size_t cap = 512);

} // namespace gasrepair
