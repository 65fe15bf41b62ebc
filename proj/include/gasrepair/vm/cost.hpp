#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace gasrepair {

// One entry per charged step kind. Storage writes are split by written value;
// static pricing uses the non-zero entry when the value is not statically known.
enum class OpKind : uint8_t {
    CallBase,
    Literal,
    LocalRead,
    StateRead,
    MappingRead,
    EnvRead, // msg.sender / msg.value
    BalanceRead,
    Arith, // + -
    MulDiv,
    Compare, // < <= > >= == !=
    Logic,   // && || (no short-circuit)
    NotOp,
    SendCall,
    VarDeclStmt,
    AssignLocal,
    MappingStoreExtra,
    SstoreZero,
    SstoreNonzero,
    BranchIf,
    LoopEntry,
    LoopBranch,
    LoopIter,
    RequireStmt,
    ReturnStmt,
    ExprStmtDrop,
};

const char* opKindName(OpKind k);

struct CostTable {
    std::map<std::string, uint64_t> entries;

    // Memory expansion: cumulative cost of m local slots is
    // memSlope*m + memQuadNum*m*m/memQuadDen (integer division).
    // Defaults to the affine model.
    uint64_t memSlope = 3;
    uint64_t memQuadNum = 0;
    uint64_t memQuadDen = 512;

    uint64_t get(OpKind k) const;
    uint64_t memCumulative(uint64_t slots) const;
    uint64_t memMarginal(uint64_t slotsBefore) const;

    static CostTable defaults();
    // Reads a JSON object {name: integer, ...}; unknown keys are an error,
    // missing keys keep their defaults.
    static CostTable fromJsonFile(const std::string& path);

    std::string canonicalText() const;
    uint64_t hash() const;
};

// Base cost plus any memory growth for a single charged step; memSlotsBefore
// only matters for VarDeclStmt.
uint64_t instructionGas(const CostTable& t, OpKind k, uint64_t memSlotsBefore = 0);

} // namespace gasrepair
