#include "gasrepair/vm/cost.hpp"

#include "gasrepair/util/hash.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gasrepair {

const char* opKindName(OpKind k) {
    switch (k) {
        case OpKind::CallBase: return "callBase";
        case OpKind::Literal: return "literal";
        case OpKind::LocalRead: return "localRead";
        case OpKind::StateRead: return "stateRead";
        case OpKind::MappingRead: return "mappingRead";
        case OpKind::EnvRead: return "envRead";
        case OpKind::BalanceRead: return "balanceRead";
        case OpKind::Arith: return "arith";
        case OpKind::MulDiv: return "mulDiv";
        case OpKind::Compare: return "compare";
        case OpKind::Logic: return "logic";
        case OpKind::NotOp: return "not";
        case OpKind::SendCall: return "sendCall";
        case OpKind::VarDeclStmt: return "varDecl";
        case OpKind::AssignLocal: return "assignLocal";
        case OpKind::MappingStoreExtra: return "mappingStoreExtra";
        case OpKind::SstoreZero: return "sstoreZero";
        case OpKind::SstoreNonzero: return "sstoreNonzero";
        case OpKind::BranchIf: return "branchIf";
        case OpKind::LoopEntry: return "loopEntry";
        case OpKind::LoopBranch: return "loopBranch";
        case OpKind::LoopIter: return "loopIter";
        case OpKind::RequireStmt: return "require";
        case OpKind::ReturnStmt: return "return";
        case OpKind::ExprStmtDrop: return "exprStmtDrop";
    }
    return "?";
}

static const std::pair<OpKind, uint64_t> kDefaults[] = {
    {OpKind::CallBase, 21000},
    {OpKind::Literal, 3},
    {OpKind::LocalRead, 3},
    {OpKind::StateRead, 50},
    {OpKind::MappingRead, 80},
    {OpKind::EnvRead, 2},
    {OpKind::BalanceRead, 20},
    {OpKind::Arith, 3},
    {OpKind::MulDiv, 5},
    {OpKind::Compare, 3},
    {OpKind::Logic, 3},
    {OpKind::NotOp, 3},
    {OpKind::SendCall, 700},
    {OpKind::VarDeclStmt, 3},
    {OpKind::AssignLocal, 3},
    {OpKind::MappingStoreExtra, 30},
    {OpKind::SstoreZero, 4},
    {OpKind::SstoreNonzero, 68},
    {OpKind::BranchIf, 10},
    {OpKind::LoopEntry, 2},
    {OpKind::LoopBranch, 10},
    {OpKind::LoopIter, 8},
    {OpKind::RequireStmt, 10},
    {OpKind::ReturnStmt, 5},
    {OpKind::ExprStmtDrop, 2},
};

uint64_t CostTable::get(OpKind k) const {
    auto it = entries.find(opKindName(k));
    return it == entries.end() ? 0 : it->second;
}

uint64_t CostTable::memCumulative(uint64_t slots) const {
    uint64_t quad = memQuadDen == 0 ? 0 : memQuadNum * slots * slots / memQuadDen;
    return memSlope * slots + quad;
}

uint64_t CostTable::memMarginal(uint64_t slotsBefore) const {
    return memCumulative(slotsBefore + 1) - memCumulative(slotsBefore);
}

CostTable CostTable::defaults() {
    CostTable t;
    for (const auto& [k, v] : kDefaults) t.entries[opKindName(k)] = v;
    return t;
}

CostTable CostTable::fromJsonFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open cost table: " + path);
    nlohmann::json j;
    in >> j;
    CostTable t = defaults();
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        if (key == "memSlope") {
            t.memSlope = it.value().get<uint64_t>();
        } else if (key == "memQuadNum") {
            t.memQuadNum = it.value().get<uint64_t>();
        } else if (key == "memQuadDen") {
            t.memQuadDen = it.value().get<uint64_t>();
        } else if (t.entries.count(key)) {
            t.entries[key] = it.value().get<uint64_t>();
        } else {
            throw std::runtime_error("unknown cost table key: " + key);
        }
    }
    return t;
}

std::string CostTable::canonicalText() const {
    std::ostringstream os;
    for (const auto& [k, v] : entries) os << k << "=" << v << "\n";
    os << "memSlope=" << memSlope << "\nmemQuadNum=" << memQuadNum << "\nmemQuadDen=" << memQuadDen
       << "\n";
    return os.str();
}

uint64_t CostTable::hash() const { return fnv1a64(canonicalText()); }

uint64_t instructionGas(const CostTable& t, OpKind k, uint64_t memSlotsBefore) {
    uint64_t g = t.get(k);
    if (k == OpKind::VarDeclStmt) g += t.memMarginal(memSlotsBefore);
    return g;
}

} // namespace gasrepair
