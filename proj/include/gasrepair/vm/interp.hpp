#pragma once

#include "gasrepair/lang/ast.hpp"
#include "gasrepair/testgen/records.hpp"
#include "gasrepair/vm/cost.hpp"

#include <map>
#include <set>
#include <stdexcept>

namespace gasrepair {

struct Account {
    U256 balance = 0;
    std::map<std::string, U256> storage;

    bool operator==(const Account&) const = default;
};

struct WorldState {
    std::map<U256, Account> accounts;

    U256 balanceOf(const U256& addr) const {
        auto it = accounts.find(addr);
        return it == accounts.end() ? U256(0) : it->second.balance;
    }
    U256 totalBalance() const {
        U256 sum = 0;
        for (const auto& [a, acct] : accounts) sum += acct.balance;
        return sum;
    }
};

// Thrown for calls that cannot even start (unknown function, malformed args).
struct VmSetupError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AdversaryConfig {
    U256 address = 0;
    std::string reenterFunction;
    std::vector<U256> args;
};

struct ExecutionEnv {
    U256 caller = 0;
    U256 callValue = 0;
    std::string function;
    std::vector<U256> args;
    uint64_t gasLimit = 1'000'000;
    U256 contractAddress = 1;
    // Enabled only by detector-confirmation and corpus tests.
    std::optional<AdversaryConfig> adversary;
};

struct TraceStep {
    NodePath node;
    OpKind op = OpKind::Literal;
    // LoopBranch: iteration index; BranchIf: taken; VarDeclStmt: slot count
    // before the declaration. Zero otherwise.
    uint64_t aux = 0;
};

struct ExecFlags {
    std::vector<NodePath> overflowWrapped;
    std::vector<NodePath> uncheckedSendFailed;
};

struct ExecutionResult {
    WorldState post;
    std::optional<U256> returnValue;
    uint64_t gasUsed = 0;
    Status status = Status::Success;
    ExecFlags flags;
    std::vector<TraceStep> trace;
    // Accounts whose balance and slots of the contract account that were
    // read or written; drives slice capture in recording mode.
    std::set<U256> touchedBalances;
    std::set<std::string> touchedSlots;
};

// World with state-variable initializers applied to the contract account.
WorldState deployState(const Contract& c, const U256& contractAddress = 1);

std::string slotKey(const std::string& varName);
std::string slotKey(const std::string& mappingName, const U256& key);

ExecutionResult execute(const Contract& c, const WorldState& world, const ExecutionEnv& env,
                        const CostTable& costs);

struct TestResult {
    bool pass = false;
    std::string mismatch; // empty when passing
    uint64_t gasUsed = 0;
};

TestResult runTest(const Contract& c, const TestCase& t, const CostTable& costs,
                   uint64_t gasLimit = 1'000'000);

WorldState worldFromSlice(const StateSlice& slice);

} // namespace gasrepair
