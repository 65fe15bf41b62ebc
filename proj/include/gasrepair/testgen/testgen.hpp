#pragma once

#include "gasrepair/testgen/records.hpp"
#include "gasrepair/vm/interp.hpp"

#include <nlohmann/json_fwd.hpp>

#include <chrono>
#include <iosfwd>
#include <optional>

namespace gasrepair {

// Fixture world plus an ordered call list; stands in for on-chain history.
struct Scenario {
    std::map<U256, U256> balances; // fixture funding on top of deployState
    std::vector<CallTuple> calls;
};

std::optional<Scenario> scenarioFromJson(const nlohmann::json& j, std::string* error = nullptr);
std::optional<Scenario> scenarioFromFile(const std::string& path, std::string* error = nullptr);

// Runs the scenario on an evolving world, capturing per-call slices of the
// touched accounts before and after. Failed requires are still recorded;
// calls that cannot start at all throw.
std::vector<TransactionRecord> recordTransactions(const Contract& c, const Scenario& s,
                                                  const CostTable& costs,
                                                  uint64_t gasLimit = 1'000'000);

struct Discard {
    size_t index = 0;
    std::string reason;
};

struct GeneratedSuite {
    std::vector<TestCase> tests;
    std::vector<Discard> discards;
};

// Replays each record against the contract; records whose replay reproduces
// the captured post-state, return value, and status become test cases, the
// rest are discarded with the mismatch as reason.
GeneratedSuite generateTests(const Contract& c, const std::vector<TransactionRecord>& log,
                             const CostTable& costs,
                             std::chrono::milliseconds perTestTimeout = std::chrono::seconds(5),
                             uint64_t gasLimit = 1'000'000);

nlohmann::json recordToJson(const TransactionRecord& r);
std::optional<TransactionRecord> recordFromJson(const nlohmann::json& j,
                                                std::string* error = nullptr);
nlohmann::json testToJson(const TestCase& t);
std::optional<TestCase> testFromJson(const nlohmann::json& j, std::string* error = nullptr);

// JSON-lines: one record per line, blank lines ignored.
void writeRecordsJsonl(std::ostream& out, const std::vector<TransactionRecord>& log);
std::optional<std::vector<TransactionRecord>> readRecordsJsonl(std::istream& in,
                                                               std::string* error = nullptr);
void writeTestsJsonl(std::ostream& out, const std::vector<TestCase>& tests);
std::optional<std::vector<TestCase>> readTestsJsonl(std::istream& in,
                                                    std::string* error = nullptr);
std::optional<std::vector<TestCase>> readTestsFile(const std::string& path,
                                                   std::string* error = nullptr);

} // namespace gasrepair
