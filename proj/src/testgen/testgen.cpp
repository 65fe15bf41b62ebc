#include "gasrepair/testgen/testgen.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace gasrepair {

namespace {

using nlohmann::json;

std::string u256Text(const U256& v) { return v.str(); }

std::optional<U256> u256FromText(const std::string& s) {
    if (s.empty()) return std::nullopt;
    try {
        if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) return U256(s);
        for (char ch : s)
            if (!isdigit(static_cast<unsigned char>(ch))) return std::nullopt;
        return U256(s);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

bool fail(std::string* error, const std::string& msg) {
    if (error) *error = msg;
    return false;
}

std::optional<U256> getU256(const json& j, const char* key, std::string* error) {
    if (!j.contains(key) || !j[key].is_string()) {
        fail(error, std::string("missing or non-string '") + key + "'");
        return std::nullopt;
    }
    auto v = u256FromText(j[key].get<std::string>());
    if (!v) fail(error, std::string("bad number in '") + key + "'");
    return v;
}

json sliceToJson(const StateSlice& s) {
    json accounts = json::object();
    for (const auto& [addr, acct] : s.accounts) {
        json a;
        a["balance"] = u256Text(acct.balance);
        json storage = json::object();
        for (const auto& [k, v] : acct.storage) storage[k] = u256Text(v);
        a["storage"] = std::move(storage);
        accounts[addrToString(addr)] = std::move(a);
    }
    return accounts;
}

bool sliceFromJson(const json& j, StateSlice& out, std::string* error) {
    if (!j.is_object()) return fail(error, "state slice must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        auto addr = u256FromText(it.key());
        if (!addr) return fail(error, "bad account address '" + it.key() + "'");
        const json& a = it.value();
        AccountSlice acct;
        if (a.contains("balance")) {
            auto b = getU256(a, "balance", error);
            if (!b) return false;
            acct.balance = *b;
        }
        if (a.contains("storage")) {
            if (!a["storage"].is_object()) return fail(error, "storage must be an object");
            for (auto st = a["storage"].begin(); st != a["storage"].end(); ++st) {
                if (!st.value().is_string()) return fail(error, "storage values must be strings");
                auto v = u256FromText(st.value().get<std::string>());
                if (!v) return fail(error, "bad storage value at '" + st.key() + "'");
                acct.storage[st.key()] = *v;
            }
        }
        out.accounts[*addr] = std::move(acct);
    }
    return true;
}

json callToJson(const CallTuple& c) {
    json j;
    j["caller"] = addrToString(c.caller);
    j["value"] = u256Text(c.value);
    j["function"] = c.function;
    json args = json::array();
    for (const U256& a : c.args) args.push_back(u256Text(a));
    j["args"] = std::move(args);
    return j;
}

bool callFromJson(const json& j, CallTuple& out, std::string* error) {
    if (!j.is_object()) return fail(error, "call must be an object");
    auto caller = getU256(j, "caller", error);
    if (!caller) return false;
    out.caller = *caller;
    out.value = 0;
    if (j.contains("value")) {
        auto v = getU256(j, "value", error);
        if (!v) return false;
        out.value = *v;
    }
    if (!j.contains("function") || !j["function"].is_string())
        return fail(error, "missing or non-string 'function'");
    out.function = j["function"].get<std::string>();
    out.args.clear();
    if (j.contains("args")) {
        if (!j["args"].is_array()) return fail(error, "'args' must be an array");
        for (const json& a : j["args"]) {
            if (!a.is_string()) return fail(error, "args must be strings");
            auto v = u256FromText(a.get<std::string>());
            if (!v) return fail(error, "bad number in args");
            out.args.push_back(*v);
        }
    }
    return true;
}

bool recordFields(const json& j, TransactionRecord& out, std::string* error) {
    if (!j.is_object()) return fail(error, "record must be an object");
    if (!j.contains("pre") || !sliceFromJson(j["pre"], out.preState, error)) {
        if (error && error->empty()) *error = "missing 'pre'";
        return false;
    }
    if (!j.contains("call") || !callFromJson(j["call"], out.call, error)) {
        if (error && error->empty()) *error = "missing 'call'";
        return false;
    }
    if (!j.contains("post") || !sliceFromJson(j["post"], out.postState, error)) {
        if (error && error->empty()) *error = "missing 'post'";
        return false;
    }
    out.returnValue.reset();
    if (j.contains("return") && !j["return"].is_null()) {
        auto v = getU256(j, "return", error);
        if (!v) return false;
        out.returnValue = *v;
    }
    out.status = Status::Success;
    if (j.contains("status")) {
        if (!j["status"].is_string()) return fail(error, "'status' must be a string");
        auto s = statusFromName(j["status"].get<std::string>());
        if (!s) return fail(error, "unknown status '" + j["status"].get<std::string>() + "'");
        out.status = *s;
    }
    return true;
}

json recordBody(const TransactionRecord& r) {
    json j;
    j["pre"] = sliceToJson(r.preState);
    j["call"] = callToJson(r.call);
    j["post"] = sliceToJson(r.postState);
    if (r.returnValue) j["return"] = u256Text(*r.returnValue);
    else j["return"] = nullptr;
    j["status"] = statusName(r.status);
    return j;
}

template <typename T, typename FromJson>
std::optional<std::vector<T>> readJsonl(std::istream& in, FromJson fromJson,
                                        std::string* error) {
    std::vector<T> out;
    std::string line;
    size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            fail(error, "line " + std::to_string(lineNo) + ": not valid JSON");
            return std::nullopt;
        }
        std::string sub;
        auto item = fromJson(j, &sub);
        if (!item) {
            fail(error, "line " + std::to_string(lineNo) + ": " + sub);
            return std::nullopt;
        }
        out.push_back(std::move(*item));
    }
    return out;
}

} // namespace

std::optional<Scenario> scenarioFromJson(const json& j, std::string* error) {
    if (!j.is_object()) {
        fail(error, "scenario must be an object");
        return std::nullopt;
    }
    Scenario s;
    if (j.contains("balances")) {
        if (!j["balances"].is_object()) {
            fail(error, "'balances' must be an object");
            return std::nullopt;
        }
        for (auto it = j["balances"].begin(); it != j["balances"].end(); ++it) {
            auto addr = u256FromText(it.key());
            if (!addr || !it.value().is_string()) {
                fail(error, "bad balance entry '" + it.key() + "'");
                return std::nullopt;
            }
            auto v = u256FromText(it.value().get<std::string>());
            if (!v) {
                fail(error, "bad balance value at '" + it.key() + "'");
                return std::nullopt;
            }
            s.balances[*addr] = *v;
        }
    }
    if (!j.contains("calls") || !j["calls"].is_array()) {
        fail(error, "missing 'calls' array");
        return std::nullopt;
    }
    for (const json& cj : j["calls"]) {
        CallTuple c;
        if (!callFromJson(cj, c, error)) return std::nullopt;
        s.calls.push_back(std::move(c));
    }
    return s;
}

std::optional<Scenario> scenarioFromFile(const std::string& path, std::string* error) {
    std::ifstream in(path);
    if (!in) {
        fail(error, "cannot open " + path);
        return std::nullopt;
    }
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        fail(error, path + ": not valid JSON");
        return std::nullopt;
    }
    return scenarioFromJson(j, error);
}

std::vector<TransactionRecord> recordTransactions(const Contract& c, const Scenario& s,
                                                  const CostTable& costs, uint64_t gasLimit) {
    WorldState world = deployState(c);
    for (const auto& [addr, bal] : s.balances) world.accounts[addr].balance = bal;

    std::vector<TransactionRecord> log;
    for (size_t i = 0; i < s.calls.size(); ++i) {
        const CallTuple& call = s.calls[i];
        ExecutionEnv env;
        env.caller = call.caller;
        env.callValue = call.value;
        env.function = call.function;
        env.args = call.args;
        env.gasLimit = gasLimit;
        ExecutionResult res;
        try {
            res = execute(c, world, env, costs);
        } catch (const VmSetupError& e) {
            throw std::invalid_argument("scenario call " + std::to_string(i) + ": " + e.what());
        }

        auto slice = [&](const WorldState& w) {
            StateSlice out;
            for (const U256& a : res.touchedBalances) out.accounts[a].balance = w.balanceOf(a);
            AccountSlice& contract = out.accounts[env.contractAddress];
            contract.balance = w.balanceOf(env.contractAddress);
            auto acct = w.accounts.find(env.contractAddress);
            for (const std::string& k : res.touchedSlots) {
                U256 v = 0;
                if (acct != w.accounts.end()) {
                    auto slot = acct->second.storage.find(k);
                    if (slot != acct->second.storage.end()) v = slot->second;
                }
                contract.storage[k] = v;
            }
            return out;
        };

        TransactionRecord rec;
        rec.call = call;
        rec.preState = slice(world);
        rec.postState = slice(res.post);
        rec.returnValue = res.returnValue;
        rec.status = res.status;
        log.push_back(std::move(rec));
        world = res.post;
    }
    return log;
}

GeneratedSuite generateTests(const Contract& c, const std::vector<TransactionRecord>& log,
                             const CostTable& costs, std::chrono::milliseconds perTestTimeout,
                             uint64_t gasLimit) {
    GeneratedSuite suite;
    for (size_t i = 0; i < log.size(); ++i) {
        TestCase t;
        static_cast<TransactionRecord&>(t) = log[i];
        t.id = "t" + std::to_string(suite.tests.size());
        t.source = "tx" + std::to_string(i);

        auto start = std::chrono::steady_clock::now();
        TestResult r = runTest(c, t, costs, gasLimit);
        auto elapsed = std::chrono::steady_clock::now() - start;
        if (elapsed > perTestTimeout) {
            suite.discards.push_back({i, "timeout"});
            continue;
        }
        if (!r.pass) {
            suite.discards.push_back({i, r.mismatch});
            continue;
        }
        suite.tests.push_back(std::move(t));
    }
    return suite;
}

json recordToJson(const TransactionRecord& r) { return recordBody(r); }

std::optional<TransactionRecord> recordFromJson(const json& j, std::string* error) {
    TransactionRecord r;
    if (!recordFields(j, r, error)) return std::nullopt;
    return r;
}

json testToJson(const TestCase& t) {
    json j = recordBody(t);
    j["id"] = t.id;
    j["source"] = t.source;
    return j;
}

std::optional<TestCase> testFromJson(const json& j, std::string* error) {
    TestCase t;
    if (!recordFields(j, t, error)) return std::nullopt;
    if (!j.contains("id") || !j["id"].is_string()) {
        fail(error, "missing or non-string 'id'");
        return std::nullopt;
    }
    t.id = j["id"].get<std::string>();
    if (j.contains("source") && j["source"].is_string()) t.source = j["source"].get<std::string>();
    return t;
}

void writeRecordsJsonl(std::ostream& out, const std::vector<TransactionRecord>& log) {
    for (const TransactionRecord& r : log) out << recordToJson(r).dump() << '\n';
}

std::optional<std::vector<TransactionRecord>> readRecordsJsonl(std::istream& in,
                                                               std::string* error) {
    return readJsonl<TransactionRecord>(
        in, [](const json& j, std::string* e) { return recordFromJson(j, e); }, error);
}

void writeTestsJsonl(std::ostream& out, const std::vector<TestCase>& tests) {
    for (const TestCase& t : tests) out << testToJson(t).dump() << '\n';
}

std::optional<std::vector<TestCase>> readTestsJsonl(std::istream& in, std::string* error) {
    return readJsonl<TestCase>(
        in, [](const json& j, std::string* e) { return testFromJson(j, e); }, error);
}

std::optional<std::vector<TestCase>> readTestsFile(const std::string& path, std::string* error) {
    std::ifstream in(path);
    if (!in) {
        fail(error, "cannot open " + path);
        return std::nullopt;
    }
    return readTestsJsonl(in, error);
}

} // namespace gasrepair
