#include "gasrepair/detect/detect.hpp"
#include "gasrepair/gas/paths.hpp"
#include "gasrepair/lang/parser.hpp"
#include "gasrepair/lang/printer.hpp"
#include "gasrepair/lang/typecheck.hpp"
#include "gasrepair/search/engine.hpp"
#include "gasrepair/testgen/testgen.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace gasrepair;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr int kSchemaVersion = 1;

// 0 success, 1 usage/input error, 2 negative domain outcome
// (no plausible patch, failing tests), 3 internal error.
enum ExitCode { kOk = 0, kUsage = 1, kNoResult = 2, kInternal = 3 };

std::atomic<bool> gInterrupted{false};

void onInterrupt(int) { gInterrupted.store(true); }

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string readFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Contract loadContract(const std::string& path) {
    Contract c = parse(readFile(path));
    CheckResult tc = typecheck(c);
    if (!tc.ok()) {
        std::string msg = "contract does not typecheck: " + path;
        for (const TypeError& e : tc.errors) msg += "\n  " + e.message;
        throw UsageError(msg);
    }
    return c;
}

std::vector<VulnKind> allKindsList() {
    return {VulnKind::ExceptionDisorder, VulnKind::Reentrancy, VulnKind::IntegerOverflow,
            VulnKind::OrderDependence};
}

CostTable loadCosts(const std::string& path) {
    if (path.empty()) return CostTable::defaults();
    try {
        return CostTable::fromJsonFile(path);
    } catch (const std::exception& e) {
        throw UsageError(std::string("bad cost table: ") + e.what());
    }
}

std::vector<VulnKind> parseKinds(const std::string& csv) {
    std::vector<VulnKind> kinds;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        std::optional<VulnKind> k = vulnKindFromCode(tok);
        if (!k) throw UsageError("unknown detector code: " + tok);
        kinds.push_back(*k);
    }
    return kinds;
}

void emit(const std::string& text, const std::string& outPath) {
    if (outPath.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(outPath);
    if (!out) throw UsageError("cannot write file: " + outPath);
    out << text;
}

int lineOf(Contract& c, const NodePath& path) {
    std::optional<NodeRef> ref = resolve(c, path);
    if (!ref) return 0;
    if (auto* stmt = std::get_if<Stmt*>(&*ref)) return (*stmt)->line;
    return 0;
}

// ---- detect --------------------------------------------------------------

int runDetect(const std::string& file, const std::string& kindsCsv, bool asJson,
              const std::string& outPath) {
    Contract c = loadContract(file);
    std::vector<VulnKind> kinds = kindsCsv.empty() ? allKindsList() : parseKinds(kindsCsv);
    std::vector<Vulnerability> found = detect(c, kinds);

    if (asJson) {
        json j;
        j["schemaVersion"] = kSchemaVersion;
        j["contract"] = c.name;
        j["findings"] = json::array();
        for (const Vulnerability& v : found) {
            json f;
            f["kind"] = vulnKindCode(v.kind);
            f["nodePath"] = pathToString(v.location.path);
            f["line"] = lineOf(c, v.location.path);
            f["note"] = v.note;
            j["findings"].push_back(std::move(f));
        }
        emit(j.dump(2), outPath);
    } else {
        std::ostringstream os;
        os << c.name << ": " << found.size() << " finding" << (found.size() == 1 ? "" : "s")
           << "\n";
        for (const Vulnerability& v : found) {
            os << "  " << vulnKindCode(v.kind) << " at " << pathToString(v.location.path);
            int line = lineOf(c, v.location.path);
            if (line > 0) os << " (line " << line << ")";
            os << ": " << v.note << "\n";
        }
        emit(os.str(), outPath);
    }
    return kOk;
}

// ---- record ---------------------------------------------------------------

int runRecord(const std::string& file, const std::string& scenarioPath,
              const std::string& outPath, const std::string& costPath, uint64_t gasLimit) {
    Contract c = loadContract(file);
    CostTable costs = loadCosts(costPath);
    std::string err;
    std::optional<Scenario> s = scenarioFromFile(scenarioPath, &err);
    if (!s) throw UsageError("bad scenario: " + err);
    std::vector<TransactionRecord> log;
    try {
        log = recordTransactions(c, *s, costs, gasLimit);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("scenario cannot run: ") + e.what());
    }
    std::ostringstream os;
    writeRecordsJsonl(os, log);
    emit(os.str(), outPath);
    std::cerr << "recorded " << log.size() << " transaction" << (log.size() == 1 ? "" : "s")
              << "\n";
    return kOk;
}

// ---- testgen ---------------------------------------------------------------

int runTestgen(const std::string& file, const std::string& logPath, const std::string& outPath,
               const std::string& costPath, uint64_t timeoutMs, bool asJson) {
    Contract c = loadContract(file);
    CostTable costs = loadCosts(costPath);
    std::ifstream in(logPath);
    if (!in) throw UsageError("cannot open log: " + logPath);
    std::string err;
    std::optional<std::vector<TransactionRecord>> log = readRecordsJsonl(in, &err);
    if (!log) throw UsageError("bad transaction log: " + err);

    GeneratedSuite suite =
        generateTests(c, *log, costs, std::chrono::milliseconds(timeoutMs));
    std::ostringstream os;
    writeTestsJsonl(os, suite.tests);
    emit(os.str(), outPath);

    if (asJson) {
        json j;
        j["schemaVersion"] = kSchemaVersion;
        j["generated"] = suite.tests.size();
        j["discards"] = json::array();
        for (const Discard& d : suite.discards)
            j["discards"].push_back({{"index", d.index}, {"reason", d.reason}});
        std::cerr << j.dump(2) << "\n";
    } else {
        std::cerr << "generated " << suite.tests.size() << " of " << log->size() << " tests";
        if (!suite.discards.empty()) {
            std::cerr << "; discarded " << suite.discards.size() << ":";
            for (const Discard& d : suite.discards)
                std::cerr << "\n  tx " << d.index << ": " << d.reason;
        }
        std::cerr << "\n";
    }
    return kOk;
}

// ---- run-tests --------------------------------------------------------------

int runRunTests(const std::string& file, const std::string& testsPath,
                const std::string& costPath, uint64_t gasLimit, bool asJson) {
    Contract c = loadContract(file);
    CostTable costs = loadCosts(costPath);
    std::ifstream in(testsPath);
    if (!in) throw UsageError("cannot open tests: " + testsPath);
    std::string err;
    std::optional<std::vector<TestCase>> tests = readTestsJsonl(in, &err);
    if (!tests) throw UsageError("bad test suite: " + err);

    size_t passed = 0;
    uint64_t maxGas = 0;
    json failures = json::array();
    std::ostringstream text;
    for (const TestCase& t : *tests) {
        TestResult r = runTest(c, t, costs, gasLimit);
        maxGas = std::max(maxGas, r.gasUsed);
        if (r.pass) {
            ++passed;
        } else {
            failures.push_back({{"id", t.id}, {"mismatch", r.mismatch}});
            text << "  FAIL " << t.id << ": " << r.mismatch << "\n";
        }
    }
    if (asJson) {
        json j;
        j["schemaVersion"] = kSchemaVersion;
        j["total"] = tests->size();
        j["passed"] = passed;
        j["maxGas"] = maxGas;
        j["failures"] = failures;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << passed << "/" << tests->size() << " tests passed, max gas " << maxGas
                  << "\n"
                  << text.str();
    }
    return passed == tests->size() ? kOk : kNoResult;
}

// ---- gas-compare -------------------------------------------------------------

std::vector<Rat> weightsFromLog(const Contract& c, const std::string& logPath, size_t cap) {
    std::ifstream in(logPath);
    if (!in) throw UsageError("cannot open weight log: " + logPath);
    std::string err;
    std::optional<std::vector<TransactionRecord>> log = readRecordsJsonl(in, &err);
    if (!log) throw UsageError("bad weight log: " + err);
    if (log->empty()) return {};

    std::map<std::string, size_t> calls;
    for (const TransactionRecord& r : *log) ++calls[r.call.function];

    PathSet set = enumeratePaths(c, cap);
    std::map<std::string, size_t> pathsPerFn;
    for (const GasPath& p : set.paths) ++pathsPerFn[p.function];

    // Observed call shares split evenly across each function's paths.
    size_t total = log->size();
    std::vector<Rat> w;
    w.reserve(set.paths.size());
    for (const GasPath& p : set.paths) {
        size_t n = calls.count(p.function) ? calls[p.function] : 0;
        if (n == 0) {
            w.push_back(Rat(0));
        } else {
            w.push_back(Rat(static_cast<int64_t>(n),
                            static_cast<int64_t>(total * pathsPerFn[p.function])));
        }
    }
    return w;
}

int runGasCompare(const std::string& fileA, const std::string& fileB,
                  const std::string& weights, const std::string& costPath, size_t pathCap,
                  bool asJson) {
    Contract a = loadContract(fileA);
    Contract b = loadContract(fileB);
    CostTable costs = loadCosts(costPath);

    std::vector<Rat> wa, wb;
    if (weights != "uniform") {
        if (weights.rfind("log:", 0) != 0)
            throw UsageError("--weights takes 'uniform' or 'log:<records.jsonl>'");
        std::string logPath = weights.substr(4);
        wa = weightsFromLog(a, logPath, pathCap);
        wb = weightsFromLog(b, logPath, pathCap);
    }

    GasFormula fa = expectedGasFormula(a, costs, wa, pathCap);
    GasFormula fb = expectedGasFormula(b, costs, wb, pathCap);
    DominanceVerdict v = compareDominance(fa, fb);

    if (asJson) {
        json j;
        j["schemaVersion"] = kSchemaVersion;
        j["a"] = {{"file", fileA}, {"contract", a.name}, {"formula", formulaText(fa)}};
        j["b"] = {{"file", fileB}, {"contract", b.name}, {"formula", formulaText(fb)}};
        j["verdict"] = verdictName(v);
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "A " << fileA << ": " << formulaText(fa) << "\n"
                  << "B " << fileB << ": " << formulaText(fb) << "\n"
                  << "verdict: " << verdictName(v) << "\n";
    }
    return kOk;
}

// ---- repair -----------------------------------------------------------------

json configToJson(const SearchConfig& cfg) {
    json j;
    j["ip"] = cfg.ip;
    j["gr"] = cfg.gr;
    j["popSize"] = cfg.popSize;
    j["maxBoundSeconds"] = cfg.maxBoundSeconds;
    j["seed"] = cfg.seed;
    j["gasObjective"] = cfg.gasObjective;
    if (cfg.gasBound)
        j["gasBound"] = *cfg.gasBound;
    else
        j["gasBound"] = nullptr;
    json kinds = json::array();
    for (VulnKind k : cfg.targetedKinds) kinds.push_back(vulnKindCode(k));
    j["kinds"] = kinds;
    j["mode"] = searchModeName(cfg.mode);
    j["gmaxEarlyDiscard"] = cfg.gmaxEarlyDiscard;
    j["deterministic"] = cfg.deterministic;
    j["evaluators"] = cfg.evaluators;
    j["maxGenerations"] = cfg.maxGenerations;
    j["gasLimit"] = cfg.gasLimit;
    j["pathCap"] = cfg.pathCap;
    return j;
}

json reportToJson(const RepairReport& rep) {
    json j;
    j["schemaVersion"] = kSchemaVersion;
    j["tool"] = "gasrepair";
    j["version"] = kVersion;
    j["stopReason"] = rep.stopReason;
    j["alreadyClean"] = rep.alreadyClean;
    j["timedOut"] = rep.timedOut;
    j["vulnsBefore"] = rep.vulnsBefore;
    j["generated"] = rep.generated;
    j["evaluated"] = rep.evaluated;
    j["testRuns"] = rep.testRuns;
    json perSpace = json::object();
    for (size_t s = 0; s < rep.perSpace.size(); ++s)
        perSpace[allSpaces()[s].name] = rep.perSpace[s];
    j["perSpace"] = perSpace;
    j["generations"] = rep.generations;
    j["reverifyDropped"] = rep.reverifyDropped;
    j["wallSeconds"] = rep.wallSeconds;
    j["config"] = configToJson(rep.config);
    j["costTableHash"] = rep.costTableHash;
    j["plausible"] = json::array();
    for (const PlausiblePatch& p : rep.plausible) {
        json pj;
        pj["patch"] = patchToJson(p.patch);
        pj["source"] = p.source;
        pj["space"] = allSpaces()[p.spaceId].name;
        pj["gasLevel"] = p.gasLevel;
        pj["expectedGas"] = p.expectedGasText;
        pj["maxTestGas"] = p.maxTestGas;
        pj["mutationDistance"] = p.fitness.mutDistance;
        pj["contentHash"] = p.contentHash;
        j["plausible"].push_back(std::move(pj));
    }
    return j;
}

std::string reportToText(const RepairReport& rep) {
    std::ostringstream os;
    os << "stop: " << rep.stopReason << "\n";
    if (!rep.vulnsBefore.empty()) {
        os << "vulnerabilities:";
        for (const auto& [code, n] : rep.vulnsBefore) os << " " << code << "=" << n;
        os << "\n";
    }
    os << "generated " << rep.generated << ", evaluated " << rep.evaluated << ", test runs "
       << rep.testRuns << ", generations " << rep.generations << "\n";
    if (rep.reverifyDropped > 0) os << "dropped at re-verification: " << rep.reverifyDropped
                                    << "\n";
    os << "plausible patches: " << rep.plausible.size() << "\n";
    for (size_t i = 0; i < rep.plausible.size(); ++i) {
        const PlausiblePatch& p = rep.plausible[i];
        os << "--- patch " << (i + 1) << " (space " << allSpaces()[p.spaceId].name
           << ", gas level " << p.gasLevel << ", expected gas " << p.expectedGasText
           << ", max test gas " << p.maxTestGas << ")\n";
        os << p.source;
        if (!p.source.empty() && p.source.back() != '\n') os << "\n";
    }
    return os.str();
}

int runRepair(const std::string& file, const std::string& testsPath, SearchConfig cfg,
              const std::string& costPath, bool asJson, const std::string& outPath) {
    Contract c = loadContract(file);
    CostTable costs = loadCosts(costPath);

    std::vector<TestCase> tests;
    if (!testsPath.empty()) {
        std::ifstream in(testsPath);
        if (!in) throw UsageError("cannot open tests: " + testsPath);
        std::string err;
        std::optional<std::vector<TestCase>> parsed = readTestsJsonl(in, &err);
        if (!parsed) throw UsageError("bad test suite: " + err);
        tests = std::move(*parsed);
    }

    cfg.cancel = &gInterrupted;
    std::signal(SIGINT, onInterrupt);
    RepairReport rep = repair(c, cfg, tests, costs);
    std::signal(SIGINT, SIG_DFL);

    emit(asJson ? reportToJson(rep).dump(2) : reportToText(rep), outPath);
    if (rep.alreadyClean || !rep.plausible.empty()) return kOk;
    return kNoResult;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"search-based repair for gas-metered contracts"};
    app.set_version_flag("--version", std::string("gasrepair ") + kVersion);
    app.require_subcommand(1);

    std::string file, fileB, kinds, scenario, logPath, testsPath, outPath, costPath;
    std::string weights = "uniform";
    bool asJson = false;
    uint64_t gasLimit = 1'000'000;
    uint64_t timeoutMs = 5000;
    SearchConfig cfg;
    std::string mode = "genetic";
    std::string gasObjective = "on";
    int64_t gasBound = -1;

    CLI::App* detectCmd = app.add_subcommand("detect", "run the detectors on a contract");
    detectCmd->add_option("contract", file, "contract file")->required();
    detectCmd->add_option("--kinds", kinds, "comma-separated detector codes (ED,RE,IO,TOD)");
    detectCmd->add_flag("--json", asJson, "emit JSON");
    detectCmd->add_option("--out", outPath, "write the report to a file");

    CLI::App* recordCmd =
        app.add_subcommand("record", "run a scenario and capture a transaction log");
    recordCmd->add_option("contract", file, "contract file")->required();
    recordCmd->add_option("--scenario", scenario, "scenario JSON file")->required();
    recordCmd->add_option("--out", outPath, "write the log here (default stdout)");
    recordCmd->add_option("--cost-table", costPath, "cost table JSON");
    recordCmd->add_option("--gas-limit", gasLimit, "per-call gas limit");

    CLI::App* testgenCmd =
        app.add_subcommand("testgen", "turn a transaction log into a regression suite");
    testgenCmd->add_option("contract", file, "contract file")->required();
    testgenCmd->add_option("--log", logPath, "transaction log (JSON lines)")->required();
    testgenCmd->add_option("--out", outPath, "write the suite here (default stdout)");
    testgenCmd->add_option("--cost-table", costPath, "cost table JSON");
    testgenCmd->add_option("--timeout-ms", timeoutMs, "per-test replay timeout");
    testgenCmd->add_flag("--json", asJson, "emit a JSON summary on stderr");

    CLI::App* runCmd = app.add_subcommand("run-tests", "replay a regression suite");
    runCmd->add_option("contract", file, "contract file")->required();
    runCmd->add_option("--tests", testsPath, "test suite (JSON lines)")->required();
    runCmd->add_option("--cost-table", costPath, "cost table JSON");
    runCmd->add_option("--gas-limit", gasLimit, "per-test gas limit");
    runCmd->add_flag("--json", asJson, "emit JSON");

    CLI::App* compareCmd =
        app.add_subcommand("gas-compare", "compare the expected gas of two contracts");
    compareCmd->add_option("a", file, "first contract")->required();
    compareCmd->add_option("b", fileB, "second contract")->required();
    compareCmd->add_option("--weights", weights, "uniform | log:<records.jsonl>");
    compareCmd->add_option("--cost-table", costPath, "cost table JSON");
    compareCmd->add_option("--path-cap", cfg.pathCap, "path enumeration cap");
    compareCmd->add_flag("--json", asJson, "emit JSON");

    CLI::App* repairCmd = app.add_subcommand("repair", "search for plausible patches");
    repairCmd->add_option("contract", file, "contract file")->required();
    repairCmd->add_option("--tests", testsPath, "regression suite (JSON lines)");
    repairCmd->add_option("--kinds", kinds, "detector codes to target (default all)");
    repairCmd->add_option("--mode", mode, "genetic | urs")
        ->check(CLI::IsMember({"genetic", "urs"}));
    repairCmd->add_option("--gas-objective", gasObjective, "on | off")
        ->check(CLI::IsMember({"on", "off"}));
    repairCmd->add_option("--timeout", cfg.maxBoundSeconds, "search budget in seconds");
    repairCmd->add_option("--gas-bound", gasBound, "max gas any single test may burn");
    repairCmd->add_option("--ip", cfg.ip, "bootstrap candidates");
    repairCmd->add_option("--gr", cfg.gr, "candidates per generation");
    repairCmd->add_option("--pop-size", cfg.popSize, "population cap");
    repairCmd->add_option("--seed", cfg.seed, "search seed");
    repairCmd->add_flag("--deterministic", cfg.deterministic,
                        "single-threaded, reproducible run");
    repairCmd->add_flag("--gmax-discard", cfg.gmaxEarlyDiscard,
                        "skip tests for dominated invalid candidates");
    repairCmd->add_option("--max-generations", cfg.maxGenerations, "0 = unbounded");
    repairCmd->add_option("--evaluators", cfg.evaluators, "0 = hardware concurrency");
    repairCmd->add_option("--gas-limit", cfg.gasLimit, "per-test gas limit");
    repairCmd->add_option("--path-cap", cfg.pathCap, "path enumeration cap");
    repairCmd->add_option("--cost-table", costPath, "cost table JSON");
    repairCmd->add_flag("--json", asJson, "emit the report as JSON");
    repairCmd->add_option("--out", outPath, "write the report to a file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (*detectCmd) return runDetect(file, kinds, asJson, outPath);
        if (*recordCmd) return runRecord(file, scenario, outPath, costPath, gasLimit);
        if (*testgenCmd)
            return runTestgen(file, logPath, outPath, costPath, timeoutMs, asJson);
        if (*runCmd) return runRunTests(file, testsPath, costPath, gasLimit, asJson);
        if (*compareCmd)
            return runGasCompare(file, fileB, weights, costPath, cfg.pathCap, asJson);
        if (*repairCmd) {
            if (!kinds.empty()) cfg.targetedKinds = parseKinds(kinds);
            cfg.mode = *searchModeFromName(mode);
            cfg.gasObjective = gasObjective == "on";
            if (gasBound >= 0) cfg.gasBound = static_cast<uint64_t>(gasBound);
            return runRepair(file, testsPath, cfg, costPath, asJson, outPath);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kUsage;
}
