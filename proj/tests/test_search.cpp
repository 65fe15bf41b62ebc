#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gasrepair/lang/parser.hpp"
#include "gasrepair/lang/printer.hpp"
#include "gasrepair/lang/typecheck.hpp"
#include "gasrepair/search/engine.hpp"
#include "gasrepair/testgen/testgen.hpp"
#include "gasrepair/util/rng.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <set>

using namespace gasrepair;

namespace {

Contract mustParse(const std::string& src) {
    Contract c = parse(src);
    REQUIRE(typecheck(c).ok());
    return c;
}

const char* kPayout = R"(
contract Payout {
    uint pot = 0;
    function fund() payable {
        pot = pot + msg.value;
    }
    function pay(address to, uint amount) {
        require(pot >= amount);
        pot = pot - amount;
        to.send(amount);
    }
}
)";

const char* kPayoutCured = R"(
contract Payout {
    uint pot = 0;
    function fund() payable {
        pot = pot + msg.value;
    }
    function pay(address to, uint amount) {
        require(pot >= amount);
        pot = pot - amount;
        require(to.send(amount));
    }
}
)";

const char* kPayoutRegress = R"(
contract Payout {
    uint pot = 0;
    function fund() payable {
        pot = pot + msg.value;
    }
    function pay(address to, uint amount) {
        require(pot >= amount);
        pot = pot + amount;
        require(to.send(amount));
    }
}
)";

const char* kClean = R"(
contract Box {
    uint x = 0;
    function set(uint v) {
        x = v;
    }
}
)";

const char* kDrip = R"(
contract Drip {
    function pay(address to, uint amount) {
        to.send(amount);
    }
}
)";

CallTuple call(U256 caller, const std::string& fn, std::vector<U256> args = {}, U256 value = 0) {
    CallTuple c;
    c.caller = caller;
    c.function = fn;
    c.args = std::move(args);
    c.value = value;
    return c;
}

// The contract account lives at address 1, so callers start at 100.
std::vector<TestCase> payoutSuite(const Contract& payout, const CostTable& costs) {
    Scenario s;
    s.balances[U256(100)] = U256(1000);
    s.calls.push_back(call(100, "fund", {}, 500));
    s.calls.push_back(call(100, "pay", {U256(2), U256(100)}));
    s.calls.push_back(call(100, "pay", {U256(3), U256(50)}));
    s.calls.push_back(call(100, "pay", {U256(2), U256(10000)}));
    auto log = recordTransactions(payout, s, costs);
    GeneratedSuite suite = generateTests(payout, log, costs);
    REQUIRE(suite.discards.empty());
    REQUIRE(suite.tests.size() == 4);
    return suite.tests;
}

SearchConfig edConfig() {
    SearchConfig cfg;
    cfg.targetedKinds = {VulnKind::ExceptionDisorder};
    cfg.deterministic = true;
    return cfg;
}

Candidate fakeCand(int64_t vuln, int64_t fail, int64_t dist, bool partial = false) {
    Candidate c;
    c.fitness.vulnCount = vuln;
    c.fitness.failCount = fail;
    c.fitness.mutDistance = dist;
    c.fitness.partial = partial;
    return c;
}

// Pairwise peel: front k is the non-dominated set once fronts 0..k-1 leave.
std::vector<size_t> frontsOracle(const std::vector<Objectives>& objs) {
    const size_t n = objs.size();
    std::vector<size_t> frontOf(n, 0);
    std::vector<bool> assigned(n, false);
    size_t left = n;
    size_t level = 0;
    while (left > 0) {
        std::vector<size_t> now;
        for (size_t i = 0; i < n; ++i) {
            if (assigned[i]) continue;
            bool dominated = false;
            for (size_t j = 0; j < n && !dominated; ++j)
                if (j != i && !assigned[j] && paretoDominates(objs[j], objs[i])) dominated = true;
            if (!dominated) now.push_back(i);
        }
        for (size_t i : now) {
            frontOf[i] = level;
            assigned[i] = true;
        }
        left -= now.size();
        ++level;
    }
    return frontOf;
}

std::vector<double> crowdingOracle(const std::vector<Objectives>& objs,
                                   const std::vector<size_t>& frontOf) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> d(objs.size(), 0.0);
    if (objs.empty()) return d;
    std::map<size_t, std::vector<size_t>> groups;
    for (size_t i = 0; i < objs.size(); ++i) groups[frontOf[i]].push_back(i);
    for (auto& [level, g] : groups) {
        (void)level;
        if (g.size() <= 2) {
            for (size_t i : g) d[i] = inf;
            continue;
        }
        for (size_t k = 0; k < objs[0].size(); ++k) {
            std::vector<size_t> order = g;
            std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
                return objs[a][k] != objs[b][k] ? objs[a][k] < objs[b][k] : a < b;
            });
            d[order.front()] = inf;
            d[order.back()] = inf;
            if (objs[order.front()][k] == objs[order.back()][k]) continue;
            double span = static_cast<double>(objs[order.back()][k] - objs[order.front()][k]);
            for (size_t p = 1; p + 1 < order.size(); ++p)
                if (d[order[p]] != inf)
                    d[order[p]] +=
                        static_cast<double>(objs[order[p + 1]][k] - objs[order[p - 1]][k]) / span;
        }
    }
    return d;
}

std::vector<size_t> selectOracle(const std::vector<Objectives>& objs, size_t keep) {
    const size_t n = objs.size();
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    if (keep >= n) return idx;
    std::vector<size_t> frontOf = frontsOracle(objs);
    std::vector<double> dist = crowdingOracle(objs, frontOf);
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        if (frontOf[a] != frontOf[b]) return frontOf[a] < frontOf[b];
        if (dist[a] != dist[b]) return dist[a] > dist[b];
        return a < b;
    });
    idx.resize(keep);
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        return frontOf[a] != frontOf[b] ? frontOf[a] < frontOf[b] : a < b;
    });
    return idx;
}

} // namespace

TEST_CASE("pareto dominance is strict minimization") {
    CHECK(paretoDominates({1, 2}, {1, 3}));
    CHECK(paretoDominates({0, 0}, {1, 1}));
    CHECK_FALSE(paretoDominates({1, 2}, {1, 2}));
    CHECK_FALSE(paretoDominates({1, 3}, {1, 2}));
    CHECK_FALSE(paretoDominates({0, 5}, {1, 2}));
    CHECK_FALSE(paretoDominates({1, 2}, {0, 5}));
}

TEST_CASE("front assignment matches a pairwise peel on hand cases") {
    std::vector<Objectives> objs = {{0, 0}, {1, 1}, {0, 2}, {2, 0}};
    std::vector<size_t> f = paretoFronts(objs);
    CHECK(f == std::vector<size_t>{0, 1, 1, 1});
    CHECK(frontsOracle(objs) == f);

    std::vector<Objectives> chain = {{3, 3}, {2, 2}, {1, 1}, {0, 0}};
    CHECK(paretoFronts(chain) == std::vector<size_t>{3, 2, 1, 0});
}

TEST_CASE("crowding distance hand values and trim order") {
    std::vector<Objectives> tri = {{0, 10}, {5, 5}, {10, 0}};
    std::vector<size_t> f = paretoFronts(tri);
    std::vector<double> d = crowdingDistances(tri, f);
    CHECK(d[0] == std::numeric_limits<double>::infinity());
    CHECK(d[2] == std::numeric_limits<double>::infinity());
    CHECK(d[1] == doctest::Approx(2.0));

    std::vector<Objectives> quad = {{0, 10}, {10, 0}, {5, 5}, {4, 6}};
    std::vector<size_t> fq = paretoFronts(quad);
    CHECK(fq == std::vector<size_t>{0, 0, 0, 0});
    std::vector<double> dq = crowdingDistances(quad, fq);
    CHECK(dq[0] == std::numeric_limits<double>::infinity());
    CHECK(dq[1] == std::numeric_limits<double>::infinity());
    CHECK(dq[2] == doctest::Approx(1.2));
    CHECK(dq[3] == doctest::Approx(1.0));

    CHECK(nsga2Select(quad, 3) == std::vector<size_t>{0, 1, 2});
    CHECK(nsga2Select(quad, 2) == std::vector<size_t>{0, 1});
    CHECK(nsga2Select(quad, 9) == std::vector<size_t>{0, 1, 2, 3});
    CHECK(nsga2Select(quad, 0).empty());
}

TEST_CASE("selection matches the pairwise oracle on random populations") {
    Rng rng(2024);
    for (int round = 0; round < 200; ++round) {
        size_t n = 1 + rng.below(32);
        size_t m = 2 + rng.below(3);
        std::vector<Objectives> objs(n);
        for (auto& o : objs) {
            o.resize(m);
            for (auto& v : o) v = static_cast<int64_t>(rng.below(10));
        }
        std::vector<size_t> fastFronts = paretoFronts(objs);
        std::vector<size_t> slowFronts = frontsOracle(objs);
        REQUIRE(fastFronts == slowFronts);

        std::vector<double> da = crowdingDistances(objs, fastFronts);
        std::vector<double> db = crowdingOracle(objs, slowFronts);
        REQUIRE(da.size() == db.size());
        for (size_t i = 0; i < da.size(); ++i) REQUIRE(da[i] == db[i]);

        size_t keep = rng.below(n + 1);
        REQUIRE(nsga2Select(objs, keep) == selectOracle(objs, keep));
    }
}

TEST_CASE("search mode names round trip") {
    CHECK(std::string(searchModeName(SearchMode::Genetic)) == "genetic");
    CHECK(std::string(searchModeName(SearchMode::Urs)) == "urs");
    CHECK(searchModeFromName("genetic") == SearchMode::Genetic);
    CHECK(searchModeFromName("urs") == SearchMode::Urs);
    CHECK_FALSE(searchModeFromName("anneal").has_value());
}

TEST_CASE("plausibility separates validity from the gas bound") {
    SearchConfig cfg;
    Candidate ok = fakeCand(0, 0, 1);
    ok.maxTestGas = 500;
    CHECK(plausibility(ok, cfg) == Plausibility::WithinBound);
    CHECK(plausibility(fakeCand(1, 0, 1), cfg) == Plausibility::No);
    CHECK(plausibility(fakeCand(0, 2, 1), cfg) == Plausibility::No);
    CHECK(plausibility(fakeCand(0, 0, 1, true), cfg) == Plausibility::No);

    cfg.gasBound = 499;
    CHECK(plausibility(ok, cfg) == Plausibility::OverBound);
    cfg.gasBound = 500;
    CHECK(plausibility(ok, cfg) == Plausibility::WithinBound);
}

TEST_CASE("candidate evaluation scores detectors, regressions, and the bound") {
    Contract payout = mustParse(kPayout);
    CostTable costs = CostTable::defaults();
    std::vector<TestCase> tests = payoutSuite(payout, costs);
    SearchConfig cfg = edConfig();

    Candidate orig;
    orig.contract = payout;
    size_t runs = 0;
    evalCandidate(orig, payout, tests, costs, cfg, nullptr, &runs);
    CHECK(orig.fitness.vulnCount == 1);
    CHECK(orig.fitness.failCount == 0);
    CHECK_FALSE(orig.fitness.partial);
    CHECK(orig.fitness.mutDistance == 0);
    CHECK(orig.vulnSites.size() == 1);
    CHECK(orig.expectedGas.has_value());
    CHECK(runs == 4);
    CHECK(orig.contentHash == contentHash(payout));

    Candidate cure;
    cure.contract = mustParse(kPayoutCured);
    evalCandidate(cure, payout, tests, costs, cfg, nullptr, &runs);
    CHECK(cure.fitness.vulnCount == 0);
    CHECK(cure.fitness.failCount == 0);
    CHECK_FALSE(cure.fitness.partial);
    CHECK(cure.fitness.mutDistance > 0);
    CHECK(cure.maxTestGas > 0);
    CHECK(plausibility(cure, cfg) == Plausibility::WithinBound);
    CHECK(runs == 8);

    SearchConfig tight = cfg;
    tight.gasBound = 1;
    CHECK(plausibility(cure, tight) == Plausibility::OverBound);
    tight.gasBound = 10'000'000;
    CHECK(plausibility(cure, tight) == Plausibility::WithinBound);

    Candidate regress;
    regress.contract = mustParse(kPayoutRegress);
    evalCandidate(regress, payout, tests, costs, cfg, nullptr, &runs);
    CHECK(regress.fitness.vulnCount == 0);
    CHECK(regress.fitness.failCount >= 1);
    CHECK(plausibility(regress, cfg) == Plausibility::No);

    SearchConfig starved = cfg;
    starved.gasLimit = 10;
    Candidate choked;
    choked.contract = mustParse(kPayoutCured);
    evalCandidate(choked, payout, tests, costs, starved, nullptr, nullptr);
    CHECK(choked.fitness.failCount == 4);
    CHECK(plausibility(choked, starved) == Plausibility::No);
}

TEST_CASE("urs and an armed gas ceiling short-circuit invalid candidates") {
    Contract payout = mustParse(kPayout);
    CostTable costs = CostTable::defaults();
    std::vector<TestCase> tests = payoutSuite(payout, costs);

    SearchConfig urs = edConfig();
    urs.mode = SearchMode::Urs;

    Candidate orig;
    orig.contract = payout;
    size_t runs = 0;
    evalCandidate(orig, payout, tests, costs, urs, nullptr, &runs);
    CHECK(orig.fitness.vulnCount == 1);
    CHECK(orig.fitness.partial);
    CHECK(orig.maxTestGas == 0);
    CHECK(runs == 0);

    Candidate cure;
    cure.contract = mustParse(kPayoutCured);
    evalCandidate(cure, payout, tests, costs, urs, nullptr, &runs);
    CHECK_FALSE(cure.fitness.partial);
    CHECK(plausibility(cure, urs) == Plausibility::WithinBound);
    CHECK(runs == 4);

    Candidate regress;
    regress.contract = mustParse(kPayoutRegress);
    evalCandidate(regress, payout, tests, costs, urs, nullptr, &runs);
    CHECK(regress.fitness.failCount == 1);
    CHECK(regress.fitness.partial);
    CHECK(runs < 8);

    SearchConfig armed = edConfig();
    armed.gmaxEarlyDiscard = true;
    GasFormula ceiling{Rat(1, 1000)};

    Candidate skipped;
    skipped.contract = payout;
    size_t armedRuns = 0;
    evalCandidate(skipped, payout, tests, costs, armed, &ceiling, &armedRuns);
    CHECK(skipped.fitness.vulnCount == 1);
    CHECK(skipped.fitness.partial);
    CHECK(armedRuns == 0);

    size_t plainRuns = 0;
    Candidate full;
    full.contract = payout;
    SearchConfig off = edConfig();
    evalCandidate(full, payout, tests, costs, off, &ceiling, &plainRuns);
    CHECK_FALSE(full.fitness.partial);
    CHECK(plainRuns == 4);

    Candidate validUnder;
    validUnder.contract = mustParse(kPayoutCured);
    size_t validRuns = 0;
    evalCandidate(validUnder, payout, tests, costs, armed, &ceiling, &validRuns);
    CHECK_FALSE(validUnder.fitness.partial);
    CHECK(validRuns == 4);
    CHECK(plausibility(validUnder, armed) == Plausibility::WithinBound);

    GasFormula slack{Rat(1'000'000'000)};
    Candidate unarmed;
    unarmed.contract = payout;
    size_t unarmedRuns = 0;
    evalCandidate(unarmed, payout, tests, costs, armed, &slack, &unarmedRuns);
    CHECK_FALSE(unarmed.fitness.partial);
    CHECK(unarmedRuns == 4);
}

TEST_CASE("selection shields valid candidates and recomputes gas levels") {
    SearchConfig cfg;
    cfg.popSize = 4;
    cfg.gasObjective = true;

    std::vector<Candidate> pop;
    for (int i = 0; i < 3; ++i) {
        Candidate c = fakeCand(0, 0, i + 1);
        c.expectedGas = GasFormula{Rat(10 * (i + 1))};
        pop.push_back(std::move(c));
    }
    for (int v = 1; v <= 5; ++v) pop.push_back(fakeCand(v, 0, 50 + v));

    std::vector<Candidate> out = selectPopulation(pop, cfg);
    REQUIRE(out.size() == 4);
    size_t validKept = 0;
    for (const Candidate& c : out)
        if (c.fitness.vulnCount == 0) ++validKept;
    CHECK(validKept == 3);
    for (const Candidate& c : out)
        if (c.fitness.vulnCount != 0) CHECK(c.fitness.vulnCount == 1);
    std::map<int64_t, int64_t> levelByDist;
    for (const Candidate& c : out)
        if (c.fitness.vulnCount == 0) levelByDist[c.fitness.mutDistance] = c.fitness.gasLevel;
    CHECK(levelByDist[1] == 1);
    CHECK(levelByDist[2] == 2);
    CHECK(levelByDist[3] == 3);

    std::vector<Candidate> missing;
    Candidate a = fakeCand(0, 0, 1);
    a.expectedGas = GasFormula{Rat(10)};
    Candidate b = fakeCand(0, 0, 2);
    b.expectedGas = GasFormula{Rat(20)};
    Candidate c = fakeCand(0, 0, 3);
    missing.push_back(a);
    missing.push_back(b);
    missing.push_back(c);
    SearchConfig roomy;
    roomy.popSize = 40;
    std::vector<Candidate> ranked = selectPopulation(missing, roomy);
    REQUIRE(ranked.size() == 3);
    CHECK(ranked[0].fitness.mutDistance == 1);
    CHECK(ranked[1].fitness.mutDistance == 2);
    CHECK(ranked[2].fitness.mutDistance == 3);
    CHECK(ranked[0].fitness.gasLevel == 1);
    CHECK(ranked[1].fitness.gasLevel == 2);
    CHECK(ranked[2].fitness.gasLevel == 3);
}

TEST_CASE("gas objective flag changes which candidate survives") {
    Candidate first = fakeCand(0, 0, 5);
    first.expectedGas = GasFormula{Rat(20)};
    first.contentHash = 111;
    Candidate second = fakeCand(0, 0, 5);
    second.expectedGas = GasFormula{Rat(10)};
    second.contentHash = 222;
    std::vector<Candidate> pop{first, second};

    SearchConfig on;
    on.popSize = 1;
    on.gasObjective = true;
    std::vector<Candidate> winOn = selectPopulation(pop, on);
    REQUIRE(winOn.size() == 1);
    CHECK(winOn[0].contentHash == 222);

    SearchConfig off;
    off.popSize = 1;
    off.gasObjective = false;
    std::vector<Candidate> winOff = selectPopulation(pop, off);
    REQUIRE(winOff.size() == 1);
    CHECK(winOff[0].contentHash == 111);
}

TEST_CASE("best candidate is lexicographic with a hash tie-break") {
    auto make = [](int64_t v, int64_t f, int64_t g, int64_t d, uint64_t h) {
        Candidate c = fakeCand(v, f, d);
        c.fitness.gasLevel = g;
        c.contentHash = h;
        return c;
    };
    std::vector<Candidate> pop{
        make(0, 0, 1, 5, 9),
        make(0, 0, 1, 4, 7),
        make(0, 0, 1, 4, 3),
        make(1, 0, 0, 0, 1),
    };
    CHECK(bestCandidate(pop) == 2);
    CHECK(bestCandidate({pop[3]}) == 0);
}

TEST_CASE("generator pool draws from singleton spaces first and exhausts tiny bases") {
    Contract payout = mustParse(kPayout);
    Candidate origin;
    origin.contract = payout;
    origin.contentHash = contentHash(payout);
    origin.patch.baseHash = origin.contentHash;

    GeneratorPool pool(payout, 7, true);
    std::set<size_t> spacesSeen;
    for (int i = 0; i < 10; ++i) {
        auto d = pool.request(origin, {});
        REQUIRE(d.has_value());
        CHECK(d->spaceId < 3);
        CHECK(d->mutant.patch.edits.size() == 1);
        CHECK(d->mutant.patch.kinds() == allSpaces()[d->spaceId].ops);
        CHECK(contentHash(d->mutant.tree) != origin.contentHash);
        spacesSeen.insert(d->spaceId);
    }
    CHECK(spacesSeen.size() >= 2);

    Contract tiny = mustParse("contract T { function f() { uint x = 1; } }");
    Candidate tinyOrigin;
    tinyOrigin.contract = tiny;
    tinyOrigin.contentHash = contentHash(tiny);
    tinyOrigin.patch.baseHash = tinyOrigin.contentHash;

    GeneratorPool small(tiny, 3, true);
    std::set<uint64_t> produced;
    size_t draws = 0;
    while (true) {
        auto d = small.request(tinyOrigin, {});
        if (!d) break;
        ++draws;
        CHECK(produced.insert(contentHash(d->mutant.tree)).second);
        REQUIRE(draws < 20);
    }
    CHECK(draws == 4);
    CHECK(small.liveWorkers() == 4);
    CHECK_FALSE(small.request(tinyOrigin, {}).has_value());

    small.noteBaseChange();
    CHECK(small.liveWorkers() == 7);
    CHECK_FALSE(small.request(tinyOrigin, {}).has_value());
}

TEST_CASE("generator pool race commits exactly the winning sample") {
    Contract payout = mustParse(kPayout);
    Candidate origin;
    origin.contract = payout;
    origin.contentHash = contentHash(payout);
    origin.patch.baseHash = origin.contentHash;

    GeneratorPool pool(payout, 11, false);
    std::map<size_t, std::set<uint64_t>> winnersPerSpace;
    for (int i = 0; i < 25; ++i) {
        auto d = pool.request(origin, {});
        REQUIRE(d.has_value());
        CHECK(d->spaceId < 3);
        CHECK(typecheck(d->mutant.tree).ok());
        CHECK(winnersPerSpace[d->spaceId].insert(contentHash(d->mutant.tree)).second);
    }
}

TEST_CASE("urs repair finds a single edit cure") {
    Contract payout = mustParse(kPayout);
    CostTable costs = CostTable::defaults();
    std::vector<TestCase> tests = payoutSuite(payout, costs);

    SearchConfig cfg = edConfig();
    cfg.mode = SearchMode::Urs;
    cfg.seed = 3;
    cfg.maxBoundSeconds = 120.0;

    RepairReport rep = repair(payout, cfg, tests, costs);
    CHECK(rep.stopReason == "plausible");
    CHECK(rep.generations == 0);
    CHECK(rep.reverifyDropped == 0);
    CHECK(rep.vulnsBefore == std::map<std::string, size_t>{{"ED", 1}});
    REQUIRE(rep.plausible.size() == 1);
    const PlausiblePatch& p = rep.plausible[0];
    CHECK(p.patch.edits.size() == 1);
    CHECK(p.fitness.vulnCount == 0);
    CHECK(p.fitness.failCount == 0);
    Contract repaired = mustParse(p.source);
    CHECK(detect(repaired, cfg.targetedKinds).empty());
    CHECK(rep.wallSeconds == 0.0);
}

TEST_CASE("genetic repair is deterministic end to end") {
    Contract payout = mustParse(kPayout);
    CostTable costs = CostTable::defaults();
    std::vector<TestCase> tests = payoutSuite(payout, costs);

    SearchConfig cfg = edConfig();
    cfg.ip = 30;
    cfg.gr = 10;
    cfg.popSize = 20;
    cfg.maxGenerations = 50;
    cfg.seed = 5;
    cfg.maxBoundSeconds = 300.0;

    RepairReport a = repair(payout, cfg, tests, costs);
    RepairReport b = repair(payout, cfg, tests, costs);

    CHECK(a.stopReason == "plausible");
    CHECK(a.reverifyDropped == 0);
    CHECK(a.vulnsBefore == std::map<std::string, size_t>{{"ED", 1}});
    CHECK(a.config.evaluators == 1);
    CHECK(a.config.targetedKinds == std::vector<VulnKind>{VulnKind::ExceptionDisorder});
    CHECK(a.costTableHash == costs.hash());
    CHECK(a.wallSeconds == 0.0);
    REQUIRE(!a.plausible.empty());
    for (const PlausiblePatch& p : a.plausible) {
        Contract repaired = mustParse(p.source);
        CHECK(detect(repaired, cfg.targetedKinds).empty());
        CHECK(contentHash(repaired) == p.contentHash);
    }
    CHECK(a.plausible.front().gasLevel == 1);

    CHECK(b.stopReason == a.stopReason);
    CHECK(b.generated == a.generated);
    CHECK(b.evaluated == a.evaluated);
    CHECK(b.testRuns == a.testRuns);
    CHECK(b.generations == a.generations);
    CHECK(b.perSpace == a.perSpace);
    CHECK(b.wallSeconds == 0.0);
    REQUIRE(b.plausible.size() == a.plausible.size());
    for (size_t i = 0; i < a.plausible.size(); ++i) {
        CHECK(b.plausible[i].source == a.plausible[i].source);
        CHECK(b.plausible[i].contentHash == a.plausible[i].contentHash);
        CHECK(b.plausible[i].gasLevel == a.plausible[i].gasLevel);
        CHECK(b.plausible[i].spaceId == a.plausible[i].spaceId);
        CHECK(b.plausible[i].expectedGasText == a.plausible[i].expectedGasText);
    }
}

TEST_CASE("gas ceiling discard still reaches a verified repair") {
    Contract payout = mustParse(kPayout);
    CostTable costs = CostTable::defaults();
    std::vector<TestCase> tests = payoutSuite(payout, costs);

    SearchConfig cfg = edConfig();
    cfg.ip = 30;
    cfg.gr = 10;
    cfg.popSize = 20;
    cfg.maxGenerations = 50;
    cfg.seed = 5;
    cfg.maxBoundSeconds = 300.0;
    cfg.gmaxEarlyDiscard = true;

    RepairReport rep = repair(payout, cfg, tests, costs);
    CHECK(rep.stopReason == "plausible");
    CHECK(rep.reverifyDropped == 0);
    REQUIRE(!rep.plausible.empty());
    Contract repaired = mustParse(rep.plausible.front().source);
    CHECK(detect(repaired, cfg.targetedKinds).empty());
}

TEST_CASE("clean contracts return immediately") {
    Contract box = mustParse(kClean);
    CostTable costs = CostTable::defaults();
    SearchConfig cfg;
    cfg.deterministic = true;

    RepairReport rep = repair(box, cfg, {}, costs);
    CHECK(rep.alreadyClean);
    CHECK(rep.stopReason == "clean");
    CHECK(rep.generated == 0);
    CHECK(rep.evaluated == 0);
    CHECK(rep.plausible.empty());
    CHECK(rep.vulnsBefore.empty());
    CHECK(rep.config.targetedKinds.size() == 4);
}

TEST_CASE("zero budget times out before sampling") {
    Contract payout = mustParse(kPayout);
    CostTable costs = CostTable::defaults();
    SearchConfig cfg = edConfig();
    cfg.maxBoundSeconds = 0.0;

    RepairReport rep = repair(payout, cfg, {}, costs);
    CHECK(rep.stopReason == "timeout");
    CHECK(rep.timedOut);
    CHECK(rep.generated == 0);
    CHECK(rep.plausible.empty());
}

TEST_CASE("generation cap and neighborhood exhaustion stop the search") {
    Contract payout = mustParse(kPayout);
    CostTable costs = CostTable::defaults();
    std::vector<TestCase> tests = payoutSuite(payout, costs);

    SearchConfig capped = edConfig();
    capped.ip = 2;
    capped.gr = 1;
    capped.popSize = 4;
    capped.maxGenerations = 1;
    capped.seed = 9;
    RepairReport viaCap = repair(payout, capped, tests, costs);
    CHECK(viaCap.stopReason == "generation-cap");
    CHECK(viaCap.generations == 1);
    CHECK(viaCap.plausible.empty());

    Contract drip = mustParse(kDrip);
    Scenario s;
    s.balances[U256(100)] = U256(10);
    s.calls.push_back(call(100, "pay", {U256(2), U256(5)}));
    auto log = recordTransactions(drip, s, costs);
    GeneratedSuite suite = generateTests(drip, log, costs);
    REQUIRE(suite.discards.empty());

    SearchConfig starved = edConfig();
    starved.mode = SearchMode::Urs;
    starved.seed = 2;
    starved.gasBound = 0;
    starved.maxBoundSeconds = 120.0;
    RepairReport rep = repair(drip, starved, suite.tests, costs);
    CHECK(rep.stopReason == "exhausted");
    CHECK(rep.plausible.empty());
    CHECK(rep.generated > 0);
}
