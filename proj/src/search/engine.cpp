#include "gasrepair/search/engine.hpp"

#include "gasrepair/lang/printer.hpp"
#include "gasrepair/lang/typecheck.hpp"

#include <algorithm>
#include <future>
#include <thread>

namespace gasrepair {

const char* searchModeName(SearchMode m) {
    return m == SearchMode::Genetic ? "genetic" : "urs";
}

std::optional<SearchMode> searchModeFromName(const std::string& s) {
    if (s == "genetic") return SearchMode::Genetic;
    if (s == "urs") return SearchMode::Urs;
    return std::nullopt;
}

namespace {

using Clock = std::chrono::steady_clock;

std::vector<VulnKind> allKinds() {
    return {VulnKind::ExceptionDisorder, VulnKind::Reentrancy, VulnKind::IntegerOverflow,
            VulnKind::OrderDependence};
}

uint64_t mixSeed(uint64_t seed, uint64_t request, uint64_t space) {
    uint64_t h = seed * 0x9E3779B97F4A7C15ull;
    h ^= (request + 1) * 0xC2B2AE3D27D4EB4Full;
    h ^= (space + 1) * 0x165667B19E3779F9ull;
    h ^= h >> 29;
    return h;
}

struct SuiteOutcome {
    int64_t fails = 0;
    uint64_t maxGas = 0;
    size_t executed = 0;
    bool stoppedEarly = false;
};

SuiteOutcome runSuiteSequential(const Contract& c, const std::vector<TestCase>& tests,
                                const CostTable& costs, uint64_t gasLimit, bool stopOnFail) {
    SuiteOutcome out;
    for (const TestCase& t : tests) {
        TestResult r = runTest(c, t, costs, gasLimit);
        ++out.executed;
        out.maxGas = std::max(out.maxGas, r.gasUsed);
        if (!r.pass) {
            ++out.fails;
            if (stopOnFail) {
                out.stoppedEarly = out.executed < tests.size();
                break;
            }
        }
    }
    return out;
}

SuiteOutcome runSuiteParallel(const Contract& c, const std::vector<TestCase>& tests,
                              const CostTable& costs, uint64_t gasLimit, size_t workers) {
    SuiteOutcome out;
    workers = std::min(workers, tests.size());
    std::vector<std::future<SuiteOutcome>> futs;
    futs.reserve(workers);
    size_t chunk = (tests.size() + workers - 1) / workers;
    for (size_t w = 0; w < workers; ++w) {
        size_t lo = w * chunk;
        size_t hi = std::min(tests.size(), lo + chunk);
        if (lo >= hi) break;
        futs.push_back(std::async(std::launch::async, [&, lo, hi] {
            SuiteOutcome part;
            for (size_t i = lo; i < hi; ++i) {
                TestResult r = runTest(c, tests[i], costs, gasLimit);
                ++part.executed;
                part.maxGas = std::max(part.maxGas, r.gasUsed);
                if (!r.pass) ++part.fails;
            }
            return part;
        }));
    }
    for (auto& f : futs) {
        SuiteOutcome part = f.get();
        out.fails += part.fails;
        out.maxGas = std::max(out.maxGas, part.maxGas);
        out.executed += part.executed;
    }
    return out;
}

} // namespace

Plausibility plausibility(const Candidate& c, const SearchConfig& cfg) {
    if (c.fitness.partial || c.fitness.vulnCount > 0 || c.fitness.failCount > 0)
        return Plausibility::No;
    if (cfg.gasBound && c.maxTestGas > *cfg.gasBound) return Plausibility::OverBound;
    return Plausibility::WithinBound;
}

void evalCandidate(Candidate& cand, const Contract& original, const std::vector<TestCase>& tests,
                   const CostTable& costs, const SearchConfig& cfg, const GasFormula* gmax,
                   size_t* testRuns) {
    cand.contentHash = contentHash(cand.contract);
    FitnessVector f;

    std::vector<VulnKind> kinds = cfg.targetedKinds.empty() ? allKinds() : cfg.targetedKinds;
    std::vector<Vulnerability> vulns = detect(cand.contract, kinds);
    f.vulnCount = static_cast<int64_t>(vulns.size());
    cand.vulnSites.clear();
    for (const Vulnerability& v : vulns) cand.vulnSites.push_back(v.location.path);

    f.mutDistance = static_cast<int64_t>(mutationDistance(original, cand.contract));

    cand.expectedGas.reset();
    try {
        cand.expectedGas = expectedGasFormula(cand.contract, costs, {}, cfg.pathCap);
    } catch (const PathExplosion&) {
    }

    bool ursShort = cfg.mode == SearchMode::Urs;
    bool gmaxArmed = cfg.gmaxEarlyDiscard && gmax != nullptr && cand.expectedGas.has_value() &&
                     compareDominance(*gmax, *cand.expectedGas) == DominanceVerdict::AdominatesB;

    if (f.vulnCount > 0 && (ursShort || gmaxArmed)) {
        f.partial = !tests.empty();
        cand.maxTestGas = 0;
        cand.fitness = f;
        return;
    }

    bool stopOnFail = ursShort || gmaxArmed;
    size_t workers = cfg.deterministic ? 1 : std::max<size_t>(1, cfg.evaluators);
    SuiteOutcome out;
    if (stopOnFail || workers <= 1 || tests.size() <= 1)
        out = runSuiteSequential(cand.contract, tests, costs, cfg.gasLimit, stopOnFail);
    else
        out = runSuiteParallel(cand.contract, tests, costs, cfg.gasLimit, workers);

    f.failCount = out.fails;
    f.partial = out.stoppedEarly;
    cand.maxTestGas = out.maxGas;
    cand.fitness = f;
    if (testRuns) *testRuns += out.executed;
}

std::vector<Candidate> selectPopulation(std::vector<Candidate> pop, const SearchConfig& cfg) {
    const size_t n = pop.size();
    if (n == 0) return pop;

    std::vector<size_t> valid;
    for (size_t i = 0; i < n; ++i) {
        const FitnessVector& f = pop[i].fitness;
        if (!f.partial && f.vulnCount == 0 && f.failCount == 0) valid.push_back(i);
    }

    int64_t maxLevel = 0;
    if (cfg.gasObjective && !valid.empty()) {
        std::vector<GasFormula> formulas;
        std::vector<size_t> withFormula;
        for (size_t i : valid)
            if (pop[i].expectedGas) {
                withFormula.push_back(i);
                formulas.push_back(*pop[i].expectedGas);
            }
        std::vector<size_t> levels = dominanceLevels(formulas);
        int64_t top = 0;
        for (size_t k = 0; k < withFormula.size(); ++k) {
            pop[withFormula[k]].fitness.gasLevel = static_cast<int64_t>(levels[k]);
            top = std::max(top, static_cast<int64_t>(levels[k]));
        }
        for (size_t i : valid)
            if (!pop[i].expectedGas) pop[i].fitness.gasLevel = top + 1;
        for (size_t i : valid) maxLevel = std::max(maxLevel, pop[i].fitness.gasLevel);
    }

    int64_t maxDist = 0;
    for (size_t i : valid) maxDist = std::max(maxDist, pop[i].fitness.mutDistance);
    int64_t sentinelGas = maxLevel + 1;
    int64_t sentinelDist = maxDist + 1;

    std::vector<Objectives> objs;
    objs.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        const FitnessVector& f = pop[i].fitness;
        bool isValid = !f.partial && f.vulnCount == 0 && f.failCount == 0;
        Objectives o;
        o.push_back(f.vulnCount);
        o.push_back(f.failCount);
        if (cfg.gasObjective) o.push_back(isValid ? f.gasLevel : sentinelGas);
        o.push_back(isValid ? f.mutDistance : sentinelDist);
        objs.push_back(std::move(o));
    }

    std::vector<size_t> keep = nsga2Select(objs, cfg.popSize);
    std::vector<Candidate> out;
    out.reserve(keep.size());
    for (size_t i : keep) out.push_back(std::move(pop[i]));
    return out;
}

size_t bestCandidate(const std::vector<Candidate>& pop) {
    size_t best = 0;
    auto key = [](const Candidate& c) {
        return std::make_tuple(c.fitness.vulnCount, c.fitness.failCount, c.fitness.gasLevel,
                               c.fitness.mutDistance, c.contentHash);
    };
    for (size_t i = 1; i < pop.size(); ++i)
        if (key(pop[i]) < key(pop[best])) best = i;
    return best;
}

GeneratorPool::GeneratorPool(const Contract& origin, uint64_t seed, bool deterministic)
    : origin_(&origin), deterministic_(deterministic), seed_(seed) {}

void GeneratorPool::noteBaseChange() { exhausted_.fill(false); }

size_t GeneratorPool::liveWorkers() const {
    size_t n = 0;
    for (size_t s = 0; s < 7; ++s)
        if (!exhausted_[s] && !crashed_[s]) ++n;
    return n;
}

std::optional<GeneratorPool::Draw> GeneratorPool::request(const Candidate& parent,
                                                          const std::vector<NodePath>& hints) {
    std::set<EditKind> sigma = parent.patch.kinds();
    uint64_t requestId = requestCounter_++;

    auto eligible = [&](size_t s) {
        return !exhausted_[s] && !crashed_[s] && spaceEligible(s, sigma);
    };

    if (deterministic_) {
        size_t start = static_cast<size_t>(requestId % 7);
        for (size_t k = 0; k < 7; ++k) {
            size_t s = (start + k) % 7;
            if (!eligible(s)) continue;
            MutateRequest req{origin_, &parent.contract, parent.patch, hints,
                              mixSeed(seed_, requestId, s), &seen_[s]};
            std::optional<MutantResult> r;
            try {
                r = sampleMutant(s, req);
            } catch (const std::exception&) {
                crashed_[s] = true;
                continue;
            }
            if (r) return Draw{std::move(*r), s};
            exhausted_[s] = true;
        }
        return std::nullopt;
    }

    std::vector<size_t> spaces;
    for (size_t s = 0; s < 7; ++s)
        if (eligible(s)) spaces.push_back(s);
    if (spaces.empty()) return std::nullopt;

    // Each racer samples against its own copy of the seen-set; only the
    // winner's copy is committed, so losers can re-offer their mutants later.
    std::vector<std::set<uint64_t>> copies(spaces.size());
    std::vector<std::future<std::optional<MutantResult>>> futs(spaces.size());
    for (size_t k = 0; k < spaces.size(); ++k) {
        size_t s = spaces[k];
        copies[k] = seen_[s];
        std::set<uint64_t>* seenCopy = &copies[k];
        uint64_t seed = mixSeed(seed_, requestId, s);
        futs[k] = std::async(std::launch::async, [this, &parent, &hints, seenCopy, seed, s] {
            MutateRequest req{origin_, &parent.contract, parent.patch, hints, seed, seenCopy};
            return sampleMutant(s, req);
        });
    }

    std::optional<Draw> winner;
    std::vector<bool> done(spaces.size(), false);
    size_t remaining = spaces.size();
    while (remaining > 0) {
        for (size_t k = 0; k < spaces.size(); ++k) {
            if (done[k] ||
                futs[k].wait_for(std::chrono::milliseconds(0)) != std::future_status::ready)
                continue;
            done[k] = true;
            --remaining;
            size_t s = spaces[k];
            std::optional<MutantResult> r;
            try {
                r = futs[k].get();
            } catch (const std::exception&) {
                crashed_[s] = true;
                continue;
            }
            if (!r) {
                exhausted_[s] = true;
            } else if (!winner) {
                winner = Draw{std::move(*r), s};
                seen_[s] = std::move(copies[k]);
            }
        }
        if (remaining > 0) std::this_thread::yield();
    }
    return winner;
}

namespace {

struct PlausibleRank {
    size_t popIndex;
    size_t level;
};

std::vector<PlausiblePatch> finalizePlausible(std::vector<Candidate>& found,
                                              const Contract& original,
                                              const std::vector<TestCase>& tests,
                                              const CostTable& costs, const SearchConfig& cfg,
                                              size_t& reverifyDropped, size_t& testRuns) {
    // Independent re-verification: replay the patch from the untouched
    // original and re-check every validity requirement.
    std::vector<Candidate> kept;
    for (Candidate& c : found) {
        std::optional<Contract> replayed = applyPatch(original, c.patch);
        bool ok = replayed.has_value() && typecheck(*replayed).ok() &&
                  contentHash(*replayed) == c.contentHash;
        if (ok) {
            std::vector<VulnKind> kinds =
                cfg.targetedKinds.empty() ? allKinds() : cfg.targetedKinds;
            ok = detect(*replayed, kinds).empty();
        }
        if (ok) {
            SuiteOutcome out =
                runSuiteSequential(*replayed, tests, costs, cfg.gasLimit, false);
            testRuns += out.executed;
            ok = out.fails == 0 && (!cfg.gasBound || out.maxGas <= *cfg.gasBound);
        }
        if (!ok) {
            ++reverifyDropped;
            continue;
        }
        kept.push_back(std::move(c));
    }

    std::vector<GasFormula> formulas;
    std::vector<size_t> withFormula;
    for (size_t i = 0; i < kept.size(); ++i)
        if (kept[i].expectedGas) {
            withFormula.push_back(i);
            formulas.push_back(*kept[i].expectedGas);
        }
    std::vector<size_t> levelOf(kept.size(), 0);
    std::vector<size_t> levels = dominanceLevels(formulas);
    size_t top = 0;
    for (size_t k = 0; k < withFormula.size(); ++k) {
        levelOf[withFormula[k]] = levels[k];
        top = std::max(top, levels[k]);
    }
    for (size_t i = 0; i < kept.size(); ++i)
        if (!kept[i].expectedGas) levelOf[i] = top + 1;

    std::vector<PlausiblePatch> out;
    for (size_t i = 0; i < kept.size(); ++i) {
        PlausiblePatch p;
        p.patch = kept[i].patch;
        p.source = prettyPrint(kept[i].contract);
        p.fitness = kept[i].fitness;
        p.fitness.gasLevel = static_cast<int64_t>(levelOf[i]);
        p.spaceId = kept[i].spaceId;
        p.gasLevel = levelOf[i];
        p.expectedGasText =
            kept[i].expectedGas ? formulaText(*kept[i].expectedGas) : "unavailable";
        p.maxTestGas = kept[i].maxTestGas;
        p.contentHash = kept[i].contentHash;
        out.push_back(std::move(p));
    }
    std::sort(out.begin(), out.end(), [](const PlausiblePatch& a, const PlausiblePatch& b) {
        return std::make_tuple(a.gasLevel, a.fitness.mutDistance, a.contentHash) <
               std::make_tuple(b.gasLevel, b.fitness.mutDistance, b.contentHash);
    });
    return out;
}

} // namespace

RepairReport repair(const Contract& original, const SearchConfig& cfgIn,
                    const std::vector<TestCase>& tests, const CostTable& costs) {
    SearchConfig cfg = cfgIn;
    if (cfg.targetedKinds.empty()) cfg.targetedKinds = allKinds();
    if (cfg.evaluators == 0)
        cfg.evaluators = std::max(1u, std::thread::hardware_concurrency());
    if (cfg.deterministic) cfg.evaluators = 1;

    if (!typecheck(original).ok())
        throw std::invalid_argument("repair: contract does not typecheck");

    RepairReport rep;
    rep.config = cfg;
    rep.costTableHash = costs.hash();

    auto t0 = Clock::now();
    auto deadline =
        t0 + std::chrono::duration_cast<Clock::duration>(
                 std::chrono::duration<double>(cfg.maxBoundSeconds));
    auto timedOut = [&] {
        if (cfg.cancel && cfg.cancel->load()) return true;
        return Clock::now() >= deadline;
    };
    auto finish = [&](const char* reason) {
        rep.stopReason = reason;
        rep.wallSeconds =
            cfg.deterministic
                ? 0.0
                : std::chrono::duration<double>(Clock::now() - t0).count();
        return rep;
    };

    std::vector<Vulnerability> vulns = detect(original, cfg.targetedKinds);
    for (const Vulnerability& v : vulns) ++rep.vulnsBefore[vulnKindCode(v.kind)];
    if (vulns.empty()) {
        rep.alreadyClean = true;
        return finish("clean");
    }

    Candidate origin;
    origin.contract = original;
    origin.contentHash = contentHash(original);
    origin.patch.baseHash = origin.contentHash;
    origin.fitness.vulnCount = static_cast<int64_t>(vulns.size());
    for (const Vulnerability& v : vulns) origin.vulnSites.push_back(v.location.path);

    GeneratorPool pool(original, cfg.seed, cfg.deterministic);

    GasFormula gmaxFormula;
    bool gmaxSet = false;
    auto gmaxPtr = [&]() -> const GasFormula* {
        return cfg.gmaxEarlyDiscard && gmaxSet ? &gmaxFormula : nullptr;
    };
    auto noteGmax = [&](const Candidate& c) {
        if (!c.expectedGas) return;
        if (!gmaxSet) {
            gmaxFormula = *c.expectedGas;
            gmaxSet = true;
        } else if (compareDominance(*c.expectedGas, gmaxFormula) ==
                   DominanceVerdict::AdominatesB) {
            gmaxFormula = *c.expectedGas;
        }
    };

    auto evalOne = [&](Candidate& c) {
        evalCandidate(c, original, tests, costs, cfg, gmaxPtr(), &rep.testRuns);
        ++rep.evaluated;
        if (plausibility(c, cfg) == Plausibility::WithinBound) noteGmax(c);
    };
    auto makeCandidate = [&](GeneratorPool::Draw&& d, const Candidate& parent) {
        Candidate c;
        c.patch = std::move(d.mutant.patch);
        c.contract = std::move(d.mutant.tree);
        c.spaceId = d.spaceId;
        c.generation = parent.generation + 1;
        c.parentHash = parent.contentHash;
        return c;
    };

    if (cfg.mode == SearchMode::Urs) {
        while (!timedOut()) {
            auto d = pool.request(origin, origin.vulnSites);
            if (!d) return finish("exhausted");
            Candidate c = makeCandidate(std::move(*d), origin);
            ++rep.generated;
            ++rep.perSpace[c.spaceId];
            evalOne(c);
            if (plausibility(c, cfg) == Plausibility::WithinBound) {
                std::vector<Candidate> found;
                found.push_back(std::move(c));
                rep.plausible = finalizePlausible(found, original, tests, costs, cfg,
                                                  rep.reverifyDropped, rep.testRuns);
                if (!rep.plausible.empty()) return finish("plausible");
            }
        }
        rep.timedOut = true;
        return finish("timeout");
    }

    std::vector<Candidate> pop;
    for (size_t i = 0; i < cfg.ip && !timedOut(); ++i) {
        auto d = pool.request(origin, origin.vulnSites);
        if (!d) break;
        Candidate c = makeCandidate(std::move(*d), origin);
        ++rep.generated;
        ++rep.perSpace[c.spaceId];
        evalOne(c);
        pop.push_back(std::move(c));
    }

    uint64_t lastBase = 0;
    while (true) {
        std::vector<Candidate> found;
        for (const Candidate& c : pop)
            if (plausibility(c, cfg) == Plausibility::WithinBound) found.push_back(c);
        if (!found.empty()) {
            rep.plausible = finalizePlausible(found, original, tests, costs, cfg,
                                              rep.reverifyDropped, rep.testRuns);
            if (!rep.plausible.empty()) return finish("plausible");
            // Everything failed re-verification; keep searching.
        }
        if (timedOut()) {
            rep.timedOut = true;
            return finish("timeout");
        }
        if (pop.empty()) return finish("exhausted");
        if (cfg.maxGenerations > 0 && rep.generations >= cfg.maxGenerations)
            return finish("generation-cap");

        pop = selectPopulation(std::move(pop), cfg);
        size_t b = bestCandidate(pop);
        if (pop[b].contentHash != lastBase) {
            pool.noteBaseChange();
            lastBase = pop[b].contentHash;
        }
        Candidate best = pop[b];

        size_t got = 0;
        for (size_t g = 0; g < cfg.gr && !timedOut(); ++g) {
            auto d = pool.request(best, best.vulnSites);
            if (!d) break;
            Candidate c = makeCandidate(std::move(*d), best);
            ++rep.generated;
            ++rep.perSpace[c.spaceId];
            evalOne(c);
            pop.push_back(std::move(c));
            ++got;
        }
        ++rep.generations;
        if (got == 0 && !timedOut()) {
            // The current best's neighborhood is spent across all spaces.
            std::vector<Candidate> leftover;
            for (const Candidate& c : pop)
                if (plausibility(c, cfg) == Plausibility::WithinBound) leftover.push_back(c);
            if (!leftover.empty()) {
                rep.plausible = finalizePlausible(leftover, original, tests, costs, cfg,
                                                  rep.reverifyDropped, rep.testRuns);
                if (!rep.plausible.empty()) return finish("plausible");
            }
            return finish("exhausted");
        }
    }
}

} // namespace gasrepair
