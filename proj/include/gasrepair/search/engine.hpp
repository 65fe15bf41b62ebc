#pragma once

#include "gasrepair/detect/detect.hpp"
#include "gasrepair/gas/paths.hpp"
#include "gasrepair/mutate/sampler.hpp"
#include "gasrepair/search/nsga2.hpp"
#include "gasrepair/vm/interp.hpp"

#include <array>
#include <atomic>
#include <chrono>
#include <optional>

namespace gasrepair {

enum class SearchMode : uint8_t { Genetic, Urs };

const char* searchModeName(SearchMode m);
std::optional<SearchMode> searchModeFromName(const std::string& s);

struct SearchConfig {
    size_t ip = 20;                      // bootstrap candidates
    size_t gr = 10;                      // candidates per generation
    size_t popSize = 40;                 // population cap after selection
    double maxBoundSeconds = 3600.0;     // wall-clock budget
    uint64_t seed = 0;
    bool gasObjective = true;
    std::optional<uint64_t> gasBound;    // max gas any single test may burn
    std::vector<VulnKind> targetedKinds; // empty = all detectors
    SearchMode mode = SearchMode::Genetic;
    bool gmaxEarlyDiscard = false;
    bool deterministic = false;  // serialize the worker race, zero the clock echo
    size_t evaluators = 0;       // 0 = hardware concurrency
    size_t maxGenerations = 0;   // 0 = unbounded
    uint64_t gasLimit = 1'000'000;
    size_t pathCap = 512;
    // When set, a true value stops the search at the next budget check with
    // the same semantics as running out of time.
    const std::atomic<bool>* cancel = nullptr;
};

struct FitnessVector {
    int64_t vulnCount = 0;
    int64_t failCount = 0;
    int64_t gasLevel = 0; // dominance level among valid candidates, set at selection
    int64_t mutDistance = 0;
    bool partial = false; // evaluation stopped early; counts are lower bounds
};

struct Candidate {
    Patch patch;
    Contract contract;
    FitnessVector fitness;
    size_t spaceId = 0;
    size_t generation = 0;
    uint64_t parentHash = 0;
    uint64_t contentHash = 0;
    uint64_t maxTestGas = 0;
    std::vector<NodePath> vulnSites;       // detector hits; next generation's hints
    std::optional<GasFormula> expectedGas; // nullopt when path enumeration explodes
};

// None = not valid; the other two split requirement 4 out for reporting.
enum class Plausibility : uint8_t { No, WithinBound, OverBound };

// Requirements: no targeted vulnerabilities, no failing test, full evaluation,
// and when a gas bound is set, no test over it.
Plausibility plausibility(const Candidate& c, const SearchConfig& cfg);

// Fills everything except gasLevel. Detectors run first, then the suite.
// Short-circuiting (URS mode, or an armed g_max formula on an already-invalid
// candidate) marks the fitness partial. testRuns counts executed tests.
void evalCandidate(Candidate& cand, const Contract& original,
                   const std::vector<TestCase>& tests, const CostTable& costs,
                   const SearchConfig& cfg, const GasFormula* gmax = nullptr,
                   size_t* testRuns = nullptr);

// NSGA-II trim to cfg.popSize. Recomputes fitness.gasLevel over the valid
// subset (when the gas objective is on) before building objective vectors;
// secondary objectives only separate valid candidates.
std::vector<Candidate> selectPopulation(std::vector<Candidate> pop, const SearchConfig& cfg);

// Total order for "highest fitness": lexicographic (vulnCount, failCount,
// gasLevel, mutDistance), content hash as the final tie-break.
size_t bestCandidate(const std::vector<Candidate>& pop);

// The seven space workers behind one request interface. Each request races
// the eligible workers (round-robin serialized when deterministic); the first
// compilable fresh mutant wins and only the winner's sample is remembered.
class GeneratorPool {
public:
    GeneratorPool(const Contract& origin, uint64_t seed, bool deterministic);

    struct Draw {
        MutantResult mutant;
        size_t spaceId = 0;
    };

    std::optional<Draw> request(const Candidate& parent, const std::vector<NodePath>& hints);
    void noteBaseChange(); // clears per-space exhaustion marks
    size_t liveWorkers() const;

private:
    const Contract* origin_;
    bool deterministic_;
    uint64_t seed_;
    uint64_t requestCounter_ = 0;
    std::array<std::set<uint64_t>, 7> seen_;
    std::array<bool, 7> exhausted_{};
    std::array<bool, 7> crashed_{};
};

struct PlausiblePatch {
    Patch patch;
    std::string source; // patched contract text
    FitnessVector fitness;
    size_t spaceId = 0;
    size_t gasLevel = 1; // dominance level within the plausible set
    std::string expectedGasText;
    uint64_t maxTestGas = 0;
    uint64_t contentHash = 0;
};

struct RepairReport {
    std::string stopReason; // clean | plausible | timeout | exhausted | generation-cap
    bool alreadyClean = false;
    bool timedOut = false;
    std::vector<PlausiblePatch> plausible;
    std::map<std::string, size_t> vulnsBefore; // detector code -> count
    size_t generated = 0;
    size_t evaluated = 0;
    size_t testRuns = 0;
    std::array<size_t, 7> perSpace{};
    size_t generations = 0;
    size_t reverifyDropped = 0;
    double wallSeconds = 0.0; // forced to 0 in deterministic mode
    SearchConfig config;      // normalized echo
    uint64_t costTableHash = 0;
};

RepairReport repair(const Contract& original, const SearchConfig& cfg,
                    const std::vector<TestCase>& tests, const CostTable& costs);

} // namespace gasrepair
