#pragma once

#include <cstdint>
#include <vector>

namespace gasrepair {

// Objective vectors minimize every component. All vectors in one call must
// share the same length.
using Objectives = std::vector<int64_t>;

// True iff a is no worse on every component and strictly better on one.
bool paretoDominates(const Objectives& a, const Objectives& b);

// 0-based front index per individual: front 0 is the non-dominated set,
// front k+1 is non-dominated once fronts 0..k are removed.
std::vector<size_t> paretoFronts(const std::vector<Objectives>& objs);

// Crowding distance per individual, computed within each front. Boundary
// individuals of a front get infinity.
std::vector<double> crowdingDistances(const std::vector<Objectives>& objs,
                                      const std::vector<size_t>& frontOf);

// Indices of the `keep` survivors: whole fronts in order, the last partial
// front trimmed by descending crowding distance (index ascending on ties).
// Survivors are listed front by front; the result is deterministic.
std::vector<size_t> nsga2Select(const std::vector<Objectives>& objs, size_t keep);

} // namespace gasrepair
