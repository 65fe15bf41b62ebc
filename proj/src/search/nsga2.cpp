#include "gasrepair/search/nsga2.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace gasrepair {

bool paretoDominates(const Objectives& a, const Objectives& b) {
    bool strict = false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strict = true;
    }
    return strict;
}

std::vector<size_t> paretoFronts(const std::vector<Objectives>& objs) {
    const size_t n = objs.size();
    std::vector<size_t> frontOf(n, 0);
    std::vector<size_t> dominatedCount(n, 0);
    std::vector<std::vector<size_t>> dominates(n);

    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            if (paretoDominates(objs[i], objs[j])) {
                dominates[i].push_back(j);
                ++dominatedCount[j];
            } else if (paretoDominates(objs[j], objs[i])) {
                dominates[j].push_back(i);
                ++dominatedCount[i];
            }
        }

    std::vector<size_t> current;
    for (size_t i = 0; i < n; ++i)
        if (dominatedCount[i] == 0) current.push_back(i);

    size_t front = 0;
    while (!current.empty()) {
        std::vector<size_t> next;
        for (size_t i : current) {
            frontOf[i] = front;
            for (size_t j : dominates[i])
                if (--dominatedCount[j] == 0) next.push_back(j);
        }
        current = std::move(next);
        ++front;
    }
    return frontOf;
}

std::vector<double> crowdingDistances(const std::vector<Objectives>& objs,
                                      const std::vector<size_t>& frontOf) {
    const size_t n = objs.size();
    std::vector<double> dist(n, 0.0);
    if (n == 0) return dist;
    const size_t m = objs[0].size();
    const double inf = std::numeric_limits<double>::infinity();

    size_t frontCount = *std::max_element(frontOf.begin(), frontOf.end()) + 1;
    std::vector<std::vector<size_t>> members(frontCount);
    for (size_t i = 0; i < n; ++i) members[frontOf[i]].push_back(i);

    for (auto& front : members) {
        if (front.size() <= 2) {
            for (size_t i : front) dist[i] = inf;
            continue;
        }
        for (size_t k = 0; k < m; ++k) {
            std::sort(front.begin(), front.end(), [&](size_t a, size_t b) {
                return objs[a][k] != objs[b][k] ? objs[a][k] < objs[b][k] : a < b;
            });
            int64_t lo = objs[front.front()][k];
            int64_t hi = objs[front.back()][k];
            dist[front.front()] = inf;
            dist[front.back()] = inf;
            if (hi == lo) continue;
            double span = static_cast<double>(hi - lo);
            for (size_t p = 1; p + 1 < front.size(); ++p) {
                if (dist[front[p]] == inf) continue;
                dist[front[p]] +=
                    static_cast<double>(objs[front[p + 1]][k] - objs[front[p - 1]][k]) / span;
            }
        }
    }
    return dist;
}

std::vector<size_t> nsga2Select(const std::vector<Objectives>& objs, size_t keep) {
    const size_t n = objs.size();
    if (keep >= n) {
        std::vector<size_t> all(n);
        std::iota(all.begin(), all.end(), 0);
        return all;
    }
    std::vector<size_t> frontOf = paretoFronts(objs);
    std::vector<double> dist = crowdingDistances(objs, frontOf);

    size_t frontCount = n == 0 ? 0 : *std::max_element(frontOf.begin(), frontOf.end()) + 1;
    std::vector<std::vector<size_t>> members(frontCount);
    for (size_t i = 0; i < n; ++i) members[frontOf[i]].push_back(i);

    std::vector<size_t> picked;
    picked.reserve(keep);
    for (auto& front : members) {
        if (picked.size() == keep) break;
        if (picked.size() + front.size() <= keep) {
            picked.insert(picked.end(), front.begin(), front.end());
            continue;
        }
        std::sort(front.begin(), front.end(), [&](size_t a, size_t b) {
            return dist[a] != dist[b] ? dist[a] > dist[b] : a < b;
        });
        front.resize(keep - picked.size());
        std::sort(front.begin(), front.end());
        picked.insert(picked.end(), front.begin(), front.end());
    }
    return picked;
}

} // namespace gasrepair
