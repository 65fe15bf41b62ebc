#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace gasrepair {

// Thin wrapper so sampling sequences are pinned to the seed alone,
// independent of library distribution internals.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next() { return eng_(); }

    // Uniform in [0, n). Modulo bias is irrelevant at the scales used here.
    uint64_t below(uint64_t n) { return n == 0 ? 0 : eng_() % n; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    Rng fork() { return Rng(eng_() ^ 0x9e3779b97f4a7c15ull); }

private:
    std::mt19937_64 eng_;
};

} // namespace gasrepair
