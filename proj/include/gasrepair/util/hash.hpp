#pragma once

#include <cstdint>
#include <string_view>

namespace gasrepair {

// FNV-1a, used for content identity of pretty-printed trees and config echoes.
inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace gasrepair
