#pragma once

#include "gasrepair/lang/ast.hpp"

#include <optional>

namespace gasrepair {

enum class VulnKind : uint8_t {
    ExceptionDisorder, // send result dropped on the floor
    Reentrancy,        // storage written after an external send on some path
    IntegerOverflow,   // unguarded wrapping arithmetic
    OrderDependence,   // send amount steered by state another function rewrites
};

// Short stable codes used in reports and on the command line.
const char* vulnKindCode(VulnKind k);
std::optional<VulnKind> vulnKindFromCode(const std::string& code);

struct Vulnerability {
    VulnKind kind = VulnKind::ExceptionDisorder;
    NodeId location;
    std::string note;
};

bool operator<(const Vulnerability& a, const Vulnerability& b);
bool operator==(const Vulnerability& a, const Vulnerability& b);

// Runs the selected detectors; results are deduplicated by (kind, location)
// and sorted. The contract must already typecheck.
std::vector<Vulnerability> detect(const Contract& c, const std::vector<VulnKind>& kinds);
std::vector<Vulnerability> detectAll(const Contract& c);

} // namespace gasrepair
