#pragma once

#include <string>
#include <vector>

#include "placerec/map2d.hpp"

namespace placerec {

// Stair annotation as it appears in the descriptor: type, dimensions and
// distance from the wall it is bound to.
struct StairTuple {
    int type = 0;  // 1 ascending, 0 descending
    double length = 0.0;
    double width = 0.0;
    double distance = 0.0;
};

// One n-uplet of the descriptor: corner angle, following wall length, the
// wall's openings and any stairs bound to that wall.
struct CornerEntry {
    double angle = 0.0;   // degrees
    double length = 0.0;  // meters; 0 = corner undetected
    std::vector<Aperture> apertures;
    std::vector<StairTuple> stairs;
};

struct SceneDescriptor {
    std::vector<CornerEntry> entries;  // cyclic
    bool open_map = false;
    std::string label;      // place identifier, empty = unset
    std::string source_id;  // source video/sequence id, empty = unset
    std::string timestamp;  // creation time, empty = unset (keeps output reproducible)

    size_t size() const { return entries.size(); }
};

// Build the descriptor from a 2D map: one entry per corner in cycle order,
// stairs attached to their nearest wall's entry, canonical start corner.
// All fields quantized to the serialization grid (0.01 deg / 1 mm) so that
// serialization round-trips value-exactly.
SceneDescriptor describe(const Map2D& map, const std::string& label = {});

// Canonical single-line text form; deterministic, meters with 3 decimals,
// degrees with 2.
std::string serialize(const SceneDescriptor& d);

// Inverse of serialize; validates all descriptor invariants.
// Throws ParseError naming the offending field and offset.
SceneDescriptor deserialize(const std::string& line);

// Cycle transforms used by the matcher and by tests.
SceneDescriptor rotated(const SceneDescriptor& d, size_t offset);
// Traversal in the opposite direction: same corners visited in reverse order,
// wall lengths follow their walls, aperture distances re-anchored to the new
// start corner of each wall.
SceneDescriptor reversed(const SceneDescriptor& d);

bool entries_equal(const CornerEntry& a, const CornerEntry& b, double tol = 1e-9);

}  // namespace placerec
