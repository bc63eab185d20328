#pragma once

#include <optional>
#include <string>
#include <vector>

#include "placerec/descriptor.hpp"

namespace placerec {

struct MatchConfig {
    double beta1 = 0.5;   // angle weight, per degree
    double beta2 = 1.0;   // length/distance weight, per meter
    double beta3 = 2.0;   // type-mismatch weight
    double accept_threshold = 8.0;  // max Sim for a positive recognition
    int max_toggle = 12;  // full aperture-state enumeration up to 2^max_toggle

    void validate() const;
};

enum class Direction { Clockwise, Anticlockwise };

struct Alignment {
    size_t offset = 0;  // model start corner
    Direction direction = Direction::Clockwise;
    // per flattened model aperture (of the direction view, in entry order):
    // true = toggled closed (dropped before comparison)
    std::vector<uint8_t> closed;
};

struct MatchResult {
    std::string label;
    double score = 0.0;
    Alignment alignment;
    size_t db_index = 0;
};

// Weighted similarity of two aligned descriptors; 0 = identical fields.
// Model must have at least as many corners as the query; the comparison runs
// over the query's corners. Unpaired apertures/stairs are penalized with
// beta3 plus their own length terms.
double sim(const SceneDescriptor& query, const SceneDescriptor& model_aligned,
           const MatchConfig& cfg);

// Minimum sim over all model start corners, both traversal directions, and
// all open/close states of the model's apertures. nullopt when the model has
// fewer corners than the query.
std::optional<std::pair<double, Alignment>> best_alignment(const SceneDescriptor& query,
                                                           const SceneDescriptor& model,
                                                           const MatchConfig& cfg);

class DescriptorDB;  // store.hpp

// Algorithm-2 recognition: evaluates best_alignment against every eligible db
// entry in insertion order and returns the global minimum; nullopt when the
// db is empty, nothing is eligible, or the minimum exceeds accept_threshold.
std::optional<MatchResult> recognize(const SceneDescriptor& query, const DescriptorDB& db,
                                     const MatchConfig& cfg, std::string* diagnostic = nullptr);

// All eligible entries sorted by ascending score (no threshold applied).
std::vector<MatchResult> rank_all(const SceneDescriptor& query, const DescriptorDB& db,
                                  const MatchConfig& cfg);

}  // namespace placerec
