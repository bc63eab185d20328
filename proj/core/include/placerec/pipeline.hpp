#pragma once

#include "placerec/config.hpp"
#include "placerec/descriptor.hpp"
#include "placerec/store.hpp"

namespace placerec {

// Wall-clock per stage, accumulated over the whole sequence (milliseconds).
struct StageTimings {
    double extract_ms = 0;
    double cluster_ms = 0;
    double register_ms = 0;
    double fuse_ms = 0;
    double map2d_ms = 0;
    double describe_ms = 0;
    int keyframes = 0;

    double total_ms() const {
        return extract_ms + cluster_ms + register_ms + fuse_ms + map2d_ms + describe_ms;
    }
    std::string report() const;
};

struct DescribeResult {
    SceneDescriptor descriptor;
    Map2D map2d;
    Map3D map3d;
    StageTimings timings;
    std::vector<std::string> diagnostics;  // skipped frames, odd openings, ...
};

// The full depth-video -> descriptor pipeline: key-frame selection, median
// smoothing, planar extraction, per-frame clustering, incremental
// registration and fusion, 2D map derivation, descriptor computation.
DescribeResult describe_frames(const std::vector<DepthFrame>& frames, const PipelineConfig& cfg,
                               const std::string& label = {});

// Load a sequence directory (zero-padded .pgm frames) with the intrinsics and
// ranges of `cfg` applied.
std::vector<DepthFrame> load_sequence(const std::filesystem::path& dir, const PipelineConfig& cfg);

}  // namespace placerec
