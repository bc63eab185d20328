#pragma once

#include <filesystem>

#include "placerec/cluster.hpp"
#include "placerec/map2d.hpp"
#include "placerec/matcher.hpp"
#include "placerec/plane_extract.hpp"
#include "placerec/registration.hpp"

namespace placerec {

// Everything the describe pipeline needs, loadable from one JSON file that
// lives next to a frame sequence. Missing keys keep their defaults.
struct PipelineConfig {
    CameraIntrinsics intrinsics{525.0, 525.0, 319.5, 239.5};  // VGA depth-cam default
    int image_width = 640, image_height = 480;
    uint16_t min_range_mm = 400, max_range_mm = 8000;
    int stride = 5;
    int median_window = 3;
    ExtractionConfig extraction;
    ClusterConfig cluster;
    RegistrationConfig registration;
    FusionConfig fusion;
    Map2dConfig map2d;
    MatchConfig match;

    void validate() const;

    static PipelineConfig load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;
};

}  // namespace placerec
