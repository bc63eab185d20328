#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "placerec/common.hpp"

namespace placerec {

// Pinhole camera model. Depth values are distances along the optical axis
// (z-depth), the usual depth-camera convention.
struct CameraIntrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;

    void validate(int width, int height) const;
};

// One depth image. `depth` is row-major, u16 millimeters, 0 = invalid/no-return.
struct DepthFrame {
    int width = 0;
    int height = 0;
    std::vector<uint16_t> depth;
    CameraIntrinsics intrinsics;
    int index = 0;  // frame ordinal in the source sequence

    uint16_t at(int u, int v) const { return depth[static_cast<size_t>(v) * width + u]; }
    uint16_t& at(int u, int v) { return depth[static_cast<size_t>(v) * width + u]; }
    bool valid(int u, int v) const { return at(u, v) != 0; }

    void validate() const;

    // Zero out samples outside [min_mm, max_mm]; keeps the frame invariant
    // that every nonzero sample is within the sensor's working range.
    void clamp_range(uint16_t min_mm, uint16_t max_mm);
};

// Frames with index % stride == 0, order preserved. stride >= 1.
std::vector<DepthFrame> select_keyframes(const std::vector<DepthFrame>& sequence, int stride);

// Plain index predicate, for callers that stream frames instead of
// materializing the whole sequence.
inline bool is_keyframe(int frame_index, int stride) {
    if (stride < 1) throw ConfigError("keyframe stride must be >= 1");
    return frame_index % stride == 0;
}

// Median filter over a window x window neighborhood. Invalid (0) samples are
// excluded from each window, and a no-return pixel stays a no-return: filling
// hole rims would bias every aperture measurement by a pixel per side.
// Even counts take the lower median so no new depth value is ever introduced.
DepthFrame median_smooth(const DepthFrame& frame, int window);

// Back-project pixel (u,v) to a metric 3D point in the camera frame.
// Returns nullopt when the depth sample is invalid.
std::optional<Eigen::Vector3d> backproject(const DepthFrame& frame, int u, int v);

// Same, from an explicit depth in millimeters (no validity lookup).
Eigen::Vector3d backproject_depth(const CameraIntrinsics& k, double u, double v, double z_mm);

// Perspective projection, the inverse of backproject. Point must have z > 0.
Eigen::Vector2d project(const CameraIntrinsics& k, const Eigen::Vector3d& p);

}  // namespace placerec
