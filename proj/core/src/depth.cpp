#include "placerec/depth.hpp"

#include <algorithm>

namespace placerec {

void CameraIntrinsics::validate(int width, int height) const {
    if (fx <= 0.0 || fy <= 0.0) throw ConfigError("intrinsics: focal lengths must be positive");
    if (cx < 0.0 || cx >= width || cy < 0.0 || cy >= height)
        throw ConfigError("intrinsics: principal point outside the image");
}

void DepthFrame::validate() const {
    if (width <= 0 || height <= 0) throw ConfigError("depth frame: non-positive dimensions");
    if (depth.size() != static_cast<size_t>(width) * height)
        throw ConfigError("depth frame: buffer size does not match dimensions");
    intrinsics.validate(width, height);
}

void DepthFrame::clamp_range(uint16_t min_mm, uint16_t max_mm) {
    for (auto& d : depth)
        if (d != 0 && (d < min_mm || d > max_mm)) d = 0;
}

std::vector<DepthFrame> select_keyframes(const std::vector<DepthFrame>& sequence, int stride) {
    if (stride < 1) throw ConfigError("keyframe stride must be >= 1");
    std::vector<DepthFrame> out;
    for (const auto& f : sequence)
        if (f.index % stride == 0) out.push_back(f);
    return out;
}

DepthFrame median_smooth(const DepthFrame& frame, int window) {
    if (window < 3 || window % 2 == 0)
        throw ConfigError("median window must be odd and >= 3");
    frame.validate();

    DepthFrame out = frame;
    const int r = window / 2;
    std::vector<uint16_t> buf;
    buf.reserve(static_cast<size_t>(window) * window);

    for (int v = 0; v < frame.height; ++v) {
        const int v0 = std::max(0, v - r), v1 = std::min(frame.height - 1, v + r);
        for (int u = 0; u < frame.width; ++u) {
            if (frame.at(u, v) == 0) continue;  // no-returns stay holes; see median notes
            const int u0 = std::max(0, u - r), u1 = std::min(frame.width - 1, u + r);
            buf.clear();
            for (int vv = v0; vv <= v1; ++vv)
                for (int uu = u0; uu <= u1; ++uu) {
                    const uint16_t d = frame.at(uu, vv);
                    if (d != 0) buf.push_back(d);
                }
            if (buf.empty()) {
                out.at(u, v) = 0;
            } else {
                // lower median: for even counts this still returns a window value
                const size_t mid = (buf.size() - 1) / 2;
                std::nth_element(buf.begin(), buf.begin() + mid, buf.end());
                out.at(u, v) = buf[mid];
            }
        }
    }
    return out;
}

std::optional<Eigen::Vector3d> backproject(const DepthFrame& frame, int u, int v) {
    const uint16_t d = frame.at(u, v);
    if (d == 0) return std::nullopt;
    return backproject_depth(frame.intrinsics, u, v, d);
}

Eigen::Vector3d backproject_depth(const CameraIntrinsics& k, double u, double v, double z_mm) {
    const double z = z_mm * 1e-3;
    return {(u - k.cx) * z / k.fx, (v - k.cy) * z / k.fy, z};
}

Eigen::Vector2d project(const CameraIntrinsics& k, const Eigen::Vector3d& p) {
    return {p.x() * k.fx / p.z() + k.cx, p.y() * k.fy / p.z() + k.cy};
}

}  // namespace placerec
