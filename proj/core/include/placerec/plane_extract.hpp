#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "placerec/depth.hpp"

namespace placerec {

// Depth-dependent smoothness threshold, millimeters in -> millimeters out.
// Linear in depth to track sensor noise growth.
struct SmoothnessThreshold {
    double a_mm = 4.0;
    double b = 0.004;
    double operator()(double z_mm) const { return a_mm + b * z_mm; }
};

struct ExtractionConfig {
    double t_m = 1.5e-7;        // MSE threshold, m^2
    double t_c = 0.0008;        // curvature threshold (surface variation, unitless)
    SmoothnessThreshold f_s;    // smoothness threshold function
    int min_region_size = 8;    // stop splitting at this pixel size
    double max_invalid_frac = 0.2;

    void validate() const;
};

// Axis-aligned pixel rectangle [x, x+w) x [y, y+h). Member pixels are the
// rectangle minus invalid samples.
struct Region {
    int x = 0, y = 0;
    int w = 0, h = 0;
};

// Least-squares plane in the camera frame: { X : normal . X = offset }.
// Normal is unit length and oriented toward the camera (normal . centroid <= 0
// for point sets in front of the camera).
struct PlaneParams {
    Eigen::Vector3d normal{0, 0, -1};
    double offset = 0.0;     // meters, signed distance to the origin along normal
    double mse = 0.0;        // mean squared orthogonal residual, m^2
    double curvature = 0.0;  // lambda_min / (l0 + l1 + l2) of the point covariance
};

// Accumulated first/second moments of a point set; enough to refit a plane
// for any union of regions without touching the pixels again.
struct PointMoments {
    double n = 0.0;
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    Eigen::Matrix3d sum_sq = Eigen::Matrix3d::Zero();  // sum of p * p^T
    Eigen::Vector3d bbox_min = Eigen::Vector3d::Zero();
    Eigen::Vector3d bbox_max = Eigen::Vector3d::Zero();

    void add(const Eigen::Vector3d& p);
    void merge(const PointMoments& other);
    Eigen::Vector3d centroid() const { return sum / n; }
    Eigen::Matrix3d covariance() const;
};

struct DciMap {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> map;
    bool at(int u, int v) const { return map[static_cast<size_t>(v) * width + u] != 0; }
};

// Depth change indication: DCI(u,v)=1 iff the max absolute depth difference to
// the valid 4-neighbors is <= f_s(depth). Border pixels use existing neighbors
// only; invalid neighbors are skipped the same way; invalid pixels map to 0.
DciMap compute_dci(const DepthFrame& frame, const std::function<double(double)>& f_s);

// Total-least-squares plane through a point set (smallest-eigenvector of the
// covariance). Fails on fewer than 3 points or a degenerate (collinear) set.
std::optional<PlaneParams> fit_plane(std::span<const Eigen::Vector3d> points);
std::optional<PlaneParams> fit_plane(const PointMoments& m);

// Eq-style flatness conditional: mse < t_m AND curvature < t_c, strictly.
bool is_flat(const PlaneParams& params, const ExtractionConfig& cfg);

// True iff every member (valid) pixel of the region has DCI = 1.
bool is_smooth(const Region& region, const DciMap& dci, const DepthFrame& frame);

struct ExtractedRegion {
    Region region;
    PlaneParams plane;
    PointMoments moments;
    // Maximal runs of valid pixels, for pixel-accurate footprints downstream:
    // each strip is {u0, u1, v} covering [u0, u1] x [v, v] (one Region entry per row,
    // rows with identical spans merged vertically).
    std::vector<Region> valid_strips;
};

// Recursive quad-tree decomposition of a smoothed key frame into planar
// regions by the flatness + smoothness tests. Emitted regions are disjoint
// axis-aligned rectangles.
std::vector<ExtractedRegion> extract_planar_regions(const DepthFrame& frame,
                                                    const ExtractionConfig& cfg);

// Line-delimited debug dump (origin, size, normal, offset, mse, curvature).
std::string dump_regions(const std::vector<ExtractedRegion>& regions);

}  // namespace placerec
