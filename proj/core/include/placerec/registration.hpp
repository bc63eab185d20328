#pragma once

#include <optional>
#include <string>
#include <vector>

#include "placerec/cluster.hpp"

namespace placerec {

struct RigidTransform {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }
    RigidTransform inverse() const;

    // Project the rotation back onto SO(3); keeps long chains orthonormal.
    void reorthonormalize();

    static RigidTransform identity() { return {}; }
};

// (a * b) applies b first: (a*b)(x) = a(b(x)).
RigidTransform operator*(const RigidTransform& a, const RigidTransform& b);

// Temporally ordered product: compose({t1, t2, ..., tn}) = t1 * t2 * ... * tn.
// Empty list gives the identity.
RigidTransform compose(const std::vector<RigidTransform>& transforms);

struct RegistrationConfig {
    double match_angle_deg = 10.0;   // candidate pairing: normal angle bound
    double match_offset = 0.2;       // candidate pairing: |d1 - d2| bound, meters
    double refine_angle_deg = 5.0;   // second pass bound after candidate rotation
    double min_rank_ratio = 1e-3;    // sigma1/sigma0 below this = degenerate normals
};

// Transform mapping next-frame coordinates into prev-frame coordinates,
// estimated from matched plane pairs: rotation by orthogonal Procrustes over
// area-weighted normals, translation by least squares on offset residuals
// (minimum-norm along unconstrained directions). Fails on under-constrained
// geometry; `diagnostic`, when given, says why.
std::optional<RigidTransform> estimate_transform(const std::vector<PlanePolygon>& prev,
                                                 const std::vector<PlanePolygon>& next,
                                                 const RegistrationConfig& cfg = {},
                                                 std::string* diagnostic = nullptr);

// Transform a polygon's plane params, basis, and moments into another frame.
PlanePolygon transform_polygon(const PlanePolygon& poly, const RigidTransform& t);

struct FusionConfig {
    ClusterConfig plane_match{0.1, 0.08, true, 0.12};  // same_plane + in-plane gap for merging
};

struct MapPolygon {
    PlanePolygon poly;
    std::vector<int> sources;  // key-frame indices that contributed
};

// Global 3D map in the frame of the first key frame.
struct Map3D {
    std::vector<MapPolygon> polygons;
};

// Transform `polygons` by `global_t` and merge them into the map: unioned with
// any map polygon on the same plane within in-plane reach, appended otherwise.
void fuse(Map3D& map, const std::vector<PlanePolygon>& polygons, const RigidTransform& global_t,
          int source_index, const FusionConfig& cfg = {});

// Flat-polygon OBJ export for visualization (rings as faces).
std::string export_obj(const Map3D& map);

}  // namespace placerec
