#pragma once

#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "placerec/plane_extract.hpp"
#include "placerec/polygon.hpp"

namespace placerec {

struct ClusterConfig {
    double l_nom = 0.1;    // threshold on ||n1 - n2||
    double l_dist = 0.05;  // threshold on |d1 - d2|, meters
    bool adjacency = true; // also require spatial adjacency to merge
    double adjacency_gap = 0.1;  // meters, 3D bounding-box gap

    void validate() const;
};

// In-plane orthonormal coordinate frame. u x v = plane normal.
struct PlaneBasis {
    Eigen::Vector3d origin = Eigen::Vector3d::Zero();
    Eigen::Vector3d u = Eigen::Vector3d::UnitX();
    Eigen::Vector3d v = Eigen::Vector3d::UnitY();

    Eigen::Vector3d normal() const { return u.cross(v); }
    Vec2 to_plane(const Eigen::Vector3d& p) const;
    Eigen::Vector3d to_world(const Vec2& p) const;
};

PlaneBasis make_basis(const PlaneParams& plane);

// A 3D plane carrying the clipped 2D boundary of its observed surface.
struct PlanePolygon {
    PlaneParams plane;
    PlaneBasis basis;
    PolygonSet shape;
    double area = 0.0;
    PointMoments moments;  // of the member points, kept for refits
};

// Flip (normal, offset) so offset >= 0; ties broken on the normal's first
// significant component. Makes plane comparison orientation-free.
PlaneParams canonical_plane(const PlaneParams& p);

// Eq-style coplanarity test: ||n1 - n2|| < l_nom and |d1 - d2| < l_dist on
// canonically oriented params, both strict.
bool same_plane(const PlaneParams& a, const PlaneParams& b, const ClusterConfig& cfg);

// Group one frame's planar regions into per-plane polygons: connected
// components under same_plane (+ adjacency), pixel-footprint union by polygon
// clipping, area-weighted plane refit per component.
std::vector<PlanePolygon> cluster_regions(const std::vector<ExtractedRegion>& regions,
                                          const CameraIntrinsics& intrinsics,
                                          const ClusterConfig& cfg);

// Non-negative total area of the polygon's rings (outer rings minus holes).
double polygon_area(const PlanePolygon& polygon);

// Structured-text dump shared with the registration module.
std::string dump_polygons(const std::vector<PlanePolygon>& polys);

}  // namespace placerec
