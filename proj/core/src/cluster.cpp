#include "placerec/cluster.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

namespace placerec {

void ClusterConfig::validate() const {
    if (l_nom <= 0 || l_dist <= 0) throw ConfigError("cluster: thresholds must be positive");
    if (adjacency_gap <= 0) throw ConfigError("cluster: adjacency gap must be positive");
}

Vec2 PlaneBasis::to_plane(const Eigen::Vector3d& p) const {
    const Eigen::Vector3d r = p - origin;
    return {r.dot(u), r.dot(v)};
}

Eigen::Vector3d PlaneBasis::to_world(const Vec2& p) const {
    return origin + p.x() * u + p.y() * v;
}

PlaneBasis make_basis(const PlaneParams& plane) {
    PlaneBasis b;
    b.origin = plane.normal * plane.offset;  // plane point closest to the origin
    // pick the world axis least aligned with the normal for a stable tangent
    int k = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(plane.normal(i)) < std::abs(plane.normal(k))) k = i;
    const Eigen::Vector3d axis = Eigen::Vector3d::Unit(k);
    b.v = plane.normal.cross(axis).normalized();
    b.u = b.v.cross(plane.normal);  // so that u x v = normal
    return b;
}

PlaneParams canonical_plane(const PlaneParams& p) {
    PlaneParams out = p;
    constexpr double kEps = 1e-9;
    bool flip = false;
    if (out.offset < -kEps) {
        flip = true;
    } else if (std::abs(out.offset) <= kEps) {
        for (int i = 0; i < 3; ++i) {
            if (out.normal(i) > kEps) break;
            if (out.normal(i) < -kEps) {
                flip = true;
                break;
            }
        }
    }
    if (flip) {
        out.normal = -out.normal;
        out.offset = -out.offset;
    }
    return out;
}

bool same_plane(const PlaneParams& a, const PlaneParams& b, const ClusterConfig& cfg) {
    const PlaneParams ca = canonical_plane(a);
    const PlaneParams cb = canonical_plane(b);
    return (ca.normal - cb.normal).norm() < cfg.l_nom &&
           std::abs(ca.offset - cb.offset) < cfg.l_dist;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

double bbox_gap_3d(const PointMoments& a, const PointMoments& b) {
    double d2 = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double g = std::max({0.0, b.bbox_min(i) - a.bbox_max(i),
                                   a.bbox_min(i) - b.bbox_max(i)});
        d2 += g * g;
    }
    return std::sqrt(d2);
}

// Footprint of a pixel strip on the fitted plane: corner rays intersected
// with the plane. Samples sit at integer pixel coordinates, so a strip of
// pixels [x, x+w) covers [x-0.5, x+w-0.5] in the image plane.
Ring strip_footprint(const Region& strip, const CameraIntrinsics& k, const PlaneParams& plane,
                     const PlaneBasis& basis) {
    Ring ring;
    const double u0 = strip.x - 0.5, u1 = strip.x + strip.w - 0.5;
    const double v0 = strip.y - 0.5, v1 = strip.y + strip.h - 0.5;
    const double corners[4][2] = {{u0, v0}, {u1, v0}, {u1, v1}, {u0, v1}};
    for (const auto& c : corners) {
        const Eigen::Vector3d dir((c[0] - k.cx) / k.fx, (c[1] - k.cy) / k.fy, 1.0);
        const double denom = plane.normal.dot(dir);
        if (std::abs(denom) < 1e-12) return {};  // plane through the ray: degenerate strip
        const double z = plane.offset / denom;
        if (z <= 0) return {};
        ring.push_back(basis.to_plane(z * dir));
    }
    return ring;
}

}  // namespace

std::vector<PlanePolygon> cluster_regions(const std::vector<ExtractedRegion>& regions,
                                          const CameraIntrinsics& intrinsics,
                                          const ClusterConfig& cfg) {
    cfg.validate();
    const size_t n = regions.size();
    UnionFind uf(n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            if (!same_plane(regions[i].plane, regions[j].plane, cfg)) continue;
            if (cfg.adjacency &&
                bbox_gap_3d(regions[i].moments, regions[j].moments) > cfg.adjacency_gap)
                continue;
            uf.unite(int(i), int(j));
        }

    // gather components in first-member order for deterministic output
    std::vector<int> root_of(n);
    std::vector<int> order;
    std::vector<std::vector<int>> members;
    for (size_t i = 0; i < n; ++i) {
        const int r = uf.find(int(i));
        root_of[i] = r;
        if (r == int(i)) {
            order.push_back(r);
            members.emplace_back();
        }
    }
    std::vector<int> slot(n, -1);
    for (size_t k = 0; k < order.size(); ++k) slot[order[k]] = int(k);
    for (size_t i = 0; i < n; ++i) members[slot[root_of[i]]].push_back(int(i));

    std::vector<PlanePolygon> out;
    out.reserve(members.size());
    for (const auto& comp : members) {
        PointMoments merged;
        for (int idx : comp) merged.merge(regions[idx].moments);
        auto plane = fit_plane(merged);
        if (!plane) continue;
        // keep the camera-facing orientation of the members
        if (plane->normal.dot(regions[comp.front()].plane.normal) < 0) {
            plane->normal = -plane->normal;
            plane->offset = -plane->offset;
        }
        PlanePolygon poly;
        poly.plane = *plane;
        poly.basis = make_basis(*plane);
        poly.moments = merged;
        std::vector<Ring> rings;
        for (int idx : comp)
            for (const auto& strip : regions[idx].valid_strips) {
                Ring r = strip_footprint(strip, intrinsics, *plane, poly.basis);
                if (!r.empty()) rings.push_back(std::move(r));
            }
        poly.shape = union_rings(rings);
        poly.area = area(poly.shape);
        if (poly.shape.empty() || poly.area <= 0.0) continue;
        out.push_back(std::move(poly));
    }
    return out;
}

double polygon_area(const PlanePolygon& polygon) { return area(polygon.shape); }

std::string dump_polygons(const std::vector<PlanePolygon>& polys) {
    std::string s;
    char line[512];
    for (size_t i = 0; i < polys.size(); ++i) {
        const auto& p = polys[i];
        std::snprintf(line, sizeof(line),
                      "poly %zu area %.6f n %.9f %.9f %.9f d %.9f\n"
                      "basis o %.9f %.9f %.9f u %.9f %.9f %.9f v %.9f %.9f %.9f\n",
                      i, p.area, p.plane.normal.x(), p.plane.normal.y(), p.plane.normal.z(),
                      p.plane.offset, p.basis.origin.x(), p.basis.origin.y(), p.basis.origin.z(),
                      p.basis.u.x(), p.basis.u.y(), p.basis.u.z(), p.basis.v.x(), p.basis.v.y(),
                      p.basis.v.z());
        s += line;
        for (const auto& pwh : p.shape) {
            auto dump_ring = [&](const Ring& r, const char* tag) {
                s += tag;
                for (const auto& pt : r) {
                    std::snprintf(line, sizeof(line), " %.3f %.3f", pt.x(), pt.y());
                    s += line;
                }
                s += "\n";
            };
            dump_ring(pwh.outer, "ring outer");
            for (const auto& h : pwh.holes) dump_ring(h, "ring hole");
        }
    }
    return s;
}

}  // namespace placerec
