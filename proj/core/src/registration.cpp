#include "placerec/registration.hpp"

#include <cmath>
#include <cstdio>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace placerec {

RigidTransform RigidTransform::inverse() const {
    RigidTransform inv;
    inv.rotation = rotation.transpose();
    inv.translation = -(inv.rotation * translation);
    return inv;
}

void RigidTransform::reorthonormalize() {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(rotation, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0) {
        Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
        flip(2, 2) = -1;
        r = svd.matrixU() * flip * svd.matrixV().transpose();
    }
    rotation = r;
}

RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
    RigidTransform out;
    out.rotation = a.rotation * b.rotation;
    out.translation = a.rotation * b.translation + a.translation;
    return out;
}

RigidTransform compose(const std::vector<RigidTransform>& transforms) {
    RigidTransform acc;
    for (const auto& t : transforms) acc = acc * t;
    return acc;
}

namespace {

// One plane hypothesis per physical plane: clustered polygons that are
// coplanar (wall pieces split by an opening) collapse into one constraint.
struct FramePlane {
    Eigen::Vector3d normal;
    double offset;
    double weight;  // total observed area
};

std::vector<FramePlane> collapse_planes(const std::vector<PlanePolygon>& polys) {
    std::vector<FramePlane> planes;
    ClusterConfig cfg;  // defaults; orientation-free comparison
    cfg.adjacency = false;
    for (const auto& p : polys) {
        bool merged = false;
        for (auto& fp : planes) {
            PlaneParams a;
            a.normal = fp.normal;
            a.offset = fp.offset;
            if (!same_plane(a, p.plane, cfg)) continue;
            // align orientation with the stored representative
            Eigen::Vector3d n = p.plane.normal;
            double d = p.plane.offset;
            if (n.dot(fp.normal) < 0) {
                n = -n;
                d = -d;
            }
            const double w = fp.weight + p.area;
            fp.normal = (fp.normal * fp.weight + n * p.area).normalized();
            fp.offset = (fp.offset * fp.weight + d * p.area) / w;
            fp.weight = w;
            merged = true;
            break;
        }
        if (!merged) planes.push_back({p.plane.normal, p.plane.offset, p.area});
    }
    return planes;
}

struct PlaneMatch {
    int prev, next;
    double angle;
};

std::vector<PlaneMatch> match_planes(const std::vector<FramePlane>& prev,
                                     const std::vector<FramePlane>& next,
                                     const Eigen::Matrix3d& candidate_rot, double max_angle_rad,
                                     double max_offset) {
    std::vector<PlaneMatch> candidates;
    for (size_t i = 0; i < prev.size(); ++i)
        for (size_t j = 0; j < next.size(); ++j) {
            const Eigen::Vector3d rn = candidate_rot * next[j].normal;
            const double c = std::clamp(prev[i].normal.dot(rn), -1.0, 1.0);
            const double ang = std::acos(c);
            if (ang > max_angle_rad) continue;
            if (std::abs(prev[i].offset - next[j].offset) > max_offset) continue;
            candidates.push_back({int(i), int(j), ang});
        }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const PlaneMatch& a, const PlaneMatch& b) { return a.angle < b.angle; });
    std::vector<bool> used_p(prev.size(), false), used_n(next.size(), false);
    std::vector<PlaneMatch> matches;
    for (const auto& c : candidates) {
        if (used_p[c.prev] || used_n[c.next]) continue;
        used_p[c.prev] = used_n[c.next] = true;
        matches.push_back(c);
    }
    return matches;
}

// Procrustes over matched normals. Returns nullopt when the normal set spans
// fewer than two directions.
std::optional<Eigen::Matrix3d> solve_rotation(const std::vector<FramePlane>& prev,
                                              const std::vector<FramePlane>& next,
                                              const std::vector<PlaneMatch>& matches,
                                              double min_rank_ratio) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    for (const auto& match : matches) {
        const double w = std::min(prev[match.prev].weight, next[match.next].weight);
        m += w * prev[match.prev].normal * next[match.next].normal.transpose();
    }
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    if (s(0) <= 0 || s(1) / s(0) < min_rank_ratio) return std::nullopt;
    Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
    if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0) d(2, 2) = -1;
    return svd.matrixU() * d * svd.matrixV().transpose();
}

}  // namespace

std::optional<RigidTransform> estimate_transform(const std::vector<PlanePolygon>& prev,
                                                 const std::vector<PlanePolygon>& next,
                                                 const RegistrationConfig& cfg,
                                                 std::string* diagnostic) {
    auto fail = [&](const std::string& why) -> std::optional<RigidTransform> {
        if (diagnostic) *diagnostic = why;
        return std::nullopt;
    };

    const auto prev_planes = collapse_planes(prev);
    const auto next_planes = collapse_planes(next);
    if (prev_planes.size() < 2 || next_planes.size() < 2)
        return fail("fewer than two planes on one side");

    // pass 1: identity candidate (small inter-key-frame motion)
    auto matches = match_planes(prev_planes, next_planes, Eigen::Matrix3d::Identity(),
                                deg2rad(cfg.match_angle_deg), cfg.match_offset);
    if (matches.size() < 2) return fail("fewer than two plane correspondences");
    auto rot = solve_rotation(prev_planes, next_planes, matches, cfg.min_rank_ratio);
    if (!rot) return fail("matched normals span fewer than two directions");

    // pass 2: re-match under the candidate rotation, tighter angle bound
    auto refined = match_planes(prev_planes, next_planes, *rot, deg2rad(cfg.refine_angle_deg),
                                cfg.match_offset);
    if (refined.size() >= 2) {
        if (auto rot2 = solve_rotation(prev_planes, next_planes, refined, cfg.min_rank_ratio)) {
            rot = rot2;
            matches = std::move(refined);
        }
    }

    // translation from offset residuals: n_prev . t = d_prev - d_next
    Eigen::MatrixXd a(matches.size(), 3);
    Eigen::VectorXd b(matches.size());
    for (size_t i = 0; i < matches.size(); ++i) {
        const auto& m = matches[i];
        const double w = std::sqrt(std::min(prev_planes[m.prev].weight, next_planes[m.next].weight));
        a.row(i) = w * prev_planes[m.prev].normal.transpose();
        b(i) = w * (prev_planes[m.prev].offset - next_planes[m.next].offset);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-6);
    RigidTransform t;
    t.rotation = *rot;
    t.translation = svd.solve(b);  // minimum-norm along rank-deficient directions
    if (diagnostic) *diagnostic = "ok, pairs=" + std::to_string(matches.size());
    return t;
}

PlanePolygon transform_polygon(const PlanePolygon& poly, const RigidTransform& t) {
    PlanePolygon out = poly;
    out.plane.normal = t.rotation * poly.plane.normal;
    out.plane.offset = poly.plane.offset + out.plane.normal.dot(t.translation);
    out.basis.origin = t.apply(poly.basis.origin);
    out.basis.u = t.rotation * poly.basis.u;
    out.basis.v = t.rotation * poly.basis.v;
    // in-plane ring coordinates are unchanged; the basis carries the motion

    PointMoments m;
    m.n = poly.moments.n;
    m.sum = t.rotation * poly.moments.sum + poly.moments.n * t.translation;
    m.sum_sq = t.rotation * poly.moments.sum_sq * t.rotation.transpose() +
               t.rotation * poly.moments.sum * t.translation.transpose() +
               t.translation * (t.rotation * poly.moments.sum).transpose() +
               poly.moments.n * t.translation * t.translation.transpose();
    // transformed AABB of an AABB: accumulate per-axis extremes
    Eigen::Vector3d lo = t.translation, hi = t.translation;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double e1 = t.rotation(i, j) * poly.moments.bbox_min(j);
            const double e2 = t.rotation(i, j) * poly.moments.bbox_max(j);
            lo(i) += std::min(e1, e2);
            hi(i) += std::max(e1, e2);
        }
    m.bbox_min = lo;
    m.bbox_max = hi;
    out.moments = m;
    return out;
}

void fuse(Map3D& map, const std::vector<PlanePolygon>& polygons, const RigidTransform& global_t,
          int source_index, const FusionConfig& cfg) {
    for (const auto& in : polygons) {
        PlanePolygon moved = transform_polygon(in, global_t);

        // all map polygons this one should merge with
        std::vector<size_t> hits;
        for (size_t i = 0; i < map.polygons.size(); ++i) {
            const auto& mp = map.polygons[i].poly;
            if (!same_plane(mp.plane, moved.plane, cfg.plane_match)) continue;
            // in-plane reach: express the incoming shape in the map polygon's basis
            PolygonSet projected;
            for (const auto& pwh : moved.shape) {
                PolygonWithHoles q;
                for (const auto& p : pwh.outer)
                    q.outer.push_back(mp.basis.to_plane(moved.basis.to_world(p)));
                projected.push_back(std::move(q));
            }
            if (!cfg.plane_match.adjacency ||
                boxes_within(mp.shape, projected, cfg.plane_match.adjacency_gap))
                hits.push_back(i);
        }

        if (hits.empty()) {
            map.polygons.push_back({std::move(moved), {source_index}});
            continue;
        }

        // merge into the first hit, absorbing the others
        MapPolygon& target = map.polygons[hits.front()];
        auto absorb = [&](const PlanePolygon& add) {
            PolygonSet reproj;
            for (const auto& pwh : add.shape) {
                PolygonWithHoles q;
                for (const auto& p : pwh.outer)
                    q.outer.push_back(snap_mm(target.poly.basis.to_plane(add.basis.to_world(p))));
                for (const auto& h : pwh.holes) {
                    Ring hr;
                    for (const auto& p : h)
                        hr.push_back(snap_mm(target.poly.basis.to_plane(add.basis.to_world(p))));
                    q.holes.push_back(std::move(hr));
                }
                reproj.push_back(std::move(q));
            }
            target.poly.shape = union_sets(target.poly.shape, reproj);
            target.poly.moments.merge(add.moments);
        };
        absorb(moved);
        for (size_t k = hits.size(); k-- > 1;) {
            absorb(map.polygons[hits[k]].poly);
            for (int s : map.polygons[hits[k]].sources) target.sources.push_back(s);
            map.polygons.erase(map.polygons.begin() + hits[k]);
        }
        target.sources.push_back(source_index);

        // refit the merged plane from the pooled moments, keeping orientation
        if (auto refit = fit_plane(target.poly.moments)) {
            if (refit->normal.dot(target.poly.plane.normal) < 0) {
                refit->normal = -refit->normal;
                refit->offset = -refit->offset;
            }
            target.poly.plane = *refit;
        }
        target.poly.area = area(target.poly.shape);
    }
}

std::string export_obj(const Map3D& map) {
    std::string s = "# placerec 3D map export\n";
    char line[128];
    int vbase = 1;
    for (size_t i = 0; i < map.polygons.size(); ++i) {
        const auto& poly = map.polygons[i].poly;
        std::snprintf(line, sizeof(line), "o polygon_%zu\n", i);
        s += line;
        auto emit_ring = [&](const Ring& r) {
            for (const auto& p : r) {
                const Eigen::Vector3d w = poly.basis.to_world(p);
                std::snprintf(line, sizeof(line), "v %.4f %.4f %.4f\n", w.x(), w.y(), w.z());
                s += line;
            }
            s += "f";
            for (size_t k = 0; k < r.size(); ++k) {
                std::snprintf(line, sizeof(line), " %d", vbase + int(k));
                s += line;
            }
            s += "\n";
            vbase += int(r.size());
        };
        for (const auto& pwh : poly.shape) {
            emit_ring(pwh.outer);
            for (const auto& h : pwh.holes) emit_ring(h);
        }
    }
    return s;
}

}  // namespace placerec
