#include "placerec/map2d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace placerec {

namespace {

double mod360(double a) {
    a = std::fmod(a, 360.0);
    if (a < 0) a += 360.0;
    return a;
}

double interior_angle(const Vec2& prev, const Vec2& cur, const Vec2& next) {
    const Vec2 a = prev - cur;
    const Vec2 b = next - cur;
    const double ang = rad2deg(std::atan2(a.y(), a.x())) - rad2deg(std::atan2(b.y(), b.x()));
    return mod360(ang);
}

double ring_signed_area(const std::vector<Vec2>& pts) {
    double s = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        const Vec2& p = pts[i];
        const Vec2& q = pts[(i + 1) % pts.size()];
        s += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * s;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 <= 0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

bool segments_properly_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    auto cross = [](const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); };
    const double d1 = cross(b - a, c - a);
    const double d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c);
    const double d4 = cross(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

double plane_height(const PlaneParams& p, const Eigen::Vector3d& up) {
    // all points of a horizontal plane share this height along `up`
    return p.offset * p.normal.dot(up);
}

}  // namespace

void Map2D::validate() const {
    const size_t n = corners.size();
    if (corners.size() != angles.size() || corners.size() != walls.size())
        throw PipelineError("map2d: inconsistent corner/angle/wall counts");
    if (!open_map) {
        if (n < 3) throw PipelineError("map2d: closed map needs at least 3 corners");
        double sum = 0.0;
        for (double a : angles) {
            if (a <= 0.0 || a >= 360.0)
                throw PipelineError("map2d: interior angle out of (0, 360)");
            sum += a;
        }
        const double expect = (double(n) - 2.0) * 180.0;
        if (std::abs(sum - expect) > 2.0 * double(n))
            throw PipelineError("map2d: interior angle sum violates closed-polygon identity");
        // simple cycle: no two non-adjacent walls properly intersect
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 2; j < n; ++j) {
                if (i == 0 && j == n - 1) continue;
                if (segments_properly_intersect(corners[i], corners[(i + 1) % n], corners[j],
                                                corners[(j + 1) % n]))
                    throw PipelineError("map2d: corner cycle self-intersects");
            }
    }
    for (const auto& w : walls) {
        double prev_end = -1e-9;
        for (const auto& ap : w.apertures) {
            if (ap.distance < -1e-6) throw PipelineError("map2d: aperture before wall start");
            if (ap.distance + ap.length > w.length + 1e-6)
                throw PipelineError("map2d: aperture exceeds wall length");
            if (ap.distance < prev_end - 1e-9)
                throw PipelineError("map2d: apertures overlap or are unsorted");
            prev_end = ap.distance + ap.length;
        }
    }
    for (const auto& st : stairs) {
        if (st.step_count < 2) throw PipelineError("map2d: stair block with fewer than 2 steps");
        if (st.length < 0 || st.width < 0 || st.distance < 0)
            throw PipelineError("map2d: negative stair dimension");
    }
}

PlaneParams locate_ground(const Map3D& map, const Map2dConfig& cfg) {
    const Eigen::Vector3d up = cfg.up_axis.normalized();
    const double cos_tol = std::cos(deg2rad(cfg.ground_angle_deg));
    const PlaneParams* best = nullptr;
    double best_h = 0.0;
    for (const auto& mp : map.polygons) {
        const auto& p = mp.poly;
        if (std::abs(p.plane.normal.dot(up)) < cos_tol) continue;
        if (p.area < cfg.min_ground_area) continue;
        const double h = plane_height(p.plane, up);
        if (!best || h < best_h) {
            best = &p.plane;
            best_h = h;
        }
    }
    if (!best) throw PipelineError("no ground plane: no large horizontal polygon in the map");
    PlaneParams g = *best;
    if (g.normal.dot(up) < 0) {
        g.normal = -g.normal;
        g.offset = -g.offset;
    }
    return g;
}

std::vector<const MapPolygon*> select_walls(const Map3D& map, const PlaneParams& ground,
                                            double min_area, const Map2dConfig& cfg) {
    const double sin_tol = std::sin(deg2rad(cfg.wall_angle_deg));
    // descending-area order via an ordered container, then the small ones fall off
    std::multimap<double, const MapPolygon*, std::greater<>> by_area;
    for (const auto& mp : map.polygons) {
        if (std::abs(mp.poly.plane.normal.dot(ground.normal)) > sin_tol) continue;
        by_area.emplace(mp.poly.area, &mp);
    }
    std::vector<const MapPolygon*> walls;
    for (const auto& [area, mp] : by_area) {
        if (area < min_area) break;
        walls.push_back(mp);
    }
    return walls;
}

namespace {

struct WallSegment {
    const MapPolygon* mp = nullptr;
    Vec2 a{0, 0}, b{0, 0};  // footprint endpoints, ground coordinates
    Vec2 p0{0, 0};          // point on the support line
    Vec2 dir{1, 0};         // unit support-line direction
};

Vec2 project_vector(const PlaneBasis& gb, const Eigen::Vector3d& v) {
    return {v.dot(gb.u), v.dot(gb.v)};
}

Vec2 junction_corner(const WallSegment& s1, const WallSegment& s2) {
    const double denom = s1.dir.x() * s2.dir.y() - s1.dir.y() * s2.dir.x();
    if (std::abs(denom) >= std::sin(deg2rad(5.0))) {
        const Vec2 d = s2.p0 - s1.p0;
        const double t = (d.x() * s2.dir.y() - d.y() * s2.dir.x()) / denom;
        return s1.p0 + t * s1.dir;
    }
    // near-parallel support lines: fall back to the closest endpoint pair
    const Vec2* best1 = &s1.a;
    const Vec2* best2 = &s2.a;
    double best = 1e300;
    for (const Vec2* e1 : {&s1.a, &s1.b})
        for (const Vec2* e2 : {&s2.a, &s2.b}) {
            const double d = (*e1 - *e2).norm();
            if (d < best) {
                best = d;
                best1 = e1;
                best2 = e2;
            }
        }
    return 0.5 * (*best1 + *best2);
}

}  // namespace

Map2D project_walls(const std::vector<const MapPolygon*>& walls, const PlaneParams& ground,
                    const Map2dConfig& cfg) {
    std::vector<const MapPolygon*> sources;
    return project_walls_with_sources(walls, ground, cfg, sources);
}

Map2D project_walls_with_sources(const std::vector<const MapPolygon*>& walls,
                                 const PlaneParams& ground, const Map2dConfig& cfg,
                                 std::vector<const MapPolygon*>& wall_sources) {
    Map2D out;
    if (walls.size() < 2) throw PipelineError("project_walls: fewer than 2 wall polygons");

    const PlaneBasis gb = make_basis(ground);

    std::vector<WallSegment> segs;
    for (const auto* mp : walls) {
        const auto& poly = mp->poly;
        WallSegment s;
        s.mp = mp;
        const Eigen::Vector3d dir3 = ground.normal.cross(poly.plane.normal).normalized();
        s.dir = project_vector(gb, dir3).normalized();
        s.p0 = gb.to_plane(poly.plane.normal * poly.plane.offset);
        double smin = 0, smax = 0;
        bool first = true;
        for (const auto& pwh : poly.shape)
            for (const auto& v : pwh.outer) {
                const Vec2 p = gb.to_plane(poly.basis.to_world(v));
                const double t = (p - s.p0).dot(s.dir);
                if (first) {
                    smin = smax = t;
                    first = false;
                } else {
                    smin = std::min(smin, t);
                    smax = std::max(smax, t);
                }
            }
        if (first) continue;
        s.a = s.p0 + smin * s.dir;
        s.b = s.p0 + smax * s.dir;
        segs.push_back(s);
    }
    if (segs.size() < 2) throw PipelineError("project_walls: fewer than 2 usable segments");

    // endpoint pairing: mutual nearest endpoints of different segments
    const size_t m = segs.size();
    auto endpoint = [&](size_t e) { return (e % 2 == 0) ? segs[e / 2].a : segs[e / 2].b; };
    std::vector<int> partner(2 * m, -1);
    std::vector<int> nearest(2 * m, -1);
    for (size_t e = 0; e < 2 * m; ++e) {
        double best = cfg.corner_snap;
        for (size_t f = 0; f < 2 * m; ++f) {
            if (f / 2 == e / 2) continue;
            const double d = (endpoint(e) - endpoint(f)).norm();
            if (d <= best) {
                best = d;
                nearest[e] = int(f);
            }
        }
    }
    for (size_t e = 0; e < 2 * m; ++e)
        if (nearest[e] >= 0 && nearest[nearest[e]] == int(e)) partner[e] = nearest[e];

    // walk the chain starting from the largest wall (segment 0)
    std::vector<int> order;
    std::vector<bool> used(m, false);
    int cur_seg = 0;
    int exit_end = 1;  // leave segment 0 through its 'b' endpoint
    order.push_back(0);
    used[0] = true;
    bool closed = false;
    while (true) {
        const int p = partner[2 * cur_seg + exit_end];
        if (p < 0) break;
        const int nxt = p / 2;
        if (used[nxt]) {
            closed = (nxt == order.front() && p % 2 == 0);
            break;
        }
        order.push_back(nxt);
        used[nxt] = true;
        cur_seg = nxt;
        exit_end = 1 - p % 2;
    }
    if (!closed) {
        // extend backwards from segment 0's 'a' endpoint
        std::vector<int> back;
        cur_seg = 0;
        int enter_end = 0;
        while (true) {
            const int p = partner[2 * cur_seg + enter_end];
            if (p < 0) break;
            const int nxt = p / 2;
            if (used[nxt]) break;
            back.push_back(nxt);
            used[nxt] = true;
            cur_seg = nxt;
            enter_end = 1 - p % 2;
        }
        std::reverse(back.begin(), back.end());
        back.insert(back.end(), order.begin(), order.end());
        order = std::move(back);
    }
    if (order.size() < 2) throw PipelineError("project_walls: fewer than 2 chainable segments");
    char msg[128];
    for (size_t i = 0; i < m; ++i)
        if (!used[i]) {
            std::snprintf(msg, sizeof(msg), "wall polygon (%.2f m^2) not chainable, dropped",
                          segs[i].mp->poly.area);
            out.diagnostics.emplace_back(msg);
        }

    const size_t n = order.size();
    std::vector<Vec2> corners(n);
    auto recompute_corners = [&]() {
        for (size_t k = 0; k < n; ++k)
            corners[k] = junction_corner(segs[order[(k + n - 1) % n]], segs[order[k]]);
    };

    if (closed) {
        recompute_corners();
        // counterclockwise as seen from above (ground basis is right-handed w.r.t. up)
        if (ring_signed_area(corners) < 0) {
            std::reverse(order.begin(), order.end());
            recompute_corners();
        }
    } else {
        out.open_map = true;
        for (size_t k = 0; k + 1 < n; ++k)
            corners[k + 1] = junction_corner(segs[order[k]], segs[order[k + 1]]);
        corners[0] = segs[order[0]].a;  // bare chain end
        out.diagnostics.emplace_back("open corner cycle: zero-length closing wall emitted");
    }

    out.corners = corners;
    out.walls.resize(n);
    out.angles.resize(n);
    wall_sources.assign(n, nullptr);
    for (size_t k = 0; k < n; ++k) {
        Wall2D& w = out.walls[k];
        w.a = corners[k];
        w.b = corners[(k + 1) % n];
        const bool last_open = out.open_map && k + 1 == n;
        // paper convention: zero length when a corner went undetected
        w.length = last_open ? 0.0 : (w.b - w.a).norm();
        if (!last_open) wall_sources[k] = segs[order[k]].mp;
    }
    for (size_t k = 0; k < n; ++k) {
        const bool open_corner = out.open_map && (k == 0 || k + 1 == n);
        out.angles[k] = open_corner ? 0.0
                                    : interior_angle(corners[(k + n - 1) % n], corners[k],
                                                     corners[(k + 1) % n]);
    }
    return out;
}

std::vector<Aperture> classify_apertures(const PlanePolygon& wall, const Vec2& corner_a,
                                         const Vec2& corner_b, const PlaneParams& ground,
                                         const Map2dConfig& cfg,
                                         std::vector<std::string>* diagnostics) {
    std::vector<Aperture> out;
    char msg[192];
    const PlaneBasis gb = make_basis(ground);
    const Eigen::Vector3d a3 = gb.to_world(corner_a);
    const Eigen::Vector3d b3 = gb.to_world(corner_b);
    if ((b3 - a3).norm() < 1e-9) return out;
    const Eigen::Vector3d u3 = (b3 - a3).normalized();
    const Eigen::Vector3d v3 = ground.normal;  // up; v = 0 at ground height

    // wall coverage in (along-wall, height-above-ground) coordinates
    PolygonSet cover;
    for (const auto& pwh : wall.shape) {
        PolygonWithHoles q;
        auto remap = [&](const Vec2& p) {
            const Eigen::Vector3d w = wall.basis.to_world(p) - a3;
            return snap_mm(Vec2(w.dot(u3), w.dot(v3)));
        };
        for (const auto& p : pwh.outer) q.outer.push_back(remap(p));
        for (const auto& h : pwh.holes) {
            Ring hr;
            for (const auto& p : h) hr.push_back(remap(p));
            q.holes.push_back(std::move(hr));
        }
        cover.push_back(std::move(q));
    }
    Box2 hull = bounding_box(cover);
    if (hull.empty) return out;
    // Trim the extraction dead bands along the floor and ceiling creases out
    // of the analysis box; otherwise the thin uncovered sliver along the wall
    // bottom bridges door gaps to the lateral margins.
    hull.min.y() += cfg.crease_margin;
    hull.max.y() -= cfg.crease_margin;
    if (hull.max.y() - hull.min.y() < 2 * cfg.min_opening) return out;

    const PolygonSet openings = difference(box_to_set(hull), cover);
    const double edge_eps = 2e-3;
    for (const auto& open_part : openings) {
        const Box2 bb = bounding_box(PolygonSet{open_part});
        // margins at the wall's lateral extremes are unobserved ends, not openings
        if (bb.min.x() <= hull.min.x() + edge_eps || bb.max.x() >= hull.max.x() - edge_eps)
            continue;
        const double width = bb.max.x() - bb.min.x();
        const double height = bb.max.y() - bb.min.y();
        if (width < cfg.min_opening || height < cfg.min_opening) continue;

        Aperture ap;
        ap.length = width;
        ap.distance = std::max(0.0, bb.min.x());
        const bool reaches_box_bottom = bb.min.y() <= hull.min.y() + edge_eps;
        if (bb.min.y() <= cfg.ground_reach ||
            (reaches_box_bottom && hull.min.y() <= cfg.ground_reach + cfg.crease_margin)) {
            ap.type = 1;  // reaches the ground: door (floor-to-ceiling glazing included)
        } else if (bb.min.y() >= cfg.norms.window_low - cfg.aperture_tol &&
                   bb.max.y() <= cfg.norms.window_high + cfg.aperture_tol) {
            ap.type = 0;
        } else {
            ap.type = 0;
            if (diagnostics) {
                std::snprintf(msg, sizeof(msg),
                              "opening with vertical span [%.2f, %.2f] m matches neither door "
                              "nor window profile; defaulting to window",
                              bb.min.y(), bb.max.y());
                diagnostics->emplace_back(msg);
            }
        }
        out.push_back(ap);
    }

    std::sort(out.begin(), out.end(),
              [](const Aperture& x, const Aperture& y) { return x.distance < y.distance; });
    // merge overlapping spans (stacked openings collapse to one annotation)
    for (size_t i = 1; i < out.size();) {
        Aperture& prev = out[i - 1];
        if (out[i].distance < prev.distance + prev.length - 1e-9) {
            const double end =
                std::max(prev.distance + prev.length, out[i].distance + out[i].length);
            prev.length = end - prev.distance;
            prev.type = std::max(prev.type, out[i].type);
            if (diagnostics)
                diagnostics->emplace_back("overlapping openings merged into one aperture");
            out.erase(out.begin() + i);
        } else {
            ++i;
        }
    }
    return out;
}

namespace {

struct TreadCandidate {
    double height = 0.0;
    Vec2 centroid{0, 0};
    Box2 bbox;
    std::vector<Vec2> pts;
};

}  // namespace

std::vector<StairBlock> detect_stairs(const Map3D& map, const PlaneParams& ground,
                                      const Map2D& map2d, const Map2dConfig& cfg) {
    std::vector<StairBlock> out;
    const Eigen::Vector3d up = ground.normal;
    const double cos_tol = std::cos(deg2rad(cfg.ground_angle_deg));
    const double ground_h = plane_height(ground, up);
    const PlaneBasis gb = make_basis(ground);

    std::vector<TreadCandidate> treads;
    for (const auto& mp : map.polygons) {
        const auto& p = mp.poly;
        if (std::abs(p.plane.normal.dot(up)) < cos_tol) continue;
        if (p.area < cfg.min_tread_area || p.area > cfg.max_tread_area) continue;
        const double h = plane_height(p.plane, up) - ground_h;
        if (std::abs(h) < cfg.stair_rise_min / 2) continue;  // ground-level shards
        TreadCandidate t;
        t.height = h;
        Vec2 csum{0, 0};
        size_t cnt = 0;
        for (const auto& pwh : p.shape)
            for (const auto& v : pwh.outer) {
                const Vec2 q = gb.to_plane(p.basis.to_world(v));
                t.pts.push_back(q);
                t.bbox.expand(q);
                csum += q;
                ++cnt;
            }
        if (cnt < 3) continue;
        t.centroid = csum / double(cnt);
        treads.push_back(std::move(t));
    }
    std::sort(treads.begin(), treads.end(),
              [](const TreadCandidate& a, const TreadCandidate& b) { return a.height < b.height; });

    std::vector<bool> taken(treads.size(), false);
    for (size_t i = 0; i < treads.size(); ++i) {
        if (taken[i]) continue;
        std::vector<size_t> run{i};
        double gap_sum = 0.0;
        size_t gaps = 0;
        for (size_t j = i + 1; j < treads.size(); ++j) {
            if (taken[j]) continue;
            const auto& last = treads[run.back()];
            const double gap = treads[j].height - last.height;
            if (gap < cfg.stair_rise_min) continue;  // same-level duplicate
            if (gap > cfg.stair_rise_max) break;
            if (gaps > 0 && std::abs(gap - gap_sum / double(gaps)) > cfg.stair_gap_tol) continue;
            if (last.bbox.gap(treads[j].bbox) > cfg.stair_overlap_gap) continue;
            run.push_back(j);
            gap_sum += gap;
            ++gaps;
        }
        if (run.size() < 3) continue;
        for (size_t r : run) taken[r] = true;

        // progression direction from consecutive tread centroids
        Vec2 dir{0, 0};
        for (size_t k = 1; k < run.size(); ++k)
            dir += treads[run[k]].centroid - treads[run[k - 1]].centroid;
        if (dir.norm() < 1e-9) dir = Vec2(1, 0);
        dir.normalize();
        const Vec2 perp(-dir.y(), dir.x());
        double lmin = 1e300, lmax = -1e300, wmin = 1e300, wmax = -1e300;
        for (size_t r : run)
            for (const auto& p : treads[r].pts) {
                lmin = std::min(lmin, p.dot(dir));
                lmax = std::max(lmax, p.dot(dir));
                wmin = std::min(wmin, p.dot(perp));
                wmax = std::max(wmax, p.dot(perp));
            }

        StairBlock block;
        block.length = lmax - lmin;
        block.width = wmax - wmin;
        block.step_count = int(run.size());
        block.center = 0.5 * (lmin + lmax) * dir + 0.5 * (wmin + wmax) * perp;
        block.direction = dir;

        // ascending when riser (vertical) polygons interleave the treads
        const double h_lo = treads[run.front()].height;
        const double h_hi = treads[run.back()].height;
        Box2 run_bbox;
        for (size_t r : run) run_bbox.expand(treads[r].bbox);
        const double sin_tol = std::sin(deg2rad(cfg.wall_angle_deg));
        int risers = 0;
        for (const auto& mp : map.polygons) {
            const auto& p = mp.poly;
            if (std::abs(p.plane.normal.dot(up)) > sin_tol) continue;
            if (p.area > cfg.max_tread_area) continue;  // walls are not risers
            Box2 fb;
            double zmin = 1e300, zmax = -1e300;
            for (const auto& pwh : p.shape)
                for (const auto& v : pwh.outer) {
                    const Eigen::Vector3d w = p.basis.to_world(v);
                    fb.expand(gb.to_plane(w));
                    const double z = w.dot(up) - ground_h;
                    zmin = std::min(zmin, z);
                    zmax = std::max(zmax, z);
                }
            if (fb.empty) continue;
            if (fb.gap(run_bbox) > cfg.stair_overlap_gap) continue;
            if (zmin < std::min(0.0, h_lo) - cfg.stair_rise_max || zmax > h_hi + cfg.stair_rise_max)
                continue;
            ++risers;
        }
        block.type = (risers >= int(run.size()) / 2) ? 1 : 0;

        // nearest wall of the 2D cycle
        double best = 1e300;
        for (size_t k = 0; k < map2d.walls.size(); ++k) {
            const auto& w = map2d.walls[k];
            if (w.length <= 0) continue;
            for (size_t r : run)
                for (const auto& p : treads[r].pts) {
                    const double d = point_segment_distance(p, w.a, w.b);
                    if (d < best) {
                        best = d;
                        block.nearest_wall = int(k);
                    }
                }
        }
        block.distance = (block.nearest_wall >= 0) ? best : 0.0;
        out.push_back(block);
    }
    return out;
}

Map2D derive_map2d(const Map3D& map, const Map2dConfig& cfg) {
    const PlaneParams ground = locate_ground(map, cfg);
    const auto walls = select_walls(map, ground, cfg.min_wall_area, cfg);
    std::vector<const MapPolygon*> sources;
    Map2D m = project_walls_with_sources(walls, ground, cfg, sources);
    for (size_t k = 0; k < m.walls.size(); ++k) {
        if (!sources[k] || m.walls[k].length <= 0) continue;
        m.walls[k].apertures = classify_apertures(sources[k]->poly, m.walls[k].a, m.walls[k].b,
                                                  ground, cfg, &m.diagnostics);
    }
    m.stairs = detect_stairs(map, ground, m, cfg);
    return m;
}

}  // namespace placerec
