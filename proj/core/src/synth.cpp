#include "placerec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

namespace placerec {

using nlohmann::json;

namespace {

double mod360(double a) {
    a = std::fmod(a, 360.0);
    if (a < 0) a += 360.0;
    return a;
}

double polygon_signed_area(const std::vector<Vec2>& pts) {
    double s = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        const Vec2& p = pts[i];
        const Vec2& q = pts[(i + 1) % pts.size()];
        s += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * s;
}

bool point_in_ring(const Vec2& p, const Ring& ring) {
    bool in = false;
    const size_t n = ring.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = ring[i];
        const Vec2& b = ring[j];
        if (((a.y() > p.y()) != (b.y() > p.y())) &&
            (p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x()))
            in = !in;
    }
    return in;
}

bool point_in_set(const Vec2& p, const PolygonSet& set) {
    for (const auto& pwh : set) {
        if (!point_in_ring(p, pwh.outer)) continue;
        bool in_hole = false;
        for (const auto& h : pwh.holes)
            if (point_in_ring(p, h)) {
                in_hole = true;
                break;
            }
        if (!in_hole) return true;
    }
    return false;
}

double point_segment_dist(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 <= 0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

Ring stair_footprint(const StairSpec& st) {
    const Vec2 dir = st.direction.normalized();
    const Vec2 left(-dir.y(), dir.x());
    const double run = st.count * st.tread_depth;
    return {st.origin - 0.5 * st.width * left, st.origin + 0.5 * st.width * left,
            st.origin + 0.5 * st.width * left + run * dir,
            st.origin - 0.5 * st.width * left + run * dir};
}

}  // namespace

void SceneSpec::validate() const {
    std::string err;
    auto bad = [&](const std::string& m) { err += (err.empty() ? "" : "; ") + m; };

    if (floor.size() < 3) bad("floor polygon needs at least 3 corners");
    if (!floor.empty() && polygon_signed_area(floor) <= 0)
        bad("floor polygon must be counterclockwise");
    if (wall_height < 1.8) bad("wall height below 1.8 m");

    const size_t nw = floor.size();
    for (size_t i = 0; i < openings.size(); ++i) {
        const auto& o = openings[i];
        const std::string tag = "opening " + std::to_string(i);
        if (o.wall < 0 || size_t(o.wall) >= nw) {
            bad(tag + ": wall index out of range");
            continue;
        }
        const double len = (floor[(o.wall + 1) % nw] - floor[o.wall]).norm();
        if (o.offset < 0 || o.offset + o.width > len + 1e-9) bad(tag + ": outside wall extent");
        if (o.width <= 0) bad(tag + ": non-positive width");
        if (o.sill < 0 || o.head <= o.sill || o.head > wall_height + 1e-9)
            bad(tag + ": bad vertical span");
    }
    for (size_t i = 0; i + 1 < openings.size(); ++i)
        for (size_t j = i + 1; j < openings.size(); ++j) {
            if (openings[i].wall != openings[j].wall) continue;
            const double a0 = openings[i].offset, a1 = a0 + openings[i].width;
            const double b0 = openings[j].offset, b1 = b0 + openings[j].width;
            if (a0 < b1 && b0 < a1)
                bad("openings " + std::to_string(i) + "/" + std::to_string(j) + " overlap");
        }

    for (size_t i = 0; i < stairs.size(); ++i) {
        const auto& st = stairs[i];
        const std::string tag = "stairs " + std::to_string(i);
        if (st.count < 3) bad(tag + ": fewer than 3 steps");
        if (st.width <= 0 || st.tread_depth <= 0 || st.rise <= 0) bad(tag + ": bad dimensions");
        if (st.direction.norm() < 1e-9) bad(tag + ": zero direction");
        for (const auto& c : stair_footprint(st))
            if (!point_in_ring(c, floor)) bad(tag + ": footprint outside the floor");
        if (st.ascending && st.count * st.rise > wall_height - 0.3)
            bad(tag + ": ascends into the ceiling");
    }

    if (trajectory.empty()) bad("empty trajectory");
    int total_frames = 0;
    for (size_t i = 0; i < trajectory.size(); ++i) {
        const auto& t = trajectory[i];
        const std::string tag = "trajectory segment " + std::to_string(i);
        if (t.frames < 1) bad(tag + ": needs at least 1 frame");
        total_frames += t.frames;
        if (t.height < 0.2 || t.height > wall_height - 0.2) bad(tag + ": camera height");
        for (const Vec2* p : {&t.from, &t.to}) {
            if (t.type == TrajectorySegment::Type::Spin && p == &t.to) continue;
            if (!point_in_ring(*p, floor)) bad(tag + ": pose outside the floor");
            for (const auto& st : stairs)
                if (point_in_ring(*p, stair_footprint(st)))
                    bad(tag + ": pose on a staircase footprint");
        }
    }
    if (total_frames < 2) bad("trajectory shorter than 2 frames");

    try {
        intrinsics.validate(image_width, image_height);
    } catch (const std::exception& e) {
        bad(e.what());
    }
    if (min_range_mm >= max_range_mm) bad("min range >= max range");

    if (!err.empty()) throw ConfigError("scene '" + name + "': " + err);
}

CameraPose look_pose(const Vec2& pos, double height, double yaw_deg, double pitch_deg) {
    const double yaw = deg2rad(yaw_deg);
    const double pitch = deg2rad(pitch_deg);
    const Eigen::Vector3d forward(std::cos(pitch) * std::cos(yaw),
                                  std::cos(pitch) * std::sin(yaw), -std::sin(pitch));
    const Eigen::Vector3d up(0, 0, 1);
    const Eigen::Vector3d right = forward.cross(up).normalized();
    const Eigen::Vector3d down = forward.cross(right);
    CameraPose p;
    p.r_wc.col(0) = right;
    p.r_wc.col(1) = down;
    p.r_wc.col(2) = forward;
    p.position = Eigen::Vector3d(pos.x(), pos.y(), height);
    return p;
}

namespace {

std::vector<CameraPose> compile_trajectory(const SceneSpec& spec) {
    std::vector<CameraPose> poses;
    for (const auto& seg : spec.trajectory) {
        for (int i = 0; i < seg.frames; ++i) {
            const double t = double(i) / seg.frames;
            if (seg.type == TrajectorySegment::Type::Spin) {
                const double yaw = seg.yaw_start_deg + t * (seg.yaw_end_deg - seg.yaw_start_deg);
                poses.push_back(look_pose(seg.from, seg.height, yaw, seg.pitch_deg));
            } else {
                const Vec2 pos = seg.from + t * (seg.to - seg.from);
                poses.push_back(look_pose(pos, seg.height, seg.yaw_deg, seg.pitch_deg));
            }
        }
    }
    return poses;
}

struct RectPatch {
    Eigen::Vector3d origin, eu, ev;  // eu/ev unit edge directions
    double lu = 0, lv = 0;
    Eigen::Vector3d n;  // unit, one-sided
    double d = 0;       // n . X = d
    int first = -1, last = -1;
};

struct HorizPatch {
    double z0 = 0;
    bool up = true;  // floor normals point up, ceiling normals down
    PolygonSet shape;
};

struct CompiledScene {
    std::vector<RectPatch> rects;
    std::vector<HorizPatch> horiz;
};

RectPatch make_rect(const Eigen::Vector3d& corner, const Eigen::Vector3d& edge_u,
                    const Eigen::Vector3d& edge_v, const Eigen::Vector3d& want_n, int first = -1,
                    int last = -1) {
    RectPatch r;
    r.origin = corner;
    Eigen::Vector3d u = edge_u, v = edge_v;
    if (u.cross(v).dot(want_n) < 0) std::swap(u, v);
    r.lu = u.norm();
    r.lv = v.norm();
    r.eu = u / r.lu;
    r.ev = v / r.lv;
    r.n = r.eu.cross(r.ev);
    r.d = r.n.dot(corner);
    r.first = first;
    r.last = last;
    return r;
}

// wall rectangle minus its openings, as axis-aligned pieces in (s, z)
std::vector<std::array<double, 4>> wall_pieces(double len, double height,
                                               const std::vector<const WallOpening*>& ops) {
    std::vector<std::array<double, 4>> rects{{0, 0, len, height}};  // {s0, z0, s1, z1}
    for (const auto* o : ops) {
        std::vector<std::array<double, 4>> next;
        for (const auto& r : rects) {
            const double ox0 = std::max(r[0], o->offset), ox1 = std::min(r[2], o->offset + o->width);
            const double oz0 = std::max(r[1], o->sill), oz1 = std::min(r[3], o->head);
            if (ox0 >= ox1 || oz0 >= oz1) {
                next.push_back(r);
                continue;
            }
            if (r[0] < ox0) next.push_back({r[0], r[1], ox0, r[3]});
            if (ox1 < r[2]) next.push_back({ox1, r[1], r[2], r[3]});
            if (r[1] < oz0) next.push_back({ox0, r[1], ox1, oz0});
            if (oz1 < r[3]) next.push_back({ox0, oz1, ox1, r[3]});
        }
        rects = std::move(next);
    }
    return rects;
}

CompiledScene compile_scene(const SceneSpec& spec) {
    CompiledScene cs;
    const Eigen::Vector3d up(0, 0, 1);
    const size_t nw = spec.floor.size();

    for (size_t k = 0; k < nw; ++k) {
        const Vec2 a2 = spec.floor[k];
        const Vec2 b2 = spec.floor[(k + 1) % nw];
        const double len = (b2 - a2).norm();
        const Eigen::Vector3d a(a2.x(), a2.y(), 0);
        const Eigen::Vector3d dir((b2.x() - a2.x()) / len, (b2.y() - a2.y()) / len, 0);
        const Eigen::Vector3d n = up.cross(dir);  // interior side of a CCW floor
        std::vector<const WallOpening*> ops;
        for (const auto& o : spec.openings)
            if (o.wall == int(k)) ops.push_back(&o);
        for (const auto& r : wall_pieces(len, spec.wall_height, ops)) {
            const Eigen::Vector3d corner = a + r[0] * dir + r[1] * up;
            cs.rects.push_back(
                make_rect(corner, (r[2] - r[0]) * dir, (r[3] - r[1]) * up, n));
        }
    }

    PolygonSet floor_shape{PolygonWithHoles{spec.floor, {}}};
    for (const auto& st : spec.stairs) {
        const Vec2 dir2 = st.direction.normalized();
        const Vec2 left2(-dir2.y(), dir2.x());
        const Eigen::Vector3d dir(dir2.x(), dir2.y(), 0);
        const Eigen::Vector3d left(left2.x(), left2.y(), 0);
        const Vec2 base2 = st.origin - 0.5 * st.width * left2;
        const Eigen::Vector3d base(base2.x(), base2.y(), 0);
        const double sgn = st.ascending ? 1.0 : -1.0;
        for (int i = 1; i <= st.count; ++i) {
            // tread i surface
            const double tz = sgn * st.rise * i;
            const Eigen::Vector3d tread_corner =
                base + (i - 1) * st.tread_depth * dir + tz * up;
            cs.rects.push_back(make_rect(tread_corner, st.tread_depth * dir, st.width * left, up));
            // riser i: faces downhill
            const double rz0 = st.ascending ? st.rise * (i - 1) : -st.rise * i;
            const Eigen::Vector3d riser_corner = base + (i - 1) * st.tread_depth * dir + rz0 * up;
            const Eigen::Vector3d riser_n = st.ascending ? Eigen::Vector3d(-dir) : dir;
            cs.rects.push_back(
                make_rect(riser_corner, st.width * left, st.rise * up, riser_n));
        }
        if (!st.ascending) {
            // stairwell hole in the floor
            floor_shape =
                difference(floor_shape, PolygonSet{PolygonWithHoles{stair_footprint(st), {}}});
        }
    }
    cs.horiz.push_back({0.0, true, floor_shape});
    cs.horiz.push_back({spec.wall_height, false, PolygonSet{PolygonWithHoles{spec.floor, {}}}});

    for (const auto& box : spec.occluders) {
        const double yaw = deg2rad(box.yaw_deg);
        const Eigen::Vector3d bx(std::cos(yaw), std::sin(yaw), 0);
        const Eigen::Vector3d by(-std::sin(yaw), std::cos(yaw), 0);
        const Eigen::Vector3d c(box.center.x(), box.center.y(), 0);
        const double hx = box.size_x / 2, hy = box.size_y / 2;
        // four sides with outward normals, then the top
        cs.rects.push_back(make_rect(c + hx * bx - hy * by, 2 * hy * by,
                                     box.size_z * Eigen::Vector3d(0, 0, 1), bx, box.frame_first,
                                     box.frame_last));
        cs.rects.push_back(make_rect(c - hx * bx - hy * by, 2 * hy * by,
                                     box.size_z * Eigen::Vector3d(0, 0, 1), -bx, box.frame_first,
                                     box.frame_last));
        cs.rects.push_back(make_rect(c - hx * bx + hy * by, 2 * hx * bx,
                                     box.size_z * Eigen::Vector3d(0, 0, 1), by, box.frame_first,
                                     box.frame_last));
        cs.rects.push_back(make_rect(c - hx * bx - hy * by, 2 * hx * bx,
                                     box.size_z * Eigen::Vector3d(0, 0, 1), -by, box.frame_first,
                                     box.frame_last));
        cs.rects.push_back(make_rect(c - hx * bx - hy * by + box.size_z * Eigen::Vector3d(0, 0, 1),
                                     2 * hx * bx, 2 * hy * by, Eigen::Vector3d(0, 0, 1),
                                     box.frame_first, box.frame_last));
    }
    return cs;
}

}  // namespace

GroundTruth ground_truth(const SceneSpec& spec) {
    spec.validate();
    GroundTruth gt;
    const size_t n = spec.floor.size();

    gt.map.corners = spec.floor;
    gt.map.angles.resize(n);
    gt.map.walls.resize(n);
    for (size_t k = 0; k < n; ++k) {
        const Vec2& prev = spec.floor[(k + n - 1) % n];
        const Vec2& cur = spec.floor[k];
        const Vec2& next = spec.floor[(k + 1) % n];
        const Vec2 a = prev - cur, b = next - cur;
        gt.map.angles[k] =
            mod360(rad2deg(std::atan2(a.y(), a.x())) - rad2deg(std::atan2(b.y(), b.x())));
        gt.map.walls[k].a = cur;
        gt.map.walls[k].b = next;
        gt.map.walls[k].length = (next - cur).norm();
    }
    const Map2dConfig norms_cfg;  // default norms drive the ground-truth labels too
    for (const auto& o : spec.openings) {
        Aperture ap;
        ap.type = (o.sill <= norms_cfg.ground_reach) ? 1 : 0;
        ap.length = o.width;
        ap.distance = o.offset;
        gt.map.walls[o.wall].apertures.push_back(ap);
    }
    for (auto& w : gt.map.walls)
        std::sort(w.apertures.begin(), w.apertures.end(),
                  [](const Aperture& a, const Aperture& b) { return a.distance < b.distance; });

    for (const auto& st : spec.stairs) {
        StairBlock b;
        b.type = st.ascending ? 1 : 0;
        b.length = st.count * st.tread_depth;
        b.width = st.width;
        b.step_count = st.count;
        const Vec2 run_dir = st.direction.normalized();
        b.center = st.origin + 0.5 * b.length * run_dir;
        // direction of ascent: down-going stairs ascend back toward their origin
        b.direction = st.ascending ? run_dir : Vec2(-run_dir);
        double best = 1e300;
        const Ring fp = stair_footprint(st);
        for (size_t k = 0; k < n; ++k)
            for (const auto& c : fp) {
                const double d = point_segment_dist(c, gt.map.walls[k].a, gt.map.walls[k].b);
                if (d < best) {
                    best = d;
                    b.nearest_wall = int(k);
                }
            }
        b.distance = best;
        gt.map.stairs.push_back(b);
    }

    gt.descriptor = describe(gt.map, spec.name);
    gt.poses = compile_trajectory(spec);
    if (!gt.poses.empty())
        gt.up_axis_cam0 = gt.poses.front().r_wc.transpose() * Eigen::Vector3d(0, 0, 1);
    return gt;
}

RenderResult render_sequence(const SceneSpec& spec) {
    RenderResult out;
    out.truth = ground_truth(spec);
    const CompiledScene cs = compile_scene(spec);
    const auto& poses = out.truth.poses;
    const auto& k = spec.intrinsics;

    out.frames.reserve(poses.size());
    for (size_t fi = 0; fi < poses.size(); ++fi) {
        const CameraPose& pose = poses[fi];
        DepthFrame frame;
        frame.width = spec.image_width;
        frame.height = spec.image_height;
        frame.intrinsics = k;
        frame.index = int(fi);
        frame.depth.assign(size_t(frame.width) * frame.height, 0);

        std::vector<const RectPatch*> rects;
        for (const auto& r : cs.rects)
            if (r.first < 0 || (int(fi) >= r.first && int(fi) <= r.last)) rects.push_back(&r);

        std::mt19937_64 rng(spec.seed * 0x9E3779B97F4A7C15ull + fi);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_real_distribution<double> uni(0.0, 1.0);

        const Eigen::Vector3d c = pose.position;
        for (int v = 0; v < frame.height; ++v) {
            for (int u = 0; u < frame.width; ++u) {
                const Eigen::Vector3d dcam((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
                const Eigen::Vector3d dw = pose.r_wc * dcam;
                double best_z = 1e300;
                double best_cos = 0.0;
                for (const auto* r : rects) {
                    const double denom = r->n.dot(dw);
                    if (denom >= -1e-12) continue;  // backface or parallel
                    const double z = (r->d - r->n.dot(c)) / denom;
                    if (z <= 1e-6 || z >= best_z) continue;
                    const Eigen::Vector3d local = c + z * dw - r->origin;
                    const double lu = local.dot(r->eu);
                    if (lu < 0 || lu > r->lu) continue;
                    const double lv = local.dot(r->ev);
                    if (lv < 0 || lv > r->lv) continue;
                    best_z = z;
                    best_cos = -denom / dw.norm();
                }
                for (const auto& h : cs.horiz) {
                    const Eigen::Vector3d n = h.up ? Eigen::Vector3d(0, 0, 1)
                                                   : Eigen::Vector3d(0, 0, -1);
                    const double denom = n.dot(dw);
                    if (denom >= -1e-12) continue;
                    const double z = (h.z0 * (h.up ? 1.0 : -1.0) - n.dot(c)) / denom;
                    if (z <= 1e-6 || z >= best_z) continue;
                    const Eigen::Vector3d p = c + z * dw;
                    if (!point_in_set({p.x(), p.y()}, h.shape)) continue;
                    best_z = z;
                    best_cos = -denom / dw.norm();
                }
                if (best_z >= 1e300) continue;

                double z_mm = best_z * 1000.0;
                if (spec.noise.enabled()) {
                    const double grazing = rad2deg(std::acos(std::clamp(best_cos, 0.0, 1.0)));
                    if (grazing > spec.noise.grazing_deg) continue;
                    if (spec.noise.dropout > 0 && uni(rng) < spec.noise.dropout) continue;
                    const double sigma = spec.noise.sigma_a_mm + spec.noise.sigma_b * z_mm;
                    if (sigma > 0) z_mm += sigma * gauss(rng);
                }
                const long rounded = std::lround(z_mm);
                if (rounded < spec.min_range_mm || rounded > spec.max_range_mm) continue;
                frame.at(u, v) = uint16_t(rounded);
            }
        }
        out.frames.push_back(std::move(frame));
    }
    return out;
}

// ---------------------------------------------------------------------------
// scene library

namespace {

TrajectorySegment spin(const Vec2& pos, int frames, double height = 1.3, double pitch = 0.0,
                       double yaw0 = 0.0, double yaw1 = 360.0) {
    TrajectorySegment t;
    t.type = TrajectorySegment::Type::Spin;
    t.from = pos;
    t.height = height;
    t.pitch_deg = pitch;
    t.yaw_start_deg = yaw0;
    t.yaw_end_deg = yaw1;
    t.frames = frames;
    return t;
}

TrajectorySegment walk(const Vec2& from, const Vec2& to, double yaw_deg, double height = 1.3) {
    TrajectorySegment t;
    t.type = TrajectorySegment::Type::Walk;
    t.from = from;
    t.to = to;
    t.yaw_deg = yaw_deg;
    // slow enough that plane offsets move well under the matcher's bound
    // between consecutive key frames
    t.frames = std::max(20, int(std::ceil((to - from).norm() / 0.025)));
    t.height = height;
    return t;
}

double yaw_towards(const Vec2& from, const Vec2& at) {
    return rad2deg(std::atan2(at.y() - from.y(), at.x() - from.x()));
}

}  // namespace

std::vector<SceneSpec> scene_library() {
    std::vector<SceneSpec> lib;

    {
        SceneSpec s;
        s.name = "sq_small_00";
        s.floor = {{0, 0}, {3.2, 0}, {3.2, 3.2}, {0, 3.2}};
        s.openings = {{0, 1.1, 0.9, 0.0, 2.1},   // door, south wall
                      {2, 0.9, 1.2, 1.2, 2.1}};  // window, north wall
        s.trajectory = {spin({1.6, 1.6}, 240)};
        lib.push_back(s);
    }
    {
        SceneSpec s;
        s.name = "rect_small_01";
        s.floor = {{0, 0}, {4.4, 0}, {4.4, 2.4}, {0, 2.4}};
        s.openings = {{0, 1.7, 0.9, 0.0, 2.1},
                      {2, 0.8, 1.4, 1.2, 2.1},
                      {3, 0.7, 1.0, 1.2, 2.1}};
        s.trajectory = {spin({2.2, 1.2}, 240)};
        lib.push_back(s);
    }
    {
        SceneSpec s;
        s.name = "rect_medium_02";
        s.floor = {{0, 0}, {7.2, 0}, {7.2, 4.2}, {0, 4.2}};
        s.openings = {{0, 2.9, 1.0, 0.0, 2.1},
                      {1, 1.5, 1.2, 1.2, 2.1},
                      {2, 1.6, 1.6, 1.2, 2.1},
                      {2, 4.6, 1.6, 1.2, 2.1},
                      {3, 1.4, 0.9, 0.0, 2.1}};
        const Vec2 a{2.2, 2.1}, b{5.0, 2.1};
        s.trajectory = {spin(a, 200), walk(a, b, yaw_towards({3.6, 2.1}, {7.2, 0}), 40),
                        spin(b, 200)};
        lib.push_back(s);
    }
    {
        SceneSpec s;
        s.name = "sq_medium_03";
        s.floor = {{0, 0}, {5.6, 0}, {5.6, 5.6}, {0, 5.6}};
        s.openings = {{0, 2.3, 1.0, 0.0, 2.1},
                      {1, 1.2, 1.4, 1.2, 2.1},
                      {3, 2.0, 1.8, 0.0, 2.4}};  // floor-to-head glazing: still a door
        s.trajectory = {spin({2.8, 2.8}, 280)};
        lib.push_back(s);
    }
    {
        SceneSpec s;
        s.name = "l_medium_04";
        s.floor = {{0, 0}, {7, 0}, {7, 3}, {3.6, 3}, {3.6, 5.6}, {0, 5.6}};
        s.openings = {{0, 3.0, 0.9, 0.0, 2.1},
                      {1, 0.9, 1.2, 1.2, 2.1},
                      {4, 0.8, 1.4, 1.2, 2.1},
                      {5, 2.2, 1.0, 0.0, 2.1}};
        const Vec2 a{5.0, 1.5}, b{1.8, 4.2};
        s.trajectory = {spin(a, 200), walk(a, b, yaw_towards(0.5 * (a + b), {0, 0}), 44),
                        spin(b, 200)};
        lib.push_back(s);
    }
    {
        SceneSpec s;
        s.name = "t_medium_05";
        s.floor = {{0, 0},     {7, 0},     {7, 2.8},   {4.8, 2.8},
                   {4.8, 6.8}, {2.2, 6.8}, {2.2, 2.8}, {0, 2.8}};
        s.openings = {{0, 3.1, 0.9, 0.0, 2.1},
                      {1, 0.8, 1.2, 1.2, 2.1},
                      {4, 0.7, 1.2, 1.2, 2.1},
                      {7, 0.9, 1.0, 0.0, 2.1}};
        const Vec2 a{3.5, 1.4}, b{3.5, 5.2};
        s.trajectory = {spin(a, 200), walk(a, b, yaw_towards(0.5 * (a + b), {2.2, 6.8}), 40),
                        spin(b, 200)};
        lib.push_back(s);
    }
    {
        SceneSpec s;
        s.name = "rect_large_06";
        s.floor = {{0, 0}, {10, 0}, {10, 7}, {0, 7}};
        s.openings = {{0, 4.4, 1.1, 0.0, 2.1},
                      {1, 2.6, 1.6, 1.2, 2.1},
                      {2, 2.2, 1.6, 1.2, 2.1},
                      {2, 6.4, 1.6, 1.2, 2.1},
                      {3, 3.0, 1.0, 0.0, 2.1}};
        StairSpec st;
        st.origin = {6.9, 3.5};
        st.direction = {1, 0};
        st.width = 1.6;
        st.tread_depth = 0.32;
        st.rise = 0.17;
        st.count = 5;
        st.ascending = true;
        s.stairs = {st};
        const Vec2 a{3.0, 3.5}, b{5.6, 3.5};
        s.trajectory = {spin(a, 220), walk(a, b, yaw_towards(0.5 * (a + b), {10, 0}), 40),
                        spin(b, 220)};
        lib.push_back(s);
    }
    {
        SceneSpec s;
        s.name = "l_large_07";
        s.floor = {{0, 0}, {11, 0}, {11, 8}, {5.5, 8}, {5.5, 4.7}, {0, 4.7}};
        s.openings = {{0, 4.8, 1.1, 0.0, 2.1},
                      {1, 2.4, 1.6, 1.2, 2.1},
                      {2, 1.8, 1.4, 1.2, 2.1},
                      {3, 1.2, 1.0, 0.0, 2.1},
                      {5, 1.6, 1.6, 1.2, 2.1}};
        StairSpec st;  // descending stairwell
        st.origin = {7.8, 2.2};
        st.direction = {1, 0};
        st.width = 1.6;
        st.tread_depth = 0.35;
        st.rise = 0.16;
        st.count = 5;
        st.ascending = false;
        s.stairs = {st};
        const Vec2 a{3.0, 2.4}, b{5.6, 2.2}, c{8.2, 6.3};
        s.trajectory = {spin(a, 200), walk(a, b, yaw_towards(0.5 * (a + b), {11, 0}), 36),
                        spin(b, 200), walk(b, c, yaw_towards(0.5 * (b + c), {11, 8}), 40),
                        spin(c, 160)};
        lib.push_back(s);
    }
    {
        SceneSpec s;
        s.name = "n_large_08";
        s.floor = {{0, 0}, {3, 0},    {3, 2.25},    {6, 2.25}, {6, 0},    {9, 0},
                   {9, 9}, {6, 9},    {6, 6.75},    {3, 6.75}, {3, 9},    {0, 9}};
        s.openings = {{0, 0.9, 1.0, 0.0, 2.1},
                      {5, 3.9, 1.6, 1.2, 2.1},
                      {6, 0.8, 1.4, 1.2, 2.1},
                      {11, 3.4, 0.9, 0.0, 2.1},
                      {11, 6.6, 1.2, 1.2, 2.1}};
        const Vec2 a{1.5, 4.5}, b{4.5, 4.5}, c{7.5, 4.5};
        s.trajectory = {spin(a, 200), walk(a, b, yaw_towards(0.5 * (a + b), {6, 2.25}), 36),
                        spin(b, 200), walk(b, c, yaw_towards(0.5 * (b + c), {9, 0}), 36),
                        spin(c, 200)};
        lib.push_back(s);
    }

    for (auto& s : lib) s.validate();
    return lib;
}

SceneSpec library_scene(const std::string& name) {
    for (auto& s : scene_library())
        if (s.name == name) return s;
    throw ConfigError("unknown library scene: " + name);
}

PipelineConfig recommended_config(const SceneSpec& spec) {
    PipelineConfig c;
    c.intrinsics = spec.intrinsics;
    c.image_width = spec.image_width;
    c.image_height = spec.image_height;
    c.min_range_mm = spec.min_range_mm;
    c.max_range_mm = spec.max_range_mm;
    c.stride = 5;
    c.median_window = 3;
    // u16-millimeter quantization puts an MSE floor around (1 mm)^2 / 12;
    // leave headroom above it
    c.extraction.t_m = 5e-7;
    c.extraction.t_c = 2e-3;
    // wide-FOV sensor: grazing floors/treads need a depth-proportional slope
    c.extraction.f_s = {4.0, 0.04};
    c.extraction.min_region_size = 4;
    if (spec.noise.enabled()) {
        c.median_window = 5;
        c.extraction.t_m = 1.2e-4;
        c.extraction.t_c = 0.06;
        c.extraction.min_region_size = 8;
        c.fusion.plane_match.l_dist = 0.12;
        c.fusion.plane_match.adjacency_gap = 0.2;
    }
    const GroundTruth gt = ground_truth(spec);
    c.map2d.up_axis = gt.up_axis_cam0;
    return c;
}

// ---------------------------------------------------------------------------
// scene spec JSON

namespace {

json vec2_json(const Vec2& v) { return json::array({v.x(), v.y()}); }
Vec2 json_vec2(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

void save_scene_spec(const SceneSpec& s, const std::filesystem::path& path) {
    json j;
    j["name"] = s.name;
    j["floor"] = json::array();
    for (const auto& p : s.floor) j["floor"].push_back(vec2_json(p));
    j["wall_height"] = s.wall_height;
    j["openings"] = json::array();
    for (const auto& o : s.openings)
        j["openings"].push_back({{"wall", o.wall},
                                 {"offset", o.offset},
                                 {"width", o.width},
                                 {"sill", o.sill},
                                 {"head", o.head}});
    j["stairs"] = json::array();
    for (const auto& st : s.stairs)
        j["stairs"].push_back({{"origin", vec2_json(st.origin)},
                               {"direction", vec2_json(st.direction)},
                               {"width", st.width},
                               {"tread_depth", st.tread_depth},
                               {"rise", st.rise},
                               {"count", st.count},
                               {"ascending", st.ascending}});
    j["occluders"] = json::array();
    for (const auto& b : s.occluders)
        j["occluders"].push_back({{"center", vec2_json(b.center)},
                                  {"size", json::array({b.size_x, b.size_y, b.size_z})},
                                  {"yaw_deg", b.yaw_deg},
                                  {"frame_first", b.frame_first},
                                  {"frame_last", b.frame_last}});
    j["trajectory"] = json::array();
    for (const auto& t : s.trajectory) {
        json seg;
        seg["type"] = (t.type == TrajectorySegment::Type::Spin) ? "spin" : "walk";
        seg["from"] = vec2_json(t.from);
        seg["to"] = vec2_json(t.to);
        seg["height"] = t.height;
        seg["pitch_deg"] = t.pitch_deg;
        seg["yaw_start_deg"] = t.yaw_start_deg;
        seg["yaw_end_deg"] = t.yaw_end_deg;
        seg["yaw_deg"] = t.yaw_deg;
        seg["frames"] = t.frames;
        j["trajectory"].push_back(seg);
    }
    j["image_width"] = s.image_width;
    j["image_height"] = s.image_height;
    j["intrinsics"] = {{"fx", s.intrinsics.fx},
                       {"fy", s.intrinsics.fy},
                       {"cx", s.intrinsics.cx},
                       {"cy", s.intrinsics.cy}};
    j["noise"] = {{"sigma_a_mm", s.noise.sigma_a_mm},
                  {"sigma_b", s.noise.sigma_b},
                  {"dropout", s.noise.dropout},
                  {"grazing_deg", s.noise.grazing_deg}};
    j["seed"] = s.seed;
    j["min_range_mm"] = s.min_range_mm;
    j["max_range_mm"] = s.max_range_mm;

    std::ofstream os(path);
    if (!os) throw Error("cannot write scene spec: " + path.string());
    os << j.dump(2) << "\n";
}

SceneSpec load_scene_spec(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open scene spec: " + path.string());
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ParseError("scene spec " + path.string() + ": " + e.what());
    }
    try {
        SceneSpec s;
        s.name = j.value("name", "scene");
        for (const auto& p : j.at("floor")) s.floor.push_back(json_vec2(p));
        s.wall_height = j.value("wall_height", 2.5);
        for (const auto& o : j.value("openings", json::array())) {
            WallOpening w;
            w.wall = o.at("wall").get<int>();
            w.offset = o.at("offset").get<double>();
            w.width = o.at("width").get<double>();
            w.sill = o.at("sill").get<double>();
            w.head = o.at("head").get<double>();
            s.openings.push_back(w);
        }
        for (const auto& o : j.value("stairs", json::array())) {
            StairSpec st;
            st.origin = json_vec2(o.at("origin"));
            st.direction = json_vec2(o.at("direction"));
            st.width = o.value("width", 1.5);
            st.tread_depth = o.value("tread_depth", 0.32);
            st.rise = o.value("rise", 0.17);
            st.count = o.value("count", 5);
            st.ascending = o.value("ascending", true);
            s.stairs.push_back(st);
        }
        for (const auto& o : j.value("occluders", json::array())) {
            BoxOccluder b;
            b.center = json_vec2(o.at("center"));
            b.size_x = o.at("size").at(0).get<double>();
            b.size_y = o.at("size").at(1).get<double>();
            b.size_z = o.at("size").at(2).get<double>();
            b.yaw_deg = o.value("yaw_deg", 0.0);
            b.frame_first = o.value("frame_first", -1);
            b.frame_last = o.value("frame_last", -1);
            s.occluders.push_back(b);
        }
        for (const auto& t : j.at("trajectory")) {
            TrajectorySegment seg;
            const std::string type = t.at("type").get<std::string>();
            if (type == "spin")
                seg.type = TrajectorySegment::Type::Spin;
            else if (type == "walk")
                seg.type = TrajectorySegment::Type::Walk;
            else
                throw ParseError("unknown trajectory segment type: " + type);
            seg.from = json_vec2(t.at("from"));
            if (t.contains("to")) seg.to = json_vec2(t.at("to"));
            seg.height = t.value("height", 1.3);
            seg.pitch_deg = t.value("pitch_deg", 0.0);
            seg.yaw_start_deg = t.value("yaw_start_deg", 0.0);
            seg.yaw_end_deg = t.value("yaw_end_deg", 360.0);
            seg.yaw_deg = t.value("yaw_deg", 0.0);
            seg.frames = t.at("frames").get<int>();
            s.trajectory.push_back(seg);
        }
        s.image_width = j.value("image_width", 320);
        s.image_height = j.value("image_height", 240);
        if (j.contains("intrinsics")) {
            const auto& k = j["intrinsics"];
            s.intrinsics = {k.at("fx").get<double>(), k.at("fy").get<double>(),
                            k.at("cx").get<double>(), k.at("cy").get<double>()};
        }
        if (j.contains("noise")) {
            const auto& nj = j["noise"];
            s.noise.sigma_a_mm = nj.value("sigma_a_mm", 0.0);
            s.noise.sigma_b = nj.value("sigma_b", 0.0);
            s.noise.dropout = nj.value("dropout", 0.0);
            s.noise.grazing_deg = nj.value("grazing_deg", 80.0);
        }
        s.seed = j.value("seed", uint64_t(1));
        s.min_range_mm = uint16_t(j.value("min_range_mm", 400));
        s.max_range_mm = uint16_t(j.value("max_range_mm", 8000));
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw ParseError("scene spec " + path.string() + ": " + e.what());
    }
}

}  // namespace placerec
