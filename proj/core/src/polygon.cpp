#include "placerec/polygon.hpp"

#include <algorithm>
#include <cmath>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>

namespace placerec {

namespace bg = boost::geometry;
using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint, /*ClockWise=*/false, /*Closed=*/true>;
using BgMulti = bg::model::multi_polygon<BgPolygon>;

double signed_area(const Ring& ring) {
    const size_t n = ring.size();
    if (n < 3) return 0.0;
    double a = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const Vec2& p = ring[i];
        const Vec2& q = ring[(i + 1) % n];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

double area(const PolygonSet& set) {
    double a = 0.0;
    for (const auto& p : set) {
        a += std::abs(signed_area(p.outer));
        for (const auto& h : p.holes) a -= std::abs(signed_area(h));
    }
    return std::max(0.0, a);
}

void Box2::expand(const Vec2& p) {
    if (empty) {
        min = max = p;
        empty = false;
    } else {
        min = min.cwiseMin(p);
        max = max.cwiseMax(p);
    }
}

void Box2::expand(const Box2& b) {
    if (b.empty) return;
    expand(b.min);
    expand(b.max);
}

double Box2::gap(const Box2& other) const {
    if (empty || other.empty) return std::numeric_limits<double>::infinity();
    const double dx = std::max({0.0, other.min.x() - max.x(), min.x() - other.max.x()});
    const double dy = std::max({0.0, other.min.y() - max.y(), min.y() - other.max.y()});
    return std::hypot(dx, dy);
}

Box2 bounding_box(const Ring& ring) {
    Box2 b;
    for (const auto& p : ring) b.expand(p);
    return b;
}

Box2 bounding_box(const PolygonSet& set) {
    Box2 b;
    for (const auto& p : set) b.expand(bounding_box(p.outer));
    return b;
}

Vec2 snap_mm(const Vec2& p) {
    return {std::round(p.x() * 1000.0) / 1000.0, std::round(p.y() * 1000.0) / 1000.0};
}

Ring snap_mm(const Ring& r) {
    Ring out;
    out.reserve(r.size());
    for (const auto& p : r) out.push_back(snap_mm(p));
    return out;
}

namespace {

BgPolygon to_bg(const Ring& ring) {
    BgPolygon poly;
    for (const auto& p : ring) bg::append(poly.outer(), BgPoint(p.x(), p.y()));
    bg::correct(poly);
    return poly;
}

BgMulti to_bg(const PolygonSet& set) {
    BgMulti multi;
    for (const auto& pwh : set) {
        BgPolygon poly;
        for (const auto& p : pwh.outer) bg::append(poly.outer(), BgPoint(p.x(), p.y()));
        poly.inners().resize(pwh.holes.size());
        for (size_t i = 0; i < pwh.holes.size(); ++i)
            for (const auto& p : pwh.holes[i])
                bg::append(poly.inners()[i], BgPoint(p.x(), p.y()));
        bg::correct(poly);
        multi.push_back(std::move(poly));
    }
    return multi;
}

Ring from_bg_ring(const BgPolygon::ring_type& r, bool reverse) {
    Ring out;
    const size_t n = r.size();
    if (n < 4) return out;  // closed rings repeat the first point
    out.reserve(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) out.push_back({bg::get<0>(r[i]), bg::get<1>(r[i])});
    if (reverse) std::reverse(out.begin(), out.end());
    return out;
}

PolygonSet from_bg(const BgMulti& multi) {
    PolygonSet set;
    for (const auto& poly : multi) {
        PolygonWithHoles pwh;
        pwh.outer = from_bg_ring(poly.outer(), false);
        if (pwh.outer.size() < 3) continue;
        for (const auto& inner : poly.inners()) {
            Ring h = from_bg_ring(inner, false);
            if (h.size() >= 3) pwh.holes.push_back(std::move(h));
        }
        set.push_back(std::move(pwh));
    }
    return set;
}

}  // namespace

PolygonSet union_rings(const std::vector<Ring>& rings) {
    BgMulti acc;
    for (const auto& ring : rings) {
        if (ring.size() < 3) continue;
        const BgPolygon poly = to_bg(snap_mm(ring));
        if (bg::area(poly) <= 0.0) continue;
        BgMulti next;
        bg::union_(acc, poly, next);
        acc = std::move(next);
    }
    return from_bg(acc);
}

PolygonSet union_sets(const PolygonSet& a, const PolygonSet& b) {
    BgMulti out;
    bg::union_(to_bg(a), to_bg(b), out);
    return from_bg(out);
}

PolygonSet difference(const PolygonSet& a, const PolygonSet& b) {
    BgMulti out;
    bg::difference(to_bg(a), to_bg(b), out);
    return from_bg(out);
}

PolygonSet box_to_set(const Box2& box) {
    if (box.empty) return {};
    PolygonWithHoles p;
    p.outer = {{box.min.x(), box.min.y()},
               {box.max.x(), box.min.y()},
               {box.max.x(), box.max.y()},
               {box.min.x(), box.max.y()}};
    return {p};
}

bool boxes_within(const PolygonSet& a, const PolygonSet& b, double dist) {
    return bounding_box(a).gap(bounding_box(b)) <= dist;
}

}  // namespace placerec
