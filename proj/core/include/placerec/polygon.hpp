#pragma once

#include <vector>

#include <Eigen/Core>

namespace placerec {

using Vec2 = Eigen::Vector2d;

// Closed ring, first vertex not repeated. Orientation carries meaning:
// counterclockwise = filled area, clockwise = hole.
using Ring = std::vector<Vec2>;

struct PolygonWithHoles {
    Ring outer;               // counterclockwise
    std::vector<Ring> holes;  // clockwise
};

// A set of disjoint polygons-with-holes (a multipolygon). This is the
// currency of all in-plane boolean work.
using PolygonSet = std::vector<PolygonWithHoles>;

double signed_area(const Ring& ring);  // shoelace, CCW positive
double area(const PolygonSet& set);    // outers minus holes, >= 0 for valid sets

struct Box2 {
    Vec2 min{0, 0}, max{0, 0};
    bool empty = true;
    void expand(const Vec2& p);
    void expand(const Box2& b);
    double gap(const Box2& other) const;  // 0 when boxes overlap/touch
};

Box2 bounding_box(const PolygonSet& set);
Box2 bounding_box(const Ring& ring);

// Snap coordinates to a millimeter grid; applied before boolean ops for
// numerical robustness.
Vec2 snap_mm(const Vec2& p);
Ring snap_mm(const Ring& r);

// Boolean union of convex or simple rings into a polygon set.
PolygonSet union_rings(const std::vector<Ring>& rings);

// set1 ∪ set2
PolygonSet union_sets(const PolygonSet& a, const PolygonSet& b);

// a − b
PolygonSet difference(const PolygonSet& a, const PolygonSet& b);

PolygonSet box_to_set(const Box2& box);

// True when the two sets' geometries come within `dist` of each other
// (bounding-box test; exact enough for adjacency decisions on snapped data).
bool boxes_within(const PolygonSet& a, const PolygonSet& b, double dist);

}  // namespace placerec
