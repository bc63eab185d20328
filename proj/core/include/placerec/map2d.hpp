#pragma once

#include <string>
#include <vector>

#include "placerec/registration.hpp"

namespace placerec {

// ISO-style height norms used to tell doors from windows.
struct ApertureNorms {
    double window_low = 1.2;   // meters above ground
    double window_high = 2.10;
    double door_height = 2.10;
};

// Opening in a wall: type 0 = window, 1 = door; length O along the wall;
// distance d from the wall's start corner.
struct Aperture {
    int type = 0;
    double length = 0.0;
    double distance = 0.0;
};

struct StairBlock {
    int type = 0;  // 1 ascending (risers observed), 0 descending (treads only)
    double length = 0.0;
    double width = 0.0;
    int nearest_wall = -1;
    double distance = 0.0;  // to the nearest wall segment, meters
    int step_count = 0;
    // footprint placement (informative; used by the SVG renderer)
    Vec2 center{0, 0};
    Vec2 direction{1, 0};  // unit, direction of ascent
};

struct Wall2D {
    Vec2 a{0, 0}, b{0, 0};  // ground-plane coordinates, corner k to corner k+1
    double length = 0.0;
    std::vector<Aperture> apertures;  // sorted by distance
};

// Annotated 2D map: counterclockwise corner cycle (seen from above), one wall
// per consecutive corner pair, interior angle per corner.
struct Map2D {
    std::vector<Vec2> corners;
    std::vector<double> angles;  // degrees, interior, angles[k] at corners[k]
    std::vector<Wall2D> walls;   // walls[k] connects corners[k] -> corners[k+1 mod n]
    std::vector<StairBlock> stairs;
    bool open_map = false;  // some corner undetected; zero-length convention in use
    std::vector<std::string> diagnostics;

    void validate() const;
};

struct Map2dConfig {
    Eigen::Vector3d up_axis{0, -1, 0};  // gravity-up in the global (first key frame) frame
    double ground_angle_deg = 15.0;     // horizontality tolerance
    double wall_angle_deg = 10.0;       // wall-to-ground orthogonality tolerance
    double min_ground_area = 1.0;       // m^2
    double min_wall_area = 1.5;         // m^2
    double corner_snap = 0.15;          // endpoint chaining radius, meters
    ApertureNorms norms;
    double aperture_tol = 0.15;     // slack around the window norms
    double ground_reach = 0.15;     // opening reaching this close to ground = door
    double min_opening = 0.15;      // ignore smaller coverage gaps (meters)
    double crease_margin = 0.12;    // wall-floor/ceiling extraction dead band to trim
    double stair_gap_tol = 0.04;    // uniformity of consecutive tread rises
    double stair_rise_min = 0.10;
    double stair_rise_max = 0.30;
    double stair_overlap_gap = 0.15;  // footprint adjacency between consecutive treads
    double max_tread_area = 1.5;      // m^2; larger horizontals are floors/ceilings
    double min_tread_area = 0.05;
};

// The horizontal plane (within ground_angle of up) with the lowest height and
// area above min_ground_area. Normal returned pointing up. Throws
// PipelineError when no plane qualifies.
PlaneParams locate_ground(const Map3D& map, const Map2dConfig& cfg);

// Wall candidates: polygons orthogonal to the ground within tolerance,
// descending area order, small ones filtered out.
std::vector<const MapPolygon*> select_walls(const Map3D& map, const PlaneParams& ground,
                                            double min_area, const Map2dConfig& cfg);

// Chain wall footprints into the corner cycle (corners/walls/angles only).
// Throws PipelineError when fewer than 2 segments chain.
Map2D project_walls(const std::vector<const MapPolygon*>& walls, const PlaneParams& ground,
                    const Map2dConfig& cfg);

// Same, also reporting which map polygon backs each wall of the cycle
// (nullptr for the zero-length closing wall of an open map).
Map2D project_walls_with_sources(const std::vector<const MapPolygon*>& walls,
                                 const PlaneParams& ground, const Map2dConfig& cfg,
                                 std::vector<const MapPolygon*>& wall_sources);

// Openings of one wall, classified against the height norms, sorted by
// distance from the wall's start corner.
std::vector<Aperture> classify_apertures(const PlanePolygon& wall, const Vec2& corner_a,
                                         const Vec2& corner_b, const PlaneParams& ground,
                                         const Map2dConfig& cfg,
                                         std::vector<std::string>* diagnostics = nullptr);

// Stair blocks: groups of >= 3 regularly spaced ground-parallel polygons with
// chained footprints; ascending when riser polygons interleave the treads.
std::vector<StairBlock> detect_stairs(const Map3D& map, const PlaneParams& ground,
                                      const Map2D& map2d, const Map2dConfig& cfg);

// Full derivation: ground, walls, cycle, apertures, stairs.
Map2D derive_map2d(const Map3D& map, const Map2dConfig& cfg);

}  // namespace placerec
