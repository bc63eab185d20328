#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "placerec/config.hpp"
#include "placerec/depth.hpp"
#include "placerec/descriptor.hpp"
#include "placerec/map2d.hpp"

namespace placerec {

// Opening cut into a wall. Offsets run along the wall from its start corner
// (floor polygon order). Door = sill at ground; window = sill above ground.
struct WallOpening {
    int wall = 0;
    double offset = 0.0;  // meters from wall start
    double width = 1.0;
    double sill = 1.2;  // meters above ground
    double head = 2.1;
};

struct StairSpec {
    Vec2 origin{0, 0};  // front edge center, ground coordinates
    Vec2 direction{1, 0};
    double width = 1.5;
    double tread_depth = 0.32;
    double rise = 0.17;
    int count = 5;
    bool ascending = true;  // false: treads descend below floor level (stairwell)
};

// Axis box standing on the floor; models furniture / transient objects.
struct BoxOccluder {
    Vec2 center{0, 0};
    double size_x = 0.6, size_y = 0.6, size_z = 1.0;
    double yaw_deg = 0.0;
    int frame_first = -1;  // visibility window; -1/-1 = always present
    int frame_last = -1;
};

struct TrajectorySegment {
    enum class Type { Spin, Walk };
    Type type = Type::Spin;
    Vec2 from{0, 0}, to{0, 0};  // Walk endpoints; Spin uses `from` only
    double height = 1.3;
    double pitch_deg = 0.0;  // positive = down
    double yaw_start_deg = 0.0, yaw_end_deg = 360.0;  // Spin sweep
    double yaw_deg = 0.0;                             // Walk fixed heading
    int frames = 0;
};

struct NoiseModel {
    double sigma_a_mm = 0.0;  // sigma(z) = a + b * z, millimeters
    double sigma_b = 0.0;
    double dropout = 0.0;        // iid no-return probability
    double grazing_deg = 80.0;   // incidence beyond this always drops

    bool enabled() const { return sigma_a_mm > 0 || sigma_b > 0 || dropout > 0; }
};

struct SceneSpec {
    std::string name;
    std::vector<Vec2> floor;  // simple polygon, counterclockwise, meters
    double wall_height = 2.5;
    std::vector<WallOpening> openings;
    std::vector<StairSpec> stairs;
    std::vector<BoxOccluder> occluders;
    std::vector<TrajectorySegment> trajectory;
    int image_width = 320, image_height = 240;
    // wide-FOV depth sensor (about 116 x 100 degrees)
    CameraIntrinsics intrinsics{100.0, 100.0, 160.0, 120.0};
    NoiseModel noise;
    uint64_t seed = 1;
    uint16_t min_range_mm = 400, max_range_mm = 8000;

    void validate() const;  // throws ConfigError listing violations
};

// Camera pose: world = z-up, camera = x right / y down / z forward.
struct CameraPose {
    Eigen::Matrix3d r_wc = Eigen::Matrix3d::Identity();  // camera-to-world
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
};

CameraPose look_pose(const Vec2& pos, double height, double yaw_deg, double pitch_deg);

struct GroundTruth {
    Map2D map;                   // exact 2D map, world ground coordinates
    SceneDescriptor descriptor;  // describe(map, scene name)
    std::vector<CameraPose> poses;
    Eigen::Vector3d up_axis_cam0{0, -1, 0};  // gravity-up in the first frame's camera frame
};

struct RenderResult {
    std::vector<DepthFrame> frames;
    GroundTruth truth;
};

// Ray-cast depth rendering of the planar scene along the trajectory.
// Deterministic for a fixed (spec, seed).
RenderResult render_sequence(const SceneSpec& spec);

// Exact 2D map / descriptor without rendering.
GroundTruth ground_truth(const SceneSpec& spec);

// Named parametric scenes covering rectangular/squarish/T/L/N shapes at
// small/medium/large sizes, with varied apertures and stairs.
std::vector<SceneSpec> scene_library();
SceneSpec library_scene(const std::string& name);

// Scene spec (de)serialization, JSON.
SceneSpec load_scene_spec(const std::filesystem::path& path);
void save_scene_spec(const SceneSpec& spec, const std::filesystem::path& path);

// Pipeline settings tuned to what this scene's renders look like: the
// sensor's intrinsics and up axis, quantization-aware flatness thresholds,
// and noise-widened thresholds when the spec has noise enabled.
PipelineConfig recommended_config(const SceneSpec& spec);

}  // namespace placerec
