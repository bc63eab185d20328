#include "placerec/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace placerec {

using nlohmann::json;

void PipelineConfig::validate() const {
    intrinsics.validate(image_width, image_height);
    if (min_range_mm >= max_range_mm) throw ConfigError("config: min range >= max range");
    if (stride < 1) throw ConfigError("config: stride must be >= 1");
    if (median_window < 3 || median_window % 2 == 0)
        throw ConfigError("config: median window must be odd and >= 3");
    extraction.validate();
    cluster.validate();
    match.validate();
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open config: " + path.string());
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ParseError("config " + path.string() + ": " + e.what());
    }

    PipelineConfig c;
    try {
        if (j.contains("intrinsics")) {
            const auto& k = j["intrinsics"];
            c.intrinsics = {k.at("fx").get<double>(), k.at("fy").get<double>(),
                            k.at("cx").get<double>(), k.at("cy").get<double>()};
        }
        if (j.contains("image")) {
            c.image_width = j["image"].value("width", c.image_width);
            c.image_height = j["image"].value("height", c.image_height);
        }
        if (j.contains("range_mm")) {
            c.min_range_mm = uint16_t(j["range_mm"].at(0).get<int>());
            c.max_range_mm = uint16_t(j["range_mm"].at(1).get<int>());
        }
        c.stride = j.value("stride", c.stride);
        c.median_window = j.value("median_window", c.median_window);
        if (j.contains("extraction")) {
            const auto& e = j["extraction"];
            c.extraction.t_m = e.value("t_m", c.extraction.t_m);
            c.extraction.t_c = e.value("t_c", c.extraction.t_c);
            c.extraction.f_s.a_mm = e.value("fs_a_mm", c.extraction.f_s.a_mm);
            c.extraction.f_s.b = e.value("fs_b", c.extraction.f_s.b);
            c.extraction.min_region_size = e.value("min_region_size", c.extraction.min_region_size);
            c.extraction.max_invalid_frac =
                e.value("max_invalid_frac", c.extraction.max_invalid_frac);
        }
        if (j.contains("cluster")) {
            const auto& e = j["cluster"];
            c.cluster.l_nom = e.value("l_nom", c.cluster.l_nom);
            c.cluster.l_dist = e.value("l_dist", c.cluster.l_dist);
            c.cluster.adjacency = e.value("adjacency", c.cluster.adjacency);
            c.cluster.adjacency_gap = e.value("adjacency_gap", c.cluster.adjacency_gap);
        }
        if (j.contains("registration")) {
            const auto& e = j["registration"];
            c.registration.match_angle_deg =
                e.value("match_angle_deg", c.registration.match_angle_deg);
            c.registration.match_offset = e.value("match_offset", c.registration.match_offset);
            c.registration.refine_angle_deg =
                e.value("refine_angle_deg", c.registration.refine_angle_deg);
            c.registration.min_rank_ratio = e.value("min_rank_ratio", c.registration.min_rank_ratio);
        }
        if (j.contains("fusion")) {
            const auto& e = j["fusion"];
            c.fusion.plane_match.l_nom = e.value("l_nom", c.fusion.plane_match.l_nom);
            c.fusion.plane_match.l_dist = e.value("l_dist", c.fusion.plane_match.l_dist);
            c.fusion.plane_match.adjacency_gap = e.value("gap", c.fusion.plane_match.adjacency_gap);
        }
        if (j.contains("map2d")) {
            const auto& e = j["map2d"];
            if (e.contains("up_axis")) {
                c.map2d.up_axis = Eigen::Vector3d(e["up_axis"].at(0).get<double>(),
                                                  e["up_axis"].at(1).get<double>(),
                                                  e["up_axis"].at(2).get<double>());
            }
            c.map2d.ground_angle_deg = e.value("ground_angle_deg", c.map2d.ground_angle_deg);
            c.map2d.wall_angle_deg = e.value("wall_angle_deg", c.map2d.wall_angle_deg);
            c.map2d.min_ground_area = e.value("min_ground_area", c.map2d.min_ground_area);
            c.map2d.min_wall_area = e.value("min_wall_area", c.map2d.min_wall_area);
            c.map2d.corner_snap = e.value("corner_snap", c.map2d.corner_snap);
            c.map2d.norms.window_low = e.value("window_low", c.map2d.norms.window_low);
            c.map2d.norms.window_high = e.value("window_high", c.map2d.norms.window_high);
            c.map2d.norms.door_height = e.value("door_height", c.map2d.norms.door_height);
            c.map2d.aperture_tol = e.value("aperture_tol", c.map2d.aperture_tol);
            c.map2d.ground_reach = e.value("ground_reach", c.map2d.ground_reach);
            c.map2d.min_opening = e.value("min_opening", c.map2d.min_opening);
            c.map2d.stair_gap_tol = e.value("stair_gap_tol", c.map2d.stair_gap_tol);
            c.map2d.stair_rise_min = e.value("stair_rise_min", c.map2d.stair_rise_min);
            c.map2d.stair_rise_max = e.value("stair_rise_max", c.map2d.stair_rise_max);
            c.map2d.stair_overlap_gap = e.value("stair_overlap_gap", c.map2d.stair_overlap_gap);
            c.map2d.max_tread_area = e.value("max_tread_area", c.map2d.max_tread_area);
            c.map2d.min_tread_area = e.value("min_tread_area", c.map2d.min_tread_area);
        }
        if (j.contains("match")) {
            const auto& e = j["match"];
            c.match.beta1 = e.value("beta1", c.match.beta1);
            c.match.beta2 = e.value("beta2", c.match.beta2);
            c.match.beta3 = e.value("beta3", c.match.beta3);
            c.match.accept_threshold = e.value("accept_threshold", c.match.accept_threshold);
            c.match.max_toggle = e.value("max_toggle", c.match.max_toggle);
        }
    } catch (const json::exception& e) {
        throw ParseError("config " + path.string() + ": " + e.what());
    }
    c.validate();
    return c;
}

void PipelineConfig::save(const std::filesystem::path& path) const {
    json j;
    j["intrinsics"] = {{"fx", intrinsics.fx},
                       {"fy", intrinsics.fy},
                       {"cx", intrinsics.cx},
                       {"cy", intrinsics.cy}};
    j["image"] = {{"width", image_width}, {"height", image_height}};
    j["range_mm"] = {min_range_mm, max_range_mm};
    j["stride"] = stride;
    j["median_window"] = median_window;
    j["extraction"] = {{"t_m", extraction.t_m},
                       {"t_c", extraction.t_c},
                       {"fs_a_mm", extraction.f_s.a_mm},
                       {"fs_b", extraction.f_s.b},
                       {"min_region_size", extraction.min_region_size},
                       {"max_invalid_frac", extraction.max_invalid_frac}};
    j["cluster"] = {{"l_nom", cluster.l_nom},
                    {"l_dist", cluster.l_dist},
                    {"adjacency", cluster.adjacency},
                    {"adjacency_gap", cluster.adjacency_gap}};
    j["registration"] = {{"match_angle_deg", registration.match_angle_deg},
                         {"match_offset", registration.match_offset},
                         {"refine_angle_deg", registration.refine_angle_deg},
                         {"min_rank_ratio", registration.min_rank_ratio}};
    j["fusion"] = {{"l_nom", fusion.plane_match.l_nom},
                   {"l_dist", fusion.plane_match.l_dist},
                   {"gap", fusion.plane_match.adjacency_gap}};
    j["map2d"] = {{"up_axis", {map2d.up_axis.x(), map2d.up_axis.y(), map2d.up_axis.z()}},
                  {"ground_angle_deg", map2d.ground_angle_deg},
                  {"wall_angle_deg", map2d.wall_angle_deg},
                  {"min_ground_area", map2d.min_ground_area},
                  {"min_wall_area", map2d.min_wall_area},
                  {"corner_snap", map2d.corner_snap},
                  {"window_low", map2d.norms.window_low},
                  {"window_high", map2d.norms.window_high},
                  {"door_height", map2d.norms.door_height},
                  {"aperture_tol", map2d.aperture_tol},
                  {"ground_reach", map2d.ground_reach},
                  {"min_opening", map2d.min_opening},
                  {"stair_gap_tol", map2d.stair_gap_tol},
                  {"stair_rise_min", map2d.stair_rise_min},
                  {"stair_rise_max", map2d.stair_rise_max},
                  {"stair_overlap_gap", map2d.stair_overlap_gap},
                  {"max_tread_area", map2d.max_tread_area},
                  {"min_tread_area", map2d.min_tread_area}};
    j["match"] = {{"beta1", match.beta1},
                  {"beta2", match.beta2},
                  {"beta3", match.beta3},
                  {"accept_threshold", match.accept_threshold},
                  {"max_toggle", match.max_toggle}};

    std::ofstream os(path);
    if (!os) throw Error("cannot write config: " + path.string());
    os << j.dump(2) << "\n";
}

}  // namespace placerec
