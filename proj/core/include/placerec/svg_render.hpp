#pragma once

#include <string>

#include "placerec/map2d.hpp"

namespace placerec {

struct RenderStyle {
    double scale = 1.0;  // pixels per centimeter
    double margin_cm = 30.0;
    std::string wall_color = "#222222";
    std::string door_color = "#c03020";
    std::string window_color = "#2060c0";
    std::string stair_color = "#208040";
    bool labels = true;

    void validate() const;
};

// SVG 1.1 floor-plan rendering: walls as solid lines, door/window gaps as
// dashed labeled lines, stair blocks as a rectangle with one interior
// parallel line per step and an ascending/descending arrow.
std::string render_map2d(const Map2D& map, const RenderStyle& style = {});

}  // namespace placerec
