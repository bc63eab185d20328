#include "placerec/svg_render.hpp"

#include <cmath>
#include <cstdio>

namespace placerec {

void RenderStyle::validate() const {
    if (scale <= 0) throw ConfigError("svg style: scale must be positive");
}

namespace {

struct Mapper {
    double min_x, max_y, scale_px;  // px per meter
    double margin_px;
    Vec2 operator()(const Vec2& p) const {
        return {(p.x() - min_x) * scale_px + margin_px, (max_y - p.y()) * scale_px + margin_px};
    }
};

void line(std::string& s, const Mapper& m, const Vec2& a, const Vec2& b, const char* cls,
          const std::string& color, bool dashed) {
    const Vec2 pa = m(a), pb = m(b);
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "  <line class=\"%s\" x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                  "stroke=\"%s\" stroke-width=\"2\"%s/>\n",
                  cls, pa.x(), pa.y(), pb.x(), pb.y(), color.c_str(),
                  dashed ? " stroke-dasharray=\"6,4\"" : "");
    s += buf;
}

void text(std::string& s, const Mapper& m, const Vec2& at, const std::string& label,
          const std::string& color) {
    const Vec2 p = m(at);
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "  <text x=\"%.2f\" y=\"%.2f\" fill=\"%s\" font-size=\"12\">%s</text>\n", p.x(),
                  p.y(), color.c_str(), label.c_str());
    s += buf;
}

}  // namespace

std::string render_map2d(const Map2D& map, const RenderStyle& style) {
    style.validate();

    Box2 bbox;
    for (const auto& c : map.corners) bbox.expand(c);
    for (const auto& st : map.stairs) {
        const Vec2 perp(-st.direction.y(), st.direction.x());
        for (double sl : {-0.5, 0.5})
            for (double sw : {-0.5, 0.5})
                bbox.expand(st.center + sl * st.length * st.direction + sw * st.width * perp);
    }
    if (bbox.empty) bbox.expand({0, 0});

    const double px_per_m = 100.0 * style.scale;
    const double margin_px = style.margin_cm * style.scale;
    const Mapper m{bbox.min.x(), bbox.max.y(), px_per_m, margin_px};
    const double w_px = (bbox.max.x() - bbox.min.x()) * px_per_m + 2 * margin_px;
    const double h_px = (bbox.max.y() - bbox.min.y()) * px_per_m + 2 * margin_px;

    std::string s;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"%.0f\" "
                  "height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                  w_px, h_px, w_px, h_px);
    s += buf;

    for (const auto& wall : map.walls) {
        if (wall.length <= 0) continue;  // undetected-corner convention
        const Vec2 dir = (wall.b - wall.a) / wall.length;
        double cursor = 0.0;
        for (const auto& ap : wall.apertures) {
            if (ap.distance > cursor + 1e-9)
                line(s, m, wall.a + cursor * dir, wall.a + ap.distance * dir, "wall",
                     style.wall_color, false);
            const Vec2 ga = wall.a + ap.distance * dir;
            const Vec2 gb = wall.a + (ap.distance + ap.length) * dir;
            const bool door = ap.type == 1;
            line(s, m, ga, gb, door ? "door" : "window",
                 door ? style.door_color : style.window_color, true);
            if (style.labels)
                text(s, m, 0.5 * (ga + gb), door ? "door" : "window",
                     door ? style.door_color : style.window_color);
            cursor = ap.distance + ap.length;
        }
        if (cursor < wall.length - 1e-9)
            line(s, m, wall.a + cursor * dir, wall.b, "wall", style.wall_color, false);
    }

    for (const auto& st : map.stairs) {
        const Vec2 perp(-st.direction.y(), st.direction.x());
        const Vec2 c0 = st.center - 0.5 * st.length * st.direction - 0.5 * st.width * perp;
        const Vec2 c1 = st.center + 0.5 * st.length * st.direction - 0.5 * st.width * perp;
        const Vec2 c2 = st.center + 0.5 * st.length * st.direction + 0.5 * st.width * perp;
        const Vec2 c3 = st.center - 0.5 * st.length * st.direction + 0.5 * st.width * perp;
        const Vec2 p0 = m(c0), p1 = m(c1), p2 = m(c2), p3 = m(c3);
        std::snprintf(buf, sizeof(buf),
                      "  <g class=\"%s\">\n  <polygon points=\"%.2f,%.2f %.2f,%.2f %.2f,%.2f "
                      "%.2f,%.2f\" fill=\"none\" stroke=\"%s\" stroke-width=\"2\"/>\n",
                      st.type ? "stairs-ascending" : "stairs-descending", p0.x(), p0.y(), p1.x(),
                      p1.y(), p2.x(), p2.y(), p3.x(), p3.y(), style.stair_color.c_str());
        s += buf;
        // one interior parallel line per detected step
        for (int i = 1; i <= st.step_count; ++i) {
            const double t = double(i) / (st.step_count + 1);
            const Vec2 a = c0 + t * (c1 - c0);
            const Vec2 b = c3 + t * (c2 - c3);
            line(s, m, a, b, "stair-step", style.stair_color, false);
        }
        // arrow along the direction of ascent
        const Vec2 tail = st.center - 0.25 * st.length * st.direction;
        const Vec2 head = st.center + 0.25 * st.length * st.direction;
        const Vec2 barb1 = head - 0.08 * st.length * st.direction + 0.06 * st.width * perp;
        const Vec2 barb2 = head - 0.08 * st.length * st.direction - 0.06 * st.width * perp;
        const Vec2 pt = m(tail), ph = m(head), pb1 = m(barb1), pb2 = m(barb2);
        std::snprintf(buf, sizeof(buf),
                      "  <path class=\"stair-arrow\" d=\"M %.2f %.2f L %.2f %.2f M %.2f %.2f L "
                      "%.2f %.2f M %.2f %.2f L %.2f %.2f\" stroke=\"%s\" fill=\"none\" "
                      "stroke-width=\"2\"/>\n  </g>\n",
                      pt.x(), pt.y(), ph.x(), ph.y(), pb1.x(), pb1.y(), ph.x(), ph.y(), pb2.x(),
                      pb2.y(), ph.x(), ph.y(), style.stair_color.c_str());
        s += buf;
    }

    s += "</svg>\n";
    return s;
}

}  // namespace placerec
