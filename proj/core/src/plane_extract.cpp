#include "placerec/plane_extract.hpp"

#include <algorithm>
#include <cstdio>

#include <Eigen/Eigenvalues>

namespace placerec {

void ExtractionConfig::validate() const {
    if (t_m <= 0 || t_c <= 0) throw ConfigError("extraction: thresholds must be positive");
    if (f_s.a_mm <= 0) throw ConfigError("extraction: f_s offset must be positive");
    if (min_region_size < 2) throw ConfigError("extraction: min region size must be >= 2");
    if (max_invalid_frac < 0 || max_invalid_frac >= 1)
        throw ConfigError("extraction: invalid fraction must be in [0,1)");
}

void PointMoments::add(const Eigen::Vector3d& p) {
    if (n == 0) {
        bbox_min = bbox_max = p;
    } else {
        bbox_min = bbox_min.cwiseMin(p);
        bbox_max = bbox_max.cwiseMax(p);
    }
    n += 1.0;
    sum += p;
    sum_sq += p * p.transpose();
}

void PointMoments::merge(const PointMoments& other) {
    if (other.n == 0) return;
    if (n == 0) {
        *this = other;
        return;
    }
    n += other.n;
    sum += other.sum;
    sum_sq += other.sum_sq;
    bbox_min = bbox_min.cwiseMin(other.bbox_min);
    bbox_max = bbox_max.cwiseMax(other.bbox_max);
}

Eigen::Matrix3d PointMoments::covariance() const {
    const Eigen::Vector3d c = centroid();
    return sum_sq / n - c * c.transpose();
}

DciMap compute_dci(const DepthFrame& frame, const std::function<double(double)>& f_s) {
    DciMap out;
    out.width = frame.width;
    out.height = frame.height;
    out.map.assign(static_cast<size_t>(frame.width) * frame.height, 0);

    static constexpr int du[4] = {1, -1, 0, 0};
    static constexpr int dv[4] = {0, 0, 1, -1};

    for (int v = 0; v < frame.height; ++v) {
        for (int u = 0; u < frame.width; ++u) {
            const uint16_t z = frame.at(u, v);
            if (z == 0) continue;
            double max_diff = 0.0;
            for (int i = 0; i < 4; ++i) {
                const int uu = u + du[i], vv = v + dv[i];
                if (uu < 0 || uu >= frame.width || vv < 0 || vv >= frame.height) continue;
                const uint16_t zn = frame.at(uu, vv);
                if (zn == 0) continue;  // no-return neighbors carry no depth evidence
                max_diff = std::max(max_diff, std::abs(double(z) - double(zn)));
            }
            if (max_diff <= f_s(z)) out.map[static_cast<size_t>(v) * frame.width + u] = 1;
        }
    }
    return out;
}

std::optional<PlaneParams> fit_plane(std::span<const Eigen::Vector3d> points) {
    if (points.size() < 3) return std::nullopt;
    PointMoments m;
    for (const auto& p : points) m.add(p);
    return fit_plane(m);
}

std::optional<PlaneParams> fit_plane(const PointMoments& m) {
    if (m.n < 3) return std::nullopt;
    const Eigen::Matrix3d cov = m.covariance();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    if (eig.info() != Eigen::Success) return std::nullopt;
    const Eigen::Vector3d evals = eig.eigenvalues();  // ascending
    const double trace = evals.sum();
    // degenerate: all points coincident, or collinear (two near-zero eigenvalues)
    if (trace <= 0.0) return std::nullopt;
    if (evals(1) <= 1e-12 * trace) return std::nullopt;

    PlaneParams p;
    p.normal = eig.eigenvectors().col(0).normalized();
    const Eigen::Vector3d c = m.centroid();
    if (p.normal.dot(c) > 0) p.normal = -p.normal;  // face the camera/origin
    p.offset = p.normal.dot(c);
    p.mse = std::max(0.0, evals(0));
    p.curvature = std::max(0.0, evals(0)) / trace;
    return p;
}

bool is_flat(const PlaneParams& params, const ExtractionConfig& cfg) {
    return params.mse < cfg.t_m && params.curvature < cfg.t_c;
}

bool is_smooth(const Region& region, const DciMap& dci, const DepthFrame& frame) {
    for (int v = region.y; v < region.y + region.h; ++v)
        for (int u = region.x; u < region.x + region.w; ++u)
            if (frame.valid(u, v) && !dci.at(u, v)) return false;
    return true;
}

namespace {

struct FrameScan {
    const DepthFrame& frame;
    const DciMap& dci;
    // integral images over (valid, valid&&dci) for O(1) region counts
    std::vector<int> valid_sum;
    std::vector<int> smooth_sum;
    int w, h;

    explicit FrameScan(const DepthFrame& f, const DciMap& d)
        : frame(f), dci(d), w(f.width), h(f.height) {
        valid_sum.assign(static_cast<size_t>(w + 1) * (h + 1), 0);
        smooth_sum.assign(static_cast<size_t>(w + 1) * (h + 1), 0);
        for (int v = 0; v < h; ++v) {
            int row_valid = 0, row_smooth = 0;
            for (int u = 0; u < w; ++u) {
                const bool val = f.valid(u, v);
                row_valid += val;
                row_smooth += val && d.at(u, v);
                const size_t i = static_cast<size_t>(v + 1) * (w + 1) + (u + 1);
                valid_sum[i] = valid_sum[i - (w + 1)] + row_valid;
                smooth_sum[i] = smooth_sum[i - (w + 1)] + row_smooth;
            }
        }
    }

    int rect_count(const std::vector<int>& s, const Region& r) const {
        const size_t a = static_cast<size_t>(r.y) * (w + 1) + r.x;
        const size_t b = static_cast<size_t>(r.y) * (w + 1) + r.x + r.w;
        const size_t c = static_cast<size_t>(r.y + r.h) * (w + 1) + r.x;
        const size_t d = static_cast<size_t>(r.y + r.h) * (w + 1) + r.x + r.w;
        return s[d] - s[b] - s[c] + s[a];
    }

    int valid_count(const Region& r) const { return rect_count(valid_sum, r); }
    int smooth_count(const Region& r) const { return rect_count(smooth_sum, r); }
};

PointMoments region_moments(const DepthFrame& frame, const Region& r) {
    PointMoments m;
    for (int v = r.y; v < r.y + r.h; ++v)
        for (int u = r.x; u < r.x + r.w; ++u) {
            const uint16_t z = frame.at(u, v);
            if (z == 0) continue;
            m.add(backproject_depth(frame.intrinsics, u, v, z));
        }
    return m;
}

std::vector<Region> valid_strips(const DepthFrame& frame, const Region& r) {
    // runs of valid pixels per row, then vertical merge of identical spans
    std::vector<Region> strips;
    for (int v = r.y; v < r.y + r.h; ++v) {
        int u = r.x;
        while (u < r.x + r.w) {
            if (!frame.valid(u, v)) {
                ++u;
                continue;
            }
            int u1 = u;
            while (u1 + 1 < r.x + r.w && frame.valid(u1 + 1, v)) ++u1;
            // extend the previous row's strip if the span matches
            bool merged = false;
            for (auto it = strips.rbegin(); it != strips.rend(); ++it) {
                if (it->y + it->h != v) break;  // only strips ending on the previous row
                if (it->x == u && it->w == u1 - u + 1) {
                    it->h += 1;
                    merged = true;
                    break;
                }
            }
            if (!merged) strips.push_back({u, v, u1 - u + 1, 1});
            u = u1 + 1;
        }
    }
    return strips;
}

void descend(const FrameScan& scan, const ExtractionConfig& cfg, const Region& r,
             std::vector<ExtractedRegion>& out) {
    const int area = r.w * r.h;
    if (area == 0) return;
    const int valid = scan.valid_count(r);

    bool accepted = false;
    if (valid >= 3 && valid >= area * (1.0 - cfg.max_invalid_frac) &&
        scan.smooth_count(r) == valid) {
        PointMoments m = region_moments(scan.frame, r);
        if (auto plane = fit_plane(m); plane && is_flat(*plane, cfg)) {
            out.push_back({r, *plane, std::move(m), valid_strips(scan.frame, r)});
            accepted = true;
        }
    }
    if (accepted) return;

    if (std::min(r.w, r.h) > cfg.min_region_size) {
        const int w2 = r.w / 2, h2 = r.h / 2;
        descend(scan, cfg, {r.x, r.y, w2, h2}, out);
        descend(scan, cfg, {r.x + w2, r.y, r.w - w2, h2}, out);
        descend(scan, cfg, {r.x, r.y + h2, w2, r.h - h2}, out);
        descend(scan, cfg, {r.x + w2, r.y + h2, r.w - w2, r.h - h2}, out);
    }
}

}  // namespace

std::vector<ExtractedRegion> extract_planar_regions(const DepthFrame& frame,
                                                    const ExtractionConfig& cfg) {
    cfg.validate();
    frame.validate();
    const DciMap dci = compute_dci(frame, cfg.f_s);
    FrameScan scan(frame, dci);
    std::vector<ExtractedRegion> out;
    descend(scan, cfg, {0, 0, frame.width, frame.height}, out);
    return out;
}

std::string dump_regions(const std::vector<ExtractedRegion>& regions) {
    std::string s;
    char line[256];
    for (const auto& r : regions) {
        std::snprintf(line, sizeof(line),
                      "region %d %d %d %d  n %.9f %.9f %.9f  d %.9f  mse %.12g  curv %.12g\n",
                      r.region.x, r.region.y, r.region.w, r.region.h, r.plane.normal.x(),
                      r.plane.normal.y(), r.plane.normal.z(), r.plane.offset, r.plane.mse,
                      r.plane.curvature);
        s += line;
    }
    return s;
}

}  // namespace placerec
