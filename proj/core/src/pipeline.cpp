#include "placerec/pipeline.hpp"

#include <chrono>
#include <cstdio>

#include "placerec/pgm_io.hpp"

namespace placerec {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

std::string StageTimings::report() const {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "stage timings over %d key frames (ms total / per key frame):\n"
                  "  plane extraction   %9.2f / %8.3f\n"
                  "  polygon clustering %9.2f / %8.3f\n"
                  "  registration       %9.2f / %8.3f\n"
                  "  3D map fusion      %9.2f / %8.3f\n"
                  "  2D map derivation  %9.2f\n"
                  "  descriptor         %9.2f\n"
                  "  total              %9.2f\n",
                  keyframes, extract_ms, keyframes ? extract_ms / keyframes : 0.0, cluster_ms,
                  keyframes ? cluster_ms / keyframes : 0.0, register_ms,
                  keyframes ? register_ms / keyframes : 0.0, fuse_ms,
                  keyframes ? fuse_ms / keyframes : 0.0, map2d_ms, describe_ms, total_ms());
    return buf;
}

DescribeResult describe_frames(const std::vector<DepthFrame>& frames, const PipelineConfig& cfg,
                               const std::string& label) {
    cfg.validate();
    if (frames.empty()) throw PipelineError("describe: empty frame sequence");

    DescribeResult out;
    std::vector<PlanePolygon> last_polys;  // last successfully chained key frame
    RigidTransform last_global;
    bool have_last = false;
    char msg[160];

    for (const auto& raw : frames) {
        if (raw.index % cfg.stride != 0) continue;
        ++out.timings.keyframes;

        auto t0 = Clock::now();
        DepthFrame frame = median_smooth(raw, cfg.median_window);
        frame.clamp_range(cfg.min_range_mm, cfg.max_range_mm);
        const auto regions = extract_planar_regions(frame, cfg.extraction);
        out.timings.extract_ms += ms_since(t0);

        t0 = Clock::now();
        const auto polys = cluster_regions(regions, frame.intrinsics, cfg.cluster);
        out.timings.cluster_ms += ms_since(t0);
        if (polys.empty()) {
            std::snprintf(msg, sizeof(msg), "key frame %d: no planar polygons, skipped",
                          raw.index);
            out.diagnostics.emplace_back(msg);
            continue;
        }

        RigidTransform global;
        if (have_last) {
            t0 = Clock::now();
            std::string diag;
            const auto delta = estimate_transform(last_polys, polys, cfg.registration, &diag);
            out.timings.register_ms += ms_since(t0);
            if (!delta) {
                std::snprintf(msg, sizeof(msg), "key frame %d: registration failed (%s), skipped",
                              raw.index, diag.c_str());
                out.diagnostics.emplace_back(msg);
                continue;  // chain through the next frame that does register
            }
            global = last_global * *delta;
            global.reorthonormalize();
        }

        t0 = Clock::now();
        fuse(out.map3d, polys, global, raw.index, cfg.fusion);
        out.timings.fuse_ms += ms_since(t0);

        last_polys = polys;
        last_global = global;
        have_last = true;
    }
    if (!have_last) throw PipelineError("describe: no key frame produced polygons");

    auto t0 = Clock::now();
    out.map2d = derive_map2d(out.map3d, cfg.map2d);
    out.timings.map2d_ms += ms_since(t0);
    for (const auto& d : out.map2d.diagnostics) out.diagnostics.push_back(d);

    t0 = Clock::now();
    out.descriptor = describe(out.map2d, label);
    out.timings.describe_ms += ms_since(t0);
    return out;
}

std::vector<DepthFrame> load_sequence(const std::filesystem::path& dir,
                                      const PipelineConfig& cfg) {
    const auto files = list_sequence_files(dir);
    if (files.empty()) throw Error("no .pgm frames in " + dir.string());
    std::vector<DepthFrame> frames;
    frames.reserve(files.size());
    for (const auto& f : files) {
        DepthFrame frame = read_pgm16(f, cfg.intrinsics);
        try {
            frame.index = std::stoi(f.stem().string());
        } catch (const std::exception&) {
            throw ParseError("frame file name is not a frame number: " + f.string());
        }
        frame.clamp_range(cfg.min_range_mm, cfg.max_range_mm);
        frames.push_back(std::move(frame));
    }
    return frames;
}

}  // namespace placerec
