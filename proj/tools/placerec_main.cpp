// placerec command-line tool: scene description, descriptor database
// management, place recognition, synthetic scene rendering, evaluation.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "placerec/matcher.hpp"
#include "placerec/pgm_io.hpp"
#include "placerec/pipeline.hpp"
#include "placerec/registration.hpp"
#include "placerec/store.hpp"
#include "placerec/svg_render.hpp"
#include "placerec/synth.hpp"

namespace fs = std::filesystem;
using namespace placerec;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 2;
constexpr int kExitPipeline = 3;
constexpr int kExitNoMatch = 4;

std::string serialize_score(double s) {
    char b[32];
    std::snprintf(b, sizeof(b), "%.6f", s);
    return b;
}

fs::path resolve_config(const std::string& explicit_path, const fs::path& frames_dir) {
    if (!explicit_path.empty()) return explicit_path;
    if (const char* env = std::getenv("PLACEREC_CONFIG"); env && *env) return env;
    return frames_dir / "config.json";
}

std::string read_file(const fs::path& p) {
    std::ifstream is(p);
    if (!is) throw Error("cannot open: " + p.string());
    std::string s((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return s;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream os(p);
    if (!os) throw Error("cannot write: " + p.string());
    os << content;
    if (!os) throw Error("write failed: " + p.string());
}

SceneDescriptor load_descriptor_file(const fs::path& p) {
    std::string s = read_file(p);
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return deserialize(s);
}

DescribeResult run_describe(const fs::path& frames_dir, const std::string& config_path,
                            const std::string& label, bool timing) {
    const PipelineConfig cfg = PipelineConfig::load(resolve_config(config_path, frames_dir));
    const auto frames = load_sequence(frames_dir, cfg);
    DescribeResult r = describe_frames(frames, cfg, label);
    r.descriptor.source_id = frames_dir.filename().string();
    if (timing) std::cerr << r.timings.report();
    for (const auto& d : r.diagnostics) std::cerr << "note: " << d << "\n";
    return r;
}

SceneDescriptor query_input(const fs::path& input, const std::string& config_path, bool timing) {
    if (fs::is_directory(input)) return run_describe(input, config_path, "", timing).descriptor;
    return load_descriptor_file(input);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"architecture-based place recognition from depth video"};
    app.require_subcommand(1);

    // --- describe ---
    auto* describe_cmd = app.add_subcommand("describe", "compute a scene descriptor from frames");
    std::string d_frames, d_config, d_out, d_svg, d_map3d, d_label, d_timestamp;
    bool d_timing = false;
    describe_cmd->add_option("frames-dir", d_frames, "directory of .pgm depth frames")->required();
    describe_cmd->add_option("--config", d_config, "pipeline config (default: frames-dir/config.json)");
    describe_cmd->add_option("--out", d_out, "write the descriptor to this file");
    describe_cmd->add_option("--svg", d_svg, "write an SVG rendering of the 2D map");
    describe_cmd->add_option("--map3d", d_map3d, "write the 3D map as OBJ");
    describe_cmd->add_option("--label", d_label, "place label to embed");
    describe_cmd->add_option("--timestamp", d_timestamp, "creation timestamp to embed");
    describe_cmd->add_flag("--timing", d_timing, "print per-stage timings to stderr");

    // --- db ---
    auto* db_cmd = app.add_subcommand("db", "descriptor database maintenance");
    db_cmd->require_subcommand(1);
    auto* db_add_cmd = db_cmd->add_subcommand("add", "add a descriptor file to the database");
    std::string a_db, a_desc, a_label;
    db_add_cmd->add_option("db", a_db, "database file")->required();
    db_add_cmd->add_option("descriptor", a_desc, "descriptor file")->required();
    db_add_cmd->add_option("--label", a_label, "place label")->required();
    auto* db_list_cmd = db_cmd->add_subcommand("list", "list database entries");
    std::string l_db;
    db_list_cmd->add_option("db", l_db, "database file")->required();

    // --- query ---
    auto* query_cmd = app.add_subcommand("query", "recognize a place against the database");
    std::string q_db, q_input, q_config;
    int q_topk = 1;
    double q_beta1 = -1, q_beta2 = -1, q_beta3 = -1, q_threshold = -1;
    bool q_timing = false;
    query_cmd->add_option("db", q_db, "database file")->required();
    query_cmd->add_option("input", q_input, "frames directory or descriptor file")->required();
    query_cmd->add_option("--config", q_config, "pipeline config for frame input");
    query_cmd->add_option("--top-k", q_topk, "print the k best entries");
    query_cmd->add_option("--beta1", q_beta1, "angle weight");
    query_cmd->add_option("--beta2", q_beta2, "length weight");
    query_cmd->add_option("--beta3", q_beta3, "type weight");
    query_cmd->add_option("--threshold", q_threshold, "accept threshold");
    query_cmd->add_flag("--timing", q_timing, "print per-stage timings to stderr");

    // --- synth ---
    auto* synth_cmd = app.add_subcommand("synth", "render a synthetic depth sequence");
    std::string s_scene, s_out;
    uint64_t s_seed = 0;
    std::vector<double> s_noise;
    bool s_list = false;
    synth_cmd->add_option("scene", s_scene, "library scene name or scene-spec JSON file");
    synth_cmd->add_option("--out", s_out, "output frames directory");
    synth_cmd->add_option("--seed", s_seed, "render seed (overrides the spec)");
    synth_cmd->add_option("--noise", s_noise, "sigma_a_mm sigma_b dropout")->expected(3);
    synth_cmd->add_flag("--list", s_list, "list library scenes");

    // --- eval ---
    auto* eval_cmd = app.add_subcommand("eval", "precision/recall over labeled queries");
    std::string e_db, e_queries, e_truth;
    double e_threshold = -1;
    eval_cmd->add_option("db", e_db, "database file")->required();
    eval_cmd->add_option("queries-dir", e_queries, "directory of query descriptor files")
        ->required();
    eval_cmd->add_option("--truth", e_truth, "file of '<query-stem> <label>' lines")->required();
    eval_cmd->add_option("--threshold", e_threshold, "accept threshold");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*describe_cmd) {
            DescribeResult r = run_describe(d_frames, d_config, d_label, d_timing);
            r.descriptor.timestamp = d_timestamp;
            const std::string line = serialize(r.descriptor);
            if (!d_out.empty())
                write_file(d_out, line + "\n");
            else
                std::cout << line << "\n";
            if (!d_svg.empty()) write_file(d_svg, render_map2d(r.map2d));
            if (!d_map3d.empty()) write_file(d_map3d, export_obj(r.map3d));
            return kExitOk;
        }

        if (*db_add_cmd) {
            DescriptorDB db;
            if (fs::exists(a_db)) db = db_load(a_db);
            db_add(std::move(db), a_label, load_descriptor_file(a_desc), a_db);
            std::cout << "added '" << a_label << "' (" << a_desc << ")\n";
            return kExitOk;
        }
        if (*db_list_cmd) {
            const DescriptorDB db = db_load(l_db);
            for (size_t i = 0; i < db.entries.size(); ++i) {
                const auto& d = db.entries[i].descriptor;
                std::cout << i << "  " << (d.label.empty() ? "-" : d.label) << "  corners="
                          << d.entries.size() << (d.open_map ? "  open" : "") << "\n";
            }
            return kExitOk;
        }

        if (*query_cmd) {
            const DescriptorDB db = db_load(q_db);
            MatchConfig mc;  // flag overrides on top of defaults
            if (fs::is_directory(q_input)) {
                const PipelineConfig pc =
                    PipelineConfig::load(resolve_config(q_config, q_input));
                mc = pc.match;
            }
            if (q_beta1 > 0) mc.beta1 = q_beta1;
            if (q_beta2 > 0) mc.beta2 = q_beta2;
            if (q_beta3 > 0) mc.beta3 = q_beta3;
            if (q_threshold >= 0) mc.accept_threshold = q_threshold;
            const SceneDescriptor query = query_input(q_input, q_config, q_timing);

            const auto ranked = rank_all(query, db, mc);
            const int k = std::max(1, q_topk);
            for (int i = 0; i < int(ranked.size()) && i < k; ++i) {
                const auto& r = ranked[i];
                std::cout << i + 1 << "  " << (r.label.empty() ? "-" : r.label) << "  score="
                          << serialize_score(r.score) << "  offset=" << r.alignment.offset
                          << "  dir="
                          << (r.alignment.direction == Direction::Clockwise ? "cw" : "acw")
                          << "\n";
            }
            if (ranked.empty() || ranked.front().score > mc.accept_threshold) {
                std::cerr << "no match (threshold " << mc.accept_threshold << ")\n";
                return kExitNoMatch;
            }
            return kExitOk;
        }

        if (*synth_cmd) {
            if (s_list) {
                for (const auto& s : scene_library()) std::cout << s.name << "\n";
                return kExitOk;
            }
            if (s_scene.empty() || s_out.empty())
                throw ConfigError("synth needs a scene and --out (or --list)");
            SceneSpec spec =
                fs::exists(s_scene) ? load_scene_spec(s_scene) : library_scene(s_scene);
            if (s_seed != 0) spec.seed = s_seed;
            if (!s_noise.empty()) {
                spec.noise.sigma_a_mm = s_noise[0];
                spec.noise.sigma_b = s_noise[1];
                spec.noise.dropout = s_noise[2];
            }
            fs::create_directories(s_out);
            const RenderResult r = render_sequence(spec);
            for (const auto& f : r.frames)
                write_pgm16(fs::path(s_out) / frame_file_name(f.index), f);
            recommended_config(spec).save(fs::path(s_out) / "config.json");
            SceneDescriptor truth = r.truth.descriptor;
            truth.source_id = spec.name;
            write_file(fs::path(s_out) / "truth.txt", serialize(truth) + "\n");
            std::cout << "rendered " << r.frames.size() << " frames to " << s_out << "\n";
            return kExitOk;
        }

        if (*eval_cmd) {
            const DescriptorDB db = db_load(e_db);
            MatchConfig mc;
            if (e_threshold >= 0) mc.accept_threshold = e_threshold;

            std::map<std::string, std::string> truth;
            std::ifstream ts(e_truth);
            if (!ts) throw Error("cannot open truth file: " + e_truth);
            std::string stem, label;
            while (ts >> stem >> label) truth[stem] = label;
            if (truth.empty()) throw ParseError("truth file has no '<stem> <label>' lines");

            int tp = 0, fp = 0, fn = 0;
            std::vector<fs::path> files;
            for (const auto& e : fs::directory_iterator(e_queries))
                if (e.is_regular_file() && e.path().extension() == ".txt")
                    files.push_back(e.path());
            std::sort(files.begin(), files.end());
            if (files.empty()) throw Error("no .txt query descriptors in " + e_queries);

            for (const auto& f : files) {
                const auto it = truth.find(f.stem().string());
                if (it == truth.end()) {
                    std::cerr << "note: no truth label for " << f.filename() << ", skipped\n";
                    continue;
                }
                const SceneDescriptor q = load_descriptor_file(f);
                const auto res = recognize(q, db, mc);
                const std::string pred = res ? res->label : "";
                if (pred.empty()) {
                    ++fn;
                } else if (pred == it->second) {
                    ++tp;
                } else {
                    ++fp;
                }
                std::cout << f.stem().string() << "  truth=" << it->second << "  pred="
                          << (pred.empty() ? "<none>" : pred)
                          << (res ? "  score=" + serialize_score(res->score) : "") << "\n";
            }
            const double p = (tp + fp) ? double(tp) / (tp + fp) : 0.0;
            const double r = (tp + fn) ? double(tp) / (tp + fn) : 0.0;
            const double f1 = (p + r > 0) ? 2 * p * r / (p + r) : 0.0;
            std::cout << "counts TP=" << tp << " FP=" << fp << " FN=" << fn << "\n";
            char line[128];
            std::snprintf(line, sizeof(line), "precision=%.4f recall=%.4f f1=%.4f\n", p, r, f1);
            std::cout << line;
            return kExitOk;
        }
    } catch (const PipelineError& e) {
        std::cerr << "pipeline error: " << e.what() << "\n";
        return kExitPipeline;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
    return kExitOk;
}
