#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "radarcs/allocator.hpp"
#include "radarcs/errors.hpp"
#include "radarcs/export.hpp"
#include "radarcs/frame_io.hpp"
#include "radarcs/pipeline.hpp"
#include "radarcs/rng.hpp"
#include "radarcs/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace radarcs;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitSolverFailure = 4;

struct GridSpec {
    int az_blocks = 8;
    int rng_blocks = 37;
    int block_az = 50;
    int block_rng = 100;
};

void parse_pair(const std::string& text, int& first, int& second, const std::string& what) {
    const auto x = text.find('x');
    if (x == std::string::npos)
        throw ValidationError(what + ": expected AxB, got '" + text + "'");
    try {
        first = std::stoi(text.substr(0, x));
        second = std::stoi(text.substr(x + 1));
    } catch (const std::exception&) {
        throw ValidationError(what + ": expected AxB, got '" + text + "'");
    }
    if (first <= 0 || second <= 0) throw ValidationError(what + ": dims must be positive");
}

SynthSceneConfig scene_from_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open scene spec " + path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw IoError("bad scene spec " + path + ": " + e.what());
    }
    SynthSceneConfig cfg;
    cfg.az_blocks = j.value("az_blocks", cfg.az_blocks);
    cfg.rng_blocks = j.value("rng_blocks", cfg.rng_blocks);
    cfg.block_az = j.value("block_az", cfg.block_az);
    cfg.block_rng = j.value("block_rng", cfg.block_rng);
    cfg.range_resolution_m = j.value("range_resolution_m", cfg.range_resolution_m);
    cfg.noise_floor = j.value("noise_floor", cfg.noise_floor);
    cfg.n_frames = j.value("n_frames", cfg.n_frames);
    cfg.start_time_s = j.value("start_time_s", cfg.start_time_s);
    for (const auto& t : j.value("targets", json::array())) {
        SynthTarget target;
        target.azimuth_deg = t.value("azimuth_deg", 0.0);
        target.range_m = t.value("range_m", 30.0);
        target.amplitude = t.value("amplitude", 100.0);
        target.extent_bins = t.value("extent_bins", 2.0);
        target.d_range_m_per_frame = t.value("d_range_m_per_frame", 0.0);
        target.d_azimuth_deg_per_frame = t.value("d_azimuth_deg_per_frame", 0.0);
        target.class_label = t.value("class", std::string("car"));
        cfg.targets.push_back(std::move(target));
    }
    return cfg;
}

SynthSceneConfig default_scene() {
    SynthSceneConfig cfg;
    cfg.targets = {
        {10.0, 2.0, 120.0, 2.0, 0.3, 0.0, "car"},
        {200.0, 3.5, 100.0, 2.0, 0.0, 0.0, "person"},
        {100.0, 1.5, 90.0, 1.5, 0.0, 0.0, "truck"},
        {350.0, 3.0, 110.0, 2.0, 0.0, 0.0, "car"},
    };
    return cfg;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Adaptive block-based compressed-sensing simulator for FMCW scanning radar"};
    app.set_config("--config", "", "Key-value config file; command-line flags override it");
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic scene");
    std::string synth_out = "scene";
    std::string synth_scene_path;
    std::string synth_grid = "8x8", synth_block = "20x25";
    int synth_frames = 0;
    double synth_noise = 0.0;
    std::uint64_t synth_seed = 1;
    synth->add_option("--out", synth_out, "Output directory");
    synth->add_option("--scene", synth_scene_path, "Scene spec JSON (targets, dims, noise)");
    synth->add_option("--grid", synth_grid, "Blocks as AZxRNG (default 8x8)");
    synth->add_option("--block", synth_block, "Bins per block as AZxRNG (default 20x25)");
    synth->add_option("--frames", synth_frames, "Number of radar frames (overrides scene spec)");
    synth->add_option("--noise-floor", synth_noise, "Clutter mean (overrides scene spec)");
    synth->add_option("--seed", synth_seed, "RNG seed");

    // shared run/plan options
    std::string manifest_path, out_dir = "out", mode_name_opt = "baseline";
    double budget = 0.10;
    std::uint64_t seed = 0;
    bool exact_budget = false;
    int threads = 0;
    int frame_index = 0;
    double noise_sigma = 0.0;
    std::string grid_opt, block_opt;

    auto add_common = [&](CLI::App* cmd, bool with_out) {
        cmd->add_option("--manifest", manifest_path, "Scene manifest JSON")->required();
        cmd->add_option("--mode", mode_name_opt, "baseline|algo1|algo2");
        cmd->add_option("--budget", budget, "Total sampling budget fraction (default 0.10)");
        cmd->add_option("--seed", seed, "RNG seed");
        cmd->add_flag("--exact-budget", exact_budget,
                      "Derive R1 rate from the budget instead of the rate table");
        cmd->add_option("--block", block_opt, "Override block dims as AZxRNG");
        cmd->add_option("--grid", grid_opt, "Expected block grid as AZxRNG (sanity check)");
        if (with_out) cmd->add_option("--out", out_dir, "Output directory");
    };

    auto* plan_cmd = app.add_subcommand("plan", "Emit the sampling plan JSON for one frame");
    add_common(plan_cmd, false);
    plan_cmd->add_option("--frame-index", frame_index, "Frame to plan (default 0)");
    std::string plan_out;
    plan_cmd->add_option("--plan-out", plan_out, "Write plan here instead of stdout");

    auto* run_cmd = app.add_subcommand("run", "Simulate acquisition + reconstruction");
    add_common(run_cmd, true);
    run_cmd->add_option("--threads", threads, "Worker threads (0 = hardware)");
    run_cmd->add_option("--noise-sigma", noise_sigma, "Additive measurement noise std");

    auto* eval_cmd = app.add_subcommand("eval", "Recompute reports from stored reconstructions");
    std::string eval_recon_dir;
    eval_cmd->add_option("--manifest", manifest_path, "Scene manifest JSON")->required();
    eval_cmd->add_option("--recon-dir", eval_recon_dir, "Directory holding recon_*.png")
        ->required();
    eval_cmd->add_option("--out", out_dir, "Where to write eval_*.json (default recon dir)");

    auto* export_cmd = app.add_subcommand("export", "Render a frame PNG for viewing");
    std::string export_in, export_out = "render.png";
    bool export_cart = false;
    double export_range = 62.625;
    bool export_full = false;
    export_cmd->add_option("--frame", export_in, "Frame PNG (with sidecar)")->required();
    export_cmd->add_option("--out", export_out, "Output PNG");
    export_cmd->add_flag("--cartesian", export_cart, "Rasterize to a cartesian view");
    export_cmd->add_option("--range-m", export_range, "Display range in metres (default 62.625)");
    export_cmd->add_flag("--full-range", export_full, "Render the full recorded range");

    CLI11_PARSE(app, argc, argv);

    if (synth->parsed()) {
        SynthSceneConfig cfg =
            synth_scene_path.empty() ? default_scene() : scene_from_json(synth_scene_path);
        parse_pair(synth_grid, cfg.az_blocks, cfg.rng_blocks, "--grid");
        parse_pair(synth_block, cfg.block_az, cfg.block_rng, "--block");
        if (synth_frames > 0) cfg.n_frames = synth_frames;
        if (synth_noise > 0) cfg.noise_floor = synth_noise;
        cfg.seed = synth_seed;
        synth_scene(cfg, synth_out);
        std::cout << "wrote scene to " << synth_out << " (" << cfg.n_frames << " frames, "
                  << cfg.targets.size() << " targets)\n";
        return kExitOk;
    }

    if (plan_cmd->parsed() || run_cmd->parsed()) {
        SceneManifest manifest = load_manifest(manifest_path);
        if (!block_opt.empty()) parse_pair(block_opt, manifest.block_az, manifest.block_rng, "--block");

        RunConfig config;
        config.mode = mode_from_name(mode_name_opt);
        config.budget_fraction = budget;
        config.seed = seed;
        config.exact_budget = exact_budget;
        config.threads = threads;
        config.noise_sigma = noise_sigma;

        if (!grid_opt.empty()) {
            GridSpec want;
            parse_pair(grid_opt, want.az_blocks, want.rng_blocks, "--grid");
            const PolarFrame probe = load_frame(manifest.resolve(manifest.frames.at(0).path));
            const BlockGrid g =
                partition(probe.azimuth_bins, probe.range_bins, manifest.block_az, manifest.block_rng);
            if (g.az_blocks != want.az_blocks || g.rng_blocks != want.rng_blocks)
                throw ValidationError("--grid mismatch: manifest yields " +
                                      std::to_string(g.az_blocks) + "x" +
                                      std::to_string(g.rng_blocks));
        }

        if (plan_cmd->parsed()) {
            if (frame_index < 0 || frame_index >= static_cast<int>(manifest.frames.size()))
                throw ValidationError("--frame-index out of range");
            // Plan by running the sequence up to the requested frame so algo2
            // sees the previous reconstruction it would see in a full run.
            SceneManifest prefix = manifest;
            prefix.frames.resize(static_cast<std::size_t>(frame_index) + 1);
            RunConfig plan_config = config;
            plan_config.out_dir.clear();
            const RunResult result = run_sequence(prefix, config.mode, plan_config);
            const std::string text = plan_to_json(result.plans.back());
            if (plan_out.empty()) {
                std::cout << text;
            } else {
                std::ofstream os(plan_out);
                if (!os) throw IoError("cannot open " + plan_out);
                os << text;
            }
            return kExitOk;
        }

        config.out_dir = out_dir;
        const RunResult result = run_sequence(manifest, config.mode, config);
        double mean = 0.0;
        std::size_t n = 0;
        for (const auto& r : result.reports)
            if (std::isfinite(r.psnr_full_db)) {
                mean += r.psnr_full_db;
                ++n;
            }
        std::cout << "processed " << result.reports.size() << " frames, mean PSNR "
                  << (n ? mean / static_cast<double>(n) : 0.0) << " dB, outputs in " << out_dir
                  << "\n";
        if (result.any_hard_failure) {
            std::cerr << "warning: at least one block solve failed hard\n";
            return kExitSolverFailure;
        }
        return kExitOk;
    }

    if (eval_cmd->parsed()) {
        SceneManifest manifest = load_manifest(manifest_path);
        RunConfig config;
        const auto reports = evaluate_stored(manifest, eval_recon_dir, config);
        const std::string dir = out_dir == "out" ? eval_recon_dir : out_dir;
        fs::create_directories(dir);
        for (const auto& r : reports) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%04d", r.frame_index);
            std::ofstream os(fs::path(dir) / (std::string("eval_") + buf + ".json"));
            os << report_to_json(r);
        }
        std::cout << "evaluated " << reports.size() << " frames into " << dir << "\n";
        return kExitOk;
    }

    if (export_cmd->parsed()) {
        const PolarFrame frame = load_frame(export_in);
        ExportOptions options;
        options.cartesian = export_cart;
        if (export_full)
            options.display_range_m.reset();
        else
            options.display_range_m = export_range;
        export_png(frame, export_out, options);
        std::cout << "wrote " << export_out << "\n";
        return kExitOk;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}
