#include "radarcs/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "radarcs/dct.hpp"
#include "radarcs/errors.hpp"
#include "radarcs/parallel.hpp"
#include "radarcs/rng.hpp"
#include "radarcs/sensing.hpp"

namespace radarcs {

namespace fs = std::filesystem;
using nlohmann::json;

void TimingConfig::validate() const {
    if (radar_period_s <= 0 || detection_latency_s <= 0 || lead_s <= 0 || front_rate_hz <= 0 ||
        rear_rate_hz <= 0)
        throw ParamError("timing: all values must be positive");
    if (lead_s < detection_latency_s)
        throw ParamError("timing: lead must cover the detection latency");
}

const char* mode_name(Mode m) {
    switch (m) {
        case Mode::baseline: return "baseline";
        case Mode::algo1: return "algo1";
        case Mode::algo2: return "algo2";
    }
    return "?";
}

Mode mode_from_name(const std::string& name) {
    if (name == "baseline") return Mode::baseline;
    if (name == "algo1") return Mode::algo1;
    if (name == "algo2") return Mode::algo2;
    throw ValidationError("unknown mode: " + name);
}

std::map<CameraId, std::optional<std::int64_t>> associate(
    const std::map<CameraId, std::vector<std::int64_t>>& camera_timestamps,
    std::int64_t radar_timestamp_us, const TimingConfig& timing) {
    const auto cutoff =
        radar_timestamp_us - static_cast<std::int64_t>(std::llround(timing.lead_s * 1e6));
    std::map<CameraId, std::optional<std::int64_t>> out;
    for (const auto& [cam, stamps] : camera_timestamps) {
        std::optional<std::int64_t> best;
        for (auto t : stamps) {
            if (t <= cutoff && (!best || t > *best)) best = t;
        }
        out[cam] = best;
    }
    return out;
}

double psnr_span(std::span<const double> reference, std::span<const double> reconstruction,
                 double peak) {
    if (reference.size() != reconstruction.size())
        throw DimensionError("psnr: length mismatch");
    if (!(peak > 0.0)) throw ParamError("psnr: peak must be positive");
    double mse = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const double d = reference[i] - reconstruction[i];
        mse += d * d;
    }
    mse /= static_cast<double>(reference.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

double psnr(const PolarFrame& reference, const PolarFrame& reconstruction,
            std::optional<double> peak) {
    if (reference.azimuth_bins != reconstruction.azimuth_bins ||
        reference.range_bins != reconstruction.range_bins)
        throw DimensionError("psnr: frame dims mismatch");
    double p = peak.value_or(0.0);
    if (!peak) {
        for (double v : reference.data) p = std::max(p, v);
    }
    return psnr_span(reference.data, reconstruction.data, p);
}

namespace {

std::vector<std::uint8_t> dilate_wrap(const CfarMap& map, int radius) {
    std::vector<std::uint8_t> out(map.mask.size(), 0);
    const int A = map.azimuth_bins, R = map.range_bins;
    for (int a = 0; a < A; ++a) {
        for (int r = 0; r < R; ++r) {
            if (!map.at(a, r)) continue;
            for (int da = -radius; da <= radius; ++da) {
                const int aa = ((a + da) % A + A) % A;
                const int rlo = std::max(0, r - radius), rhi = std::min(R - 1, r + radius);
                for (int rr = rlo; rr <= rhi; ++rr)
                    out[static_cast<std::size_t>(aa) * R + rr] = 1;
            }
        }
    }
    return out;
}

std::pair<std::size_t, std::size_t> matched_hits(const CfarMap& hits,
                                                 const std::vector<std::uint8_t>& region) {
    std::size_t total = 0, matched = 0;
    for (std::size_t i = 0; i < hits.mask.size(); ++i) {
        if (!hits.mask[i]) continue;
        ++total;
        if (region[i]) ++matched;
    }
    return {matched, total};
}

}  // namespace

DetectabilityScore cfar_detectability(const PolarFrame& truth, const PolarFrame& recon,
                                      const CfarParams& params, int match_radius_bins) {
    const CfarMap truth_map = cfar_detect(truth, params);
    const CfarMap recon_map = cfar_detect(recon, params);
    DetectabilityScore score;
    score.truth_hits = truth_map.total_hits();
    score.recon_hits = recon_map.total_hits();
    const auto truth_region = dilate_wrap(truth_map, match_radius_bins);
    const auto recon_region = dilate_wrap(recon_map, match_radius_bins);
    if (score.recon_hits > 0) {
        auto [m, t] = matched_hits(recon_map, truth_region);
        score.precision = static_cast<double>(m) / static_cast<double>(t);
    }
    if (score.truth_hits > 0) {
        auto [m, t] = matched_hits(truth_map, recon_region);
        score.recall = static_cast<double>(m) / static_cast<double>(t);
    }
    return score;
}

PolarFrame reconstruct_frame(const PolarFrame& truth, const SamplingPlan& plan,
                             const RunConfig& config, std::uint64_t frame_seed, int* converged,
                             int* not_converged, bool* hard_failure) {
    const BlockGrid& grid = plan.grid;
    PolarFrame recon = PolarFrame::zeros(truth.azimuth_bins, truth.range_bins,
                                         truth.range_resolution_m, truth.timestamp_us);
    recon.azimuth_resolution_deg = truth.azimuth_resolution_deg;

    const DctOperator dct(grid.block_az, grid.block_rng);
    std::vector<int> conv(static_cast<std::size_t>(grid.total_blocks()), 0);
    std::vector<std::uint8_t> bad(static_cast<std::size_t>(grid.total_blocks()), 0);

    parallel_for(static_cast<std::size_t>(grid.total_blocks()), config.threads, [&](std::size_t i) {
        const BlockRef ref{static_cast<int>(i) / grid.rng_blocks,
                           static_cast<int>(i) % grid.rng_blocks};
        const int m = plan.count(ref);
        if (m <= 0) {
            conv[i] = 1;
            return;
        }
        const auto block = extract_block(truth, grid, ref);
        const auto d = std::min<std::int64_t>(config.column_weight, m);
        const std::uint64_t mseed = mix_seed(frame_seed, 0x626c6f63ULL,
                                             static_cast<std::uint64_t>(ref.az_idx),
                                             static_cast<std::uint64_t>(ref.rng_idx));
        const auto matrix = gen_measurement_matrix(m, grid.block_size(), d, mseed);
        const auto y = sample_block(block, matrix, config.noise_sigma,
                                    mix_seed(mseed, 0x6e7aULL), ref);
        const Recovery rec = basis_pursuit(matrix, dct, y, config.solver);
        auto estimate = dct.inverse(rec.coefficients);
        bool finite = true;
        for (double& v : estimate) {
            if (!std::isfinite(v)) {
                finite = false;
                break;
            }
            v = std::max(0.0, v);  // power frames are nonnegative
        }
        if (!finite) {
            std::fill(estimate.begin(), estimate.end(), 0.0);
            bad[i] = 1;
        }
        conv[i] = rec.converged ? 1 : 0;
        insert_block(recon, grid, ref, estimate);
    });

    int nc = 0, nn = 0;
    bool hf = false;
    for (std::size_t i = 0; i < conv.size(); ++i) {
        conv[i] ? ++nc : ++nn;
        hf = hf || bad[i];
    }
    if (converged) *converged = nc;
    if (not_converged) *not_converged = nn;
    if (hard_failure) *hard_failure = hf;
    return recon;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string frame_tag(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d", index);
    return buf;
}

void score_frame(const PolarFrame& truth, const PolarFrame& recon, const SamplingPlan& plan,
                 const RunConfig& config, FrameReport& report) {
    double peak = 0.0;
    for (double v : truth.data) peak = std::max(peak, v);
    if (peak <= 0.0) peak = 1.0;

    report.psnr_full_db = psnr_span(truth.data, recon.data, peak);

    const BlockGrid& grid = plan.grid;
    report.block_mse.assign(static_cast<std::size_t>(grid.total_blocks()), 0.0);
    std::map<std::string, std::pair<double, std::size_t>> region_acc;  // sse, cells
    for (int a = 0; a < grid.az_blocks; ++a) {
        for (int r = 0; r < grid.rng_blocks; ++r) {
            const BlockRef ref{a, r};
            const auto tb = extract_block(truth, grid, ref);
            const auto rb = extract_block(recon, grid, ref);
            double sse = 0.0;
            for (std::size_t i = 0; i < tb.size(); ++i) {
                const double d = tb[i] - rb[i];
                sse += d * d;
            }
            report.block_mse[plan.index(ref)] = sse / static_cast<double>(tb.size());
            auto& acc = region_acc[region_name(plan.region(ref))];
            acc.first += sse;
            acc.second += tb.size();
            if (plan.is_boosted(ref)) {
                auto& bacc = region_acc["boosted"];
                bacc.first += sse;
                bacc.second += tb.size();
            }
        }
    }
    for (const auto& [name, acc] : region_acc) {
        const double mse = acc.first / static_cast<double>(acc.second);
        report.psnr_region_db[name] = mse == 0.0 ? std::numeric_limits<double>::infinity()
                                                 : 10.0 * std::log10(peak * peak / mse);
    }
    report.detectability = cfar_detectability(truth, recon, config.cfar);
}

json score_to_json(const DetectabilityScore& s) {
    return {{"precision", s.precision},
            {"recall", s.recall},
            {"truth_hits", s.truth_hits},
            {"recon_hits", s.recon_hits}};
}

json finite_or_null(double v) {
    if (std::isinf(v)) return nullptr;  // +inf sentinel: identical frames
    return v;
}

}  // namespace

std::string report_to_json(const FrameReport& report) {
    json j;
    j["frame_index"] = report.frame_index;
    j["timestamp_us"] = report.timestamp_us;
    j["mode"] = report.mode;
    j["chosen_azimuth_count"] = report.chosen_azimuth_count;
    j["chosen_azimuths"] = report.chosen_azimuths;
    j["boosted_blocks"] = report.boosted_blocks;
    j["total_measurements"] = report.total_measurements;
    j["budget_measurements"] = report.budget_measurements;
    j["psnr_full_db"] = finite_or_null(report.psnr_full_db);
    json regions;
    for (const auto& [name, v] : report.psnr_region_db) regions[name] = finite_or_null(v);
    j["psnr_region_db"] = std::move(regions);
    j["block_mse"] = report.block_mse;
    j["detectability"] = score_to_json(report.detectability);
    j["solver"] = {{"converged", report.solver_converged},
                   {"not_converged", report.solver_not_converged},
                   {"hard_failure", report.hard_failure}};
    j["timing_s"] = {{"plan", report.plan_seconds},
                     {"sample_and_solve", report.solve_seconds},
                     {"score", report.score_seconds}};
    return j.dump(2) + "\n";
}

RunResult run_sequence(const SceneManifest& manifest, Mode mode, const RunConfig& config) {
    manifest.validate();
    config.timing.validate();
    config.cfar.validate();

    auto detections = load_detections(manifest.resolve(manifest.detections_path));
    std::map<CameraId, std::vector<std::int64_t>> camera_clock;
    for (const auto& set : detections) camera_clock[set.camera].push_back(set.timestamp_us);
    for (auto& [id, stamps] : camera_clock) std::sort(stamps.begin(), stamps.end());

    RunResult result;
    const bool write_out = !config.out_dir.empty();
    if (write_out) fs::create_directories(config.out_dir);

    std::optional<BlockGrid> grid;
    std::optional<PolarFrame> previous_recon;

    for (std::size_t fi = 0; fi < manifest.frames.size(); ++fi) {
        const auto& entry = manifest.frames[fi];
        const std::string path = manifest.resolve(entry.path);
        if (!fs::exists(path)) throw IoError("missing radar frame file: " + path);
        const PolarFrame truth = load_frame(path);
        if (!grid) {
            grid = partition(truth.azimuth_bins, truth.range_bins, manifest.block_az,
                             manifest.block_rng);
        }

        FrameReport report;
        report.frame_index = static_cast<int>(fi);
        report.timestamp_us = entry.timestamp_us;
        report.mode = mode_name(mode);

        auto t0 = std::chrono::steady_clock::now();
        SamplingPlan plan;
        if (mode == Mode::baseline) {
            plan = uniform_plan(*grid, config.budget_fraction);
        } else {
            const auto selected = associate(camera_clock, entry.timestamp_us, config.timing);
            std::vector<DetectionSet> picked;
            for (const auto& set : detections) {
                auto it = selected.find(set.camera);
                if (it != selected.end() && it->second && *it->second == set.timestamp_us)
                    picked.push_back(set);
            }
            auto chosen = important_azimuth_blocks(picked, manifest.cameras, *grid,
                                                   default_class_filter(), config.score_min);
            chosen = top_up_azimuths(chosen, grid->az_blocks,
                                     std::min(config.min_chosen_azimuths, grid->az_blocks),
                                     mix_seed(config.seed, 0x746f70ULL, fi));

            const bool paper_grid = grid->az_blocks == 8 && grid->rng_blocks == 37;
            const bool use_algo2 = mode == Mode::algo2 && fi > 0;
            RateTable table = use_algo2
                                  ? (paper_grid ? RateTable::algo2_default()
                                                : RateTable::algo2_for_grid(*grid))
                                  : (paper_grid ? RateTable::algo1_default()
                                                : RateTable::algo1_for_grid(*grid));
            if (config.exact_budget) table.exact_budget = true;

            if (use_algo2) {
                const auto cfar_map = cfar_detect(*previous_recon, config.cfar);
                const auto flagged =
                    flagged_blocks_ranked(cfar_map, *grid, config.cfar.min_hits_per_block);
                plan = allocate_algo2(chosen, flagged, *grid, table, config.budget_fraction);
            } else {
                plan = allocate_algo1(chosen, *grid, table, config.budget_fraction);
            }
        }
        report.plan_seconds = seconds_since(t0);
        report.chosen_azimuths.assign(plan.chosen_azimuths.begin(), plan.chosen_azimuths.end());
        report.chosen_azimuth_count = static_cast<int>(plan.chosen_azimuths.size());
        for (auto b : plan.boosted) report.boosted_blocks += b;
        report.total_measurements = plan_total(plan);
        report.budget_measurements = static_cast<std::int64_t>(
            std::ceil(config.budget_fraction * static_cast<double>(grid->frame_size())));

        t0 = std::chrono::steady_clock::now();
        PolarFrame recon =
            reconstruct_frame(truth, plan, config, mix_seed(config.seed, 0x66726dULL, fi),
                              &report.solver_converged, &report.solver_not_converged,
                              &report.hard_failure);
        report.solve_seconds = seconds_since(t0);
        result.any_hard_failure = result.any_hard_failure || report.hard_failure;

        t0 = std::chrono::steady_clock::now();
        score_frame(truth, recon, plan, config, report);
        report.score_seconds = seconds_since(t0);

        if (write_out) {
            const std::string tag = frame_tag(static_cast<int>(fi));
            std::ofstream plan_os(fs::path(config.out_dir) / ("plan_" + tag + ".json"));
            plan_os << plan_to_json(plan);
            save_frame(recon, (fs::path(config.out_dir) / ("recon_" + tag + ".png")).string());
            std::ofstream report_os(fs::path(config.out_dir) / ("report_" + tag + ".json"));
            report_os << report_to_json(report);
        }

        previous_recon = recon;
        result.plans.push_back(std::move(plan));
        result.reports.push_back(std::move(report));
        result.reconstructions.push_back(std::move(recon));
    }

    if (write_out) {
        json summary;
        summary["mode"] = mode_name(mode);
        summary["seed"] = config.seed;
        summary["budget_fraction"] = config.budget_fraction;
        summary["frames"] = result.reports.size();
        double mean_psnr = 0.0;
        std::size_t finite = 0;
        for (const auto& r : result.reports) {
            if (std::isfinite(r.psnr_full_db)) {
                mean_psnr += r.psnr_full_db;
                ++finite;
            }
        }
        summary["mean_psnr_full_db"] =
            finite ? json(mean_psnr / static_cast<double>(finite)) : json(nullptr);
        summary["any_hard_failure"] = result.any_hard_failure;
        std::ofstream os(fs::path(config.out_dir) / "summary.json");
        os << summary.dump(2) << "\n";
    }
    return result;
}

std::vector<FrameReport> evaluate_stored(const SceneManifest& manifest,
                                         const std::string& recon_dir, const RunConfig& config) {
    manifest.validate();
    std::vector<FrameReport> reports;
    std::optional<BlockGrid> grid;
    for (std::size_t fi = 0; fi < manifest.frames.size(); ++fi) {
        const std::string tag = frame_tag(static_cast<int>(fi));
        const std::string recon_path = (fs::path(recon_dir) / ("recon_" + tag + ".png")).string();
        const std::string plan_path = (fs::path(recon_dir) / ("plan_" + tag + ".json")).string();
        if (!fs::exists(recon_path)) throw IoError("missing reconstruction: " + recon_path);
        const PolarFrame truth = load_frame(manifest.resolve(manifest.frames[fi].path));
        const PolarFrame recon = load_frame(recon_path);
        if (!grid)
            grid = partition(truth.azimuth_bins, truth.range_bins, manifest.block_az,
                             manifest.block_rng);
        std::ifstream plan_is(plan_path);
        if (!plan_is) throw IoError("missing plan: " + plan_path);
        std::string text((std::istreambuf_iterator<char>(plan_is)),
                         std::istreambuf_iterator<char>());
        const SamplingPlan plan = plan_from_json(text);

        FrameReport report;
        report.frame_index = static_cast<int>(fi);
        report.timestamp_us = manifest.frames[fi].timestamp_us;
        report.mode = "eval";
        report.chosen_azimuths.assign(plan.chosen_azimuths.begin(), plan.chosen_azimuths.end());
        report.chosen_azimuth_count = static_cast<int>(plan.chosen_azimuths.size());
        for (auto b : plan.boosted) report.boosted_blocks += b;
        report.total_measurements = plan_total(plan);
        report.budget_measurements = static_cast<std::int64_t>(
            std::ceil(plan.total_budget_fraction * static_cast<double>(grid->frame_size())));
        score_frame(truth, recon, plan, config, report);
        reports.push_back(std::move(report));
    }
    return reports;
}

}  // namespace radarcs
