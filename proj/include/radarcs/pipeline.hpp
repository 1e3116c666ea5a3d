#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "radarcs/allocator.hpp"
#include "radarcs/frame.hpp"
#include "radarcs/frame_io.hpp"
#include "radarcs/guidance.hpp"
#include "radarcs/solver.hpp"

namespace radarcs {

struct TimingConfig {
    double radar_period_s = 0.25;
    double detection_latency_s = 0.12;
    double lead_s = 0.18;
    double front_rate_hz = 16.0;
    double rear_rate_hz = 17.0;

    void validate() const;  // lead >= latency, everything positive
};

enum class Mode { baseline, algo1, algo2 };

const char* mode_name(Mode m);
Mode mode_from_name(const std::string& name);

/// Latest camera timestamp at or before radar_timestamp - lead, per camera.
/// Cameras with no frame that early contribute nothing.
std::map<CameraId, std::optional<std::int64_t>> associate(
    const std::map<CameraId, std::vector<std::int64_t>>& camera_timestamps,
    std::int64_t radar_timestamp_us, const TimingConfig& timing);

/// 10*log10(peak^2 / MSE); +infinity when the frames are identical.
double psnr(const PolarFrame& reference, const PolarFrame& reconstruction,
            std::optional<double> peak = std::nullopt);

double psnr_span(std::span<const double> reference, std::span<const double> reconstruction,
                 double peak);

struct DetectabilityScore {
    double precision = 1.0;
    double recall = 1.0;
    std::size_t truth_hits = 0;
    std::size_t recon_hits = 0;
};

/// CFAR-on-reconstruction vs CFAR-on-truth, matched within a Chebyshev
/// radius (azimuth wraps).
DetectabilityScore cfar_detectability(const PolarFrame& truth, const PolarFrame& recon,
                                      const CfarParams& params, int match_radius_bins = 3);

struct RunConfig {
    Mode mode = Mode::baseline;
    double budget_fraction = 0.10;
    std::uint64_t seed = 0;
    std::string out_dir;  // empty: keep results in memory only
    int threads = 0;      // 0: hardware concurrency
    int column_weight = 4;
    double noise_sigma = 0.0;
    int min_chosen_azimuths = 4;
    double score_min = 0.5;
    bool exact_budget = false;
    SolverConfig solver;
    CfarParams cfar;
    TimingConfig timing;
};

struct FrameReport {
    int frame_index = 0;
    std::int64_t timestamp_us = 0;
    std::string mode;
    int chosen_azimuth_count = 0;
    std::vector<int> chosen_azimuths;
    int boosted_blocks = 0;
    std::int64_t total_measurements = 0;
    std::int64_t budget_measurements = 0;
    double psnr_full_db = 0.0;
    std::map<std::string, double> psnr_region_db;  // R1/R2/R3 and "boosted" when present
    std::vector<double> block_mse;                 // az-major
    DetectabilityScore detectability;
    int solver_converged = 0;
    int solver_not_converged = 0;
    bool hard_failure = false;
    double plan_seconds = 0.0;
    double solve_seconds = 0.0;  // sampling + reconstruction
    double score_seconds = 0.0;
};

std::string report_to_json(const FrameReport& report);

struct RunResult {
    std::vector<FrameReport> reports;
    std::vector<SamplingPlan> plans;
    std::vector<PolarFrame> reconstructions;
    bool any_hard_failure = false;
};

/// Full acquisition simulation: per frame, associate camera data, build the
/// plan for the requested mode (algo2 uses CFAR on the previous
/// reconstruction; its first frame falls back to algo1), sample every block
/// of the ground-truth frame, reconstruct by basis pursuit and score against
/// the ground truth. Deterministic given manifest + seed.
RunResult run_sequence(const SceneManifest& manifest, Mode mode, const RunConfig& config);

/// Samples and reconstructs one frame under an explicit plan.
PolarFrame reconstruct_frame(const PolarFrame& truth, const SamplingPlan& plan,
                             const RunConfig& config, std::uint64_t frame_seed,
                             int* converged = nullptr, int* not_converged = nullptr,
                             bool* hard_failure = nullptr);

/// Recompute reports from reconstructions already on disk.
std::vector<FrameReport> evaluate_stored(const SceneManifest& manifest,
                                         const std::string& recon_dir, const RunConfig& config);

}  // namespace radarcs
