#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radarcs/frame.hpp"
#include "radarcs/frame_io.hpp"
#include "radarcs/guidance.hpp"

namespace radarcs {

struct SynthTarget {
    double azimuth_deg = 0.0;
    double range_m = 30.0;
    double amplitude = 100.0;
    double extent_bins = 2.0;           // gaussian sigma, in bins
    double d_range_m_per_frame = 0.0;   // radial motion between radar frames
    double d_azimuth_deg_per_frame = 0.0;
    std::string class_label = "car";
};

struct SynthSceneConfig {
    int az_blocks = 8;
    int rng_blocks = 8;
    int block_az = 20;
    int block_rng = 25;
    double range_resolution_m = 0.0438;
    double noise_floor = 1.0;  // mean of the exponential clutter floor
    int n_frames = 2;
    double start_time_s = 1.0;   // first radar acquisition
    double radar_period_s = 0.25;
    double front_rate_hz = 16.0;
    double rear_rate_hz = 17.0;
    std::uint64_t seed = 1;
    std::vector<SynthTarget> targets;
    std::vector<CameraModel> cameras = {CameraModel::front_default(),
                                        CameraModel::rear_default()};
    double detection_score = 0.9;
    double box_width_px = 36.0;
    double box_height_px = 80.0;
};

struct SynthScene {
    SceneManifest manifest;
    std::vector<PolarFrame> frames;
    std::vector<DetectionSet> detections;
    /// Target bin positions per radar frame, aligned with frames.
    std::vector<std::vector<std::pair<int, int>>> target_bins;  // (azimuth_bin, range_bin)
};

/// Generates exponential clutter plus gaussian-blob targets, emits camera
/// detections on each camera's own clock (pixel boxes back-projected through
/// the inverse azimuth mapping; nothing is emitted inside the blind spot),
/// and writes frames + detections + manifest + truth when out_dir is set.
SynthScene synth_scene(const SynthSceneConfig& cfg, const std::string& out_dir = "");

}  // namespace radarcs
