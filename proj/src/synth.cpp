#include "radarcs/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "radarcs/errors.hpp"
#include "radarcs/rng.hpp"

namespace radarcs {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double wrap360(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w < 0) w += 360.0;
    return w;
}

// signed distance to [-180, 180)
double wrap180(double deg) {
    double w = std::fmod(deg + 180.0, 360.0);
    if (w < 0) w += 360.0;
    return w - 180.0;
}

struct TargetState {
    double azimuth_deg;
    double range_m;
};

TargetState target_at(const SynthTarget& t, double frame_pos) {
    return {wrap360(t.azimuth_deg + t.d_azimuth_deg_per_frame * frame_pos),
            t.range_m + t.d_range_m_per_frame * frame_pos};
}

}  // namespace

SynthScene synth_scene(const SynthSceneConfig& cfg, const std::string& out_dir) {
    if (cfg.n_frames < 1) throw ParamError("synth_scene: n_frames must be >= 1");
    if (cfg.noise_floor <= 0) throw ParamError("synth_scene: noise_floor must be > 0");
    const int az_bins = cfg.az_blocks * cfg.block_az;
    const int rng_bins = cfg.rng_blocks * cfg.block_rng;
    const double az_res = 360.0 / az_bins;
    const double max_range = rng_bins * cfg.range_resolution_m;

    for (const auto& t : cfg.targets) {
        for (int f = 0; f < cfg.n_frames; ++f) {
            const auto s = target_at(t, f);
            if (s.range_m < 0.0 || s.range_m >= max_range)
                throw ParamError("synth_scene: target leaves the frame extent at frame " +
                                 std::to_string(f));
        }
    }

    SynthScene scene;
    scene.manifest.block_az = cfg.block_az;
    scene.manifest.block_rng = cfg.block_rng;
    scene.manifest.cameras = cfg.cameras;

    // Radar frames on the 4 Hz-style clock.
    for (int f = 0; f < cfg.n_frames; ++f) {
        const double t = cfg.start_time_s + f * cfg.radar_period_s;
        const auto ts = static_cast<std::int64_t>(std::llround(t * 1e6));
        PolarFrame frame = PolarFrame::zeros(az_bins, rng_bins, cfg.range_resolution_m, ts);

        Rng rng(mix_seed(cfg.seed, 0x66726d65ULL, static_cast<std::uint64_t>(f)));
        for (double& v : frame.data) v = rng.exponential(cfg.noise_floor);

        std::vector<std::pair<int, int>> bins;
        for (const auto& t0 : cfg.targets) {
            const auto s = target_at(t0, f);
            const double az_bin = s.azimuth_deg / az_res;
            const double rng_bin = s.range_m / cfg.range_resolution_m;
            bins.emplace_back(static_cast<int>(az_bin) % az_bins,
                              std::min(static_cast<int>(rng_bin), rng_bins - 1));
            const double sigma = std::max(0.5, t0.extent_bins);
            const int reach = static_cast<int>(std::ceil(4.0 * sigma));
            for (int da = -reach; da <= reach; ++da) {
                const int a = ((static_cast<int>(std::floor(az_bin)) + da) % az_bins + az_bins) % az_bins;
                for (int dr = -reach; dr <= reach; ++dr) {
                    const int r = static_cast<int>(std::floor(rng_bin)) + dr;
                    if (r < 0 || r >= rng_bins) continue;
                    const double dan = (a + 0.5) - az_bin;
                    const double dam = dan - 360.0 / az_res * std::round(dan / (360.0 / az_res));
                    const double drm = (r + 0.5) - rng_bin;
                    frame.at(a, r) +=
                        t0.amplitude * std::exp(-0.5 * (dam * dam + drm * drm) / (sigma * sigma));
                }
            }
        }
        scene.frames.push_back(std::move(frame));
        scene.target_bins.push_back(std::move(bins));
        scene.manifest.frames.push_back(
            {"frame_" + std::to_string(f) + ".png", ts});
    }

    // Camera detections on each camera's own clock, covering the radar span
    // with enough lead history for association.
    const double t_end = cfg.start_time_s + (cfg.n_frames - 1) * cfg.radar_period_s;
    for (const auto& cam : cfg.cameras) {
        const double rate = cam.id == CameraId::front ? cfg.front_rate_hz : cfg.rear_rate_hz;
        if (rate <= 0) continue;
        for (int k = 0;; ++k) {
            const double t = k / rate;
            if (t > t_end + 1.0 / rate) break;
            DetectionSet set;
            set.timestamp_us = static_cast<std::int64_t>(std::llround(t * 1e6));
            set.camera = cam.id;
            set.image_width = cam.image_width_px;
            set.image_height = cam.image_height_px;
            const double frame_pos =
                std::clamp((t - cfg.start_time_s) / cfg.radar_period_s, 0.0,
                           static_cast<double>(cfg.n_frames - 1));
            for (const auto& t0 : cfg.targets) {
                const auto s = target_at(t0, frame_pos);
                const double off = wrap180(s.azimuth_deg - cam.boresight_deg);
                const double xc = cam.image_width_px * (off / cam.hfov_deg + 0.5);
                BoundingBox box;
                box.x1 = xc - cfg.box_width_px / 2;
                box.x2 = xc + cfg.box_width_px / 2;
                if (std::abs(off) > cam.hfov_deg / 2 || box.x1 < 0 ||
                    box.x2 > cam.image_width_px)
                    continue;  // outside the field of view
                box.y1 = (cam.image_height_px - cfg.box_height_px) / 2;
                box.y2 = box.y1 + cfg.box_height_px;
                box.class_label = t0.class_label;
                box.score = cfg.detection_score;
                set.boxes.push_back(std::move(box));
            }
            scene.detections.push_back(std::move(set));
        }
    }
    scene.manifest.detections_path = "detections.jsonl";

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        scene.manifest.base_dir = out_dir;
        for (std::size_t f = 0; f < scene.frames.size(); ++f)
            save_frame(scene.frames[f], scene.manifest.resolve(scene.manifest.frames[f].path));
        save_detections(scene.detections, scene.manifest.resolve("detections.jsonl"));
        save_manifest(scene.manifest, (fs::path(out_dir) / "manifest.json").string());

        json truth;
        auto frames = json::array();
        for (std::size_t f = 0; f < scene.frames.size(); ++f) {
            auto targets = json::array();
            for (std::size_t t = 0; t < cfg.targets.size(); ++t) {
                const auto s = target_at(cfg.targets[t], static_cast<double>(f));
                targets.push_back({{"azimuth_deg", s.azimuth_deg},
                                   {"range_m", s.range_m},
                                   {"azimuth_bin", scene.target_bins[f][t].first},
                                   {"range_bin", scene.target_bins[f][t].second},
                                   {"class", cfg.targets[t].class_label}});
            }
            frames.push_back({{"timestamp_us", scene.manifest.frames[f].timestamp_us},
                              {"targets", std::move(targets)}});
        }
        truth["frames"] = std::move(frames);
        std::ofstream os((fs::path(out_dir) / "truth.json").string());
        if (!os) throw IoError("cannot write truth.json");
        os << truth.dump(2) << "\n";
    }
    return scene;
}

}  // namespace radarcs
