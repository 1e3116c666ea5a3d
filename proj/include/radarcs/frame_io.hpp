#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radarcs/frame.hpp"
#include "radarcs/guidance.hpp"

namespace radarcs {

/// Frames persist as 16-bit grayscale PNG (azimuth rows x range columns) with
/// a JSON sidecar `<path>.json` carrying dims, resolutions, timestamp and the
/// quantization scale: value = png_sample * scale.
void save_frame(const PolarFrame& frame, const std::string& png_path);
PolarFrame load_frame(const std::string& png_path);

std::string sidecar_path(const std::string& png_path);

/// Detections file: one JSON object per line,
/// {"timestamp_us":..,"camera":"front"|"rear","image_width":..,"image_height":..,
///  "boxes":[{"x1":..,"y1":..,"x2":..,"y2":..,"class":..,"score":..}]}
std::vector<DetectionSet> load_detections(const std::string& path);
void save_detections(const std::vector<DetectionSet>& sets, const std::string& path);

struct SceneManifest {
    struct FrameEntry {
        std::string path;  // PNG, relative to the manifest directory
        std::int64_t timestamp_us = 0;
    };
    std::vector<FrameEntry> frames;
    std::string detections_path;
    std::vector<CameraModel> cameras;
    int block_az = 50;
    int block_rng = 100;
    std::string base_dir;  // set on load; resolves relative paths

    std::string resolve(const std::string& rel) const;
    void validate() const;  // strictly increasing radar timestamps
};

SceneManifest load_manifest(const std::string& path);
void save_manifest(const SceneManifest& manifest, const std::string& path);

}  // namespace radarcs
