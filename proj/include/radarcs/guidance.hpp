#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "radarcs/frame.hpp"

namespace radarcs {

enum class CameraId { front, rear };

const char* camera_name(CameraId id);
CameraId camera_from_name(const std::string& name);

struct CameraModel {
    CameraId id = CameraId::front;
    double hfov_deg = 66.0;
    double boresight_deg = 0.0;  // radar azimuth of the image centre
    int image_width_px = 1280;
    int image_height_px = 960;

    static CameraModel front_default();
    static CameraModel rear_default();
};

struct BoundingBox {
    double x1 = 0, y1 = 0, x2 = 0, y2 = 0;  // pixels
    std::string class_label;
    double score = 0.0;
};

struct DetectionSet {
    std::int64_t timestamp_us = 0;
    CameraId camera = CameraId::front;
    int image_width = 0;
    int image_height = 0;
    std::vector<BoundingBox> boxes;
};

/// Proportional x-centre mapping: boresight + hfov*(x_center/width - 1/2),
/// wrapped to [0,360). Throws ValidationError for a box outside the image.
double bbox_to_azimuth(const CameraModel& cam, const BoundingBox& box);

inline const std::set<std::string>& default_class_filter() {
    static const std::set<std::string> f{"person", "bicycle", "car", "truck"};
    return f;
}

/// Azimuth-block indices hit by retained detections (class filter + score cut).
std::set<int> important_azimuth_blocks(const std::vector<DetectionSet>& detections,
                                       const std::vector<CameraModel>& cams,
                                       const BlockGrid& grid,
                                       const std::set<std::string>& class_filter =
                                           default_class_filter(),
                                       double score_min = 0.5);

struct CfarParams {
    int train_cells = 12;  // per side, range axis
    int guard_cells = 4;   // per side
    double pfa = 1e-4;
    int min_hits_per_block = 3;

    void validate() const;
};

struct CfarMap {
    int azimuth_bins = 0;
    int range_bins = 0;
    std::vector<std::uint8_t> mask;  // azimuth-major, 1 = detection

    bool at(int azimuth_bin, int range_bin) const {
        return mask[static_cast<std::size_t>(azimuth_bin) * range_bins + range_bin] != 0;
    }
    std::size_t total_hits() const;
    /// Per-block hit counts, indexed az_idx*rng_blocks + rng_idx.
    std::vector<int> hit_counts(const BlockGrid& grid) const;
};

/// Cell-averaging CFAR along the range axis of every azimuth row. The noise
/// level is the mean of the training cells outside the guard band; the
/// threshold factor alpha = N*(pfa^(-1/N)-1) uses the cell count N actually
/// available, so edge cells fall back to their one-sided window.
CfarMap cfar_detect(const PolarFrame& frame, const CfarParams& params);

struct FlaggedBlock {
    BlockRef ref;
    int hit_count = 0;
};

std::set<BlockRef> flagged_blocks(const CfarMap& map, const BlockGrid& grid,
                                  int min_hits_per_block);

/// Same threshold, ordered by hit count descending then (az,rng) ascending —
/// the priority order the allocator boosts in.
std::vector<FlaggedBlock> flagged_blocks_ranked(const CfarMap& map, const BlockGrid& grid,
                                                int min_hits_per_block);

}  // namespace radarcs
