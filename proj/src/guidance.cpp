#include "radarcs/guidance.hpp"

#include <algorithm>
#include <cmath>

#include "radarcs/errors.hpp"

namespace radarcs {

const char* camera_name(CameraId id) { return id == CameraId::front ? "front" : "rear"; }

CameraId camera_from_name(const std::string& name) {
    if (name == "front") return CameraId::front;
    if (name == "rear") return CameraId::rear;
    throw ValidationError("unknown camera id: " + name);
}

CameraModel CameraModel::front_default() { return CameraModel{CameraId::front, 66.0, 0.0, 1280, 960}; }

CameraModel CameraModel::rear_default() { return CameraModel{CameraId::rear, 180.0, 180.0, 1024, 768}; }

namespace {
double wrap360(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w < 0) w += 360.0;
    return w;
}
}  // namespace

double bbox_to_azimuth(const CameraModel& cam, const BoundingBox& box) {
    if (cam.hfov_deg <= 0.0 || cam.hfov_deg > 360.0)
        throw ValidationError("bbox_to_azimuth: hfov out of (0,360]");
    if (cam.image_width_px <= 0 || cam.image_height_px <= 0)
        throw ValidationError("bbox_to_azimuth: image dims must be positive");
    if (!(box.x1 < box.x2) || !(box.y1 < box.y2))
        throw ValidationError("bbox_to_azimuth: degenerate box");
    if (box.x1 < 0 || box.y1 < 0 || box.x2 > cam.image_width_px || box.y2 > cam.image_height_px)
        throw ValidationError("bbox_to_azimuth: box outside image bounds");
    const double x_center = 0.5 * (box.x1 + box.x2);
    const double az =
        cam.boresight_deg + cam.hfov_deg * (x_center / cam.image_width_px - 0.5);
    return wrap360(az);
}

std::set<int> important_azimuth_blocks(const std::vector<DetectionSet>& detections,
                                       const std::vector<CameraModel>& cams,
                                       const BlockGrid& grid,
                                       const std::set<std::string>& class_filter,
                                       double score_min) {
    const double block_deg = 360.0 / grid.az_blocks;
    std::set<int> chosen;
    for (const auto& set : detections) {
        const CameraModel* model = nullptr;
        for (const auto& cam : cams)
            if (cam.id == set.camera) model = &cam;
        if (!model) continue;
        CameraModel cam = *model;
        if (set.image_width > 0) cam.image_width_px = set.image_width;
        if (set.image_height > 0) cam.image_height_px = set.image_height;
        for (const auto& box : set.boxes) {
            if (box.score < score_min) continue;
            if (!class_filter.empty() && !class_filter.contains(box.class_label)) continue;
            const double az = bbox_to_azimuth(cam, box);
            int idx = static_cast<int>(az / block_deg);
            if (idx >= grid.az_blocks) idx = grid.az_blocks - 1;  // az == 360-epsilon rounding
            chosen.insert(idx);
        }
    }
    return chosen;
}

void CfarParams::validate() const {
    if (train_cells < 1) throw ParamError("cfar: train_cells must be >= 1");
    if (guard_cells < 0) throw ParamError("cfar: guard_cells must be >= 0");
    if (!(pfa > 0.0 && pfa < 1.0)) throw ParamError("cfar: pfa must be in (0,1)");
    if (min_hits_per_block < 0) throw ParamError("cfar: min_hits_per_block must be >= 0");
}

std::size_t CfarMap::total_hits() const {
    std::size_t n = 0;
    for (auto v : mask) n += v;
    return n;
}

std::vector<int> CfarMap::hit_counts(const BlockGrid& grid) const {
    if (grid.az_blocks * grid.block_az != azimuth_bins ||
        grid.rng_blocks * grid.block_rng != range_bins)
        throw DimensionError("CfarMap::hit_counts: grid does not tile the map");
    std::vector<int> counts(static_cast<std::size_t>(grid.total_blocks()), 0);
    for (int a = 0; a < azimuth_bins; ++a) {
        const int ab = a / grid.block_az;
        for (int r = 0; r < range_bins; ++r) {
            if (at(a, r)) ++counts[static_cast<std::size_t>(ab) * grid.rng_blocks + r / grid.block_rng];
        }
    }
    return counts;
}

CfarMap cfar_detect(const PolarFrame& frame, const CfarParams& params) {
    params.validate();
    const int window = 2 * (params.train_cells + params.guard_cells) + 1;
    if (window > frame.range_bins)
        throw ParamError("cfar: window " + std::to_string(window) + " exceeds range_bins " +
                         std::to_string(frame.range_bins));

    CfarMap map;
    map.azimuth_bins = frame.azimuth_bins;
    map.range_bins = frame.range_bins;
    map.mask.assign(frame.data.size(), 0);

    const int T = params.train_cells;
    const int G = params.guard_cells;
    std::vector<double> prefix(static_cast<std::size_t>(frame.range_bins) + 1);

    for (int a = 0; a < frame.azimuth_bins; ++a) {
        const double* row = &frame.data[static_cast<std::size_t>(a) * frame.range_bins];
        prefix[0] = 0.0;
        for (int r = 0; r < frame.range_bins; ++r) prefix[r + 1] = prefix[r] + row[r];
        auto window_sum = [&](int lo, int hi) {  // [lo, hi] clipped
            lo = std::max(lo, 0);
            hi = std::min(hi, frame.range_bins - 1);
            if (lo > hi) return std::pair<double, int>{0.0, 0};
            return std::pair<double, int>{prefix[hi + 1] - prefix[lo], hi - lo + 1};
        };
        for (int r = 0; r < frame.range_bins; ++r) {
            auto [lead_sum, lead_n] = window_sum(r - G - T, r - G - 1);
            auto [lag_sum, lag_n] = window_sum(r + G + 1, r + G + T);
            const int n_train = lead_n + lag_n;
            if (n_train == 0) continue;
            const double z = (lead_sum + lag_sum) / n_train;
            const double alpha = n_train * (std::pow(params.pfa, -1.0 / n_train) - 1.0);
            if (row[r] > alpha * z)
                map.mask[static_cast<std::size_t>(a) * frame.range_bins + r] = 1;
        }
    }
    return map;
}

std::set<BlockRef> flagged_blocks(const CfarMap& map, const BlockGrid& grid,
                                  int min_hits_per_block) {
    std::set<BlockRef> out;
    for (const auto& fb : flagged_blocks_ranked(map, grid, min_hits_per_block)) out.insert(fb.ref);
    return out;
}

std::vector<FlaggedBlock> flagged_blocks_ranked(const CfarMap& map, const BlockGrid& grid,
                                                int min_hits_per_block) {
    const auto counts = map.hit_counts(grid);
    std::vector<FlaggedBlock> out;
    for (int a = 0; a < grid.az_blocks; ++a) {
        for (int r = 0; r < grid.rng_blocks; ++r) {
            const int c = counts[static_cast<std::size_t>(a) * grid.rng_blocks + r];
            if (c >= min_hits_per_block && c > 0) out.push_back({BlockRef{a, r}, c});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const FlaggedBlock& x, const FlaggedBlock& y) {
        if (x.hit_count != y.hit_count) return x.hit_count > y.hit_count;
        return x.ref < y.ref;
    });
    return out;
}

}  // namespace radarcs
