#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace radarcs {

/// One polar FMCW scan: azimuth_bins rows of range_bins power returns,
/// stored row-major (azimuth-major). Values are nonnegative reals.
struct PolarFrame {
    int azimuth_bins = 400;
    int range_bins = 3700;
    double range_resolution_m = 0.0438;
    double azimuth_resolution_deg = 0.9;
    std::int64_t timestamp_us = 0;
    std::vector<double> data;

    static PolarFrame zeros(int azimuth_bins, int range_bins,
                            double range_resolution_m = 0.0438,
                            std::int64_t timestamp_us = 0);

    double& at(int azimuth_bin, int range_bin) {
        return data[static_cast<std::size_t>(azimuth_bin) * range_bins + range_bin];
    }
    double at(int azimuth_bin, int range_bin) const {
        return data[static_cast<std::size_t>(azimuth_bin) * range_bins + range_bin];
    }
    std::size_t size() const { return data.size(); }

    /// Throws ConfigError if dims, data length, azimuth coverage or value
    /// nonnegativity are violated.
    void validate() const;
};

/// Exact partition of a frame into az_blocks x rng_blocks equal blocks.
struct BlockGrid {
    int az_blocks = 8;
    int rng_blocks = 37;
    int block_az = 50;
    int block_rng = 100;

    int block_size() const { return block_az * block_rng; }
    int total_blocks() const { return az_blocks * rng_blocks; }
    std::int64_t frame_size() const {
        return static_cast<std::int64_t>(az_blocks) * rng_blocks * block_size();
    }
};

struct BlockRef {
    int az_idx = 0;
    int rng_idx = 0;

    friend bool operator==(const BlockRef&, const BlockRef&) = default;
    friend auto operator<=>(const BlockRef&, const BlockRef&) = default;
};

enum class Region { R1, R2, R3 };

const char* region_name(Region r);

BlockGrid partition(int azimuth_bins, int range_bins, int block_az, int block_rng);

BlockRef block_of(const BlockGrid& grid, int azimuth_bin, int range_bin);

/// Azimuth-major vectorization of one block; insert_block is the exact inverse.
std::vector<double> extract_block(const PolarFrame& frame, const BlockGrid& grid,
                                  const BlockRef& ref);

void insert_block(PolarFrame& frame, const BlockGrid& grid, const BlockRef& ref,
                  std::span<const double> values);

double range_block_span_m(const BlockGrid& grid, double range_resolution_m, int n_blocks);

}  // namespace radarcs
