#include "radarcs/frame.hpp"

#include <cmath>
#include <string>

#include "radarcs/errors.hpp"

namespace radarcs {

PolarFrame PolarFrame::zeros(int azimuth_bins, int range_bins, double range_resolution_m,
                             std::int64_t timestamp_us) {
    PolarFrame f;
    f.azimuth_bins = azimuth_bins;
    f.range_bins = range_bins;
    f.range_resolution_m = range_resolution_m;
    f.azimuth_resolution_deg = 360.0 / azimuth_bins;
    f.timestamp_us = timestamp_us;
    f.data.assign(static_cast<std::size_t>(azimuth_bins) * range_bins, 0.0);
    return f;
}

void PolarFrame::validate() const {
    if (azimuth_bins <= 0 || range_bins <= 0)
        throw ConfigError("PolarFrame: bin counts must be positive");
    if (data.size() != static_cast<std::size_t>(azimuth_bins) * range_bins)
        throw ConfigError("PolarFrame: data length " + std::to_string(data.size()) +
                          " != azimuth_bins*range_bins");
    if (std::abs(azimuth_bins * azimuth_resolution_deg - 360.0) > 1e-6)
        throw ConfigError("PolarFrame: azimuth bins do not cover 360 degrees");
    for (double v : data) {
        if (!std::isfinite(v) || v < 0.0)
            throw ConfigError("PolarFrame: values must be finite and >= 0");
    }
}

const char* region_name(Region r) {
    switch (r) {
        case Region::R1: return "R1";
        case Region::R2: return "R2";
        case Region::R3: return "R3";
    }
    return "?";
}

BlockGrid partition(int azimuth_bins, int range_bins, int block_az, int block_rng) {
    if (block_az <= 0 || block_rng <= 0)
        throw ConfigError("partition: block dims must be positive");
    if (azimuth_bins % block_az != 0)
        throw ConfigError("partition: block_az=" + std::to_string(block_az) +
                          " does not divide azimuth_bins=" + std::to_string(azimuth_bins));
    if (range_bins % block_rng != 0)
        throw ConfigError("partition: block_rng=" + std::to_string(block_rng) +
                          " does not divide range_bins=" + std::to_string(range_bins));
    return BlockGrid{azimuth_bins / block_az, range_bins / block_rng, block_az, block_rng};
}

BlockRef block_of(const BlockGrid& grid, int azimuth_bin, int range_bin) {
    if (azimuth_bin < 0 || azimuth_bin >= grid.az_blocks * grid.block_az)
        throw IndexError("block_of: azimuth bin " + std::to_string(azimuth_bin) + " out of range");
    if (range_bin < 0 || range_bin >= grid.rng_blocks * grid.block_rng)
        throw IndexError("block_of: range bin " + std::to_string(range_bin) + " out of range");
    return BlockRef{azimuth_bin / grid.block_az, range_bin / grid.block_rng};
}

namespace {
void check_ref(const BlockGrid& grid, const BlockRef& ref) {
    if (ref.az_idx < 0 || ref.az_idx >= grid.az_blocks || ref.rng_idx < 0 ||
        ref.rng_idx >= grid.rng_blocks)
        throw IndexError("block ref (" + std::to_string(ref.az_idx) + "," +
                         std::to_string(ref.rng_idx) + ") outside grid");
}
}  // namespace

std::vector<double> extract_block(const PolarFrame& frame, const BlockGrid& grid,
                                  const BlockRef& ref) {
    check_ref(grid, ref);
    std::vector<double> out(static_cast<std::size_t>(grid.block_size()));
    const int az0 = ref.az_idx * grid.block_az;
    const int rng0 = ref.rng_idx * grid.block_rng;
    for (int a = 0; a < grid.block_az; ++a) {
        const double* src = &frame.data[static_cast<std::size_t>(az0 + a) * frame.range_bins + rng0];
        double* dst = &out[static_cast<std::size_t>(a) * grid.block_rng];
        for (int r = 0; r < grid.block_rng; ++r) dst[r] = src[r];
    }
    return out;
}

void insert_block(PolarFrame& frame, const BlockGrid& grid, const BlockRef& ref,
                  std::span<const double> values) {
    check_ref(grid, ref);
    if (values.size() != static_cast<std::size_t>(grid.block_size()))
        throw DimensionError("insert_block: value length != block size");
    const int az0 = ref.az_idx * grid.block_az;
    const int rng0 = ref.rng_idx * grid.block_rng;
    for (int a = 0; a < grid.block_az; ++a) {
        double* dst = &frame.data[static_cast<std::size_t>(az0 + a) * frame.range_bins + rng0];
        const double* src = &values[static_cast<std::size_t>(a) * grid.block_rng];
        for (int r = 0; r < grid.block_rng; ++r) dst[r] = src[r];
    }
}

double range_block_span_m(const BlockGrid& grid, double range_resolution_m, int n_blocks) {
    return static_cast<double>(n_blocks) * grid.block_rng * range_resolution_m;
}

}  // namespace radarcs
