#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "radarcs/frame.hpp"

namespace radarcs {

/// Binary sparse m x n measurement operator. Every column holds exactly d
/// ones; storage is the sorted row-index list of each column. No row is
/// all-zero (a repair pass enforces this after generation).
struct MeasurementMatrix {
    std::int64_t m = 0;
    std::int64_t n = 0;
    std::int64_t d = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint32_t> rows;  // n*d entries, column-major, sorted per column

    std::span<const std::uint32_t> column(std::int64_t j) const {
        return {rows.data() + j * d, static_cast<std::size_t>(d)};
    }

    /// Rebuild invariants from explicit column storage (test/IO path).
    static MeasurementMatrix from_columns(std::int64_t m, std::int64_t n, std::int64_t d,
                                          std::uint64_t seed, std::vector<std::uint32_t> rows);

    void validate() const;
};

struct MeasurementVector {
    std::vector<double> values;
    std::uint64_t matrix_seed = 0;
    BlockRef block;
};

MeasurementMatrix gen_measurement_matrix(std::int64_t m, std::int64_t n, std::int64_t d,
                                         std::uint64_t seed);

/// y[i] = sum of x[j] over columns j whose row set contains i.
std::vector<double> apply_matrix(const MeasurementMatrix& matrix, std::span<const double> x);

/// x[j] = sum of y[i] over the row set of column j (transpose application).
std::vector<double> apply_adjoint(const MeasurementMatrix& matrix, std::span<const double> y);

MeasurementVector sample_block(std::span<const double> block, const MeasurementMatrix& matrix,
                               double noise_sigma, std::uint64_t noise_seed,
                               const BlockRef& ref = {});

/// Compact binary layout: m,n,d,seed as 64-bit LE, then n*d 32-bit LE row indices.
void save_matrix(const MeasurementMatrix& matrix, const std::string& path);
MeasurementMatrix load_matrix(const std::string& path);

}  // namespace radarcs
