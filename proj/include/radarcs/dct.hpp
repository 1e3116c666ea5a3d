#pragma once

#include <memory>
#include <span>
#include <vector>

namespace radarcs {

/// Orthonormal separable 2D DCT-II over a rows x cols block, vectorized
/// azimuth-major (rows = block_az, cols = block_rng). forward() is the
/// analysis operator, inverse() the synthesis (its transpose); the pair
/// round-trips to ~1e-15 and preserves the l2 norm.
class DctOperator {
  public:
    DctOperator(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int size() const { return rows_ * cols_; }

    void forward(std::span<const double> block, std::span<double> coeffs) const;
    void inverse(std::span<const double> coeffs, std::span<double> block) const;

    std::vector<double> forward(std::span<const double> block) const;
    std::vector<double> inverse(std::span<const double> coeffs) const;

  private:
    struct Plans;

    int rows_;
    int cols_;
    std::shared_ptr<Plans> plans_;
    std::vector<double> row_scale_;  // orthonormalization factors, per axis index
    std::vector<double> col_scale_;
};

}  // namespace radarcs
