#include "radarcs/dct.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "radarcs/errors.hpp"

namespace radarcs {

namespace {
// FFTW plan creation/destruction is not thread-safe; execution with the
// new-array interface is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct DctOperator::Plans {
    fftw_plan fwd = nullptr;  // REDFT10 along both axes
    fftw_plan inv = nullptr;  // REDFT01 along both axes

    ~Plans() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (inv) fftw_destroy_plan(inv);
    }
};

DctOperator::DctOperator(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows <= 0 || cols <= 0)
        throw ParamError("DctOperator: dims must be positive, got " + std::to_string(rows) + "x" +
                         std::to_string(cols));

    // FFTW REDFT10 computes 2*sum x_n cos(pi(2n+1)k/2N); the orthonormal
    // DCT-II coefficient is that times c_k/2 with c_0=sqrt(1/N), c_k=sqrt(2/N).
    auto scales = [](int n) {
        std::vector<double> s(static_cast<std::size_t>(n), std::sqrt(2.0 / n) / 2.0);
        s[0] = std::sqrt(1.0 / n) / 2.0;
        return s;
    };
    row_scale_ = scales(rows);
    col_scale_ = scales(cols);

    plans_ = std::make_shared<Plans>();
    std::vector<double> scratch(static_cast<std::size_t>(rows) * cols, 0.0);
    std::lock_guard<std::mutex> lock(planner_mutex());
    plans_->fwd = fftw_plan_r2r_2d(rows, cols, scratch.data(), scratch.data(), FFTW_REDFT10,
                                   FFTW_REDFT10, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->inv = fftw_plan_r2r_2d(rows, cols, scratch.data(), scratch.data(), FFTW_REDFT01,
                                   FFTW_REDFT01, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plans_->fwd || !plans_->inv) throw ParamError("DctOperator: fftw plan creation failed");
}

void DctOperator::forward(std::span<const double> block, std::span<double> coeffs) const {
    if (block.size() != static_cast<std::size_t>(size()) || coeffs.size() != block.size())
        throw DimensionError("dct2_forward: length != rows*cols");
    std::copy(block.begin(), block.end(), coeffs.begin());
    fftw_execute_r2r(plans_->fwd, coeffs.data(), coeffs.data());
    for (int r = 0; r < rows_; ++r) {
        const double rs = row_scale_[r];
        double* row = coeffs.data() + static_cast<std::size_t>(r) * cols_;
        for (int c = 0; c < cols_; ++c) row[c] *= rs * col_scale_[c];
    }
}

void DctOperator::inverse(std::span<const double> coeffs, std::span<double> block) const {
    if (coeffs.size() != static_cast<std::size_t>(size()) || block.size() != coeffs.size())
        throw DimensionError("dct2_inverse: length != rows*cols");
    // REDFT01 weighs the k=0 term with 1 instead of 2, hence the doubled scale.
    for (int r = 0; r < rows_; ++r) {
        const double rs = (r == 0) ? 2.0 * row_scale_[0] : row_scale_[r];
        const double* src = coeffs.data() + static_cast<std::size_t>(r) * cols_;
        double* dst = block.data() + static_cast<std::size_t>(r) * cols_;
        for (int c = 0; c < cols_; ++c) {
            const double cs = (c == 0) ? 2.0 * col_scale_[0] : col_scale_[c];
            dst[c] = src[c] * rs * cs;
        }
    }
    fftw_execute_r2r(plans_->inv, block.data(), block.data());
}

std::vector<double> DctOperator::forward(std::span<const double> block) const {
    std::vector<double> out(block.size());
    forward(block, out);
    return out;
}

std::vector<double> DctOperator::inverse(std::span<const double> coeffs) const {
    std::vector<double> out(coeffs.size());
    inverse(coeffs, out);
    return out;
}

}  // namespace radarcs
