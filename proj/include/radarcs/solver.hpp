#pragma once

#include <optional>
#include <span>
#include <vector>

#include "radarcs/dct.hpp"
#include "radarcs/sensing.hpp"

namespace radarcs {

struct SolverConfig {
    /// Allowed constraint residual ||A s - y||_2. Unset -> 1e-6 * ||y||_2.
    std::optional<double> feasibility_tol;
    int max_iterations = 2000;
    double convergence_tol = 1e-7;

    // ADMM internals; the defaults are not part of the solver contract.
    double rho = 1.0;
    double over_relaxation = 1.8;
    bool adaptive_rho = true;
};

struct Recovery {
    std::vector<double> coefficients;  // s, length n (DCT domain)
    double residual = 0.0;             // ||A s - y||_2 at the returned iterate
    int iterations_used = 0;
    bool converged = false;
};

/// Basis pursuit in the coefficient domain:
///   min ||s||_1  s.t.  ||Phi Theta^T s - y||_2 <= eps
/// solved by ADMM with exact projection onto the measurement-consistent
/// affine set (Cholesky of the sparse Gram Phi Phi^T; the sensing chain is
/// only ever applied operator-style). Non-convergence returns the best
/// iterate with converged=false, never throws.
Recovery basis_pursuit(const MeasurementMatrix& matrix, const DctOperator& dct,
                       std::span<const double> y, const SolverConfig& cfg = {});

Recovery basis_pursuit(const MeasurementMatrix& matrix, const DctOperator& dct,
                       const MeasurementVector& y, const SolverConfig& cfg = {});

/// Orthogonal matching pursuit over the same sensing chain; greedy atom
/// selection with least-squares coefficients on the chosen support. Stops at
/// sparsity_k atoms or when the residual norm drops to residual_tol.
Recovery omp(const MeasurementMatrix& matrix, const DctOperator& dct, std::span<const double> y,
             int sparsity_k, double residual_tol = 0.0);

/// basis_pursuit followed by DCT synthesis: returns the block estimate.
std::vector<double> reconstruct_block(const MeasurementMatrix& matrix, const DctOperator& dct,
                                      std::span<const double> y, const SolverConfig& cfg = {});

}  // namespace radarcs
