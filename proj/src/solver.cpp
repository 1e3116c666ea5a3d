#include "radarcs/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "radarcs/errors.hpp"

namespace radarcs {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

void check_dims(const MeasurementMatrix& matrix, const DctOperator& dct,
                std::span<const double> y) {
    if (static_cast<std::int64_t>(y.size()) != matrix.m)
        throw DimensionError("solver: y length != matrix.m");
    if (matrix.n != static_cast<std::int64_t>(dct.size()))
        throw DimensionError("solver: matrix.n != dct rows*cols");
}

// A v = Phi (Theta^T v); A^T w = Theta (Phi^T w).
struct SensingChain {
    const MeasurementMatrix& matrix;
    const DctOperator& dct;
    mutable std::vector<double> scratch;

    explicit SensingChain(const MeasurementMatrix& m, const DctOperator& d)
        : matrix(m), dct(d), scratch(static_cast<std::size_t>(m.n)) {}

    void apply(const VectorXd& v, VectorXd& out) const {
        dct.inverse({v.data(), static_cast<std::size_t>(v.size())}, scratch);
        auto y = apply_matrix(matrix, scratch);
        out = Eigen::Map<const VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
    }

    void apply_t(const VectorXd& w, VectorXd& out) const {
        auto x = apply_adjoint(matrix, {w.data(), static_cast<std::size_t>(w.size())});
        out.resize(static_cast<Eigen::Index>(matrix.n));
        dct.forward(x, {out.data(), static_cast<std::size_t>(out.size())});
    }
};

// Gram of the binary sparse matrix: (Phi Phi^T)(i,k) = #columns holding both
// rows. Dense m x m; the DCT factor drops out by orthonormality.
MatrixXd measurement_gram(const MeasurementMatrix& matrix) {
    MatrixXd g = MatrixXd::Zero(matrix.m, matrix.m);
    for (std::int64_t j = 0; j < matrix.n; ++j) {
        auto col = matrix.column(j);
        for (std::size_t a = 0; a < col.size(); ++a)
            for (std::size_t b = 0; b < col.size(); ++b) g(col[a], col[b]) += 1.0;
    }
    return g;
}

Eigen::LLT<MatrixXd> factor_gram(MatrixXd g) {
    Eigen::LLT<MatrixXd> llt(g);
    double ridge = 1e-12 * g.trace() / g.rows();
    while (llt.info() != Eigen::Success) {
        g.diagonal().array() += ridge;
        ridge *= 10.0;
        llt.compute(g);
        if (ridge > g.trace()) throw ParamError("basis_pursuit: measurement Gram not factorable");
    }
    return llt;
}

double soft(double x, double t) { return x > t ? x - t : (x < -t ? x + t : 0.0); }

}  // namespace

Recovery basis_pursuit(const MeasurementMatrix& matrix, const DctOperator& dct,
                       std::span<const double> y, const SolverConfig& cfg) {
    check_dims(matrix, dct, y);
    const auto n = static_cast<Eigen::Index>(matrix.n);

    Recovery rec;
    rec.coefficients.assign(static_cast<std::size_t>(n), 0.0);

    const double ynorm = norm2(y);
    if (ynorm == 0.0) {  // zero is feasible and l1-minimal
        rec.converged = true;
        return rec;
    }
    const double eps = cfg.feasibility_tol.value_or(1e-6 * ynorm);

    // Solve at unit measurement scale so rho=1 behaves uniformly; the BP
    // program is positively homogeneous in y.
    VectorXd yt(static_cast<Eigen::Index>(matrix.m));
    for (Eigen::Index i = 0; i < yt.size(); ++i) yt[i] = y[static_cast<std::size_t>(i)] / ynorm;
    const double eps_t = eps / ynorm;

    SensingChain chain(matrix, dct);
    auto llt = factor_gram(measurement_gram(matrix));

    auto project = [&](const VectorXd& v, VectorXd& out) {
        VectorXd av;
        chain.apply(v, av);
        av -= yt;
        VectorXd corr;
        chain.apply_t(llt.solve(av).eval(), corr);
        out = v - corr;
    };

    double rho = cfg.rho;
    const double alpha = cfg.over_relaxation;
    VectorXd x(n), z = VectorXd::Zero(n), u = VectorXd::Zero(n), z_old(n), v(n);
    double obj_prev = 0.0;
    bool have_obj = false;

    rec.converged = false;
    int it = 0;
    for (it = 1; it <= cfg.max_iterations; ++it) {
        v = z - u;
        project(v, x);

        z_old = z;
        v = alpha * x + (1.0 - alpha) * z_old + u;
        for (Eigen::Index i = 0; i < n; ++i) z[i] = soft(v[i], 1.0 / rho);
        u = v - z;

        const double obj = z.lpNorm<1>();
        const double prim = (x - z).norm();
        const double dual = rho * (z - z_old).norm();
        const double tol_prim =
            std::sqrt(static_cast<double>(n)) * 1e-12 +
            cfg.convergence_tol * std::max(x.norm(), z.norm());
        const double tol_dual = std::sqrt(static_cast<double>(n)) * 1e-12 +
                                cfg.convergence_tol * rho * u.norm();
        const bool obj_settled =
            have_obj && std::abs(obj - obj_prev) < cfg.convergence_tol * std::max(obj, 1e-12);
        obj_prev = obj;
        have_obj = true;

        if (prim <= tol_prim && dual <= tol_dual && obj_settled) {
            rec.converged = true;
            break;
        }

        if (cfg.adaptive_rho) {
            if (prim > 10.0 * dual && rho < 1e4) {
                rho *= 2.0;
                u *= 0.5;
            } else if (dual > 10.0 * prim && rho > 1e-4) {
                rho *= 0.5;
                u *= 2.0;
            }
        }
    }
    rec.iterations_used = std::min(it, cfg.max_iterations);

    // The x iterate is measurement-consistent by construction; report it.
    VectorXd ax;
    chain.apply(x, ax);
    const double res_t = (ax - yt).norm();
    if (res_t > eps_t) rec.converged = false;

    for (Eigen::Index i = 0; i < n; ++i) rec.coefficients[static_cast<std::size_t>(i)] = x[i] * ynorm;
    rec.residual = res_t * ynorm;
    return rec;
}

Recovery basis_pursuit(const MeasurementMatrix& matrix, const DctOperator& dct,
                       const MeasurementVector& y, const SolverConfig& cfg) {
    return basis_pursuit(matrix, dct, std::span<const double>(y.values), cfg);
}

Recovery omp(const MeasurementMatrix& matrix, const DctOperator& dct, std::span<const double> y,
             int sparsity_k, double residual_tol) {
    check_dims(matrix, dct, y);
    if (sparsity_k < 0 || sparsity_k > matrix.m)
        throw ParamError("omp: need 0 <= sparsity_k <= m, got k=" + std::to_string(sparsity_k));

    const auto n = static_cast<Eigen::Index>(matrix.n);
    const auto m = static_cast<Eigen::Index>(matrix.m);
    Recovery rec;
    rec.coefficients.assign(static_cast<std::size_t>(n), 0.0);
    rec.converged = true;
    if (norm2(y) == 0.0 || sparsity_k == 0) return rec;

    SensingChain chain(matrix, dct);

    // Column norms of A = Phi Theta^T, one synthesis per atom.
    std::vector<double> unit(static_cast<std::size_t>(n), 0.0), block(static_cast<std::size_t>(n));
    VectorXd col_norm(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        unit[static_cast<std::size_t>(j)] = 1.0;
        dct.inverse(unit, block);
        unit[static_cast<std::size_t>(j)] = 0.0;
        col_norm[j] = norm2(apply_matrix(matrix, block));
    }

    VectorXd r(m);
    for (Eigen::Index i = 0; i < m; ++i) r[i] = y[static_cast<std::size_t>(i)];

    std::vector<Eigen::Index> support;
    std::vector<char> in_support(static_cast<std::size_t>(n), 0);
    MatrixXd sub(m, sparsity_k);
    VectorXd w;

    for (int t = 0; t < sparsity_k; ++t) {
        VectorXd corr;
        chain.apply_t(r, corr);
        Eigen::Index best = -1;
        double best_score = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (in_support[static_cast<std::size_t>(j)] || col_norm[j] < 1e-300) continue;
            const double score = std::abs(corr[j]) / col_norm[j];
            if (score > best_score) {
                best_score = score;
                best = j;
            }
        }
        if (best < 0) break;
        in_support[static_cast<std::size_t>(best)] = 1;
        support.push_back(best);

        unit[static_cast<std::size_t>(best)] = 1.0;
        dct.inverse(unit, block);
        unit[static_cast<std::size_t>(best)] = 0.0;
        auto ab = apply_matrix(matrix, block);
        sub.col(static_cast<Eigen::Index>(support.size()) - 1) =
            Eigen::Map<const VectorXd>(ab.data(), m);

        auto cols = sub.leftCols(static_cast<Eigen::Index>(support.size()));
        w = cols.colPivHouseholderQr().solve(
            Eigen::Map<const VectorXd>(y.data(), m).eval());
        r = Eigen::Map<const VectorXd>(y.data(), m) - cols * w;
        if (residual_tol > 0.0 && r.norm() <= residual_tol) break;
    }

    for (std::size_t t = 0; t < support.size(); ++t)
        rec.coefficients[static_cast<std::size_t>(support[t])] = w[static_cast<Eigen::Index>(t)];
    rec.residual = r.norm();
    rec.iterations_used = static_cast<int>(support.size());
    if (residual_tol > 0.0) rec.converged = rec.residual <= residual_tol;
    return rec;
}

std::vector<double> reconstruct_block(const MeasurementMatrix& matrix, const DctOperator& dct,
                                      std::span<const double> y, const SolverConfig& cfg) {
    Recovery rec = basis_pursuit(matrix, dct, y, cfg);
    return dct.inverse(rec.coefficients);
}

}  // namespace radarcs
