#include "radarcs/sensing.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "radarcs/errors.hpp"
#include "radarcs/rng.hpp"

namespace radarcs {

void MeasurementMatrix::validate() const {
    if (d < 1 || d > m || m > n) throw ParamError("MeasurementMatrix: need 1 <= d <= m <= n");
    if (rows.size() != static_cast<std::size_t>(n) * d)
        throw DimensionError("MeasurementMatrix: storage length != n*d");
    std::vector<std::int64_t> row_weight(static_cast<std::size_t>(m), 0);
    for (std::int64_t j = 0; j < n; ++j) {
        auto col = column(j);
        for (std::size_t k = 0; k < col.size(); ++k) {
            if (col[k] >= static_cast<std::uint32_t>(m))
                throw IndexError("MeasurementMatrix: row index out of range");
            if (k > 0 && col[k] <= col[k - 1])
                throw ParamError("MeasurementMatrix: column rows must be sorted and distinct");
            ++row_weight[col[k]];
        }
    }
    for (auto w : row_weight)
        if (w == 0) throw ParamError("MeasurementMatrix: all-zero row");
}

MeasurementMatrix MeasurementMatrix::from_columns(std::int64_t m, std::int64_t n, std::int64_t d,
                                                  std::uint64_t seed,
                                                  std::vector<std::uint32_t> rows) {
    MeasurementMatrix mat{m, n, d, seed, std::move(rows)};
    mat.validate();
    return mat;
}

MeasurementMatrix gen_measurement_matrix(std::int64_t m, std::int64_t n, std::int64_t d,
                                         std::uint64_t seed) {
    if (d < 1 || d > m) throw ParamError("gen_measurement_matrix: need 1 <= d <= m");
    if (m > n) throw ParamError("gen_measurement_matrix: need m <= n");

    MeasurementMatrix mat;
    mat.m = m;
    mat.n = n;
    mat.d = d;
    mat.seed = seed;
    mat.rows.resize(static_cast<std::size_t>(n) * d);

    Rng rng(mix_seed(seed, 0x6d617472ULL));  // one stream for draw + repair
    std::vector<std::int64_t> row_weight(static_cast<std::size_t>(m), 0);

    // Floyd's algorithm: d distinct rows per column, uniform without replacement.
    std::set<std::uint32_t> picked;
    for (std::int64_t j = 0; j < n; ++j) {
        picked.clear();
        for (std::int64_t t = m - d; t < m; ++t) {
            auto r = static_cast<std::uint32_t>(rng.uniform_int(0, t));
            if (!picked.insert(r).second) picked.insert(static_cast<std::uint32_t>(t));
        }
        std::uint32_t* col = mat.rows.data() + j * d;
        std::int64_t k = 0;
        for (auto r : picked) {
            col[k++] = r;
            ++row_weight[r];
        }
    }

    // Repair: give each empty row one entry, taken from the heaviest row of a
    // randomly drawn column (re-draw if that row would become empty itself).
    for (std::int64_t r = 0; r < m; ++r) {
        while (row_weight[r] == 0) {
            const std::int64_t j = rng.uniform_int(0, n - 1);
            std::uint32_t* col = mat.rows.data() + j * d;
            std::int64_t heavy = -1;
            for (std::int64_t k = 0; k < d; ++k) {
                if (heavy < 0 || row_weight[col[k]] > row_weight[col[heavy]]) heavy = k;
            }
            if (row_weight[col[heavy]] < 2) continue;
            --row_weight[col[heavy]];
            ++row_weight[r];
            col[heavy] = static_cast<std::uint32_t>(r);
            std::sort(col, col + d);
        }
    }
    return mat;
}

std::vector<double> apply_matrix(const MeasurementMatrix& matrix, std::span<const double> x) {
    if (x.size() != static_cast<std::size_t>(matrix.n))
        throw DimensionError("apply_matrix: x length != n");
    std::vector<double> y(static_cast<std::size_t>(matrix.m), 0.0);
    const std::uint32_t* rows = matrix.rows.data();
    for (std::int64_t j = 0; j < matrix.n; ++j) {
        const double xj = x[static_cast<std::size_t>(j)];
        if (xj == 0.0) continue;
        for (std::int64_t k = 0; k < matrix.d; ++k) y[rows[j * matrix.d + k]] += xj;
    }
    return y;
}

std::vector<double> apply_adjoint(const MeasurementMatrix& matrix, std::span<const double> y) {
    if (y.size() != static_cast<std::size_t>(matrix.m))
        throw DimensionError("apply_adjoint: y length != m");
    std::vector<double> x(static_cast<std::size_t>(matrix.n), 0.0);
    const std::uint32_t* rows = matrix.rows.data();
    for (std::int64_t j = 0; j < matrix.n; ++j) {
        double acc = 0.0;
        for (std::int64_t k = 0; k < matrix.d; ++k) acc += y[rows[j * matrix.d + k]];
        x[static_cast<std::size_t>(j)] = acc;
    }
    return x;
}

MeasurementVector sample_block(std::span<const double> block, const MeasurementMatrix& matrix,
                               double noise_sigma, std::uint64_t noise_seed, const BlockRef& ref) {
    if (noise_sigma < 0) throw ParamError("sample_block: noise_sigma must be >= 0");
    MeasurementVector mv;
    mv.values = apply_matrix(matrix, block);
    mv.matrix_seed = matrix.seed;
    mv.block = ref;
    if (noise_sigma > 0) {
        Rng rng(mix_seed(noise_seed, 0x6e6f6973ULL));
        for (double& v : mv.values) v += rng.normal(0.0, noise_sigma);
    }
    return mv;
}

namespace {
void put_u64(std::ofstream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}
std::uint64_t get_u64(std::ifstream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}
}  // namespace

void save_matrix(const MeasurementMatrix& matrix, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("save_matrix: cannot open " + path);
    put_u64(os, static_cast<std::uint64_t>(matrix.m));
    put_u64(os, static_cast<std::uint64_t>(matrix.n));
    put_u64(os, static_cast<std::uint64_t>(matrix.d));
    put_u64(os, matrix.seed);
    for (std::uint32_t r : matrix.rows) {
        unsigned char b[4];
        for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((r >> (8 * i)) & 0xff);
        os.write(reinterpret_cast<const char*>(b), 4);
    }
    if (!os) throw IoError("save_matrix: write failed for " + path);
}

MeasurementMatrix load_matrix(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("load_matrix: cannot open " + path);
    MeasurementMatrix mat;
    mat.m = static_cast<std::int64_t>(get_u64(is));
    mat.n = static_cast<std::int64_t>(get_u64(is));
    mat.d = static_cast<std::int64_t>(get_u64(is));
    mat.seed = get_u64(is);
    if (!is || mat.m <= 0 || mat.n <= 0 || mat.d <= 0)
        throw IoError("load_matrix: corrupt header in " + path);
    mat.rows.resize(static_cast<std::size_t>(mat.n) * mat.d);
    for (std::uint32_t& r : mat.rows) {
        unsigned char b[4];
        is.read(reinterpret_cast<char*>(b), 4);
        r = 0;
        for (int i = 0; i < 4; ++i) r |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    }
    if (!is) throw IoError("load_matrix: truncated file " + path);
    mat.validate();
    return mat;
}

}  // namespace radarcs
