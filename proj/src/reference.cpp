#include "diter/reference.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace diter {

const char* baseline_name(BaselineKind k) {
    switch (k) {
        case BaselineKind::SpiR: return "sPI-R";
        case BaselineKind::SpiC: return "sPI-C";
        case BaselineKind::SpiCr: return "sPI-Cr";
        case BaselineKind::ApiR: return "aPI-R";
    }
    return "?";
}

DenseVector direct_solve(const CscMatrix& m, const DenseVector& b) {
    const csint n = m.n;
    if (n > 2000) throw std::invalid_argument("direct_solve: n > 2000");
    if (static_cast<csint>(b.size()) != n) {
        throw std::invalid_argument("direct_solve: dimension mismatch");
    }

    // Dense A = I - P, row-major.
    std::vector<double> a(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
    for (csint i = 0; i < n; ++i) a[static_cast<std::size_t>(i * n + i)] = 1.0;
    for (csint j = 0; j < n; ++j) {
        for (csint k = m.col_ptr[j]; k < m.col_ptr[j + 1]; ++k) {
            a[static_cast<std::size_t>(m.row_idx[k] * n + j)] -= m.values[k];
        }
    }

    DenseVector x = b;
    std::vector<csint> perm(static_cast<std::size_t>(n));
    for (csint i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;

    for (csint col = 0; col < n; ++col) {
        csint pivot = col;
        double best = std::abs(a[static_cast<std::size_t>(perm[col] * n + col)]);
        for (csint r = col + 1; r < n; ++r) {
            const double v = std::abs(a[static_cast<std::size_t>(perm[r] * n + col)]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best == 0.0) throw std::runtime_error("direct_solve: singular system");
        std::swap(perm[static_cast<std::size_t>(col)], perm[static_cast<std::size_t>(pivot)]);
        const csint prow = perm[static_cast<std::size_t>(col)];
        const double diag = a[static_cast<std::size_t>(prow * n + col)];
        for (csint r = col + 1; r < n; ++r) {
            const csint rr = perm[static_cast<std::size_t>(r)];
            const double factor = a[static_cast<std::size_t>(rr * n + col)] / diag;
            if (factor == 0.0) continue;
            a[static_cast<std::size_t>(rr * n + col)] = 0.0;
            for (csint c = col + 1; c < n; ++c) {
                a[static_cast<std::size_t>(rr * n + c)] -=
                    factor * a[static_cast<std::size_t>(prow * n + c)];
            }
            x[static_cast<std::size_t>(rr)] -= factor * x[static_cast<std::size_t>(prow)];
        }
    }

    DenseVector out(static_cast<std::size_t>(n), 0.0);
    for (csint r = n - 1; r >= 0; --r) {
        const csint rr = perm[static_cast<std::size_t>(r)];
        double s = x[static_cast<std::size_t>(rr)];
        for (csint c = r + 1; c < n; ++c) {
            s -= a[static_cast<std::size_t>(rr * n + c)] * out[static_cast<std::size_t>(c)];
        }
        out[static_cast<std::size_t>(r)] = s / a[static_cast<std::size_t>(rr * n + r)];
    }
    return out;
}

DenseVector power_sweep(const CscMatrix& m, const DenseVector& x, const DenseVector& b) {
    if (x.size() != b.size() || static_cast<csint>(x.size()) != m.n) {
        throw std::invalid_argument("power_sweep: dimension mismatch");
    }
    DenseVector y = spmv(m, x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += b[i];
    return y;
}

}  // namespace diter
