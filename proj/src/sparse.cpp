#include "diter/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace diter {

ColumnView CscMatrix::column(csint j) const {
    if (j < 0 || j >= n) {
        throw std::out_of_range("CscMatrix::column: index " + std::to_string(j) +
                                " out of range for n=" + std::to_string(n));
    }
    const auto begin = static_cast<std::size_t>(col_ptr[static_cast<std::size_t>(j)]);
    const auto end = static_cast<std::size_t>(col_ptr[static_cast<std::size_t>(j) + 1]);
    return ColumnView{
        std::span<const csint>(row_idx.data() + begin, end - begin),
        std::span<const double>(values.data() + begin, end - begin),
    };
}

bool CscMatrix::valid() const {
    if (n < 0) return false;
    if (col_ptr.size() != static_cast<std::size_t>(n) + 1) return false;
    if (col_ptr.front() != 0) return false;
    if (col_ptr.back() != nnz()) return false;
    if (row_idx.size() != values.size()) return false;
    for (csint j = 0; j < n; ++j) {
        if (col_ptr[j] > col_ptr[j + 1]) return false;
        for (csint k = col_ptr[j]; k < col_ptr[j + 1]; ++k) {
            if (row_idx[k] < 0 || row_idx[k] >= n) return false;
            if (k > col_ptr[j] && row_idx[k] <= row_idx[k - 1]) return false;
            if (!(values[k] >= 0.0)) return false;
        }
    }
    return true;
}

CscMatrix csc_from_edges(std::span<const Triplet> edges, csint n) {
    if (n < 0) throw std::invalid_argument("csc_from_edges: negative dimension");
    for (const auto& t : edges) {
        if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n) {
            throw std::invalid_argument(
                "csc_from_edges: entry (" + std::to_string(t.row) + "," +
                std::to_string(t.col) + ") out of range for n=" + std::to_string(n));
        }
        if (!(t.value >= 0.0)) {
            throw std::invalid_argument(
                "csc_from_edges: negative or non-finite weight at (" +
                std::to_string(t.row) + "," + std::to_string(t.col) + ")");
        }
    }

    // Sort a copy by (col, row), then merge duplicates.
    std::vector<Triplet> sorted(edges.begin(), edges.end());
    std::sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
        return a.col != b.col ? a.col < b.col : a.row < b.row;
    });

    CscMatrix m;
    m.n = n;
    m.col_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
    m.row_idx.reserve(sorted.size());
    m.values.reserve(sorted.size());

    std::size_t i = 0;
    while (i < sorted.size()) {
        const csint r = sorted[i].row;
        const csint c = sorted[i].col;
        double sum = 0.0;
        while (i < sorted.size() && sorted[i].row == r && sorted[i].col == c) {
            sum += sorted[i].value;
            ++i;
        }
        if (sum != 0.0) {
            m.row_idx.push_back(r);
            m.values.push_back(sum);
            ++m.col_ptr[static_cast<std::size_t>(c) + 1];
        }
    }
    std::partial_sum(m.col_ptr.begin(), m.col_ptr.end(), m.col_ptr.begin());
    return m;
}

DenseVector spmv(const CscMatrix& m, const DenseVector& x) {
    if (static_cast<csint>(x.size()) != m.n) {
        throw std::invalid_argument("apply: dimension mismatch");
    }
    DenseVector y(static_cast<std::size_t>(m.n), 0.0);
    for (csint j = 0; j < m.n; ++j) {
        const double xj = x[static_cast<std::size_t>(j)];
        if (xj == 0.0) continue;
        for (csint k = m.col_ptr[j]; k < m.col_ptr[j + 1]; ++k) {
            y[static_cast<std::size_t>(m.row_idx[k])] += m.values[k] * xj;
        }
    }
    return y;
}

double weighted_l1(const DenseVector& x, const DenseVector& v) {
    if (x.size() != v.size()) {
        throw std::invalid_argument("weighted_l1: dimension mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(v[i] * x[i]);
    return s;
}

double l1_norm(const DenseVector& x) {
    double s = 0.0;
    for (double xi : x) s += std::abs(xi);
    return s;
}

double sigma_v(const DenseVector& x, const DenseVector& v) {
    if (x.size() != v.size()) {
        throw std::invalid_argument("sigma_v: dimension mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += v[i] * x[i];
    return s;
}

std::vector<csint> out_degrees(const CscMatrix& m) {
    std::vector<csint> out(static_cast<std::size_t>(m.n));
    for (csint j = 0; j < m.n; ++j) out[static_cast<std::size_t>(j)] = m.col_ptr[j + 1] - m.col_ptr[j];
    return out;
}

PerronResult left_perron(const CscMatrix& m, double tol, csint max_iter) {
    PerronResult res;
    const csint n = m.n;
    if (n == 0) {
        res.converged = true;
        return res;
    }
    DenseVector v(static_cast<std::size_t>(n), 1.0 / static_cast<double>(n));
    DenseVector w(static_cast<std::size_t>(n), 0.0);
    for (csint it = 0; it < max_iter; ++it) {
        // w^T = v^T P: entry j is the dot product of column j with v.
        double wsum = 0.0;
        for (csint j = 0; j < n; ++j) {
            double s = 0.0;
            for (csint k = m.col_ptr[j]; k < m.col_ptr[j + 1]; ++k) {
                s += v[static_cast<std::size_t>(m.row_idx[k])] * m.values[k];
            }
            w[static_cast<std::size_t>(j)] = s;
            wsum += s;  // entries are >= 0 for v >= 0
        }
        res.rho = wsum;  // |v|_1 = 1, so |v^T P|_1 estimates rho
        double resid = 0.0;
        for (csint j = 0; j < n; ++j) {
            resid += std::abs(w[static_cast<std::size_t>(j)] -
                              res.rho * v[static_cast<std::size_t>(j)]);
        }
        res.residual = resid;
        if (resid <= tol) {
            res.v = v;
            res.converged = true;
            return res;
        }
        if (wsum == 0.0) {
            // v^T P vanished: rho = 0 and the current v certifies it.
            res.rho = 0.0;
            res.v = v;
            res.converged = true;
            res.residual = 0.0;
            return res;
        }
        for (csint j = 0; j < n; ++j) v[static_cast<std::size_t>(j)] = w[static_cast<std::size_t>(j)] / wsum;
    }
    res.v = v;
    res.converged = false;
    return res;
}

bool all_finite(const DenseVector& x) {
    for (double xi : x) {
        if (!std::isfinite(xi)) return false;
    }
    return true;
}

}  // namespace diter
