#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

// Column-major sparse matrix and the small vector algebra used by the
// diffusion solver. Matrices are non-negative and immutable after
// construction; diffusion consumes columns, so CSC is the only layout kept.

namespace diter {

using csint = std::int64_t;
using DenseVector = std::vector<double>;

struct Triplet {
    csint row;
    csint col;
    double value;
};

// Zero-copy view of one stored column: row indices in strictly increasing
// order and the matching entry values.
struct ColumnView {
    std::span<const csint> rows;
    std::span<const double> values;

    csint size() const { return static_cast<csint>(rows.size()); }
    bool empty() const { return rows.empty(); }
};

struct CscMatrix {
    csint n = 0;                   // square dimension
    std::vector<csint> col_ptr;    // length n+1, non-decreasing, col_ptr[0]=0
    std::vector<csint> row_idx;    // row index per stored entry, sorted per column
    std::vector<double> values;    // entry weights, all >= 0

    csint nnz() const { return static_cast<csint>(row_idx.size()); }

    ColumnView column(csint j) const;

    // Structural + sign invariants; cheap enough to call in tests.
    bool valid() const;
};

// Builds a CSC matrix from (row, col, weight) triplets. Duplicate positions
// are summed; entries that sum to zero are dropped. Throws
// std::invalid_argument on out-of-range indices or negative weights.
CscMatrix csc_from_edges(std::span<const Triplet> edges, csint n);

// y = m * x by column accumulation.
DenseVector spmv(const CscMatrix& m, const DenseVector& x);

// |x|_v = sum_i |v_i * x_i|; with v = ones this is the plain L1 norm.
double weighted_l1(const DenseVector& x, const DenseVector& v);

double l1_norm(const DenseVector& x);

// sigma_v(x) = sum_i v_i * x_i (signed).
double sigma_v(const DenseVector& x, const DenseVector& v);

// out_i = number of stored entries in column i.
std::vector<csint> out_degrees(const CscMatrix& m);

struct PerronResult {
    double rho = 0.0;       // spectral radius estimate
    DenseVector v;          // left eigenvector, v >= 0, sum(v) = 1
    double residual = 0.0;  // achieved ||v^T P - rho v^T||_1
    bool converged = false;
};

// Left Perron pair by power iteration on the transpose action (row
// accumulation over the CSC structure). Starts from the uniform vector and
// renormalizes in L1 each step. On non-convergence the partial result is
// returned with converged = false and the achieved residual.
PerronResult left_perron(const CscMatrix& m, double tol = 1e-12,
                         csint max_iter = 10000);

// True when every entry is finite (no NaN/Inf).
bool all_finite(const DenseVector& x);

}  // namespace diter
