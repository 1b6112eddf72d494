#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "diter/engine.hpp"
#include "diter/sparse.hpp"

// Shared fixtures and brute-force oracles. Everything here is independent
// of the column-oriented solver paths it is used to check.

namespace testutil {

using diter::csint;
using diter::CscMatrix;
using diter::DenseVector;
using diter::Triplet;

// Two nodes exchanging half their mass: P = [[0, .5], [.5, 0]].
inline CscMatrix two_node_chain() {
    const std::vector<Triplet> edges{{1, 0, 0.5}, {0, 1, 0.5}};
    return diter::csc_from_edges(edges, 2);
}

// Five-node loop pair (1->2,3; 2->4; 3->5; 4->1; 5->1 in 1-based labels),
// column-stochastic. Mixing positive and negative diffusion oscillates on
// this graph; negative-only diffusion converges.
inline CscMatrix snake_graph() {
    const std::vector<Triplet> edges{
        {1, 0, 0.5}, {2, 0, 0.5}, {3, 1, 1.0}, {4, 2, 1.0}, {0, 3, 1.0}, {0, 4, 1.0},
    };
    return diter::csc_from_edges(edges, 5);
}

inline std::vector<double> to_dense(const CscMatrix& m) {
    std::vector<double> a(static_cast<std::size_t>(m.n) * static_cast<std::size_t>(m.n), 0.0);
    for (csint j = 0; j < m.n; ++j) {
        for (csint k = m.col_ptr[j]; k < m.col_ptr[j + 1]; ++k) {
            a[static_cast<std::size_t>(m.row_idx[k] * m.n + j)] = m.values[k];
        }
    }
    return a;
}

inline DenseVector dense_matvec(const std::vector<double>& a, const DenseVector& x) {
    const std::size_t n = x.size();
    DenseVector y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * x[j];
        y[i] = s;
    }
    return y;
}

inline double l1_diff(const DenseVector& a, const DenseVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

inline double linf_diff(const DenseVector& a, const DenseVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
    return s;
}

// Random column-stochastic sparsity, then scaled by d: P = d * P_s with
// every column non-empty.
inline CscMatrix random_substochastic(csint n, double d, std::mt19937_64& rng,
                                      double density = 0.3) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<csint> pick(0, n - 1);
    std::vector<Triplet> edges;
    std::vector<std::vector<double>> colw(static_cast<std::size_t>(n));
    std::vector<std::vector<csint>> colr(static_cast<std::size_t>(n));
    for (csint j = 0; j < n; ++j) {
        for (csint i = 0; i < n; ++i) {
            if (unif(rng) < density) {
                colr[static_cast<std::size_t>(j)].push_back(i);
                colw[static_cast<std::size_t>(j)].push_back(unif(rng) + 0.05);
            }
        }
        if (colr[static_cast<std::size_t>(j)].empty()) {
            colr[static_cast<std::size_t>(j)].push_back(pick(rng));
            colw[static_cast<std::size_t>(j)].push_back(1.0);
        }
        double sum = 0.0;
        for (double w : colw[static_cast<std::size_t>(j)]) sum += w;
        for (std::size_t t = 0; t < colw[static_cast<std::size_t>(j)].size(); ++t) {
            edges.push_back({colr[static_cast<std::size_t>(j)][t], j,
                             d * colw[static_cast<std::size_t>(j)][t] / sum});
        }
    }
    return diter::csc_from_edges(edges, n);
}

// Random irreducible column-stochastic matrix: a Hamiltonian cycle plus
// random extra links, columns normalized.
inline CscMatrix random_irreducible_stochastic(csint n, std::mt19937_64& rng,
                                               double extra_density = 0.2) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::vector<std::pair<csint, double>>> cols(static_cast<std::size_t>(n));
    for (csint j = 0; j < n; ++j) {
        cols[static_cast<std::size_t>(j)].emplace_back((j + 1) % n, unif(rng) + 0.1);
        for (csint i = 0; i < n; ++i) {
            if (i != (j + 1) % n && unif(rng) < extra_density) {
                cols[static_cast<std::size_t>(j)].emplace_back(i, unif(rng) + 0.05);
            }
        }
    }
    std::vector<Triplet> edges;
    for (csint j = 0; j < n; ++j) {
        double sum = 0.0;
        for (const auto& [i, w] : cols[static_cast<std::size_t>(j)]) sum += w;
        for (const auto& [i, w] : cols[static_cast<std::size_t>(j)]) {
            edges.push_back({i, j, w / sum});
        }
    }
    return diter::csc_from_edges(edges, n);
}

inline DenseVector random_vector(csint n, std::mt19937_64& rng, double lo = -1.0,
                                 double hi = 1.0) {
    std::uniform_real_distribution<double> unif(lo, hi);
    DenseVector v(static_cast<std::size_t>(n));
    for (double& x : v) x = unif(rng);
    return v;
}

inline DenseVector uniform_e(csint n) {
    return DenseVector(static_cast<std::size_t>(n), 1.0 / static_cast<double>(n));
}

}  // namespace testutil
