#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "diter/selector.hpp"
#include "diter/sparse.hpp"

// The diffusion iteration for X = P X + B. Two state vectors are kept: the
// residual fluid F and the history H. One step moves the fluid of a single
// node along its matrix column; the L1 mass of F is an explicit distance to
// the limit. Scheduling strategies and the rho(P)=1 eigenvector mode live
// here as well.

namespace diter {

struct DiffusionState {
    DenseVector f;               // residual fluid
    DenseVector h;               // accumulated history
    DenseVector b;               // initial fluid
    DenseVector injected_total;  // running sum of injected fluid
    std::int64_t diffusion_count = 0;
    std::int64_t link_ops = 0;   // non-zero matrix entries touched

    static DiffusionState from_b(DenseVector b0) {
        DiffusionState st;
        st.f = b0;
        st.h.assign(b0.size(), 0.0);
        st.injected_total.assign(b0.size(), 0.0);
        st.b = std::move(b0);
        return st;
    }
};

namespace detail {

struct DiffuseEffect {
    double phi = 0.0;        // fluid taken from the diffused node
    double absf_delta = 0.0; // change of sum_i |f_i| over owned coordinates
};

// One diffusion of node i with fraction alpha, destination-routed. Owned
// coordinates mutate f (each change reported through upd); foreign ones are
// handed to spill. The expression order is fixed: both the sequential
// solver and the distributed simulator instantiate this template, which is
// what makes a K=1 simulation replay the sequential run bit for bit.
template <class OwnedPred, class OnUpdate, class OnSpill>
inline DiffuseEffect diffuse_core(DenseVector& f, DenseVector& h, csint i,
                                  double alpha, const CscMatrix& m,
                                  OwnedPred&& owned, OnUpdate&& upd,
                                  OnSpill&& spill) {
    DiffuseEffect eff;
    const auto ui = static_cast<std::size_t>(i);
    const double phi = f[ui];
    eff.phi = phi;
    const double moved = alpha * phi;
    h[ui] += moved;
    const double kept = (1.0 - alpha) * phi;
    f[ui] = kept;
    eff.absf_delta += std::abs(kept) - std::abs(phi);
    upd(i, phi, kept);
    // self-loop entries land after the reset
    const ColumnView col = m.column(i);
    for (csint k = 0; k < col.size(); ++k) {
        const csint r = col.rows[static_cast<std::size_t>(k)];
        const double add = col.values[static_cast<std::size_t>(k)] * moved;
        if (owned(r)) {
            const auto ur = static_cast<std::size_t>(r);
            const double old = f[ur];
            const double now = old + add;
            f[ur] = now;
            eff.absf_delta += std::abs(now) - std::abs(old);
            upd(r, old, now);
        } else {
            spill(r, add);
        }
    }
    return eff;
}

struct AlwaysOwned {
    bool operator()(csint) const { return true; }
};
struct NoUpdate {
    void operator()(csint, double, double) const {}
};
struct NoSpill {
    void operator()(csint, double) const {}
};

}  // namespace detail

// One diffusion step (Strategy-independent). With phi the fluid of node i
// before the call: h_i += alpha*phi, f_i <- (1-alpha)*phi, then every stored
// entry (r, p) of column i receives alpha*p*phi. link_ops grows by out_i
// only when phi != 0 and alpha > 0; diffusion_count always grows by one.
// alpha = 1 is the plain diffusion; alpha = 0 is the identity.
void diffuse_once(DiffusionState& state, csint i, double alpha, const CscMatrix& m);

// f += g, remembered in injected_total so the fundamental equation keeps
// holding with the injected term on the right-hand side.
void inject_fluid(DiffusionState& state, const DenseVector& g);

// Linear-scan reference of the selection policy (see NodeSelector for the
// indexed-heap version used by run). CYC returns the cursor position and
// advances; MAX returns the argmax of |f_i| (sign-filtered by mode); COST
// the argmax of |f_i|/out_i with dangling nodes ranked first. Ties break to
// the lowest index. Returns nullopt when no eligible node has |f_i| > 0.
std::optional<csint> next_index(const DiffusionState& state, Strategy& strategy,
                                DiffusionMode mode, const std::vector<csint>& out);

// max_i |h_i + f_i - (P h)_i - b_i - injected_i|, the violation of the
// fundamental diffusion equation. Zero up to rounding for any valid state.
double fundamental_residual(const DiffusionState& state, const CscMatrix& m);

struct ResidualSample {
    std::int64_t diffusions = 0;
    std::int64_t link_ops = 0;
    double residual = 0.0;
};

enum class SolveStatus { Converged, BudgetExhausted, Diverged, Stalled };

struct Solution {
    DenseVector h;
    double residual_l1 = 0.0;
    std::vector<ResidualSample> residual_history;
    bool converged = false;
    SolveStatus status = SolveStatus::BudgetExhausted;
    std::int64_t diffusion_count = 0;
    std::int64_t link_ops = 0;
};

// Runs the diffusion until |F|_1 <= epsilon * max(1, |B|_1) or the link-op
// budget runs out. Residual history is sampled every n diffusions. A
// residual above 10x the initial mass aborts with a divergence diagnostic
// (spectral radius >= 1 in mode All, most likely). EXPLICIT strategies are
// rejected unless every index occurs in the declared period.
Solution run(const CscMatrix& m, const DenseVector& b, Strategy strategy,
             DiffusionMode mode, double epsilon = 1e-9,
             std::int64_t max_link_ops = (std::int64_t{1} << 62));

// Same solver, continuing from a prepared state (e.g. after inject_fluid).
Solution run_from(const CscMatrix& m, DiffusionState state, Strategy strategy,
                  DiffusionMode mode, double epsilon = 1e-9,
                  std::int64_t max_link_ops = (std::int64_t{1} << 62));

// P*e - e with e the uniform unit vector (1/N, ..., 1/N). Sums to zero for
// unit column sums; the canonical seed of the rho(P)=1 eigenvector mode.
DenseVector rho1_seed(const CscMatrix& m);

// Solves P x = x for a matrix of spectral radius one by diffusing only
// negative fluids from rho1_seed(m). The returned h is such that h + e is
// the non-negative eigenvector whose maximum value inside each spectral-
// radius-one strongly connected component equals 1/N.
Solution eigenvector_rho1(const CscMatrix& m, double epsilon = 1e-10,
                          std::int64_t budget = (std::int64_t{1} << 62));

// PageRank system: columns of the 0/1 adjacency are normalized to unit sum
// and scaled by the damping d; dangling columns stay zero; b = (1-d) e.
std::pair<CscMatrix, DenseVector> pagerank_system(const CscMatrix& adjacency,
                                                  double d);

}  // namespace diter
