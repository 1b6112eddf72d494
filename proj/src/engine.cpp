#include "diter/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace diter {

namespace {

constexpr csint kValidationCutoff = 256;

void check_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

// Rejects EXPLICIT schedules that would starve an index forever: every
// index must occur at least once per declared period.
void check_fair(const Strategy& s, csint n) {
    if (s.kind != StrategyKind::Explicit) return;
    if (s.sequence.empty()) throw std::invalid_argument("run: empty explicit sequence");
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (csint i : s.sequence) {
        if (i < 0 || i >= n) throw std::invalid_argument("run: explicit sequence index out of range");
        seen[static_cast<std::size_t>(i)] = true;
    }
    for (csint i = 0; i < n; ++i) {
        if (!seen[static_cast<std::size_t>(i)]) {
            throw std::invalid_argument("run: explicit sequence is not fair (index " +
                                        std::to_string(i) + " never occurs)");
        }
    }
}

// sigma_v(B) = 0 is required before diffusing only one sign class on a
// spectral-radius-one matrix. Checked when the left Perron pair is cheap to
// obtain and identifies the rho = 1 regime; otherwise the caller is trusted.
void check_sigma_zero(const CscMatrix& m, const DenseVector& b_eff, DiffusionMode mode) {
    if (mode == DiffusionMode::All) return;
    if (m.n > kValidationCutoff) return;
    const PerronResult p = left_perron(m, 1e-12, 50000);
    if (!p.converged) return;
    if (std::abs(p.rho - 1.0) > 1e-6) return;  // rho < 1: sign-filtered runs are fine
    for (double vi : p.v) {
        if (!(vi > 0.0)) return;  // zero coordinates void the guarantee; trusted
    }
    const double s = sigma_v(b_eff, p.v);
    const double scale = std::max(1.0, weighted_l1(b_eff, p.v));
    if (std::abs(s) > 1e-8 * scale) {
        throw std::invalid_argument(
            "run: sign-filtered diffusion on a spectral-radius-one matrix needs "
            "sigma_v(B) = 0, got " + std::to_string(s));
    }
}

}  // namespace

void diffuse_once(DiffusionState& state, csint i, double alpha, const CscMatrix& m) {
    if (i < 0 || i >= m.n) throw std::out_of_range("diffuse_once: index out of range");
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("diffuse_once: alpha outside [0,1]");
    }
    check_same_size(state.f.size(), static_cast<std::size_t>(m.n), "diffuse_once");
    const auto eff = detail::diffuse_core(state.f, state.h, i, alpha, m,
                                          detail::AlwaysOwned{}, detail::NoUpdate{},
                                          detail::NoSpill{});
    if (eff.phi != 0.0 && alpha > 0.0) {
        state.link_ops += m.col_ptr[i + 1] - m.col_ptr[i];
    }
    state.diffusion_count += 1;
}

void inject_fluid(DiffusionState& state, const DenseVector& g) {
    check_same_size(state.f.size(), g.size(), "inject_fluid");
    if (!all_finite(g)) throw std::invalid_argument("inject_fluid: non-finite entries");
    for (std::size_t i = 0; i < g.size(); ++i) {
        state.f[i] += g[i];
        state.injected_total[i] += g[i];
    }
}

std::optional<csint> next_index(const DiffusionState& state, Strategy& strategy,
                                DiffusionMode mode, const std::vector<csint>& out) {
    const csint n = static_cast<csint>(state.f.size());
    const auto eligible = [&](csint i) {
        const double fi = state.f[static_cast<std::size_t>(i)];
        switch (mode) {
            case DiffusionMode::All: return fi != 0.0;
            case DiffusionMode::NegativeOnly: return fi < 0.0;
            case DiffusionMode::PositiveOnly: return fi > 0.0;
        }
        return false;
    };
    bool any = false;
    for (csint i = 0; i < n && !any; ++i) any = eligible(i);
    if (!any) return std::nullopt;

    switch (strategy.kind) {
        case StrategyKind::Cyc: {
            const csint i = static_cast<csint>(strategy.cursor % static_cast<std::size_t>(n));
            strategy.cursor = (strategy.cursor + 1) % static_cast<std::size_t>(n);
            return i;
        }
        case StrategyKind::Explicit: {
            if (strategy.sequence.empty()) return std::nullopt;
            const csint i = strategy.sequence[strategy.cursor % strategy.sequence.size()];
            strategy.cursor = (strategy.cursor + 1) % strategy.sequence.size();
            return i;
        }
        case StrategyKind::Max:
        case StrategyKind::Cost: {
            csint best = -1;
            double best_score = 0.0;
            for (csint i = 0; i < n; ++i) {
                if (!eligible(i)) continue;
                const double a = std::abs(state.f[static_cast<std::size_t>(i)]);
                double s = a;
                if (strategy.kind == StrategyKind::Cost) {
                    const csint d = out[static_cast<std::size_t>(i)];
                    s = d == 0 ? std::numeric_limits<double>::infinity()
                               : a / static_cast<double>(d);
                }
                if (s > best_score) {
                    best_score = s;
                    best = i;
                }
            }
            if (best < 0) return std::nullopt;
            return best;
        }
    }
    return std::nullopt;
}

double fundamental_residual(const DiffusionState& state, const CscMatrix& m) {
    const DenseVector ph = spmv(m, state.h);
    double worst = 0.0;
    for (std::size_t i = 0; i < state.f.size(); ++i) {
        const double v = state.h[i] + state.f[i] - ph[i] - state.b[i] - state.injected_total[i];
        worst = std::max(worst, std::abs(v));
    }
    return worst;
}

Solution run_from(const CscMatrix& m, DiffusionState state, Strategy strategy,
                  DiffusionMode mode, double epsilon, std::int64_t max_link_ops) {
    const csint n = m.n;
    check_same_size(state.f.size(), static_cast<std::size_t>(n), "run");
    if (!(epsilon > 0.0)) throw std::invalid_argument("run: epsilon must be positive");
    check_fair(strategy, n);
    {
        DenseVector b_eff = state.b;
        for (std::size_t i = 0; i < b_eff.size(); ++i) b_eff[i] += state.injected_total[i];
        check_sigma_zero(m, b_eff, mode);
    }

    const std::vector<csint> out = out_degrees(m);
    std::vector<csint> members(static_cast<std::size_t>(n));
    for (csint i = 0; i < n; ++i) members[static_cast<std::size_t>(i)] = i;
    NodeSelector selector(std::move(strategy), mode, std::move(members), out);
    selector.reset(state.f);

    const double b_mass = l1_norm(state.b);
    const double base_mass = std::max(b_mass + l1_norm(state.injected_total),
                                      l1_norm(state.f));
    const double threshold = epsilon * std::max(1.0, b_mass);
    const double guard = 1e-9 * (1.0 + base_mass);

    Solution sol;
    double abs_f = l1_norm(state.f);
    const auto sample = [&]() {
        abs_f = l1_norm(state.f);  // exact refresh kills incremental drift
        sol.residual_history.push_back({state.diffusion_count, state.link_ops, abs_f});
        if (fundamental_residual(state, m) > guard) {
            throw std::logic_error("run: fundamental diffusion equation violated");
        }
    };
    sample();

    sol.status = SolveStatus::BudgetExhausted;
    while (true) {
        if (abs_f <= threshold) {
            abs_f = l1_norm(state.f);
            if (abs_f <= threshold) {
                sol.status = SolveStatus::Converged;
                break;
            }
        }
        if (state.link_ops >= max_link_ops) {
            sol.status = SolveStatus::BudgetExhausted;
            break;
        }
        if (base_mass > 0.0 && abs_f > 10.0 * base_mass) {
            sol.status = SolveStatus::Diverged;
            break;
        }
        const std::optional<csint> cand = selector.pick(state.f);
        if (!cand) {
            sol.status = abs_f <= threshold ? SolveStatus::Converged : SolveStatus::Stalled;
            break;
        }
        if (!selector.eligible(*cand, state.f)) {
            continue;  // select-then-test: selection advanced, nothing diffused
        }
        const auto eff = detail::diffuse_core(
            state.f, state.h, *cand, 1.0, m, detail::AlwaysOwned{},
            [&](csint r, double oldv, double newv) { selector.on_fluid_update(r, oldv, newv); },
            detail::NoSpill{});
        abs_f += eff.absf_delta;
        if (eff.phi != 0.0) state.link_ops += out[static_cast<std::size_t>(*cand)];
        state.diffusion_count += 1;
        if (n > 0 && state.diffusion_count % n == 0) sample();
    }

    sol.residual_l1 = l1_norm(state.f);
    sol.residual_history.push_back({state.diffusion_count, state.link_ops, sol.residual_l1});
    sol.converged = sol.status == SolveStatus::Converged;
    sol.diffusion_count = state.diffusion_count;
    sol.link_ops = state.link_ops;
    sol.h = std::move(state.h);
    return sol;
}

Solution run(const CscMatrix& m, const DenseVector& b, Strategy strategy,
             DiffusionMode mode, double epsilon, std::int64_t max_link_ops) {
    if (!all_finite(b)) throw std::invalid_argument("run: non-finite entries in b");
    return run_from(m, DiffusionState::from_b(b), std::move(strategy), mode, epsilon,
                    max_link_ops);
}

DenseVector rho1_seed(const CscMatrix& m) {
    const double inv = m.n > 0 ? 1.0 / static_cast<double>(m.n) : 0.0;
    DenseVector e(static_cast<std::size_t>(m.n), inv);
    DenseVector seed = spmv(m, e);
    for (std::size_t i = 0; i < seed.size(); ++i) seed[i] -= inv;
    return seed;
}

Solution eigenvector_rho1(const CscMatrix& m, double epsilon, std::int64_t budget) {
    if (m.n <= kValidationCutoff) {
        const PerronResult p = left_perron(m, 1e-12, 50000);
        if (p.converged) {
            if (std::abs(p.rho - 1.0) > 1e-6) {
                throw std::invalid_argument(
                    "eigenvector_rho1: spectral radius is " + std::to_string(p.rho) +
                    ", not 1");
            }
            for (double vi : p.v) {
                if (!(vi > 0.0)) {
                    throw std::invalid_argument(
                        "eigenvector_rho1: left eigenvector is not strictly positive");
                }
            }
        }
    }
    return run(m, rho1_seed(m), Strategy::max(), DiffusionMode::NegativeOnly, epsilon,
               budget);
}

std::pair<CscMatrix, DenseVector> pagerank_system(const CscMatrix& adjacency, double d) {
    if (!(d > 0.0 && d < 1.0)) {
        throw std::invalid_argument("pagerank_system: damping must lie in (0,1)");
    }
    CscMatrix m = adjacency;
    for (csint j = 0; j < m.n; ++j) {
        double colsum = 0.0;
        for (csint k = m.col_ptr[j]; k < m.col_ptr[j + 1]; ++k) colsum += m.values[k];
        if (colsum == 0.0) continue;  // dangling column stays zero
        const double scale = d / colsum;
        for (csint k = m.col_ptr[j]; k < m.col_ptr[j + 1]; ++k) m.values[k] *= scale;
    }
    const double bi = m.n > 0 ? (1.0 - d) / static_cast<double>(m.n) : 0.0;
    DenseVector b(static_cast<std::size_t>(m.n), bi);
    return {std::move(m), std::move(b)};
}

}  // namespace diter
