#include <doctest.h>

#include <algorithm>
#include <random>

#include <Eigen/Dense>

#include "diter/engine.hpp"
#include "diter/reference.hpp"
#include "helpers.hpp"

using namespace diter;
using namespace testutil;

namespace {

std::vector<csint> touched_by(const CscMatrix& m, csint i) {
    std::vector<csint> t{i};
    const ColumnView col = m.column(i);
    for (csint k = 0; k < col.size(); ++k) t.push_back(col.rows[static_cast<std::size_t>(k)]);
    return t;
}

DenseVector eigen_perron_right(const CscMatrix& m) {
    const csint n = m.n;
    const std::vector<double> dense = to_dense(m);
    Eigen::MatrixXd a(n, n);
    for (csint i = 0; i < n; ++i) {
        for (csint j = 0; j < n; ++j) a(i, j) = dense[static_cast<std::size_t>(i * n + j)];
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(a);
    int best = 0;
    double best_dist = 1e300;
    for (int t = 0; t < n; ++t) {
        const double dist = std::abs(es.eigenvalues()(t) - std::complex<double>(1.0, 0.0));
        if (dist < best_dist) {
            best_dist = dist;
            best = t;
        }
    }
    Eigen::VectorXd v = es.eigenvectors().col(best).real();
    if (v.sum() < 0) v = -v;
    DenseVector out(static_cast<std::size_t>(n));
    for (csint i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = v(i);
    return out;
}

}  // namespace

TEST_CASE("diffuse_once: hand expansion on the two-node chain") {
    const CscMatrix chain = two_node_chain();
    DiffusionState st = DiffusionState::from_b({1.0, 1.0});
    diffuse_once(st, 0, 1.0, chain);
    CHECK(st.f == DenseVector{0.0, 1.5});
    CHECK(st.h == DenseVector{1.0, 0.0});
    CHECK(st.diffusion_count == 1);
    CHECK(st.link_ops == 1);
    // h + f = P h + b
    CHECK(fundamental_residual(st, chain) < 1e-15);
}

TEST_CASE("diffuse_once: alpha = 0 is the identity on the vectors") {
    const CscMatrix chain = two_node_chain();
    DiffusionState st = DiffusionState::from_b({0.3, -0.7});
    diffuse_once(st, 1, 0.0, chain);
    CHECK(st.f == DenseVector{0.3, -0.7});
    CHECK(st.h == DenseVector{0.0, 0.0});
    CHECK(st.diffusion_count == 1);
    CHECK(st.link_ops == 0);
}

TEST_CASE("diffuse_once: dangling node absorbs its fluid at zero link cost") {
    const CscMatrix zero = csc_from_edges({}, 2);
    DiffusionState st = DiffusionState::from_b({1.0, 0.0});
    diffuse_once(st, 0, 1.0, zero);
    CHECK(st.f == DenseVector{0.0, 0.0});
    CHECK(st.h == DenseVector{1.0, 0.0});
    CHECK(st.link_ops == 0);
}

TEST_CASE("diffuse_once: self-loop lands after the reset") {
    const CscMatrix loop = csc_from_edges(std::vector<Triplet>{{0, 0, 0.6}}, 1);
    DiffusionState st = DiffusionState::from_b({1.0});
    diffuse_once(st, 0, 1.0, loop);
    CHECK(st.f[0] == doctest::Approx(0.6));
    CHECK(st.h[0] == doctest::Approx(1.0));

    DiffusionState st2 = DiffusionState::from_b({1.0});
    diffuse_once(st2, 0, 0.5, loop);
    CHECK(st2.f[0] == doctest::Approx(0.5 + 0.5 * 0.6));
    CHECK(st2.h[0] == doctest::Approx(0.5));
}

TEST_CASE("diffuse_once: argument validation") {
    const CscMatrix chain = two_node_chain();
    DiffusionState st = DiffusionState::from_b({1.0, 1.0});
    CHECK_THROWS_AS(diffuse_once(st, 2, 1.0, chain), std::out_of_range);
    CHECK_THROWS_AS(diffuse_once(st, 0, 1.5, chain), std::invalid_argument);
    CHECK_THROWS_AS(diffuse_once(st, 0, -0.1, chain), std::invalid_argument);
}

TEST_CASE("fundamental equation holds through random diffusions and injections") {
    std::mt19937_64 rng(555);
    for (int trial = 0; trial < 10; ++trial) {
        const csint n = 2 + static_cast<csint>(rng() % 12);
        const CscMatrix m = random_substochastic(n, 0.9, rng);
        DiffusionState st = DiffusionState::from_b(random_vector(n, rng));
        std::uniform_int_distribution<csint> pick(0, n - 1);
        std::uniform_real_distribution<double> alpha(0.0, 1.0);
        for (int step = 0; step < 200; ++step) {
            if (step % 37 == 13) inject_fluid(st, random_vector(n, rng, -0.2, 0.2));
            diffuse_once(st, pick(rng), alpha(rng), m);
            CHECK(fundamental_residual(st, m) < 1e-12 * (1.0 + l1_norm(st.b)));
        }
    }
}

TEST_CASE("inject_fluid: zero injection and commutation") {
    const CscMatrix chain = two_node_chain();
    DiffusionState st = DiffusionState::from_b({1.0, 2.0});
    inject_fluid(st, {0.0, 0.0});
    CHECK(st.f == DenseVector{1.0, 2.0});
    CHECK(st.injected_total == DenseVector{0.0, 0.0});
    (void)chain;

    DiffusionState a = DiffusionState::from_b({1.0, 2.0});
    DiffusionState b = DiffusionState::from_b({1.0, 2.0});
    inject_fluid(a, {0.5, -0.25});
    inject_fluid(a, {-0.125, 2.0});
    inject_fluid(b, {-0.125, 2.0});
    inject_fluid(b, {0.5, -0.25});
    CHECK(a.f == b.f);
    CHECK(a.injected_total == b.injected_total);

    CHECK_THROWS_AS(inject_fluid(st, {1.0}), std::invalid_argument);
}

TEST_CASE("superposition: injecting g equals starting from b + g") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 8; ++trial) {
        const csint n = 2 + static_cast<csint>(rng() % 20);
        const CscMatrix m = random_substochastic(n, 0.85, rng);
        const DenseVector b = random_vector(n, rng, 0.0, 1.0);
        const DenseVector g = random_vector(n, rng, -0.3, 0.7);

        DiffusionState st = DiffusionState::from_b(b);
        inject_fluid(st, g);
        const Solution with_inject = run_from(m, std::move(st), Strategy::cyc(),
                                              DiffusionMode::All, 1e-12);
        DenseVector bg = b;
        for (std::size_t i = 0; i < bg.size(); ++i) bg[i] += g[i];
        const Solution direct = run(m, bg, Strategy::cyc(), DiffusionMode::All, 1e-12);
        REQUIRE(with_inject.converged);
        REQUIRE(direct.converged);
        CHECK(l1_diff(with_inject.h, direct.h) < 1e-10);
    }
}

TEST_CASE("next_index: examples") {
    const std::vector<csint> out{1, 1, 1};
    DiffusionState st = DiffusionState::from_b({0.2, 0.7, 0.1});
    Strategy max = Strategy::max();
    CHECK(next_index(st, max, DiffusionMode::All, out) == 1);

    DiffusionState st2 = DiffusionState::from_b({0.9, 0.4});
    Strategy cost = Strategy::cost();
    CHECK(next_index(st2, cost, DiffusionMode::All, {9, 1}) == 1);

    DiffusionState st3 = DiffusionState::from_b({-0.3, 0.5});
    Strategy max2 = Strategy::max();
    CHECK(next_index(st3, max2, DiffusionMode::NegativeOnly, out) == 0);

    // dangling node ranks first under COST
    DiffusionState st4 = DiffusionState::from_b({0.9, 0.001});
    Strategy cost2 = Strategy::cost();
    CHECK(next_index(st4, cost2, DiffusionMode::All, {3, 0}) == 1);

    // nothing eligible
    DiffusionState st5 = DiffusionState::from_b({0.0, 0.0, 0.0});
    Strategy cyc = Strategy::cyc();
    CHECK_FALSE(next_index(st5, cyc, DiffusionMode::All, out).has_value());
    DiffusionState st6 = DiffusionState::from_b({0.4, 0.2, 0.0});
    CHECK_FALSE(next_index(st6, cyc, DiffusionMode::NegativeOnly, out).has_value());

    // CYC returns the cursor position and advances, zero fluid or not
    DiffusionState st7 = DiffusionState::from_b({0.0, 0.4, 0.0});
    Strategy cyc2 = Strategy::cyc();
    CHECK(next_index(st7, cyc2, DiffusionMode::All, out) == 0);
    CHECK(next_index(st7, cyc2, DiffusionMode::All, out) == 1);
    CHECK(next_index(st7, cyc2, DiffusionMode::All, out) == 2);
    CHECK(next_index(st7, cyc2, DiffusionMode::All, out) == 0);
}

TEST_CASE("heap selector matches the linear-scan reference") {
    std::mt19937_64 rng(31337);
    for (StrategyKind kind : {StrategyKind::Max, StrategyKind::Cost}) {
        for (DiffusionMode mode :
             {DiffusionMode::All, DiffusionMode::NegativeOnly, DiffusionMode::PositiveOnly}) {
            const csint n = 24;
            const CscMatrix m = random_substochastic(n, 0.95, rng, 0.25);
            const std::vector<csint> out = out_degrees(m);
            DiffusionState st = DiffusionState::from_b(random_vector(n, rng));
            Strategy strat{kind, {}, 0};
            std::vector<csint> members(static_cast<std::size_t>(n));
            for (csint i = 0; i < n; ++i) members[static_cast<std::size_t>(i)] = i;
            NodeSelector sel(strat, mode, members, out);
            sel.reset(st.f);
            for (int step = 0; step < 300; ++step) {
                Strategy scan_strat{kind, {}, 0};
                const auto want = next_index(st, scan_strat, mode, out);
                const auto got = sel.pick(st.f);
                CHECK(got == want);
                if (!got) break;
                const DenseVector before = st.f;
                diffuse_once(st, *got, 1.0, m);
                for (csint t : touched_by(m, *got)) {
                    sel.on_fluid_update(t, before[static_cast<std::size_t>(t)],
                                        st.f[static_cast<std::size_t>(t)]);
                }
            }
        }
    }
}

TEST_CASE("run: two-node chain solves to (2,2) under every fair strategy") {
    const CscMatrix chain = two_node_chain();
    for (const Strategy& s : {Strategy::cyc(), Strategy::max(), Strategy::cost(),
                              Strategy::explicit_seq({1, 0})}) {
        const Solution sol = run(chain, {1.0, 1.0}, s, DiffusionMode::All, 1e-12);
        REQUIRE(sol.converged);
        CHECK(std::abs(sol.h[0] - 2.0) < 1e-10);
        CHECK(std::abs(sol.h[1] - 2.0) < 1e-10);
    }
}

TEST_CASE("run: b = 0 converges immediately") {
    const Solution sol = run(two_node_chain(), {0.0, 0.0}, Strategy::max(), DiffusionMode::All);
    CHECK(sol.converged);
    CHECK(sol.diffusion_count == 0);
    CHECK(sol.h == DenseVector{0.0, 0.0});
}

TEST_CASE("run: strategies agree with each other and the direct solve (128 nodes)") {
    std::mt19937_64 rng(2);
    const CscMatrix m = random_substochastic(128, 0.85, rng, 0.1);
    const DenseVector b(128, 0.15 / 128.0);
    const DenseVector oracle = direct_solve(m, b);
    const double eps = 1e-11;
    std::vector<DenseVector> sols;
    for (const Strategy& s : {Strategy::cyc(), Strategy::max(), Strategy::cost()}) {
        const Solution sol = run(m, b, s, DiffusionMode::All, eps);
        REQUIRE(sol.converged);
        CHECK(l1_diff(sol.h, oracle) < 1e-8);
        sols.push_back(sol.h);
    }
    CHECK(l1_diff(sols[0], sols[1]) < 2 * eps);
    CHECK(l1_diff(sols[0], sols[2]) < 2 * eps);
    CHECK(l1_diff(sols[1], sols[2]) < 2 * eps);
}

TEST_CASE("run: explicit sequences must be fair") {
    const CscMatrix chain = two_node_chain();
    CHECK_THROWS_AS(run(chain, {1.0, 1.0}, Strategy::explicit_seq({0, 0}), DiffusionMode::All),
                    std::invalid_argument);
    CHECK_THROWS_AS(run(chain, {1.0, 1.0}, Strategy::explicit_seq({}), DiffusionMode::All),
                    std::invalid_argument);
}

TEST_CASE("run: budget exhaustion reports a usable partial result") {
    std::mt19937_64 rng(5);
    const CscMatrix m = random_substochastic(40, 0.99, rng);
    const DenseVector b(40, 1.0);
    const Solution sol = run(m, b, Strategy::cyc(), DiffusionMode::All, 1e-14, 200);
    CHECK_FALSE(sol.converged);
    CHECK(sol.status == SolveStatus::BudgetExhausted);
    CHECK(sol.link_ops >= 200);
    CHECK(sol.residual_l1 > 0.0);
}

TEST_CASE("run: divergence diagnostic for spectral radius above one") {
    const CscMatrix grow = csc_from_edges(std::vector<Triplet>{{0, 0, 1.5}}, 1);
    const Solution sol = run(grow, {1.0}, Strategy::cyc(), DiffusionMode::All, 1e-9);
    CHECK_FALSE(sol.converged);
    CHECK(sol.status == SolveStatus::Diverged);
}

TEST_CASE("run: sign-starved mode stalls instead of spinning") {
    const CscMatrix chain = two_node_chain();
    const Solution sol = run(chain, {1.0, 1.0}, Strategy::cyc(), DiffusionMode::NegativeOnly);
    CHECK_FALSE(sol.converged);
    CHECK(sol.status == SolveStatus::Stalled);
}

TEST_CASE("run: residual history is sampled every n diffusions") {
    std::mt19937_64 rng(6);
    const CscMatrix m = random_substochastic(16, 0.7, rng);
    const Solution sol = run(m, DenseVector(16, 1.0), Strategy::cyc(), DiffusionMode::All, 1e-10);
    REQUIRE(sol.converged);
    REQUIRE(sol.residual_history.size() >= 3);
    for (std::size_t i = 1; i + 1 < sol.residual_history.size(); ++i) {
        CHECK(sol.residual_history[i].diffusions % 16 == 0);
        CHECK(sol.residual_history[i].residual <= sol.residual_history[i - 1].residual + 1e-12);
    }
}

TEST_CASE("rho1_seed") {
    const CscMatrix eye = csc_from_edges(std::vector<Triplet>{{0, 0, 1.0}, {1, 1, 1.0}}, 2);
    CHECK(l1_norm(rho1_seed(eye)) == 0.0);

    const CscMatrix cyc2 = csc_from_edges(std::vector<Triplet>{{1, 0, 1.0}, {0, 1, 1.0}}, 2);
    CHECK(l1_norm(rho1_seed(cyc2)) == 0.0);

    // 3-cycle with a shortcut: mixed signs, zero total
    const CscMatrix tri = csc_from_edges(
        std::vector<Triplet>{{1, 0, 0.5}, {2, 0, 0.5}, {2, 1, 1.0}, {0, 2, 1.0}}, 3);
    const DenseVector seed = rho1_seed(tri);
    CHECK(std::abs(sigma_v(seed, DenseVector(3, 1.0))) < 1e-15);
    bool has_pos = false, has_neg = false;
    for (double v : seed) {
        has_pos = has_pos || v > 0.0;
        has_neg = has_neg || v < 0.0;
    }
    CHECK(has_pos);
    CHECK(has_neg);
}

TEST_CASE("eigenvector_rho1: two-cycle permutation needs no diffusion") {
    const CscMatrix cyc2 = csc_from_edges(std::vector<Triplet>{{1, 0, 1.0}, {0, 1, 1.0}}, 2);
    const Solution sol = eigenvector_rho1(cyc2);
    CHECK(sol.converged);
    CHECK(sol.h == DenseVector{0.0, 0.0});
}

TEST_CASE("eigenvector_rho1: irreducible case matches the dense eigen-oracle") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 5; ++trial) {
        const csint n = 3 + static_cast<csint>(rng() % 10);
        const CscMatrix p = random_irreducible_stochastic(n, rng);
        const Solution sol = eigenvector_rho1(p, 1e-12);
        REQUIRE(sol.converged);
        DenseVector y(static_cast<std::size_t>(n));
        const double inv = 1.0 / static_cast<double>(n);
        for (csint i = 0; i < n; ++i) {
            y[static_cast<std::size_t>(i)] = sol.h[static_cast<std::size_t>(i)] + inv;
        }
        const DenseVector py = spmv(p, y);
        CHECK(l1_diff(py, y) < 1e-10);
        for (double v : y) CHECK(v >= -1e-12);
        DenseVector oracle = eigen_perron_right(p);
        const double mx = *std::max_element(oracle.begin(), oracle.end());
        for (double& v : oracle) v *= inv / mx;
        CHECK(l1_diff(y, oracle) < 1e-8);
        CHECK(*std::max_element(y.begin(), y.end()) == doctest::Approx(inv).epsilon(1e-9));
    }
}

TEST_CASE("eigenvector_rho1: feeder node drains to zero, cycle keeps 1/N") {
    // 2-cycle {0,1} fed by node 2 (2 -> 0); the left eigenvector is uniform
    const CscMatrix m = csc_from_edges(
        std::vector<Triplet>{{1, 0, 1.0}, {0, 1, 1.0}, {0, 2, 1.0}}, 3);
    const Solution sol = eigenvector_rho1(m, 1e-12);
    REQUIRE(sol.converged);
    const double third = 1.0 / 3.0;
    CHECK(sol.h[0] == doctest::Approx(0.0));
    CHECK(sol.h[1] == doctest::Approx(0.0));
    CHECK(sol.h[2] == doctest::Approx(-third));
}

TEST_CASE("eigenvector_rho1: rejects rho != 1") {
    CHECK_THROWS_AS(eigenvector_rho1(two_node_chain()), std::invalid_argument);
}

TEST_CASE("negative-only diffusion on rho < 1 from P e - e drains to -e") {
    std::mt19937_64 rng(9);
    const csint n = 12;
    const CscMatrix m = random_substochastic(n, 0.85, rng);
    const Solution sol = run(m, rho1_seed(m), Strategy::max(), DiffusionMode::NegativeOnly,
                             1e-12);
    REQUIRE(sol.converged);
    const double inv = 1.0 / static_cast<double>(n);
    for (csint i = 0; i < n; ++i) {
        CHECK(sol.h[static_cast<std::size_t>(i)] == doctest::Approx(-inv).epsilon(1e-7));
    }
}

TEST_CASE("snake graph: mixed-sign schedule oscillates, negative-only converges") {
    const CscMatrix snake = snake_graph();
    const Strategy osc = Strategy::explicit_seq({1, 2, 0, 3, 4});

    const Solution stuck = run(snake, rho1_seed(snake), osc, DiffusionMode::All, 1e-6, 20000);
    CHECK_FALSE(stuck.converged);
    CHECK(stuck.residual_l1 == doctest::Approx(0.4).epsilon(1e-9));

    const Solution ok = run(snake, rho1_seed(snake), osc, DiffusionMode::NegativeOnly, 1e-6,
                            20000);
    CHECK(ok.converged);
    CHECK(ok.diffusion_count < 100);
    const double fifth = 0.2;
    DenseVector y(5);
    for (int i = 0; i < 5; ++i) {
        y[static_cast<std::size_t>(i)] = ok.h[static_cast<std::size_t>(i)] + fifth;
    }
    CHECK(*std::max_element(y.begin(), y.end()) == doctest::Approx(fifth));
}

TEST_CASE("pagerank_system") {
    const CscMatrix lonely = csc_from_edges({}, 1);
    const auto [m1, b1] = pagerank_system(lonely, 0.85);
    CHECK(m1.nnz() == 0);
    CHECK(b1[0] == doctest::Approx(0.15));
    const Solution s1 = run(m1, b1, Strategy::cyc(), DiffusionMode::All, 1e-12);
    CHECK(s1.h[0] == doctest::Approx(0.15));

    const CscMatrix cyc2 = csc_from_edges(std::vector<Triplet>{{1, 0, 1.0}, {0, 1, 1.0}}, 2);
    const auto [m2, b2] = pagerank_system(cyc2, 0.85);
    const Solution s2 = run(m2, b2, Strategy::max(), DiffusionMode::All, 1e-12);
    REQUIRE(s2.converged);
    CHECK(s2.h[0] == doctest::Approx(s2.h[1]).epsilon(1e-10));

    const CscMatrix tri = csc_from_edges(
        std::vector<Triplet>{{1, 0, 1.0}, {2, 1, 1.0}, {0, 2, 1.0}}, 3);
    const auto [m3, b3] = pagerank_system(tri, 0.85);
    const Solution s3 = run(m3, b3, Strategy::cost(), DiffusionMode::All, 1e-12);
    REQUIRE(s3.converged);
    CHECK(l1_diff(s3.h, direct_solve(m3, b3)) < 1e-10);

    const CscMatrix dang = csc_from_edges(std::vector<Triplet>{{1, 0, 1.0}}, 2);
    const auto [m4, b4] = pagerank_system(dang, 0.85);
    CHECK(out_degrees(m4)[1] == 0);
    (void)b4;

    CHECK_THROWS_AS(pagerank_system(cyc2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(pagerank_system(cyc2, 1.0), std::invalid_argument);
}

TEST_CASE("|F|_v never increases under diffusion (any signs, any sequence)") {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 25; ++trial) {
        const csint n = 2 + static_cast<csint>(rng() % 14);
        // column-stochastic: ones is an exact left Perron vector
        const CscMatrix m = random_irreducible_stochastic(n, rng);
        const DenseVector ones(static_cast<std::size_t>(n), 1.0);
        DiffusionState st = DiffusionState::from_b(random_vector(n, rng));
        std::uniform_int_distribution<csint> pick(0, n - 1);
        double prev = weighted_l1(st.f, ones);
        const double slack = 1e-13 * (1.0 + prev);  // rounding allowance only
        for (int step = 0; step < 400; ++step) {
            diffuse_once(st, pick(rng), 1.0, m);
            const double cur = weighted_l1(st.f, ones);
            CHECK(cur <= prev + slack);
            prev = cur;
        }
    }
}

TEST_CASE("sigma_v is conserved by diffusion when rho = 1 and sigma(b) = 0") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const csint n = 3 + static_cast<csint>(rng() % 10);
        const CscMatrix m = random_irreducible_stochastic(n, rng);
        const DenseVector ones(static_cast<std::size_t>(n), 1.0);
        DiffusionState st = DiffusionState::from_b(rho1_seed(m));
        std::uniform_int_distribution<csint> pick(0, n - 1);
        for (int step = 1; step <= 300; ++step) {
            diffuse_once(st, pick(rng), 1.0, m);
            CHECK(std::abs(sigma_v(st.f, ones)) <= 1e-12 * (1.0 + step));
        }
    }
}

TEST_CASE("partial diffusion ordering: larger alphas dominate") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const csint n = 2 + static_cast<csint>(rng() % 10);
        const CscMatrix m = random_substochastic(n, 0.95, rng);
        const DenseVector b = random_vector(n, rng, 0.0, 1.0);  // b >= 0
        DiffusionState lo = DiffusionState::from_b(b);
        DiffusionState hi = DiffusionState::from_b(b);
        std::uniform_int_distribution<csint> pick(0, n - 1);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const DenseVector ones(static_cast<std::size_t>(n), 1.0);
        for (int step = 0; step < 250; ++step) {
            const csint i = pick(rng);
            const double a = unif(rng);
            const double a2 = a + (1.0 - a) * unif(rng);  // a <= a2 <= 1
            diffuse_once(lo, i, a, m);
            diffuse_once(hi, i, a2, m);
            CHECK(sigma_v(hi.f, ones) <= sigma_v(lo.f, ones) + 1e-12);
            for (csint t = 0; t < n; ++t) {
                const auto ut = static_cast<std::size_t>(t);
                CHECK(hi.h[ut] >= lo.h[ut] - 1e-12);
                CHECK(hi.h[ut] + hi.f[ut] >= lo.h[ut] + lo.f[ut] - 1e-12);
            }
        }
    }
}

TEST_CASE("monotonicity: dominating cumulative injections dominate the history") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const csint n = 2 + static_cast<csint>(rng() % 10);
        const CscMatrix m = random_substochastic(n, 0.9, rng);
        const DenseVector b = random_vector(n, rng, 0.0, 1.0);
        DiffusionState small = DiffusionState::from_b(b);
        DiffusionState big = DiffusionState::from_b(b);
        std::uniform_int_distribution<csint> pick(0, n - 1);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int step = 0; step < 200; ++step) {
            if (step % 9 == 4) {
                // G'_n = G_n + extra with extra >= 0: cumulative dominance
                const DenseVector g = random_vector(n, rng, 0.0, 0.1);
                DenseVector g2 = g;
                for (double& v : g2) v += 0.05 * unif(rng);
                inject_fluid(small, g);
                inject_fluid(big, g2);
            }
            const csint i = pick(rng);
            diffuse_once(small, i, 1.0, m);
            diffuse_once(big, i, 1.0, m);
            for (csint t = 0; t < n; ++t) {
                CHECK(big.h[static_cast<std::size_t>(t)] >=
                      small.h[static_cast<std::size_t>(t)] - 1e-12);
            }
        }
    }
}

TEST_CASE("monotonicity: delivering the same mass earlier dominates") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        const csint n = 3 + static_cast<csint>(rng() % 8);
        const CscMatrix m = random_substochastic(n, 0.9, rng);
        const DenseVector b = random_vector(n, rng, 0.0, 1.0);
        const DenseVector g = random_vector(n, rng, 0.0, 0.5);
        DiffusionState late = DiffusionState::from_b(b);
        DiffusionState early = DiffusionState::from_b(b);
        inject_fluid(early, g);
        std::uniform_int_distribution<csint> pick(0, n - 1);
        for (int step = 0; step < 120; ++step) {
            if (step == 40) inject_fluid(late, g);  // same total, later
            const csint i = pick(rng);
            diffuse_once(late, i, 1.0, m);
            diffuse_once(early, i, 1.0, m);
            for (csint t = 0; t < n; ++t) {
                CHECK(early.h[static_cast<std::size_t>(t)] >=
                      late.h[static_cast<std::size_t>(t)] - 1e-12);
            }
        }
    }
}

TEST_CASE("history grows monotonically and is capped by the direct solution") {
    std::mt19937_64 rng(14);
    const csint n = 20;
    const CscMatrix m = random_substochastic(n, 0.9, rng);
    const DenseVector b = random_vector(n, rng, 0.0, 1.0);
    const DenseVector cap = direct_solve(m, b);
    DiffusionState st = DiffusionState::from_b(b);
    Strategy strat = Strategy::cyc();
    const std::vector<csint> out = out_degrees(m);
    DenseVector prev_h = st.h;
    for (int step = 0; step < 2000; ++step) {
        const auto i = next_index(st, strat, DiffusionMode::All, out);
        if (!i) break;
        diffuse_once(st, *i, 1.0, m);
        for (csint t = 0; t < n; ++t) {
            const auto ut = static_cast<std::size_t>(t);
            CHECK(st.h[ut] >= prev_h[ut]);
            CHECK(st.h[ut] <= cap[ut] + 1e-9);
        }
        prev_h = st.h;
    }
}

TEST_CASE("power iteration embeds into partial diffusions") {
    // cyclic schedule whose alphas diffuse exactly (P^k x0)_i turns F at
    // cycle boundaries into the power iterates
    std::mt19937_64 rng(15);
    const csint n = 7;
    const CscMatrix m = random_substochastic(n, 0.9, rng);
    const std::vector<double> dense = to_dense(m);
    const DenseVector x = random_vector(n, rng, 0.1, 1.0);

    DiffusionState st = DiffusionState::from_b(x);
    DenseVector target = x;
    for (int cycle = 0; cycle < 6; ++cycle) {
        for (csint i = 0; i < n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            const double phi = st.f[ui];
            const double want = target[ui];
            double alpha = 0.0;
            if (phi != 0.0) alpha = std::min(1.0, want / phi);
            diffuse_once(st, i, alpha, m);
        }
        target = dense_matvec(dense, target);
        CHECK(l1_diff(st.f, target) < 1e-12 * (1.0 + l1_norm(target)));
    }
}

TEST_CASE("convergence rate bounds: d^(l/N) for CYC and MAX, d^(l/L) for COST") {
    std::mt19937_64 rng(16);
    const csint n = 32;
    const double d = 0.8;
    const CscMatrix m = random_substochastic(n, d, rng, 0.2);
    const DenseVector b(static_cast<std::size_t>(n), 1.0 / static_cast<double>(n));
    const std::vector<csint> out = out_degrees(m);
    std::int64_t big_l = 0;
    for (csint o : out) big_l += o;
    const double f0 = l1_norm(b);

    for (StrategyKind kind : {StrategyKind::Cyc, StrategyKind::Max, StrategyKind::Cost}) {
        DiffusionState st = DiffusionState::from_b(b);
        Strategy strat{kind, {}, 0};
        while (l1_norm(st.f) > 1e-9 * f0) {
            const auto i = next_index(st, strat, DiffusionMode::All, out);
            REQUIRE(i.has_value());
            diffuse_once(st, *i, 1.0, m);
            const double lhs = l1_norm(st.f);
            if (kind == StrategyKind::Cost) {
                const auto win = st.link_ops / big_l;
                CHECK(lhs <= std::pow(d, static_cast<double>(win)) * f0);
            } else {
                const auto win = st.diffusion_count / n;
                CHECK(lhs <= std::pow(d, static_cast<double>(win)) * f0);
            }
        }
    }
}
