#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "diter/cost.hpp"
#include "diter/gen.hpp"
#include "diter/sim.hpp"
#include "diter/sparse.hpp"

// Cycle-cost benchmark grid: every (method, K) cell solves the same system
// on the hypothetical parallel computer and reports the makespan. Speeds
// are normalized by the sPI-R K=1 makespan so the curves are directly
// comparable across methods.

namespace diter {

enum class BenchProblem {
    PageRank,  // X = d P_s X + (1-d) e, solved from zero
    Rho1,      // eigenvector of P_s via negative diffusion from P_s e - e
};

struct BenchConfig {
    std::string graph_path;  // empty: generate a uniform random graph
    csint n = 128;
    csint links = 1652;
    std::uint64_t seed = 1;
    double d = 0.85;
    double epsilon = 1e-8;
    BenchProblem problem = BenchProblem::PageRank;
    std::vector<csint> k_list = {1, 2, 4, 8, 16, 32, 64, 128};
    std::vector<std::string> methods = {"sPI-R", "aPI-R", "sPI-C", "sPI-Cr", "DI+COST"};
    CostParams cost;
    std::int64_t exchange_period = 0;  // 0: block size
    std::int64_t delay_bound = 0;
    std::int64_t max_events = std::int64_t{1} << 40;
};

struct BenchRow {
    std::string method;
    csint k = 0;
    std::int64_t makespan = 0;
    double normalized_speed = 0.0;
    CostLedger ledger;
    bool converged = false;
};

struct BenchReport {
    std::vector<BenchRow> rows;          // measured cells
    std::vector<BenchRow> ideal_rows;    // Ideal-PI / Ideal-DI (y = x lines)
    DegreeStats degrees_directed;
    DegreeStats degrees_undirected;
    std::int64_t spi_r_k1_makespan = 0;
    double di_measured_rate = 0.0;   // |F| decay per L = nnz link-ops, measured
    double di_heuristic_rate = 0.0;  // d / (2 - d)
    std::vector<std::string> notes;  // accounting calibration flags
};

BenchReport run_bench(const BenchConfig& cfg);

// rows: method,K,makespan_cycles,normalized_speed (ideal rows appended)
void write_bench_csv(std::ostream& os, const BenchReport& report);
// per-cell ledgers: method,K,reads,writes,muls,adds,makespan_cycles
void write_bench_ledger_csv(std::ostream& os, const BenchReport& report);

}  // namespace diter
