#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "diter/cost.hpp"
#include "diter/engine.hpp"
#include "diter/reference.hpp"
#include "diter/selector.hpp"
#include "diter/sparse.hpp"

// Deterministic discrete-event simulation of K processors running the
// diffusion (or a power-iteration baseline) on a fixed partition. Each
// processor diffuses its own block; fluid meant for foreign nodes
// accumulates in an outbox and is shipped as cumulated messages with a
// bounded, seeded delay. Simulated time is integer cycles under the cost
// model of cost.hpp; every run is replayable from (config, seed).

namespace diter {

struct Partition {
    std::vector<csint> owner;                // node -> pid
    std::vector<std::vector<csint>> blocks;  // pid -> sorted node list

    csint k() const { return static_cast<csint>(blocks.size()); }
    bool consistent() const;
};

// Contiguous blocks of size ceil(n/k) or floor(n/k).
Partition partition_uniform(csint n, csint k);

struct FluidMessage {
    csint src = 0;
    csint dst = 0;
    std::vector<std::pair<csint, double>> fluid;  // sorted by coordinate
    std::int64_t send_clock = 0;
    std::int64_t deliver_clock = 0;

    double mass() const;
};

struct RebalanceConfig {
    bool enabled = false;
    double threshold = 0.5;          // trigger: (fastest-slowest)/fastest above this
    double transfer_fraction = 0.1;  // share of the slowest block to move
    std::int64_t window = 0;         // observation window in diffusion events; 0 = 4n
};

struct SimConfig {
    csint k = 1;
    std::int64_t delay_bound = 0;      // cycles
    std::int64_t exchange_period = 0;  // diffusions between sends; 0 = block size
    std::uint64_t seed = 0;
    CostParams cost;
    double epsilon = 1e-9;
    std::int64_t max_events = std::int64_t{1} << 62;
    std::vector<double> speed;  // per-pid cycle multiplier; empty = all ones
    RebalanceConfig rebalance;
    // Scripted delays consumed round-robin per message; overrides the RNG.
    std::vector<std::int64_t> delay_schedule;
};

struct PidState {
    csint pid = 0;
    DiffusionState st;  // full-length vectors; only owned coordinates are live
    std::unordered_map<csint, double> outbox;  // foreign coordinate -> fluid
    std::int64_t local_clock = 0;
    std::int64_t busy_cycles = 0;  // work only, idle waits excluded
    std::int64_t last_send_clock = 0;
    std::int64_t diffusions_since_send = 0;
    NodeSelector selector;
    double abs_f = 0.0;        // maintained sum_i |f_i|
    double outbox_mass = 0.0;  // maintained sum |outbox|
};

struct ExchangeEvent {
    std::int64_t event = 0;
    std::int64_t clock = 0;
    csint src = 0;
    csint dst = 0;
    double mass = 0.0;
    std::int64_t send_clock = 0;
    std::int64_t deliver_clock = 0;
};

struct ClockSample {
    std::int64_t clock = 0;
    double residual = 0.0;
};

struct SimResult {
    DenseVector h;              // concatenated by current owner
    double residual = 0.0;      // |F| + outbox + in-flight at stop
    std::int64_t makespan = 0;  // max local clock
    CostLedger ledger;
    std::vector<ExchangeEvent> exchange_log;
    std::vector<ClockSample> residual_history;
    bool converged = false;
    SolveStatus status = SolveStatus::BudgetExhausted;
    std::int64_t total_diffusions = 0;
    csint rebalance_transfers = 0;
    Partition final_partition;
    std::int64_t sweeps = 0;  // baselines only
};

class Simulator {
public:
    Simulator(const CscMatrix& m, DenseVector b, Partition partition,
              Strategy strategy, DiffusionMode mode, SimConfig cfg);

    // One selection / diffusion attempt; false when the block is idle.
    bool step_pid(csint pid);

    // Ships the accumulated outbox, one message per destination processor.
    std::vector<FluidMessage> flush_outbox(csint pid);

    // Injects a message into its destination block; coordinates the
    // destination no longer owns are folded back into its outbox.
    void deliver(csint pid, const FluidMessage& msg);

    SimResult run_to_convergence();

    // Violation of the global conservation identity
    //   sum_p h + sum_p f + outboxes + in-flight = P h_global + b.
    double conservation_residual() const;

    double global_residual_mass() const;
    DenseVector gather_h() const;
    DenseVector gather_f() const;
    const PidState& pid_state(csint p) const { return pids_[static_cast<std::size_t>(p)]; }
    const Partition& partition() const { return part_; }

private:
    friend SimResult simulate(const CscMatrix&, const DenseVector&, const Partition&,
                              Strategy, DiffusionMode, const SimConfig&);

    std::int64_t draw_delay();
    void maybe_rebalance();
    double exact_residual_mass() const;
    void refresh_pid_exact(csint p);

    const CscMatrix& m_;
    DenseVector b_;
    Partition part_;
    SimConfig cfg_;
    Strategy strategy_;
    DiffusionMode mode_;
    std::vector<csint> out_;
    std::vector<PidState> pids_;
    std::vector<FluidMessage> in_flight_;
    double inflight_mass_ = 0.0;
    std::uint64_t rng_state_ = 0;
    std::size_t delay_cursor_ = 0;
    std::int64_t message_seq_ = 0;
    std::int64_t global_diffusions_ = 0;
    std::vector<ExchangeEvent> exchange_log_;
    CostLedger ledger_;
    csint transfers_ = 0;
    // rebalance observation state
    std::vector<double> level_accum_;        // per-epoch running sum of residual levels
    std::vector<std::int64_t> level_samples_;
    std::vector<double> epoch_avg_prev_;     // smoothed level at the previous epoch
    std::vector<std::int64_t> busy_prev_;
    std::int64_t next_rebalance_check_ = 0;
    csint pending_slowest_ = -1;
    int pending_count_ = 0;
};

// The diffusion scheme on K processors; h matches the sequential run.
SimResult simulate(const CscMatrix& m, const DenseVector& b, const Partition& partition,
                   Strategy strategy, DiffusionMode mode, const SimConfig& cfg);

// Power-iteration baselines under the same cost model. x0 is the sweep
// starting vector (zeros for the affine problem, e for eigenvector runs).
SimResult simulate_baseline(BaselineKind kind, const CscMatrix& m, const DenseVector& b,
                            const DenseVector& x0, const Partition& partition,
                            const SimConfig& cfg);

}  // namespace diter
