#include "diter/sim.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace diter {

namespace {

// splitmix64: tiny, platform-independent stream for the delay draws
std::uint64_t next_u64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::int64_t rounded_cycles(std::int64_t cost, double speed) {
    if (speed == 1.0) return cost;
    return static_cast<std::int64_t>(std::llround(static_cast<double>(cost) * speed));
}

}  // namespace

bool Partition::consistent() const {
    const csint n = static_cast<csint>(owner.size());
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (csint p = 0; p < k(); ++p) {
        for (csint v : blocks[static_cast<std::size_t>(p)]) {
            if (v < 0 || v >= n) return false;
            if (seen[static_cast<std::size_t>(v)]) return false;
            seen[static_cast<std::size_t>(v)] = true;
            if (owner[static_cast<std::size_t>(v)] != p) return false;
        }
    }
    for (bool s : seen) {
        if (!s) return false;
    }
    return true;
}

Partition partition_uniform(csint n, csint k) {
    if (k < 1 || k > n) throw std::invalid_argument("partition_uniform: k out of range");
    Partition part;
    part.owner.assign(static_cast<std::size_t>(n), 0);
    part.blocks.assign(static_cast<std::size_t>(k), {});
    const csint base = n / k;
    const csint extra = n % k;  // first `extra` blocks get one more node
    csint v = 0;
    for (csint p = 0; p < k; ++p) {
        const csint size = base + (p < extra ? 1 : 0);
        for (csint i = 0; i < size; ++i, ++v) {
            part.owner[static_cast<std::size_t>(v)] = p;
            part.blocks[static_cast<std::size_t>(p)].push_back(v);
        }
    }
    return part;
}

double FluidMessage::mass() const {
    double s = 0.0;
    for (const auto& [c, v] : fluid) s += std::abs(v);
    return s;
}

Simulator::Simulator(const CscMatrix& m, DenseVector b, Partition partition,
                     Strategy strategy, DiffusionMode mode, SimConfig cfg)
    : m_(m),
      b_(std::move(b)),
      part_(std::move(partition)),
      cfg_(std::move(cfg)),
      strategy_(std::move(strategy)),
      mode_(mode),
      out_(out_degrees(m)),
      ledger_(part_.k()) {
    const csint n = m_.n;
    if (static_cast<csint>(b_.size()) != n) {
        throw std::invalid_argument("simulate: dimension mismatch");
    }
    if (!part_.consistent() || static_cast<csint>(part_.owner.size()) != n) {
        throw std::invalid_argument("simulate: inconsistent partition");
    }
    const csint k = part_.k();
    if (cfg_.k != 0 && cfg_.k != k) cfg_.k = k;
    if (cfg_.speed.empty()) cfg_.speed.assign(static_cast<std::size_t>(k), 1.0);
    if (static_cast<csint>(cfg_.speed.size()) != k) {
        throw std::invalid_argument("simulate: speed multiplier count != k");
    }
    if (cfg_.exchange_period <= 0) {
        cfg_.exchange_period = std::max<std::int64_t>(1, (n + k - 1) / k);
    }
    if (cfg_.rebalance.window <= 0) cfg_.rebalance.window = 4 * n;
    rng_state_ = cfg_.seed * 0x9e3779b97f4a7c15ULL + 0x243f6a8885a308d3ULL;

    pids_.resize(static_cast<std::size_t>(k));
    for (csint p = 0; p < k; ++p) {
        PidState& pid = pids_[static_cast<std::size_t>(p)];
        pid.pid = p;
        DenseVector masked(static_cast<std::size_t>(n), 0.0);
        for (csint v : part_.blocks[static_cast<std::size_t>(p)]) {
            masked[static_cast<std::size_t>(v)] = b_[static_cast<std::size_t>(v)];
        }
        pid.st = DiffusionState::from_b(std::move(masked));
        pid.selector = NodeSelector(strategy_, mode_, part_.blocks[static_cast<std::size_t>(p)], out_);
        pid.selector.reset(pid.st.f);
        pid.abs_f = l1_norm(pid.st.f);
    }
    level_accum_.assign(static_cast<std::size_t>(k), 0.0);
    level_samples_.assign(static_cast<std::size_t>(k), 0);
    epoch_avg_prev_.assign(static_cast<std::size_t>(k), -1.0);
    busy_prev_.assign(static_cast<std::size_t>(k), 0);
    next_rebalance_check_ = cfg_.rebalance.window;
}

std::int64_t Simulator::draw_delay() {
    if (!cfg_.delay_schedule.empty()) {
        const std::int64_t d = cfg_.delay_schedule[delay_cursor_ % cfg_.delay_schedule.size()];
        ++delay_cursor_;
        return std::min(std::max<std::int64_t>(0, d), cfg_.delay_bound);
    }
    if (cfg_.delay_bound <= 0) return 0;
    return static_cast<std::int64_t>(next_u64(rng_state_) %
                                     static_cast<std::uint64_t>(cfg_.delay_bound + 1));
}

bool Simulator::step_pid(csint p) {
    PidState& pid = pids_[static_cast<std::size_t>(p)];
    const std::optional<csint> cand = pid.selector.pick(pid.st.f);
    if (!cand) return false;
    if (!pid.selector.eligible(*cand, pid.st.f)) {
        return true;  // select-then-test: selection advanced, no diffusion
    }
    const csint* owner = part_.owner.data();
    const auto eff = detail::diffuse_core(
        pid.st.f, pid.st.h, *cand, 1.0, m_,
        [owner, p](csint r) { return owner[static_cast<std::size_t>(r)] == p; },
        [&pid](csint r, double oldv, double newv) { pid.selector.on_fluid_update(r, oldv, newv); },
        [&pid](csint r, double add) {
            double& slot = pid.outbox[r];
            const double old = slot;
            slot = old + add;
            pid.outbox_mass += std::abs(slot) - std::abs(old);
        });
    pid.abs_f += eff.absf_delta;
    if (eff.phi != 0.0) {
        const csint deg = out_[static_cast<std::size_t>(*cand)];
        pid.st.link_ops += deg;
        charge(ledger_, p, 0, 1, deg, deg);
        const std::int64_t cost = rounded_cycles(
            deg * (cfg_.cost.t_m + cfg_.cost.t_a) + cfg_.cost.t_w,
            cfg_.speed[static_cast<std::size_t>(p)]);
        pid.local_clock += cost;
        pid.busy_cycles += cost;
    }
    pid.st.diffusion_count += 1;
    pid.diffusions_since_send += 1;
    ++global_diffusions_;
    if (cfg_.rebalance.enabled) {
        level_accum_[static_cast<std::size_t>(p)] += pid.abs_f + pid.outbox_mass;
        level_samples_[static_cast<std::size_t>(p)] += 1;
    }
    if (m_.n > 0 && pid.st.diffusion_count % m_.n == 0) refresh_pid_exact(p);
    return true;
}

void Simulator::refresh_pid_exact(csint p) {
    PidState& pid = pids_[static_cast<std::size_t>(p)];
    pid.abs_f = l1_norm(pid.st.f);
}

std::vector<FluidMessage> Simulator::flush_outbox(csint p) {
    PidState& pid = pids_[static_cast<std::size_t>(p)];
    pid.diffusions_since_send = 0;
    if (pid.outbox.empty()) return {};

    // group by current owner, coordinates sorted for determinism
    std::vector<std::pair<csint, double>> entries(pid.outbox.begin(), pid.outbox.end());
    std::sort(entries.begin(), entries.end());
    pid.outbox.clear();
    pid.outbox_mass = 0.0;

    std::vector<FluidMessage> messages;
    for (const auto& [coord, value] : entries) {
        if (value == 0.0) continue;
        const csint dst = part_.owner[static_cast<std::size_t>(coord)];
        if (dst == p) {
            // ownership changed since accumulation: keep it local
            const auto uc = static_cast<std::size_t>(coord);
            const double old = pid.st.f[uc];
            const double now = old + value;
            pid.st.f[uc] = now;
            pid.st.injected_total[uc] += value;
            pid.abs_f += std::abs(now) - std::abs(old);
            pid.selector.on_fluid_update(coord, old, now);
            continue;
        }
        if (messages.empty() || messages.back().dst != dst) {
            FluidMessage msg;
            msg.src = p;
            msg.dst = dst;
            messages.push_back(std::move(msg));
        }
        messages.back().fluid.emplace_back(coord, value);
    }
    // entries are sorted by coordinate, not by owner: merge fragments per dst
    std::sort(messages.begin(), messages.end(),
              [](const FluidMessage& a, const FluidMessage& b) { return a.dst < b.dst; });
    std::vector<FluidMessage> merged;
    for (auto& msg : messages) {
        if (!merged.empty() && merged.back().dst == msg.dst) {
            auto& dstv = merged.back().fluid;
            dstv.insert(dstv.end(), msg.fluid.begin(), msg.fluid.end());
        } else {
            merged.push_back(std::move(msg));
        }
    }
    for (auto& msg : merged) {
        std::sort(msg.fluid.begin(), msg.fluid.end());
        const auto coords = static_cast<std::int64_t>(msg.fluid.size());
        charge(ledger_, p, coords, coords, 0, coords);
        const std::int64_t ship = rounded_cycles(
            coords * (cfg_.cost.t_r + cfg_.cost.t_a + cfg_.cost.t_w),
            cfg_.speed[static_cast<std::size_t>(p)]);
        pid.local_clock += ship;
        pid.busy_cycles += ship;
    }
    for (auto& msg : merged) {
        msg.send_clock = pid.local_clock;
        msg.deliver_clock = msg.send_clock + draw_delay();
        inflight_mass_ += msg.mass();
        exchange_log_.push_back({message_seq_++, pid.local_clock, msg.src, msg.dst,
                                 msg.mass(), msg.send_clock, msg.deliver_clock});
    }
    pid.last_send_clock = pid.local_clock;
    return merged;
}

void Simulator::deliver(csint p, const FluidMessage& msg) {
    if (msg.dst != p) throw std::logic_error("deliver: misrouted message");
    PidState& pid = pids_[static_cast<std::size_t>(p)];
    for (const auto& [coord, value] : msg.fluid) {
        const auto uc = static_cast<std::size_t>(coord);
        if (part_.owner[uc] == p) {
            const double old = pid.st.f[uc];
            const double now = old + value;
            pid.st.f[uc] = now;
            pid.st.injected_total[uc] += value;
            pid.abs_f += std::abs(now) - std::abs(old);
            pid.selector.on_fluid_update(coord, old, now);
        } else {
            // node migrated away: forward with the next flush
            double& slot = pid.outbox[coord];
            const double old = slot;
            slot = old + value;
            pid.outbox_mass += std::abs(slot) - std::abs(old);
        }
    }
}

double Simulator::global_residual_mass() const {
    double s = 0.0;
    for (const PidState& pid : pids_) s += pid.abs_f + pid.outbox_mass;
    return s + inflight_mass_;
}

double Simulator::exact_residual_mass() const {
    double s = 0.0;
    for (const PidState& pid : pids_) {
        s += l1_norm(pid.st.f);
        for (const auto& [c, v] : pid.outbox) s += std::abs(v);
    }
    for (const FluidMessage& msg : in_flight_) s += msg.mass();
    return s;
}

DenseVector Simulator::gather_h() const {
    DenseVector h(static_cast<std::size_t>(m_.n), 0.0);
    for (const PidState& pid : pids_) {
        for (csint v : part_.blocks[static_cast<std::size_t>(pid.pid)]) {
            h[static_cast<std::size_t>(v)] = pid.st.h[static_cast<std::size_t>(v)];
        }
    }
    return h;
}

DenseVector Simulator::gather_f() const {
    DenseVector f(static_cast<std::size_t>(m_.n), 0.0);
    for (const PidState& pid : pids_) {
        for (csint v : part_.blocks[static_cast<std::size_t>(pid.pid)]) {
            f[static_cast<std::size_t>(v)] = pid.st.f[static_cast<std::size_t>(v)];
        }
    }
    return f;
}

double Simulator::conservation_residual() const {
    const DenseVector h = gather_h();
    const DenseVector ph = spmv(m_, h);
    DenseVector total(static_cast<std::size_t>(m_.n), 0.0);
    for (const PidState& pid : pids_) {
        for (std::size_t i = 0; i < total.size(); ++i) {
            total[i] += pid.st.h[i] + pid.st.f[i];
        }
        for (const auto& [c, v] : pid.outbox) total[static_cast<std::size_t>(c)] += v;
    }
    for (const FluidMessage& msg : in_flight_) {
        for (const auto& [c, v] : msg.fluid) total[static_cast<std::size_t>(c)] += v;
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < total.size(); ++i) {
        worst = std::max(worst, std::abs(total[i] - ph[i] - b_[i]));
    }
    return worst;
}

void Simulator::maybe_rebalance() {
    if (!cfg_.rebalance.enabled) return;
    if (global_diffusions_ < next_rebalance_check_) return;
    next_rebalance_check_ += cfg_.rebalance.window;

    const csint k = part_.k();
    // keep the metric away from the endgame where residuals hit zero
    const double floor_resid = 100.0 * cfg_.epsilon * std::max(1.0, l1_norm(b_));

    // smoothed residual level over the closing epoch; the average flattens
    // the delivery sawtooth a starved processor shows between messages
    std::vector<double> avg(static_cast<std::size_t>(k), -1.0);
    for (csint p = 0; p < k; ++p) {
        const auto up = static_cast<std::size_t>(p);
        if (level_samples_[up] > 0) {
            avg[up] = level_accum_[up] / static_cast<double>(level_samples_[up]);
        } else {
            avg[up] = epoch_avg_prev_[up];  // no work this epoch: level unchanged
        }
        level_accum_[up] = 0.0;
        level_samples_[up] = 0;
    }

    bool measurable = true;
    std::vector<double> speed(static_cast<std::size_t>(k), 0.0);
    for (csint p = 0; p < k; ++p) {
        const auto up = static_cast<std::size_t>(p);
        const PidState& pid = pids_[up];
        const double prev = epoch_avg_prev_[up];
        const double cur = avg[up];
        const std::int64_t dbusy = pid.busy_cycles - busy_prev_[up];
        epoch_avg_prev_[up] = cur;
        busy_prev_[up] = pid.busy_cycles;
        if (prev <= floor_resid || cur <= floor_resid || dbusy <= 0) {
            measurable = false;
            continue;
        }
        const double s = (std::log10(prev) - std::log10(cur)) / static_cast<double>(dbusy);
        if (!(s > 0.0)) measurable = false;
        speed[up] = s;
    }
    if (std::getenv("DITER_DEBUG_REBAL")) {
        std::fprintf(stderr, "epoch@%lld measurable=%d speeds:", (long long)global_diffusions_,
                     (int)measurable);
        for (csint p = 0; p < k; ++p) std::fprintf(stderr, " %.3e", speed[(std::size_t)p]);
        std::fprintf(stderr, " avgs:");
        for (csint p = 0; p < k; ++p) std::fprintf(stderr, " %.3e", avg[(std::size_t)p]);
        std::fprintf(stderr, "\n");
    }
    if (!measurable) {
        pending_slowest_ = -1;
        pending_count_ = 0;
        return;
    }

    csint fastest = 0, slowest = 0;
    for (csint p = 1; p < k; ++p) {
        if (speed[static_cast<std::size_t>(p)] > speed[static_cast<std::size_t>(fastest)]) fastest = p;
        if (speed[static_cast<std::size_t>(p)] < speed[static_cast<std::size_t>(slowest)]) slowest = p;
    }
    const double fast_v = speed[static_cast<std::size_t>(fastest)];
    const double slow_v = speed[static_cast<std::size_t>(slowest)];
    if (fastest == slowest || (fast_v - slow_v) / fast_v <= cfg_.rebalance.threshold) {
        pending_slowest_ = -1;
        pending_count_ = 0;
        return;
    }
    // act only when the same processor trails at consecutive evaluations
    if (pending_slowest_ != slowest) {
        pending_slowest_ = slowest;
        pending_count_ = 1;
        return;
    }
    if (++pending_count_ < 2) return;
    pending_slowest_ = -1;
    pending_count_ = 0;

    auto& src_block = part_.blocks[static_cast<std::size_t>(slowest)];
    const csint count = static_cast<csint>(
        std::ceil(cfg_.rebalance.transfer_fraction * static_cast<double>(src_block.size())));
    if (count < 1 || static_cast<csint>(src_block.size()) - count < 1) return;

    PidState& src = pids_[static_cast<std::size_t>(slowest)];
    PidState& dst = pids_[static_cast<std::size_t>(fastest)];

    // largest current fluid first, ties to the lowest index
    std::vector<csint> order = src_block;
    std::sort(order.begin(), order.end(), [&](csint a, csint b) {
        const double fa = std::abs(src.st.f[static_cast<std::size_t>(a)]);
        const double fb = std::abs(src.st.f[static_cast<std::size_t>(b)]);
        if (fa != fb) return fa > fb;
        return a < b;
    });
    order.resize(static_cast<std::size_t>(count));

    for (csint v : order) {
        const auto uv = static_cast<std::size_t>(v);
        dst.st.f[uv] = src.st.f[uv];
        dst.st.h[uv] = src.st.h[uv];
        dst.st.b[uv] = src.st.b[uv];
        dst.st.injected_total[uv] = src.st.injected_total[uv];
        src.st.f[uv] = 0.0;
        src.st.h[uv] = 0.0;
        src.st.b[uv] = 0.0;
        src.st.injected_total[uv] = 0.0;
        part_.owner[uv] = fastest;
        src_block.erase(std::find(src_block.begin(), src_block.end(), v));
        auto& dst_block = part_.blocks[static_cast<std::size_t>(fastest)];
        dst_block.insert(std::upper_bound(dst_block.begin(), dst_block.end(), v), v);
        // fluid the new owner had queued for v comes home
        auto it = dst.outbox.find(v);
        if (it != dst.outbox.end()) {
            dst.outbox_mass -= std::abs(it->second);
            dst.st.f[uv] += it->second;
            dst.st.injected_total[uv] += it->second;
            dst.outbox.erase(it);
        }
    }
    src.selector = NodeSelector(strategy_, mode_, src_block, out_);
    src.selector.reset(src.st.f);
    dst.selector = NodeSelector(strategy_, mode_, part_.blocks[static_cast<std::size_t>(fastest)], out_);
    dst.selector.reset(dst.st.f);
    refresh_pid_exact(slowest);
    refresh_pid_exact(fastest);

    // unity cost per node exchanged, on both sides
    src.local_clock += count;
    dst.local_clock += count;
    src.busy_cycles += count;
    dst.busy_cycles += count;
    ++transfers_;
    // measurements restart from the new partition
    for (csint p = 0; p < k; ++p) {
        const auto up = static_cast<std::size_t>(p);
        epoch_avg_prev_[up] = -1.0;
        level_accum_[up] = 0.0;
        level_samples_[up] = 0;
        busy_prev_[up] = pids_[up].busy_cycles;
    }
}

SimResult Simulator::run_to_convergence() {
    const csint n = m_.n;
    const csint k = part_.k();
    const double b_mass = l1_norm(b_);
    const double threshold = cfg_.epsilon * std::max(1.0, b_mass);
    const double base_mass = std::max(b_mass, 1e-300);

    SimResult res;
    res.ledger = CostLedger(k);
    res.status = SolveStatus::BudgetExhausted;

    double global = global_residual_mass();
    res.residual_history.push_back({0, global});
    std::int64_t next_sample = n;
    std::int64_t events = 0;
    std::int64_t idle_streak = 0;

    while (true) {
        if (global <= threshold) {
            global = exact_residual_mass();
            for (csint p = 0; p < k; ++p) refresh_pid_exact(p);
            if (global <= threshold) {
                res.status = SolveStatus::Converged;
                break;
            }
        }
        if (events >= cfg_.max_events) {
            res.status = SolveStatus::BudgetExhausted;
            break;
        }
        if (global > 10.0 * base_mass) {
            res.status = SolveStatus::Diverged;
            break;
        }

        // smallest local clock acts next; ties to the lowest pid
        csint p = 0;
        for (csint q = 1; q < k; ++q) {
            if (pids_[static_cast<std::size_t>(q)].local_clock <
                pids_[static_cast<std::size_t>(p)].local_clock) {
                p = q;
            }
        }
        PidState& pid = pids_[static_cast<std::size_t>(p)];
        ++events;

        // deliveries due at this processor's clock
        for (std::size_t i = 0; i < in_flight_.size();) {
            if (in_flight_[i].dst == p && in_flight_[i].deliver_clock <= pid.local_clock) {
                inflight_mass_ -= in_flight_[i].mass();
                deliver(p, in_flight_[i]);
                in_flight_.erase(in_flight_.begin() + static_cast<std::ptrdiff_t>(i));
            } else {
                ++i;
            }
        }

        maybe_rebalance();

        if (pid.diffusions_since_send >= cfg_.exchange_period) {
            if (!pid.outbox.empty()) {
                auto msgs = flush_outbox(p);
                for (auto& msg : msgs) in_flight_.push_back(std::move(msg));
                global = global_residual_mass();
                idle_streak = 0;
                continue;
            }
            pid.diffusions_since_send = 0;
        }

        const std::int64_t before = global_diffusions_;
        const bool acted = step_pid(p);
        if (acted) {
            idle_streak = 0;
            global = global_residual_mass();
            if (global_diffusions_ != before && global_diffusions_ >= next_sample) {
                std::int64_t makespan = 0;
                for (const PidState& q : pids_) makespan = std::max(makespan, q.local_clock);
                res.residual_history.push_back({makespan, global});
                next_sample += n;
            }
            continue;
        }

        // idle: ship what we have, then wait for a delivery or the others
        if (!pid.outbox.empty()) {
            auto msgs = flush_outbox(p);
            for (auto& msg : msgs) in_flight_.push_back(std::move(msg));
            global = global_residual_mass();
            idle_streak = 0;
            continue;
        }
        std::int64_t pending = std::numeric_limits<std::int64_t>::max();
        for (const FluidMessage& msg : in_flight_) {
            if (msg.dst == p) pending = std::min(pending, msg.deliver_clock);
        }
        std::int64_t others = std::numeric_limits<std::int64_t>::max();
        for (csint q = 0; q < k; ++q) {
            if (q != p) {
                others = std::min(others, pids_[static_cast<std::size_t>(q)].local_clock + 1);
            }
        }
        const std::int64_t target = std::min(pending, others);
        if (target == std::numeric_limits<std::int64_t>::max()) {
            res.status = SolveStatus::Stalled;
            break;
        }
        pid.local_clock = std::max(pid.local_clock + 1, target);
        if (++idle_streak > 4 * k && in_flight_.empty()) {
            res.status = SolveStatus::Stalled;
            break;
        }
    }

    res.residual = exact_residual_mass();
    res.converged = res.status == SolveStatus::Converged;
    res.h = gather_h();
    std::int64_t makespan = 0;
    for (const PidState& pid : pids_) makespan = std::max(makespan, pid.local_clock);
    res.makespan = makespan;
    res.residual_history.push_back({makespan, res.residual});
    res.ledger = ledger_;
    res.exchange_log = exchange_log_;
    std::int64_t total = 0;
    for (const PidState& pid : pids_) total += pid.st.diffusion_count;
    res.total_diffusions = total;
    res.rebalance_transfers = transfers_;
    res.final_partition = part_;
    return res;
}

SimResult simulate(const CscMatrix& m, const DenseVector& b, const Partition& partition,
                   Strategy strategy, DiffusionMode mode, const SimConfig& cfg) {
    Simulator sim(m, b, partition, std::move(strategy), mode, cfg);
    return sim.run_to_convergence();
}

namespace {

struct RowStructure {
    CscMatrix transpose;            // column i = row i of m
    std::vector<csint> row_nnz;
    std::vector<std::int64_t> remote;  // per row, entries owned by another pid
};

RowStructure build_rows(const CscMatrix& m, const Partition& part) {
    RowStructure rs;
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(m.nnz()));
    for (csint j = 0; j < m.n; ++j) {
        for (csint k = m.col_ptr[j]; k < m.col_ptr[j + 1]; ++k) {
            trips.push_back({j, m.row_idx[k], m.values[k]});
        }
    }
    rs.transpose = csc_from_edges(trips, m.n);
    rs.row_nnz = out_degrees(rs.transpose);
    rs.remote.assign(static_cast<std::size_t>(m.n), 0);
    for (csint i = 0; i < m.n; ++i) {
        const csint p = part.owner[static_cast<std::size_t>(i)];
        const ColumnView row = rs.transpose.column(i);
        for (csint k = 0; k < row.size(); ++k) {
            const csint j = row.rows[static_cast<std::size_t>(k)];
            if (part.owner[static_cast<std::size_t>(j)] != p) {
                ++rs.remote[static_cast<std::size_t>(i)];
            }
        }
    }
    return rs;
}

}  // namespace

SimResult simulate_baseline(BaselineKind kind, const CscMatrix& m, const DenseVector& b,
                            const DenseVector& x0, const Partition& part,
                            const SimConfig& cfg_in) {
    SimConfig cfg = cfg_in;
    const csint n = m.n;
    const csint k = part.k();
    if (static_cast<csint>(b.size()) != n || static_cast<csint>(x0.size()) != n) {
        throw std::invalid_argument("simulate_baseline: dimension mismatch");
    }
    if (cfg.speed.empty()) cfg.speed.assign(static_cast<std::size_t>(k), 1.0);
    const double threshold = cfg.epsilon * std::max(1.0, l1_norm(b));

    SimResult res;
    res.ledger = CostLedger(k);
    res.final_partition = part;

    const RowStructure rs = build_rows(m, part);
    const CostParams& cp = cfg.cost;

    if (kind == BaselineKind::ApiR) {
        // asynchronous row updates against the freshest shared vector
        DenseVector x = x0;
        std::vector<std::int64_t> clock(static_cast<std::size_t>(k), 0);
        std::vector<std::size_t> cursor(static_cast<std::size_t>(k), 0);
        std::int64_t updates = 0;
        res.status = SolveStatus::BudgetExhausted;
        {
            DenseVector r = power_sweep(m, x, b);
            double resid = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) resid += std::abs(r[i] - x[i]);
            res.residual = resid;
            res.residual_history.push_back({0, resid});
            if (resid <= threshold) res.status = SolveStatus::Converged;
        }
        while (res.status != SolveStatus::Converged && updates < cfg.max_events) {
            csint p = 0;
            for (csint q = 1; q < k; ++q) {
                if (clock[static_cast<std::size_t>(q)] < clock[static_cast<std::size_t>(p)]) p = q;
            }
            const auto& block = part.blocks[static_cast<std::size_t>(p)];
            if (block.empty()) {
                clock[static_cast<std::size_t>(p)] += 1;
                continue;
            }
            const csint i = block[cursor[static_cast<std::size_t>(p)] % block.size()];
            cursor[static_cast<std::size_t>(p)] += 1;
            const ColumnView row = rs.transpose.column(i);
            double s = b[static_cast<std::size_t>(i)];
            for (csint t = 0; t < row.size(); ++t) {
                s += row.values[static_cast<std::size_t>(t)] *
                     x[static_cast<std::size_t>(row.rows[static_cast<std::size_t>(t)])];
            }
            x[static_cast<std::size_t>(i)] = s;
            const csint nr = rs.row_nnz[static_cast<std::size_t>(i)];
            const std::int64_t reads = rs.remote[static_cast<std::size_t>(i)];
            charge(res.ledger, p, reads, 1, nr, nr);
            clock[static_cast<std::size_t>(p)] += rounded_cycles(
                reads * cp.t_r + cp.t_w + nr * (cp.t_m + cp.t_a),
                cfg.speed[static_cast<std::size_t>(p)]);
            ++updates;
            if (updates % n == 0) {
                DenseVector r = power_sweep(m, x, b);
                double resid = 0.0;
                for (std::size_t ii = 0; ii < r.size(); ++ii) resid += std::abs(r[ii] - x[ii]);
                res.residual = resid;
                std::int64_t mk = 0;
                for (std::int64_t c : clock) mk = std::max(mk, c);
                res.residual_history.push_back({mk, resid});
                if (resid <= threshold) res.status = SolveStatus::Converged;
            }
        }
        res.converged = res.status == SolveStatus::Converged;
        res.h = std::move(x);
        std::int64_t mk = 0;
        for (std::int64_t c : clock) mk = std::max(mk, c);
        res.makespan = mk;
        res.total_diffusions = updates;
        return res;
    }

    // synchronized sweeps (sPI-R, sPI-C, sPI-Cr); constant per-sweep cost
    std::vector<std::int64_t> sweep_cost(static_cast<std::size_t>(k), 0);
    std::vector<CostCounts> sweep_counts(static_cast<std::size_t>(k));
    for (csint p = 0; p < k; ++p) {
        CostCounts& c = sweep_counts[static_cast<std::size_t>(p)];
        if (kind == BaselineKind::SpiR) {
            for (csint i : part.blocks[static_cast<std::size_t>(p)]) {
                const csint nr = rs.row_nnz[static_cast<std::size_t>(i)];
                // single-processor runs keep the iterate in shared memory
                c.reads += k == 1 ? nr : rs.remote[static_cast<std::size_t>(i)];
                c.muls += nr;
                c.adds += nr;
                c.writes += 1;
            }
        } else {
            std::vector<bool> foreign(static_cast<std::size_t>(n), false);
            for (csint j : part.blocks[static_cast<std::size_t>(p)]) {
                const ColumnView col = m.column(j);
                const csint nc = col.size();
                c.muls += kind == BaselineKind::SpiCr ? (nc > 0 ? 1 : 0) : nc;
                c.adds += nc;
                for (csint t = 0; t < nc; ++t) {
                    const csint r = col.rows[static_cast<std::size_t>(t)];
                    if (part.owner[static_cast<std::size_t>(r)] != p) {
                        foreign[static_cast<std::size_t>(r)] = true;
                    }
                }
            }
            std::int64_t nf = 0;
            for (bool fbit : foreign) nf += fbit ? 1 : 0;
            // cumulated contributions: one read-add-write per foreign coordinate
            c.reads += nf;
            c.adds += nf;
            c.writes += nf;
        }
        sweep_cost[static_cast<std::size_t>(p)] =
            rounded_cycles(cycles(c, cp), cfg.speed[static_cast<std::size_t>(p)]);
    }
    const std::int64_t sweep_makespan =
        *std::max_element(sweep_cost.begin(), sweep_cost.end());

    DenseVector x = x0;
    res.status = SolveStatus::BudgetExhausted;
    std::int64_t sweeps = 0;
    double resid = 0.0;
    {
        DenseVector r = power_sweep(m, x, b);
        for (std::size_t i = 0; i < r.size(); ++i) resid += std::abs(r[i] - x[i]);
        res.residual_history.push_back({0, resid});
        if (resid <= threshold) res.status = SolveStatus::Converged;
    }
    while (res.status != SolveStatus::Converged && sweeps < cfg.max_events) {
        DenseVector xn = power_sweep(m, x, b);
        ++sweeps;
        for (csint p = 0; p < k; ++p) {
            const CostCounts& c = sweep_counts[static_cast<std::size_t>(p)];
            charge(res.ledger, p, c.reads, c.writes, c.muls, c.adds);
        }
        res.makespan += sweep_makespan;
        resid = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) resid += std::abs(xn[i] - x[i]);
        x = std::move(xn);
        res.residual_history.push_back({res.makespan, resid});
        if (resid <= threshold) res.status = SolveStatus::Converged;
    }
    res.converged = res.status == SolveStatus::Converged;
    res.residual = resid;
    res.h = std::move(x);
    res.sweeps = sweeps;
    res.total_diffusions = sweeps * n;
    return res;
}

}  // namespace diter
