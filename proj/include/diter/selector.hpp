#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "diter/sparse.hpp"

// Node-selection machinery for the diffusion loop. MAX and COST need an
// argmax over scores that changes on the O(out_i) coordinates touched per
// diffusion, so selection is backed by an indexed binary max-heap with a
// deterministic tie-break (lowest index wins). A linear-scan reference of
// the same policy lives in engine.hpp (next_index) for verification.

namespace diter {

enum class DiffusionMode { All, NegativeOnly, PositiveOnly };

enum class StrategyKind { Cyc, Max, Cost, Explicit };

struct Strategy {
    StrategyKind kind = StrategyKind::Cyc;
    std::vector<csint> sequence;  // Explicit only
    std::size_t cursor = 0;       // Cyc / Explicit position

    static Strategy cyc() { return Strategy{StrategyKind::Cyc, {}, 0}; }
    static Strategy max() { return Strategy{StrategyKind::Max, {}, 0}; }
    static Strategy cost() { return Strategy{StrategyKind::Cost, {}, 0}; }
    static Strategy explicit_seq(std::vector<csint> seq) {
        return Strategy{StrategyKind::Explicit, std::move(seq), 0};
    }
};

// Max-heap over a fixed index set with updatable scores. Order: higher
// score first, ties to the lower index, so top() is exactly the argmax a
// left-to-right linear scan would find.
class IndexedMaxHeap {
public:
    IndexedMaxHeap() = default;

    void build(std::vector<double> scores) {
        score_ = std::move(scores);
        const csint n = static_cast<csint>(score_.size());
        heap_.resize(static_cast<std::size_t>(n));
        pos_.resize(static_cast<std::size_t>(n));
        for (csint i = 0; i < n; ++i) heap_[static_cast<std::size_t>(i)] = i;
        for (csint i = 0; i < n; ++i) pos_[static_cast<std::size_t>(i)] = i;
        for (csint i = n / 2 - 1; i >= 0; --i) sift_down(i);
    }

    bool empty() const { return heap_.empty(); }

    csint top() const { return heap_[0]; }
    double top_score() const { return score_[static_cast<std::size_t>(heap_[0])]; }

    double score(csint i) const { return score_[static_cast<std::size_t>(i)]; }

    void update(csint i, double s) {
        const double old = score_[static_cast<std::size_t>(i)];
        if (s == old) return;
        score_[static_cast<std::size_t>(i)] = s;
        const csint p = pos_[static_cast<std::size_t>(i)];
        if (s > old) {
            sift_up(p);
        } else {
            sift_down(p);
        }
    }

private:
    // true when the node at slot a outranks the node at slot b
    bool above(csint a, csint b) const {
        const csint ia = heap_[static_cast<std::size_t>(a)];
        const csint ib = heap_[static_cast<std::size_t>(b)];
        const double sa = score_[static_cast<std::size_t>(ia)];
        const double sb = score_[static_cast<std::size_t>(ib)];
        if (sa != sb) return sa > sb;
        return ia < ib;
    }

    void swap_slots(csint a, csint b) {
        std::swap(heap_[static_cast<std::size_t>(a)], heap_[static_cast<std::size_t>(b)]);
        pos_[static_cast<std::size_t>(heap_[static_cast<std::size_t>(a)])] = a;
        pos_[static_cast<std::size_t>(heap_[static_cast<std::size_t>(b)])] = b;
    }

    void sift_up(csint p) {
        while (p > 0) {
            const csint parent = (p - 1) / 2;
            if (!above(p, parent)) break;
            swap_slots(p, parent);
            p = parent;
        }
    }

    void sift_down(csint p) {
        const csint n = static_cast<csint>(heap_.size());
        while (true) {
            csint best = p;
            const csint l = 2 * p + 1;
            const csint r = 2 * p + 2;
            if (l < n && above(l, best)) best = l;
            if (r < n && above(r, best)) best = r;
            if (best == p) break;
            swap_slots(p, best);
            p = best;
        }
    }

    std::vector<csint> heap_;  // slot -> index
    std::vector<csint> pos_;   // index -> slot
    std::vector<double> score_;
};

// Stateful selector over an index set (the whole matrix, or one partition
// block). pick() returns the next candidate per the strategy; for CYC and
// EXPLICIT the candidate may be ineligible under the mode (select-then-test),
// in which case the caller skips the diffusion. For MAX/COST the candidate
// is always eligible with |f| > 0, or nullopt when none exists.
class NodeSelector {
public:
    NodeSelector() = default;

    NodeSelector(Strategy strategy, DiffusionMode mode,
                 std::vector<csint> members, const std::vector<csint>& out_degrees)
        : strategy_(std::move(strategy)), mode_(mode), members_(std::move(members)) {
        out_ = &out_degrees;
        member_of_.assign(out_degrees.size(), false);
        for (csint i : members_) member_of_[static_cast<std::size_t>(i)] = true;
        if (strategy_.kind == StrategyKind::Explicit && strategy_.sequence.empty()) {
            strategy_.sequence = members_;  // degenerate: cycle over members
        }
    }

    // Rebuilds eligibility counters and heap from the current fluid vector.
    void reset(const DenseVector& f) {
        neg_ = pos_ = 0;
        for (csint i : members_) {
            const double fi = f[static_cast<std::size_t>(i)];
            if (fi > 0.0) ++pos_;
            if (fi < 0.0) ++neg_;
        }
        if (uses_heap()) {
            std::vector<double> scores(member_of_.size(), 0.0);
            for (csint i : members_) {
                scores[static_cast<std::size_t>(i)] = score(i, f[static_cast<std::size_t>(i)]);
            }
            heap_.build(std::move(scores));
        }
    }

    // Notify a fluid change on coordinate i (no-op for non-members).
    void on_fluid_update(csint i, double old_value, double new_value) {
        if (!member_of_[static_cast<std::size_t>(i)]) return;
        if (old_value > 0.0) --pos_;
        if (old_value < 0.0) --neg_;
        if (new_value > 0.0) ++pos_;
        if (new_value < 0.0) ++neg_;
        if (uses_heap()) heap_.update(i, score(i, new_value));
    }

    std::optional<csint> pick(const DenseVector& f) {
        if (!eligible_exists()) return std::nullopt;
        switch (strategy_.kind) {
            case StrategyKind::Cyc: {
                const csint i = members_[strategy_.cursor];
                strategy_.cursor = (strategy_.cursor + 1) % members_.size();
                return i;
            }
            case StrategyKind::Explicit: {
                const csint i = strategy_.sequence[strategy_.cursor];
                strategy_.cursor = (strategy_.cursor + 1) % strategy_.sequence.size();
                return i;
            }
            case StrategyKind::Max:
            case StrategyKind::Cost: {
                if (heap_.empty() || !(heap_.top_score() > 0.0)) return std::nullopt;
                (void)f;
                return heap_.top();
            }
        }
        return std::nullopt;
    }

    // True when i may be diffused under the mode.
    bool eligible(csint i, const DenseVector& f) const {
        const double fi = f[static_cast<std::size_t>(i)];
        switch (mode_) {
            case DiffusionMode::All: return true;
            case DiffusionMode::NegativeOnly: return fi < 0.0;
            case DiffusionMode::PositiveOnly: return fi > 0.0;
        }
        return false;
    }

    DiffusionMode mode() const { return mode_; }
    const Strategy& strategy() const { return strategy_; }

private:
    bool uses_heap() const {
        return strategy_.kind == StrategyKind::Max || strategy_.kind == StrategyKind::Cost;
    }

    bool eligible_exists() const {
        switch (mode_) {
            case DiffusionMode::All: return pos_ + neg_ > 0;
            case DiffusionMode::NegativeOnly: return neg_ > 0;
            case DiffusionMode::PositiveOnly: return pos_ > 0;
        }
        return false;
    }

    double score(csint i, double fi) const {
        switch (mode_) {
            case DiffusionMode::All: break;
            case DiffusionMode::NegativeOnly:
                if (!(fi < 0.0)) return 0.0;
                break;
            case DiffusionMode::PositiveOnly:
                if (!(fi > 0.0)) return 0.0;
                break;
        }
        const double a = fi < 0.0 ? -fi : fi;
        if (strategy_.kind == StrategyKind::Cost) {
            const csint d = (*out_)[static_cast<std::size_t>(i)];
            if (d == 0) {
                // dangling fluid costs nothing to absorb: rank it first
                return a > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
            }
            return a / static_cast<double>(d);
        }
        return a;
    }

    Strategy strategy_;
    DiffusionMode mode_ = DiffusionMode::All;
    std::vector<csint> members_;
    std::vector<bool> member_of_;
    const std::vector<csint>* out_ = nullptr;
    IndexedMaxHeap heap_;
    csint neg_ = 0;
    csint pos_ = 0;
};

}  // namespace diter
