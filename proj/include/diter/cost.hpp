#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "diter/sparse.hpp"

// Cycle accounting on the hypothetical parallel computer used by the
// benchmark: local memory is free, a shared-memory read costs t_r cycles, a
// shared write t_w, a multiplication t_m, an addition t_a. The ledger
// records logical operation counts per processor; cycles() converts the sum
// to work cycles (makespan for multi-processor runs comes from the
// simulator clock, not from this sum).

namespace diter {

struct CostParams {
    std::int64_t t_r = 4;
    std::int64_t t_w = 2;
    std::int64_t t_m = 1;
    std::int64_t t_a = 1;
};

struct CostCounts {
    std::int64_t reads = 0;
    std::int64_t writes = 0;
    std::int64_t muls = 0;
    std::int64_t adds = 0;

    CostCounts& operator+=(const CostCounts& o) {
        reads += o.reads;
        writes += o.writes;
        muls += o.muls;
        adds += o.adds;
        return *this;
    }
};

struct CostLedger {
    explicit CostLedger(csint pids = 1)
        : per_pid(static_cast<std::size_t>(pids < 1 ? 1 : pids)) {}

    std::vector<CostCounts> per_pid;
    CostCounts total;

    csint pids() const { return static_cast<csint>(per_pid.size()); }
};

void charge(CostLedger& ledger, csint pid, std::int64_t reads, std::int64_t writes,
            std::int64_t muls, std::int64_t adds);

std::int64_t cycles(const CostCounts& counts, const CostParams& p);
std::int64_t cycles(const CostLedger& ledger, const CostParams& p);

// CSV dump, one row per (method, K) ledger:
//   method,K,reads,writes,muls,adds,makespan_cycles
void write_ledger_csv_header(std::ostream& os);
void write_ledger_csv_row(std::ostream& os, const char* method, csint k,
                          const CostLedger& ledger, std::int64_t makespan_cycles);

}  // namespace diter
