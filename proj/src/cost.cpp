#include "diter/cost.hpp"

#include <ostream>
#include <stdexcept>

namespace diter {

void charge(CostLedger& ledger, csint pid, std::int64_t reads, std::int64_t writes,
            std::int64_t muls, std::int64_t adds) {
    if (pid < 0 || pid >= ledger.pids()) {
        throw std::out_of_range("charge: pid out of range");
    }
    if (reads < 0 || writes < 0 || muls < 0 || adds < 0) {
        throw std::invalid_argument("charge: negative counts");
    }
    CostCounts c{reads, writes, muls, adds};
    ledger.per_pid[static_cast<std::size_t>(pid)] += c;
    ledger.total += c;
}

std::int64_t cycles(const CostCounts& c, const CostParams& p) {
    return c.reads * p.t_r + c.writes * p.t_w + c.muls * p.t_m + c.adds * p.t_a;
}

std::int64_t cycles(const CostLedger& ledger, const CostParams& p) {
    return cycles(ledger.total, p);
}

void write_ledger_csv_header(std::ostream& os) {
    os << "method,K,reads,writes,muls,adds,makespan_cycles\n";
}

void write_ledger_csv_row(std::ostream& os, const char* method, csint k,
                          const CostLedger& ledger, std::int64_t makespan_cycles) {
    os << method << ',' << k << ',' << ledger.total.reads << ',' << ledger.total.writes
       << ',' << ledger.total.muls << ',' << ledger.total.adds << ',' << makespan_cycles
       << '\n';
}

}  // namespace diter
