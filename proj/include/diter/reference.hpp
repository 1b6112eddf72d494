#pragma once

#include "diter/sparse.hpp"

// Baseline iteration schemes and a dense direct-solve oracle. The sPI-C and
// sPI-Cr baselines share power_sweep's numerics with sPI-R: each variant is
// numerically one synchronized sweep X <- P X + B and they differ only in
// how the cost model charges them (see cost.hpp / sim.hpp).

namespace diter {

enum class BaselineKind {
    SpiR,   // synchronized power iteration per row (Jacobi)
    SpiC,   // synchronized power iteration per column
    SpiCr,  // column variant exploiting homogeneous column weights
    ApiR,   // asynchronous row iteration, realized in the simulator
};

const char* baseline_name(BaselineKind k);

// Solves (I - P) x = b by dense Gaussian elimination with partial pivoting.
// Meant as a verification oracle: n is capped at 2000. Throws on singular
// systems.
DenseVector direct_solve(const CscMatrix& m, const DenseVector& b);

// One synchronized sweep: returns P x + b.
DenseVector power_sweep(const CscMatrix& m, const DenseVector& x, const DenseVector& b);

}  // namespace diter
