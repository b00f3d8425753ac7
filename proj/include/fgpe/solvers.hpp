#pragma once

#include "fgpe/grid.hpp"

#include <functional>

namespace fgpe {

// y = A x; buffers are preallocated by the caller and never aliased
using LinearOp = std::function<void(const std::vector<cplx>&, std::vector<cplx>&)>;

struct SolveOptions {
    double rel_tol = 1e-11;
    int max_iterations = 2000;
};

struct SolveStats {
    int iterations = 0;
    bool converged = false;
    double residual = 0.0; // relative to ||b||
};

// preconditioned BiCGStab (van der Vorst); x holds the initial guess on entry.
// precondition may be null (identity). Breakdown reports converged = false.
SolveStats bicgstab(const LinearOp& apply, const std::vector<cplx>& rhs,
                    std::vector<cplx>& x, const LinearOp& precondition = {},
                    const SolveOptions& opts = {});

} // namespace fgpe
