#pragma once

#include "stm/rational.hpp"

#include <vector>

namespace stm {

// A constraint is  sum(coeffs[v] * x_v) + constant  REL  0.
enum class Rel { eq, ge, gt };

struct LinearConstraint {
    std::vector<Rational> coeffs;
    Rational constant;
    Rel rel = Rel::ge;
};

struct LinearSystem {
    int num_vars = 0;
    std::vector<LinearConstraint> constraints;

    void add(std::vector<Rational> coeffs, Rational constant, Rel rel);
};

struct LinearResult {
    bool feasible = false;
    std::vector<Rational> witness; // num_vars values when feasible
};

/// Exact feasibility with strict inequalities. Equalities are eliminated by
/// substitution, the open system is decided by Fourier-Motzkin elimination
/// (a derived constraint is strict iff any parent is strict), and a rational
/// witness is extracted by interval back-substitution. The witness is checked
/// against the original system before it is returned.
LinearResult solve_linear(const LinearSystem& sys);

} // namespace stm
