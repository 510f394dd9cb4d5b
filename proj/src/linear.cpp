#include "stm/linear.hpp"

#include "stm/error.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace stm {

void LinearSystem::add(std::vector<Rational> coeffs, Rational constant, Rel rel) {
    if (static_cast<int>(coeffs.size()) != num_vars)
        throw Error(Errc::size_mismatch, "constraint arity mismatch");
    for (auto& c : coeffs) c.canonicalize();
    constant.canonicalize();
    constraints.push_back({std::move(coeffs), std::move(constant), rel});
}

namespace {

bool satisfied(const LinearConstraint& c, const std::vector<Rational>& x) {
    Rational v = c.constant;
    for (size_t i = 0; i < c.coeffs.size(); ++i)
        if (c.coeffs[i] != 0) v += c.coeffs[i] * x[i];
    switch (c.rel) {
    case Rel::eq: return v == 0;
    case Rel::ge: return v >= 0;
    case Rel::gt: return v > 0;
    }
    return false;
}

// constant-only row; true = keep going, false = infeasible
bool constant_row_ok(const LinearConstraint& c) {
    switch (c.rel) {
    case Rel::eq: return c.constant == 0;
    case Rel::ge: return c.constant >= 0;
    case Rel::gt: return c.constant > 0;
    }
    return false;
}

bool has_vars(const LinearConstraint& c) {
    for (const auto& q : c.coeffs)
        if (q != 0) return true;
    return false;
}

// scale so the first nonzero coefficient is +-1; key for deduplication
std::pair<std::vector<Rational>, Rational> canonical_key(const LinearConstraint& c) {
    Rational lead;
    for (const auto& q : c.coeffs)
        if (q != 0) {
            lead = abs(q);
            break;
        }
    std::vector<Rational> coeffs = c.coeffs;
    Rational constant = c.constant;
    if (lead != 0 && lead != 1) {
        for (auto& q : coeffs) q /= lead;
        constant /= lead;
    }
    return {std::move(coeffs), std::move(constant)};
}

struct Level {
    int var;
    std::vector<LinearConstraint> lowers; // coeff of var > 0
    std::vector<LinearConstraint> uppers; // coeff of var < 0
};

} // namespace

LinearResult solve_linear(const LinearSystem& sys) {
    const int n = sys.num_vars;
    std::vector<LinearConstraint> work;
    work.reserve(sys.constraints.size());
    for (const auto& c : sys.constraints) {
        if (static_cast<int>(c.coeffs.size()) != n)
            throw Error(Errc::size_mismatch, "constraint arity mismatch");
        if (!has_vars(c)) {
            if (!constant_row_ok(c)) return {};
            continue;
        }
        work.push_back(c);
    }

    // 1. eliminate equalities by substitution; remember (var, expression)
    struct Subst {
        int var;
        std::vector<Rational> coeffs; // x_var = sum coeffs*x + constant
        Rational constant;
    };
    std::vector<Subst> substitutions;
    for (;;) {
        int eq_idx = -1;
        for (size_t i = 0; i < work.size(); ++i)
            if (work[i].rel == Rel::eq) {
                eq_idx = static_cast<int>(i);
                break;
            }
        if (eq_idx < 0) break;
        LinearConstraint eq = work[eq_idx];
        work.erase(work.begin() + eq_idx);
        int pivot = -1;
        for (int v = 0; v < n; ++v)
            if (eq.coeffs[v] != 0) {
                pivot = v;
                break;
            }
        if (pivot < 0) {
            if (eq.constant != 0) return {};
            continue;
        }
        Subst s;
        s.var = pivot;
        s.coeffs.assign(n, Rational(0));
        Rational p = eq.coeffs[pivot];
        for (int v = 0; v < n; ++v)
            if (v != pivot) s.coeffs[v] = -eq.coeffs[v] / p;
        s.constant = -eq.constant / p;
        // substitute into the remaining constraints
        std::vector<LinearConstraint> next;
        next.reserve(work.size());
        for (auto& c : work) {
            Rational f = c.coeffs[pivot];
            if (f != 0) {
                c.coeffs[pivot] = 0;
                for (int v = 0; v < n; ++v)
                    if (s.coeffs[v] != 0) c.coeffs[v] += f * s.coeffs[v];
                c.constant += f * s.constant;
            }
            if (!has_vars(c)) {
                if (!constant_row_ok(c)) return {};
            } else {
                next.push_back(std::move(c));
            }
        }
        work = std::move(next);
        substitutions.push_back(std::move(s));
    }

    // 2. Fourier-Motzkin, highest variable index first
    std::vector<char> eliminated(n, 0);
    for (const auto& s : substitutions) eliminated[s.var] = 1;
    std::vector<Level> levels;
    for (int var = n - 1; var >= 0; --var) {
        if (eliminated[var]) continue;
        Level level;
        level.var = var;
        std::vector<LinearConstraint> rest;
        for (auto& c : work) {
            if (c.coeffs[var] > 0)
                level.lowers.push_back(std::move(c));
            else if (c.coeffs[var] < 0)
                level.uppers.push_back(std::move(c));
            else
                rest.push_back(std::move(c));
        }
        // combine each lower/upper pair; dedupe, keeping the strict version
        std::map<std::pair<std::vector<Rational>, Rational>, size_t> index;
        for (size_t i = 0; i < rest.size(); ++i) index.emplace(canonical_key(rest[i]), i);
        std::vector<LinearConstraint> next = std::move(rest);
        for (const auto& lo : level.lowers)
            for (const auto& up : level.uppers) {
                LinearConstraint c;
                c.rel = (lo.rel == Rel::gt || up.rel == Rel::gt) ? Rel::gt : Rel::ge;
                c.coeffs.assign(n, Rational(0));
                Rational a = lo.coeffs[var];  // > 0
                Rational b = -up.coeffs[var]; // > 0
                for (int v = 0; v < n; ++v)
                    if (v != var) c.coeffs[v] = b * lo.coeffs[v] + a * up.coeffs[v];
                c.constant = b * lo.constant + a * up.constant;
                if (!has_vars(c)) {
                    if (!constant_row_ok(c)) return {};
                    continue;
                }
                auto key = canonical_key(c);
                auto it = index.find(key);
                if (it == index.end()) {
                    index.emplace(std::move(key), next.size());
                    next.push_back(std::move(c));
                } else if (c.rel == Rel::gt) {
                    next[it->second].rel = Rel::gt;
                }
            }
        work = std::move(next);
        eliminated[var] = 1;
        levels.push_back(std::move(level));
    }

    // 3. witness by back-substitution through the levels
    LinearResult result;
    result.feasible = true;
    std::vector<Rational> x(n, Rational(0));
    for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
        const Level& level = *it;
        bool have_lo = false, have_hi = false, lo_strict = false, hi_strict = false;
        Rational lo, hi;
        auto bound_at = [&](const LinearConstraint& c) -> Rational {
            Rational v = c.constant;
            for (int u = 0; u < n; ++u)
                if (u != level.var && c.coeffs[u] != 0) v += c.coeffs[u] * x[u];
            return -v / c.coeffs[level.var];
        };
        for (const auto& c : level.lowers) {
            Rational b = bound_at(c);
            if (!have_lo || b > lo || (b == lo && c.rel == Rel::gt)) {
                if (!have_lo || b > lo) lo_strict = (c.rel == Rel::gt);
                else lo_strict = lo_strict || (c.rel == Rel::gt);
                lo = b;
                have_lo = true;
            }
        }
        for (const auto& c : level.uppers) {
            Rational b = bound_at(c);
            if (!have_hi || b < hi || (b == hi && c.rel == Rel::gt)) {
                if (!have_hi || b < hi) hi_strict = (c.rel == Rel::gt);
                else hi_strict = hi_strict || (c.rel == Rel::gt);
                hi = b;
                have_hi = true;
            }
        }
        Rational value;
        if (have_lo && have_hi) {
            if (lo < hi)
                value = (lo + hi) / 2;
            else if (lo == hi && !lo_strict && !hi_strict)
                value = lo;
            else
                throw Error(Errc::postcondition_violation, "empty interval after elimination");
        } else if (have_lo) {
            value = lo_strict ? lo + 1 : lo;
        } else if (have_hi) {
            value = hi_strict ? hi - 1 : hi;
        } else {
            value = 0;
        }
        x[level.var] = value;
    }
    for (auto it = substitutions.rbegin(); it != substitutions.rend(); ++it) {
        Rational v = it->constant;
        for (int u = 0; u < n; ++u)
            if (it->coeffs[u] != 0) v += it->coeffs[u] * x[u];
        x[it->var] = v;
    }

    for (const auto& c : sys.constraints)
        if (!satisfied(c, x))
            throw Error(Errc::postcondition_violation, "witness fails a constraint");
    result.witness = std::move(x);
    return result;
}

} // namespace stm
