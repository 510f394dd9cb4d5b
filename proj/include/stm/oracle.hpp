#pragma once

#include "stm/dissimilarity.hpp"
#include "stm/rational.hpp"

#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace stm {

enum class SignMode { positive, nonnegative, free_sign };

const char* sign_mode_name(SignMode m); // "positive" / "nonnegative" / "signed"

struct OracleConfig {
    unsigned long long budget = 0; // 0 = default_budget()
    int threads = 1;
};

// STARTREEMIX_BUDGET environment variable, else 59049 (admits n<=6 at k=2,
// n<=5 at k=3, n<=4 at k=4).
unsigned long long default_budget();

/// For each unordered pair, the summand star attaining the maximum.
/// Pairs in the fixed row-major order, stars 0-based, canonical first-use
/// numbering (star m appears only after stars 0..m-1).
struct AchievementPattern {
    std::vector<int> star_of_pair;
};

struct Feasibility {
    bool feasible = false;
    std::vector<std::vector<Rational>> witness; // k x n weight vectors
    AchievementPattern pattern;                 // set when feasible
    unsigned long long patterns_checked = 0;    // reduced patterns ruled out (+1 found)
    unsigned long long reduced_pattern_space = 0;
    unsigned long long raw_pattern_space = 0; // k^C(n,2), saturated
};

/// Exact decision of D = max of k star metrics in the given sign regime, by
/// enumeration of achievement patterns with symmetry reduction and early
/// refutation. Witnesses are verified by substitution before being returned.
/// Throws BudgetExceeded when k^C(n,2) exceeds the configured budget.
Feasibility k_star_feasible(const DissimilarityMap& d, int k, SignMode mode,
                            const OracleConfig& cfg = {});

// Same engine on a raw height vector (entries may be negative).
Feasibility k_star_cover(int n, const std::vector<Rational>& heights, int k, SignMode mode,
                         const OracleConfig& cfg = {});

/// Vertices of the second hypersimplex: the C(n,2) points e_i + e_j.
struct PointConfiguration {
    int n = 0;
    std::vector<std::vector<int>> points;
    std::vector<std::pair<int, int>> labels;
};

PointConfiguration delta2n_points(int n);

/// Membership of a height vector in the k-th tropical secant (max convention)
/// of the star-metric cone (positivity) or of its linear span (free
/// functionals): k+1 facet functionals covering every point of Delta(2,n).
Feasibility secant_membership(const std::vector<Rational>& heights, int k, bool positivity,
                              const OracleConfig& cfg = {});

enum class KStatus { feasible, infeasible, budget_exceeded };

struct RankResult {
    std::optional<int> rank; // smallest feasible k, if found
    std::vector<std::pair<int, KStatus>> per_k;
    std::optional<Feasibility> found;
    bool above_k_max() const { return !rank.has_value(); }
};

RankResult star_rank_bounds(const DissimilarityMap& d, SignMode mode, int k_max,
                            const OracleConfig& cfg = {});

// Two disjoint zero pairs with a positive cross distance: no finite
// positive/nonnegative star mixture can reach the cross distance.
bool cut_obstruction(const DissimilarityMap& d);
std::optional<std::array<int, 4>> cut_obstruction_witness(const DissimilarityMap& d);

} // namespace stm
