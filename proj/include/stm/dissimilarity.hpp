#pragma once

#include "stm/rational.hpp"

#include <array>
#include <optional>
#include <vector>

namespace stm {

// Index of unordered pair {i,j} (1-based, i != j) in the fixed entry order
// (1,2),(1,3),...,(1,n),(2,3),...,(n-1,n).
int pair_index(int n, int i, int j);
int pair_count(int n);

/// Symmetric nonnegative pair-distance table on n >= 3 taxa with zero
/// diagonal, stored as exact rationals over unordered pairs.
class DissimilarityMap {
public:
    DissimilarityMap(int n, std::vector<Rational> entries);

    static DissimilarityMap zero(int n);

    int taxa() const { return n_; }
    const std::vector<Rational>& entries() const { return entries_; }

    // 1-based taxa; at(i,i) = 0.
    const Rational& at(int i, int j) const;

    bool operator==(const DissimilarityMap& o) const {
        return n_ == o.n_ && entries_ == o.entries_;
    }
    bool operator!=(const DissimilarityMap& o) const { return !(*this == o); }

private:
    int n_;
    std::vector<Rational> entries_;
    static const Rational zero_entry_;
};

enum class PairSplit { ij_kl = 0, ik_jl = 1, il_jk = 2 };

/// The three pair-sums of a 4-tuple and the set of sums attaining the max.
struct QuartetPairing {
    Rational sum_ij_kl, sum_ik_jl, sum_il_jk;
    std::array<bool, 3> attaining; // indexed by PairSplit

    int attaining_count() const {
        return (attaining[0] ? 1 : 0) + (attaining[1] ? 1 : 0) + (attaining[2] ? 1 : 0);
    }
    bool attains(PairSplit s) const { return attaining[static_cast<int>(s)]; }
    const Rational& max_sum() const;
};

// Entrywise maximum. Sizes must agree.
DissimilarityMap tropical_mix(const DissimilarityMap& a, const DissimilarityMap& b);

// Entrywise positive scaling.
DissimilarityMap scaled(const DissimilarityMap& d, const Rational& lambda);

bool is_metric(const DissimilarityMap& d);

QuartetPairing quartet_pairing(const DissimilarityMap& d, int i, int j, int k, int l);

// Four Point Condition: metric, and every 4-subset's maximum pair-sum is
// attained at least twice.
bool is_tree_metric(const DissimilarityMap& d);

// Metric with all three pair-sums equal on every 4-subset. For n = 3 this is
// the triangle condition (closed star regime).
bool is_star_metric(const DissimilarityMap& d);

// Induced map on >= 3 distinct taxa, relabeled 1..|subset| in the given order.
DissimilarityMap restrict_to(const DissimilarityMap& d, const std::vector<int>& subset);

// Diagnostics for reports: first violating triple / 4-subset, if any.
std::optional<std::array<int, 3>> first_triangle_violation(const DissimilarityMap& d);
std::optional<std::array<int, 4>> first_four_point_violation(const DissimilarityMap& d);

} // namespace stm
