#include "stm/dissimilarity.hpp"

#include "stm/error.hpp"

#include <algorithm>
#include <set>

namespace stm {

const Rational DissimilarityMap::zero_entry_ = Rational(0);

int pair_count(int n) { return n * (n - 1) / 2; }

int pair_index(int n, int i, int j) {
    if (i > j) std::swap(i, j);
    if (i < 1 || j > n || i == j)
        throw Error(Errc::bad_indices, "pair {" + std::to_string(i) + "," + std::to_string(j) +
                                           "} out of range for n=" + std::to_string(n));
    // row i starts after (i-1) rows of lengths n-1, n-2, ...
    return (i - 1) * n - i * (i - 1) / 2 + (j - i - 1);
}

DissimilarityMap::DissimilarityMap(int n, std::vector<Rational> entries)
    : n_(n), entries_(std::move(entries)) {
    if (n < 3) throw Error(Errc::too_few_taxa, "need n >= 3, got n=" + std::to_string(n));
    if (static_cast<int>(entries_.size()) != pair_count(n))
        throw Error(Errc::length_mismatch, "expected " + std::to_string(pair_count(n)) +
                                               " entries, got " + std::to_string(entries_.size()));
    for (auto& e : entries_) {
        e.canonicalize(); // comparisons are undefined on non-canonical mpq
        if (e < 0) throw Error(Errc::negative_entry, "entry " + to_string(e) + " < 0");
    }
}

DissimilarityMap DissimilarityMap::zero(int n) {
    if (n < 3) throw Error(Errc::too_few_taxa, "need n >= 3");
    return DissimilarityMap(n, std::vector<Rational>(pair_count(n), Rational(0)));
}

const Rational& DissimilarityMap::at(int i, int j) const {
    if (i == j) {
        if (i < 1 || i > n_) throw Error(Errc::bad_indices, "taxon out of range");
        return zero_entry_;
    }
    return entries_[pair_index(n_, i, j)];
}

const Rational& QuartetPairing::max_sum() const {
    if (attaining[0]) return sum_ij_kl;
    if (attaining[1]) return sum_ik_jl;
    return sum_il_jk;
}

DissimilarityMap tropical_mix(const DissimilarityMap& a, const DissimilarityMap& b) {
    if (a.taxa() != b.taxa())
        throw Error(Errc::size_mismatch, "tropical_mix needs equal taxon counts");
    std::vector<Rational> out(a.entries().size());
    for (size_t p = 0; p < out.size(); ++p)
        out[p] = std::max(a.entries()[p], b.entries()[p]);
    return DissimilarityMap(a.taxa(), std::move(out));
}

DissimilarityMap scaled(const DissimilarityMap& d, const Rational& lambda) {
    std::vector<Rational> out(d.entries().size());
    for (size_t p = 0; p < out.size(); ++p) out[p] = d.entries()[p] * lambda;
    return DissimilarityMap(d.taxa(), std::move(out));
}

bool is_metric(const DissimilarityMap& d) { return !first_triangle_violation(d).has_value(); }

std::optional<std::array<int, 3>> first_triangle_violation(const DissimilarityMap& d) {
    int n = d.taxa();
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k) {
                if (k == i || k == j) continue;
                if (d.at(i, j) > d.at(i, k) + d.at(k, j)) return std::array<int, 3>{i, j, k};
            }
    return std::nullopt;
}

QuartetPairing quartet_pairing(const DissimilarityMap& d, int i, int j, int k, int l) {
    std::set<int> idx{i, j, k, l};
    if (idx.size() != 4 || *idx.begin() < 1 || *idx.rbegin() > d.taxa())
        throw Error(Errc::bad_indices, "quartet needs four distinct taxa in 1..n");
    QuartetPairing q;
    q.sum_ij_kl = d.at(i, j) + d.at(k, l);
    q.sum_ik_jl = d.at(i, k) + d.at(j, l);
    q.sum_il_jk = d.at(i, l) + d.at(j, k);
    const Rational m = std::max({q.sum_ij_kl, q.sum_ik_jl, q.sum_il_jk});
    q.attaining = {q.sum_ij_kl == m, q.sum_ik_jl == m, q.sum_il_jk == m};
    return q;
}

std::optional<std::array<int, 4>> first_four_point_violation(const DissimilarityMap& d) {
    int n = d.taxa();
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j)
            for (int k = j + 1; k <= n; ++k)
                for (int l = k + 1; l <= n; ++l)
                    if (quartet_pairing(d, i, j, k, l).attaining_count() < 2)
                        return std::array<int, 4>{i, j, k, l};
    return std::nullopt;
}

bool is_tree_metric(const DissimilarityMap& d) {
    // Non-distinct 4-tuples reduce to the metric condition.
    return is_metric(d) && !first_four_point_violation(d).has_value();
}

bool is_star_metric(const DissimilarityMap& d) {
    if (!is_metric(d)) return false;
    int n = d.taxa();
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j)
            for (int k = j + 1; k <= n; ++k)
                for (int l = k + 1; l <= n; ++l)
                    if (quartet_pairing(d, i, j, k, l).attaining_count() != 3) return false;
    return true;
}

DissimilarityMap restrict_to(const DissimilarityMap& d, const std::vector<int>& subset) {
    std::set<int> seen(subset.begin(), subset.end());
    if (subset.size() < 3 || seen.size() != subset.size())
        throw Error(Errc::bad_indices, "restriction needs >= 3 distinct taxa");
    for (int t : subset)
        if (t < 1 || t > d.taxa()) throw Error(Errc::bad_indices, "taxon out of range");
    int m = static_cast<int>(subset.size());
    std::vector<Rational> out;
    out.reserve(pair_count(m));
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b) out.push_back(d.at(subset[a], subset[b]));
    return DissimilarityMap(m, std::move(out));
}

} // namespace stm
