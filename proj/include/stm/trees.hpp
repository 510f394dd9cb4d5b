#pragma once

#include "stm/dissimilarity.hpp"
#include "stm/rational.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace stm {

enum class Regime { strict, closed };

/// Star tree on n taxa: one internal node, pendant weights e_1..e_n.
struct StarTree {
    std::vector<Rational> weights;
    Regime regime = Regime::strict;

    StarTree(std::vector<Rational> w, Regime r = Regime::strict);
    int taxa() const { return static_cast<int>(weights.size()); }
    bool degenerate() const;
    bool operator==(const StarTree& o) const { return weights == o.weights; }
};

/// Two stars joined by one internal edge of weight g > 0. Canonical form:
/// |I| <= |J|, ties broken by lexicographically smaller I (so min(I) = 1 on
/// ties). Pendant weights are indexed by taxon.
struct DoubleStar {
    std::vector<int> I, J;
    Rational g;
    std::vector<Rational> pendant;
    Regime regime = Regime::strict;

    DoubleStar(std::vector<int> I_side, Rational g_weight, std::vector<Rational> pendant_weights,
               Regime r = Regime::closed);
    int taxa() const { return static_cast<int>(pendant.size()); }
    bool degenerate() const;
    bool operator==(const DoubleStar& o) const {
        return I == o.I && g == o.g && pendant == o.pendant;
    }
};

/// Unrooted weighted tree; leaves are nodes 1..n, internal nodes n+1..nodes.
struct WeightedTree {
    struct Edge {
        int u, v;
        Rational w;
    };
    int n = 0;     // leaf count
    int nodes = 0; // total node count
    std::vector<Edge> edges;

    WeightedTree() = default;
    WeightedTree(int leaf_count, int node_count, std::vector<Edge> edge_list);

    int internal_edge_count() const;
    bool degenerate() const; // some pendant edge has weight zero
};

DissimilarityMap star_metric(const StarTree& s);
DissimilarityMap double_star_metric(const DoubleStar& ds);
DissimilarityMap tree_metric(const WeightedTree& t);

WeightedTree star_to_tree(const StarTree& s);
WeightedTree double_star_to_tree(const DoubleStar& ds);

// Suppress degree-2 internal nodes and contract zero-weight internal edges;
// internal nodes are renumbered n+1.. deterministically.
WeightedTree canonical(const WeightedTree& t);

/// Edge decomposition by leaf splits: pendant weights by taxon plus a map
/// from internal-edge split (bitmask of the side containing taxon 1, bit i-1
/// for taxon i) to weight. Equal decompositions == isomorphic weighted trees.
struct SplitWeights {
    std::vector<Rational> pendant; // index 0 unused; 1..n
    std::map<std::uint32_t, Rational> internal_splits;

    bool operator==(const SplitWeights& o) const {
        return pendant == o.pendant && internal_splits == o.internal_splits;
    }
};

SplitWeights split_decomposition(const WeightedTree& t);
bool same_tree(const WeightedTree& a, const WeightedTree& b);

// The unique realizing tree in canonical form; throws NotTreeMetric.
WeightedTree reconstruct_tree(const DissimilarityMap& d);

enum class Topology { star, double_star, other_tree, not_tree_metric };

struct TopologyClass {
    Topology kind = Topology::not_tree_metric;
    std::optional<StarTree> star;
    std::optional<DoubleStar> dstar;
    std::optional<WeightedTree> tree; // present for all tree metrics
    bool degenerate = false;          // some recovered weight is zero
};

// Total classification: never throws on valid dissimilarity maps.
TopologyClass classify_topology(const DissimilarityMap& d);

struct QuartetSplit {
    int a, b, c, d; // split (ab|cd)
};

struct QuartetWeights {
    Rational g;
    std::array<Rational, 4> e; // pendant weights of taxa 1..4
};

// Invert the path sums of a 4-taxon tree metric for the given split
// (g = 0 for stars). Throws WrongSplit if the pairing disagrees.
QuartetWeights quartet_edge_weights(const DissimilarityMap& d, const QuartetSplit& split);

// 0 within blocks, 1 across.
DissimilarityMap cut_metric(int n, const std::vector<std::vector<int>>& blocks);

} // namespace stm
