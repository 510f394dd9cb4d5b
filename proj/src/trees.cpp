#include "stm/trees.hpp"

#include "stm/error.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

namespace stm {

StarTree::StarTree(std::vector<Rational> w, Regime r) : weights(std::move(w)), regime(r) {
    if (weights.size() < 3) throw Error(Errc::too_few_taxa, "star tree needs n >= 3");
    for (auto& e : weights) e.canonicalize();
    for (const auto& e : weights) {
        if (e < 0) throw Error(Errc::negative_entry, "pendant weight " + to_string(e) + " < 0");
        if (regime == Regime::strict && e == 0)
            throw Error(Errc::negative_entry, "strict regime forbids zero pendant weights");
    }
}

bool StarTree::degenerate() const {
    for (const auto& e : weights)
        if (e == 0) return true;
    return false;
}

DoubleStar::DoubleStar(std::vector<int> I_side, Rational g_weight,
                       std::vector<Rational> pendant_weights, Regime r)
    : I(std::move(I_side)), g(std::move(g_weight)), pendant(std::move(pendant_weights)),
      regime(r) {
    int n = taxa();
    if (n < 4) throw Error(Errc::too_few_taxa, "double star needs n >= 4");
    g.canonicalize();
    for (auto& e : pendant) e.canonicalize();
    std::sort(I.begin(), I.end());
    std::set<int> iset(I.begin(), I.end());
    if (iset.size() != I.size()) throw Error(Errc::bad_indices, "repeated taxa in I");
    J.clear();
    for (int t = 1; t <= n; ++t)
        if (!iset.count(t)) J.push_back(t);
    for (int t : I)
        if (t < 1 || t > n) throw Error(Errc::bad_indices, "taxon out of range in I");
    if (I.size() < 2 || J.size() < 2)
        throw Error(Errc::bad_indices, "double star needs |I| >= 2 and |J| >= 2");
    if (g <= 0) throw Error(Errc::negative_entry, "internal weight must be > 0");
    for (const auto& e : pendant) {
        if (e < 0) throw Error(Errc::negative_entry, "pendant weight < 0");
        if (regime == Regime::strict && e == 0)
            throw Error(Errc::negative_entry, "strict regime forbids zero pendant weights");
    }
    // canonical: |I| <= |J|, lexicographic tie-break
    if (I.size() > J.size() || (I.size() == J.size() && J < I)) std::swap(I, J);
}

bool DoubleStar::degenerate() const {
    for (const auto& e : pendant)
        if (e == 0) return true;
    return false;
}

WeightedTree::WeightedTree(int leaf_count, int node_count, std::vector<Edge> edge_list)
    : n(leaf_count), nodes(node_count), edges(std::move(edge_list)) {
    if (n < 3) throw Error(Errc::too_few_taxa, "tree needs n >= 3 leaves");
    if (nodes <= n || static_cast<int>(edges.size()) != nodes - 1)
        throw Error(Errc::bad_indices, "bad node/edge counts");
    for (auto& e : edges) e.w.canonicalize();
    std::vector<int> deg(nodes + 1, 0);
    for (const auto& e : edges) {
        if (e.u < 1 || e.u > nodes || e.v < 1 || e.v > nodes || e.u == e.v)
            throw Error(Errc::bad_indices, "edge endpoint out of range");
        if (e.w < 0) throw Error(Errc::negative_entry, "edge weight < 0");
        ++deg[e.u];
        ++deg[e.v];
    }
    for (int i = 1; i <= n; ++i)
        if (deg[i] != 1) throw Error(Errc::bad_indices, "leaf " + std::to_string(i) + " must have degree 1");
    for (int i = n + 1; i <= nodes; ++i)
        if (deg[i] == 0) throw Error(Errc::bad_indices, "isolated internal node");
    // connectivity (acyclicity follows from edge count)
    std::vector<char> seen(nodes + 1, 0);
    std::vector<std::vector<int>> adj(nodes + 1);
    for (size_t idx = 0; idx < edges.size(); ++idx) {
        adj[edges[idx].u].push_back(edges[idx].v);
        adj[edges[idx].v].push_back(edges[idx].u);
    }
    std::queue<int> bfs;
    bfs.push(1);
    seen[1] = 1;
    int reached = 1;
    while (!bfs.empty()) {
        int x = bfs.front();
        bfs.pop();
        for (int y : adj[x])
            if (!seen[y]) {
                seen[y] = 1;
                ++reached;
                bfs.push(y);
            }
    }
    if (reached != nodes) throw Error(Errc::bad_indices, "tree is not connected");
}

int WeightedTree::internal_edge_count() const {
    int c = 0;
    for (const auto& e : edges)
        if (e.u > n && e.v > n) ++c;
    return c;
}

bool WeightedTree::degenerate() const {
    for (const auto& e : edges)
        if ((e.u <= n || e.v <= n) && e.w == 0) return true;
    return false;
}

DissimilarityMap star_metric(const StarTree& s) {
    int n = s.taxa();
    std::vector<Rational> out;
    out.reserve(pair_count(n));
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) out.push_back(s.weights[i - 1] + s.weights[j - 1]);
    return DissimilarityMap(n, std::move(out));
}

DissimilarityMap double_star_metric(const DoubleStar& ds) {
    int n = ds.taxa();
    std::vector<char> in_I(n + 1, 0);
    for (int t : ds.I) in_I[t] = 1;
    std::vector<Rational> out;
    out.reserve(pair_count(n));
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            Rational v = ds.pendant[i - 1] + ds.pendant[j - 1];
            if (in_I[i] != in_I[j]) v += ds.g;
            out.push_back(v);
        }
    return DissimilarityMap(n, std::move(out));
}

WeightedTree star_to_tree(const StarTree& s) {
    int n = s.taxa();
    std::vector<WeightedTree::Edge> edges;
    for (int i = 1; i <= n; ++i) edges.push_back({n + 1, i, s.weights[i - 1]});
    return WeightedTree(n, n + 1, std::move(edges));
}

WeightedTree double_star_to_tree(const DoubleStar& ds) {
    int n = ds.taxa();
    std::vector<char> in_I(n + 1, 0);
    for (int t : ds.I) in_I[t] = 1;
    std::vector<WeightedTree::Edge> edges;
    for (int i = 1; i <= n; ++i) edges.push_back({in_I[i] ? n + 1 : n + 2, i, ds.pendant[i - 1]});
    edges.push_back({n + 1, n + 2, ds.g});
    return WeightedTree(n, n + 2, std::move(edges));
}

DissimilarityMap tree_metric(const WeightedTree& t) {
    std::vector<std::vector<std::pair<int, Rational>>> adj(t.nodes + 1);
    for (const auto& e : t.edges) {
        adj[e.u].push_back({e.v, e.w});
        adj[e.v].push_back({e.u, e.w});
    }
    std::vector<Rational> out(pair_count(t.n));
    for (int i = 1; i <= t.n; ++i) {
        std::vector<char> seen(t.nodes + 1, 0);
        std::vector<Rational> dist(t.nodes + 1);
        std::queue<int> bfs;
        bfs.push(i);
        seen[i] = 1;
        while (!bfs.empty()) {
            int x = bfs.front();
            bfs.pop();
            for (const auto& [y, w] : adj[x])
                if (!seen[y]) {
                    seen[y] = 1;
                    dist[y] = dist[x] + w;
                    bfs.push(y);
                }
        }
        for (int j = i + 1; j <= t.n; ++j) out[pair_index(t.n, i, j)] = dist[j];
    }
    return DissimilarityMap(t.n, std::move(out));
}

WeightedTree canonical(const WeightedTree& t) {
    // mutable adjacency on old ids
    std::map<int, std::map<int, Rational>> adj;
    for (const auto& e : t.edges) {
        adj[e.u][e.v] = e.w;
        adj[e.v][e.u] = e.w;
    }
    bool changed = true;
    while (changed) {
        changed = false;
        // suppress degree-2 internal nodes
        for (auto it = adj.begin(); it != adj.end(); ++it) {
            int x = it->first;
            if (x <= t.n || it->second.size() != 2) continue;
            auto nb = it->second.begin();
            int a = nb->first;
            Rational wa = nb->second;
            ++nb;
            int b = nb->first;
            Rational wb = nb->second;
            adj[a].erase(x);
            adj[b].erase(x);
            adj[a][b] = wa + wb;
            adj[b][a] = wa + wb;
            adj.erase(x);
            changed = true;
            break;
        }
        if (changed) continue;
        // contract zero-weight internal edges
        for (auto it = adj.begin(); it != adj.end() && !changed; ++it) {
            int x = it->first;
            if (x <= t.n) continue;
            for (const auto& [y, w] : it->second) {
                if (y <= t.n || y == x || w != 0) continue;
                for (const auto& [z, wz] : adj[y]) {
                    if (z == x) continue;
                    adj[x][z] = wz;
                    adj[z][x] = wz;
                    adj[z].erase(y);
                }
                adj[x].erase(y);
                adj.erase(y);
                changed = true;
                break;
            }
        }
    }
    // renumber internal nodes in increasing old-id order
    std::map<int, int> rename;
    int next = t.n + 1;
    for (const auto& [x, nb] : adj) {
        (void)nb;
        if (x <= t.n)
            rename[x] = x;
        else
            rename[x] = next++;
    }
    std::vector<WeightedTree::Edge> edges;
    for (const auto& [x, nb] : adj)
        for (const auto& [y, w] : nb)
            if (rename[x] < rename[y]) edges.push_back({rename[x], rename[y], w});
    std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
        return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    return WeightedTree(t.n, next - 1, std::move(edges));
}

SplitWeights split_decomposition(const WeightedTree& raw) {
    WeightedTree t = canonical(raw);
    std::vector<std::vector<std::pair<int, Rational>>> adj(t.nodes + 1);
    for (const auto& e : t.edges) {
        adj[e.u].push_back({e.v, e.w});
        adj[e.v].push_back({e.u, e.w});
    }
    SplitWeights out;
    out.pendant.assign(t.n + 1, Rational(0));
    for (const auto& e : t.edges) {
        // leaves on the u-side of the edge
        std::uint32_t mask = 0;
        std::vector<char> seen(t.nodes + 1, 0);
        seen[e.v] = 1;
        std::queue<int> bfs;
        bfs.push(e.u);
        seen[e.u] = 1;
        while (!bfs.empty()) {
            int x = bfs.front();
            bfs.pop();
            if (x <= t.n) mask |= 1u << (x - 1);
            for (const auto& [y, w] : adj[x]) {
                (void)w;
                if (!seen[y]) {
                    seen[y] = 1;
                    bfs.push(y);
                }
            }
        }
        if (e.u <= t.n) {
            out.pendant[e.u] = e.w;
        } else if (e.v <= t.n) {
            out.pendant[e.v] = e.w;
        } else {
            if (!(mask & 1u)) mask = ((1u << t.n) - 1u) & ~mask;
            out.internal_splits[mask] = e.w;
        }
    }
    return out;
}

bool same_tree(const WeightedTree& a, const WeightedTree& b) {
    return a.n == b.n && split_decomposition(a) == split_decomposition(b);
}

WeightedTree reconstruct_tree(const DissimilarityMap& d) {
    if (!is_tree_metric(d)) throw Error(Errc::not_tree_metric, "input fails the four point condition");
    int n = d.taxa();
    std::vector<int> active(n); // node ids
    for (int i = 0; i < n; ++i) active[i] = i + 1;
    std::vector<std::vector<Rational>> dist(n, std::vector<Rational>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) dist[i][j] = d.at(i + 1, j + 1);
    std::vector<WeightedTree::Edge> edges;
    int next_node = n + 1;

    auto half = Rational(1, 2);
    while (active.size() > 3) {
        int m = static_cast<int>(active.size());
        int cp = -1, cq = -1;
        Rational we_p, we_q;
        for (int p = 0; p < m && cp < 0; ++p) {
            for (int q = p + 1; q < m && cp < 0; ++q) {
                // (d(p,q)+d(p,z)-d(q,z))/2 constant over z  <=>  cherry
                bool first = true;
                Rational ep;
                bool ok = true;
                for (int z = 0; z < m; ++z) {
                    if (z == p || z == q) continue;
                    Rational v = (dist[p][q] + dist[p][z] - dist[q][z]) * half;
                    if (first) {
                        ep = v;
                        first = false;
                    } else if (v != ep) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    cp = p;
                    cq = q;
                    we_p = ep;
                    we_q = dist[p][q] - ep;
                }
            }
        }
        if (cp < 0)
            throw Error(Errc::postcondition_violation, "no reducible cherry in a tree metric");
        int v = next_node++;
        edges.push_back({v, active[cp], we_p});
        edges.push_back({v, active[cq], we_q});
        // replace the cherry with v
        std::vector<int> nactive;
        std::vector<int> keep;
        for (int z = 0; z < m; ++z)
            if (z != cp && z != cq) {
                nactive.push_back(active[z]);
                keep.push_back(z);
            }
        nactive.push_back(v);
        int nm = static_cast<int>(nactive.size());
        std::vector<std::vector<Rational>> ndist(nm, std::vector<Rational>(nm));
        for (int a = 0; a < nm - 1; ++a)
            for (int b = 0; b < nm - 1; ++b)
                if (a != b) ndist[a][b] = dist[keep[a]][keep[b]];
        for (int a = 0; a < nm - 1; ++a) {
            Rational dv = dist[cp][keep[a]] - we_p;
            ndist[a][nm - 1] = dv;
            ndist[nm - 1][a] = dv;
        }
        active = std::move(nactive);
        dist = std::move(ndist);
    }
    // base case: star on the last three
    int c = next_node++;
    Rational w0 = (dist[0][1] + dist[0][2] - dist[1][2]) * half;
    Rational w1 = (dist[0][1] + dist[1][2] - dist[0][2]) * half;
    Rational w2 = (dist[0][2] + dist[1][2] - dist[0][1]) * half;
    edges.push_back({c, active[0], w0});
    edges.push_back({c, active[1], w1});
    edges.push_back({c, active[2], w2});

    WeightedTree result = canonical(WeightedTree(n, next_node - 1, std::move(edges)));
    if (tree_metric(result) != d)
        throw Error(Errc::postcondition_violation, "reconstructed tree does not realize the input");
    return result;
}

TopologyClass classify_topology(const DissimilarityMap& d) {
    TopologyClass out;
    if (!is_tree_metric(d)) {
        out.kind = Topology::not_tree_metric;
        return out;
    }
    WeightedTree t = reconstruct_tree(d);
    out.tree = t;
    int n = d.taxa();
    std::vector<Rational> pendant(n + 1, Rational(0));
    for (const auto& e : t.edges) {
        if (e.u <= n) pendant[e.u] = e.w;
        if (e.v <= n) pendant[e.v] = e.w;
    }
    out.degenerate = t.degenerate();
    Regime reg = out.degenerate ? Regime::closed : Regime::strict;
    int internal = t.internal_edge_count();
    if (internal == 0) {
        out.kind = Topology::star;
        std::vector<Rational> w(pendant.begin() + 1, pendant.end());
        out.star = StarTree(std::move(w), reg);
    } else if (internal == 1) {
        out.kind = Topology::double_star;
        WeightedTree::Edge internal_edge{0, 0, Rational(0)};
        for (const auto& e : t.edges)
            if (e.u > n && e.v > n) internal_edge = e;
        // leaves attached to the u endpoint form one side
        std::vector<int> side;
        for (const auto& e : t.edges) {
            if (e.u > n && e.v <= n && e.u == internal_edge.u) side.push_back(e.v);
            if (e.v > n && e.u <= n && e.v == internal_edge.u) side.push_back(e.u);
        }
        std::vector<Rational> w(pendant.begin() + 1, pendant.end());
        out.dstar = DoubleStar(side, internal_edge.w, std::move(w), reg);
    } else {
        out.kind = Topology::other_tree;
    }
    return out;
}

QuartetWeights quartet_edge_weights(const DissimilarityMap& d, const QuartetSplit& split) {
    if (d.taxa() != 4) throw Error(Errc::bad_indices, "quartet edge weights need n = 4");
    std::set<int> idx{split.a, split.b, split.c, split.d};
    if (idx != std::set<int>{1, 2, 3, 4})
        throw Error(Errc::bad_indices, "split must name taxa 1..4");
    if (!is_tree_metric(d)) throw Error(Errc::not_tree_metric, "not a tree metric");
    QuartetPairing qp = quartet_pairing(d, split.a, split.b, split.c, split.d);
    // (ab|cd) requires the two cross sums to attain the maximum
    if (!qp.attains(PairSplit::ik_jl) || !qp.attains(PairSplit::il_jk))
        throw Error(Errc::wrong_split, "quartet pairing disagrees with the requested split");
    int a = split.a, b = split.b, c = split.c, dd = split.d;
    auto half = Rational(1, 2);
    QuartetWeights out;
    out.g = (qp.max_sum() - qp.sum_ij_kl) * half;
    Rational g2 = out.g * 2;
    out.e[a - 1] = (d.at(a, dd) + d.at(a, c) - g2 - d.at(c, dd)) * half;
    out.e[b - 1] = (d.at(b, dd) + d.at(b, c) - g2 - d.at(c, dd)) * half;
    out.e[c - 1] = (d.at(a, c) + d.at(b, c) - g2 - d.at(a, b)) * half;
    out.e[dd - 1] = (d.at(a, dd) + d.at(b, dd) - g2 - d.at(a, b)) * half;
    // exact inversion gate
    DissimilarityMap check = [&] {
        std::vector<Rational> w(out.e.begin(), out.e.end());
        if (out.g > 0) return double_star_metric(DoubleStar({a, b}, out.g, w, Regime::closed));
        return star_metric(StarTree(w, Regime::closed));
    }();
    if (check != d)
        throw Error(Errc::postcondition_violation, "edge weight formulas failed to invert");
    return out;
}

DissimilarityMap cut_metric(int n, const std::vector<std::vector<int>>& blocks) {
    if (n < 3) throw Error(Errc::too_few_taxa, "cut metric needs n >= 3");
    std::vector<int> block_of(n + 1, -1);
    for (size_t b = 0; b < blocks.size(); ++b) {
        if (blocks[b].empty()) throw Error(Errc::not_a_partition, "empty block");
        for (int t : blocks[b]) {
            if (t < 1 || t > n || block_of[t] != -1)
                throw Error(Errc::not_a_partition, "blocks must partition 1..n");
            block_of[t] = static_cast<int>(b);
        }
    }
    for (int t = 1; t <= n; ++t)
        if (block_of[t] == -1) throw Error(Errc::not_a_partition, "taxon " + std::to_string(t) + " unassigned");
    std::vector<Rational> out;
    out.reserve(pair_count(n));
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j)
            out.push_back(Rational(block_of[i] == block_of[j] ? 0 : 1));
    return DissimilarityMap(n, std::move(out));
}

} // namespace stm
