#include "stm/oracle.hpp"

#include "stm/error.hpp"
#include "stm/linear.hpp"

#include <algorithm>
#include <atomic>
#include <climits>
#include <cstdlib>
#include <thread>

namespace stm {

const char* sign_mode_name(SignMode m) {
    switch (m) {
    case SignMode::positive: return "positive";
    case SignMode::nonnegative: return "nonnegative";
    case SignMode::free_sign: return "signed";
    }
    return "?";
}

unsigned long long default_budget() {
    if (const char* env = std::getenv("STARTREEMIX_BUDGET")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return v;
    }
    return 59049; // 3^10
}

namespace {

// Affine closure of the pair-sum equalities of one star: each taxon's weight
// is sig * lambda(rep) + off, one free parameter per component until the
// component's lambda gets pinned to a value.
struct StarState {
    std::vector<int> rep;
    std::vector<int> sig;
    std::vector<Rational> off;
    std::vector<char> pinned; // indexed by representative taxon
    std::vector<Rational> val;

    explicit StarState(int n)
        : rep(n), sig(n, 1), off(n, Rational(0)), pinned(n, 0), val(n) {
        for (int i = 0; i < n; ++i) rep[i] = i;
    }

    bool concrete(int i) const { return pinned[rep[i]] != 0; }
    Rational value(int i) const { return Rational(sig[i]) * val[rep[i]] + off[i]; }

    // w_i + w_j = c; false on contradiction
    bool add_equality(int i, int j, const Rational& c) {
        int ri = rep[i], rj = rep[j];
        if (ri == rj) {
            if (sig[i] + sig[j] == 0) return off[i] + off[j] == c;
            Rational lam = Rational(sig[i]) * (c - off[i] - off[j]) / 2;
            if (pinned[ri]) return val[ri] == lam;
            pinned[ri] = 1;
            val[ri] = lam;
            return true;
        }
        // merge rj's component into ri's:
        //   lambda_j = t - sig_i*sig_j*lambda_i, t = sig_j*(c - off_i - off_j)
        Rational t = Rational(sig[j]) * (c - off[i] - off[j]);
        int sprod = -sig[j] * sig[i];
        bool rj_pinned = pinned[rj] != 0;
        Rational rj_val = val[rj];
        int n = static_cast<int>(rep.size());
        for (int m = 0; m < n; ++m)
            if (rep[m] == rj) {
                off[m] += Rational(sig[m]) * t;
                sig[m] *= sprod;
                rep[m] = ri;
            }
        if (rj_pinned) {
            Rational li = Rational(sprod) * (rj_val - t);
            if (pinned[ri]) return val[ri] == li;
            pinned[ri] = 1;
            val[ri] = li;
        }
        return true;
    }
};

struct Ctx {
    int n = 0, k = 0, P = 0;
    const std::vector<Rational>* heights = nullptr;
    SignMode mode = SignMode::positive;
    std::vector<std::pair<int, int>> pairs; // 0-based, row-major
    // completions[r][m]: reduced patterns extending r assigned pairs, m stars used
    std::vector<std::vector<unsigned long long>> completions;
};

// Necessary conditions on star m after a state change; sound pruning only.
bool quick_checks(const Ctx& ctx, const StarState& st) {
    int n = ctx.n;
    for (int i = 0; i < n; ++i) {
        if (!st.concrete(i)) continue;
        Rational w = st.value(i);
        if (ctx.mode == SignMode::positive && w <= 0) return false;
        if (ctx.mode == SignMode::nonnegative && w < 0) return false;
    }
    for (int p = 0; p < ctx.P; ++p) {
        auto [a, b] = ctx.pairs[p];
        const Rational& h = (*ctx.heights)[p];
        if (st.concrete(a) && st.concrete(b)) {
            if (st.value(a) + st.value(b) > h) return false;
        } else if (st.rep[a] == st.rep[b] && st.sig[a] + st.sig[b] == 0) {
            if (st.off[a] + st.off[b] > h) return false; // sum is constant
        }
    }
    return true;
}

struct Hit {
    std::vector<int> pattern;
    std::vector<std::vector<Rational>> weights;
};

// Exact decision at a fully assigned pattern: the residual inequality system
// over the free component parameters.
bool leaf_solve(const Ctx& ctx, const std::vector<StarState>& states, Hit& out,
                const std::vector<int>& pattern) {
    int n = ctx.n, k = ctx.k;
    // variable ids for unpinned components
    std::vector<std::vector<int>> var(k, std::vector<int>(n, -1));
    int num_vars = 0;
    for (int m = 0; m < k; ++m)
        for (int i = 0; i < n; ++i) {
            int r = states[m].rep[i];
            if (!states[m].pinned[r] && var[m][r] < 0) var[m][r] = num_vars++;
        }
    LinearSystem sys;
    sys.num_vars = num_vars;
    auto put = [&](std::vector<Rational>& coeffs, Rational& c0, int m, int i, int s) {
        const StarState& st = states[m];
        if (st.concrete(i)) {
            c0 += Rational(s) * st.value(i);
        } else {
            coeffs[var[m][st.rep[i]]] += Rational(s * st.sig[i]);
            c0 += Rational(s) * st.off[i];
        }
    };
    for (int m = 0; m < k; ++m) {
        for (int p = 0; p < ctx.P; ++p) {
            if (pattern[p] == m) continue; // equality already encoded
            auto [a, b] = ctx.pairs[p];
            std::vector<Rational> coeffs(num_vars, Rational(0));
            Rational c0 = (*ctx.heights)[p];
            put(coeffs, c0, m, a, -1);
            put(coeffs, c0, m, b, -1);
            sys.add(std::move(coeffs), std::move(c0), Rel::ge);
        }
        if (ctx.mode != SignMode::free_sign) {
            for (int i = 0; i < n; ++i) {
                std::vector<Rational> coeffs(num_vars, Rational(0));
                Rational c0(0);
                put(coeffs, c0, m, i, 1);
                sys.add(std::move(coeffs), std::move(c0),
                        ctx.mode == SignMode::positive ? Rel::gt : Rel::ge);
            }
        }
    }
    LinearResult res = solve_linear(sys);
    if (!res.feasible) return false;

    out.weights.assign(k, std::vector<Rational>(n));
    for (int m = 0; m < k; ++m)
        for (int i = 0; i < n; ++i) {
            const StarState& st = states[m];
            if (st.concrete(i))
                out.weights[m][i] = st.value(i);
            else
                out.weights[m][i] = Rational(st.sig[i]) * res.witness[var[m][st.rep[i]]] + st.off[i];
        }
    out.pattern = pattern;
    // soundness gate: verify against the mixture definition
    for (int p = 0; p < ctx.P; ++p) {
        auto [a, b] = ctx.pairs[p];
        Rational best = out.weights[0][a] + out.weights[0][b];
        for (int m = 1; m < k; ++m) {
            Rational cand = out.weights[m][a] + out.weights[m][b];
            if (cand > best) best = cand;
        }
        if (best != (*ctx.heights)[p])
            throw Error(Errc::postcondition_violation, "oracle witness fails verification");
        int am = pattern[p];
        if (out.weights[am][a] + out.weights[am][b] != (*ctx.heights)[p])
            throw Error(Errc::postcondition_violation, "assigned star does not attain its pair");
    }
    for (int m = 0; m < k; ++m)
        for (int i = 0; i < n; ++i) {
            if (ctx.mode == SignMode::positive && out.weights[m][i] <= 0)
                throw Error(Errc::postcondition_violation, "witness violates positivity");
            if (ctx.mode == SignMode::nonnegative && out.weights[m][i] < 0)
                throw Error(Errc::postcondition_violation, "witness violates nonnegativity");
        }
    return true;
}

// Depth-first search in lexicographic pattern order; returns true when a
// feasible pattern was found (the lexicographically smallest one).
bool dfs(const Ctx& ctx, int pair_idx, int used, std::vector<StarState>& states,
         std::vector<int>& pattern, unsigned long long& checked, Hit& out) {
    if (pair_idx == ctx.P) {
        if (leaf_solve(ctx, states, out, pattern)) return true;
        ++checked;
        return false;
    }
    auto [a, b] = ctx.pairs[pair_idx];
    const Rational& h = (*ctx.heights)[pair_idx];
    int limit = std::min(used, ctx.k - 1);
    for (int m = 0; m <= limit; ++m) {
        int next_used = std::max(used, m + 1);
        std::vector<StarState> child = states;
        if (!child[m].add_equality(a, b, h) || !quick_checks(ctx, child[m])) {
            checked += ctx.completions[pair_idx + 1][next_used];
            continue;
        }
        pattern[pair_idx] = m;
        if (dfs(ctx, pair_idx + 1, next_used, child, pattern, checked, out)) return true;
    }
    return false;
}

struct FrontierNode {
    int pair_idx = 0;
    int used = 0;
    std::vector<StarState> states;
    std::vector<int> pattern;
};

Feasibility run_engine(const Ctx& ctx, int threads) {
    Feasibility result;
    result.reduced_pattern_space = ctx.completions[0][0];

    std::vector<StarState> init(ctx.k, StarState(ctx.n));
    std::vector<int> pattern(ctx.P, -1);

    if (threads <= 1 || ctx.P < 4) {
        Hit hit;
        unsigned long long checked = 0;
        if (dfs(ctx, 0, 0, init, pattern, checked, hit)) {
            result.feasible = true;
            result.witness = std::move(hit.weights);
            result.pattern.star_of_pair = std::move(hit.pattern);
            result.patterns_checked = checked + 1;
        } else {
            result.patterns_checked = checked;
        }
        return result;
    }

    // deterministic parallel mode: expand a frontier, solve subtrees
    // independently, combine in lexicographic order
    const int depth = 3;
    std::vector<FrontierNode> frontier;
    std::vector<unsigned long long> pruned_before; // leaves refuted before node i
    unsigned long long pruned = 0;
    struct Expander {
        const Ctx& ctx;
        int depth;
        std::vector<FrontierNode>& frontier;
        std::vector<unsigned long long>& pruned_before;
        unsigned long long& pruned;
        void expand(int pair_idx, int used, std::vector<StarState>& states,
                    std::vector<int>& pattern) {
            if (pair_idx == depth) {
                pruned_before.push_back(pruned);
                frontier.push_back({pair_idx, used, states, pattern});
                return;
            }
            auto [a, b] = ctx.pairs[pair_idx];
            const Rational& h = (*ctx.heights)[pair_idx];
            int limit = std::min(used, ctx.k - 1);
            for (int m = 0; m <= limit; ++m) {
                int next_used = std::max(used, m + 1);
                std::vector<StarState> child = states;
                if (!child[m].add_equality(a, b, h) || !quick_checks(ctx, child[m])) {
                    pruned += ctx.completions[pair_idx + 1][next_used];
                    continue;
                }
                pattern[pair_idx] = m;
                expand(pair_idx + 1, next_used, child, pattern);
            }
        }
    };
    Expander ex{ctx, depth, frontier, pruned_before, pruned};
    ex.expand(0, 0, init, pattern);

    struct TaskResult {
        bool found = false;
        Hit hit;
        unsigned long long checked = 0;
    };
    std::vector<TaskResult> results(frontier.size());
    std::atomic<size_t> cursor{0};
    auto worker = [&] {
        for (;;) {
            size_t idx = cursor.fetch_add(1);
            if (idx >= frontier.size()) return;
            FrontierNode& node = frontier[idx];
            TaskResult& tr = results[idx];
            tr.found = dfs(ctx, node.pair_idx, node.used, node.states, node.pattern, tr.checked,
                           tr.hit);
        }
    };
    std::vector<std::thread> pool;
    int nthreads = std::min<size_t>(threads, frontier.size());
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    for (size_t i = 0; i < frontier.size(); ++i) {
        // expansion-level refutations before node i plus earlier nodes' counts
        unsigned long long acc = pruned_before[i];
        for (size_t j = 0; j < i; ++j) acc += results[j].checked;
        if (results[i].found) {
            result.feasible = true;
            result.witness = results[i].hit.weights;
            result.pattern.star_of_pair = results[i].hit.pattern;
            result.patterns_checked = acc + results[i].checked + 1;
            return result;
        }
    }
    unsigned long long total = pruned;
    for (const auto& tr : results) total += tr.checked;
    result.patterns_checked = total;
    return result;
}

unsigned long long saturating_pow(unsigned long long base, int exp) {
    unsigned long long v = 1;
    for (int i = 0; i < exp; ++i) {
        if (v > ULLONG_MAX / base) return ULLONG_MAX;
        v *= base;
    }
    return v;
}

} // namespace

Feasibility k_star_cover(int n, const std::vector<Rational>& heights, int k, SignMode mode,
                         const OracleConfig& cfg) {
    if (n < 3) throw Error(Errc::too_few_taxa, "need n >= 3");
    if (k < 1) throw Error(Errc::bad_indices, "need k >= 1");
    int P = pair_count(n);
    if (static_cast<int>(heights.size()) != P)
        throw Error(Errc::length_mismatch, "height vector has wrong length");
    unsigned long long budget = cfg.budget ? cfg.budget : default_budget();
    unsigned long long raw = saturating_pow(static_cast<unsigned long long>(k), P);
    if (raw > budget)
        throw Error(Errc::budget_exceeded, "k^C(n,2) = " + std::to_string(raw) + " exceeds budget " +
                                               std::to_string(budget));
    std::vector<Rational> canon = heights;
    for (auto& q : canon) q.canonicalize();
    Ctx ctx;
    ctx.n = n;
    ctx.k = k;
    ctx.P = P;
    ctx.heights = &canon;
    ctx.mode = mode;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) ctx.pairs.push_back({i, j});
    ctx.completions.assign(P + 1, std::vector<unsigned long long>(k + 1, 0));
    for (int m = 0; m <= k; ++m) ctx.completions[P][m] = 1;
    for (int r = P - 1; r >= 0; --r)
        for (int m = 0; m <= k; ++m) {
            unsigned long long v = static_cast<unsigned long long>(m) * ctx.completions[r + 1][m];
            if (m < k) v += ctx.completions[r + 1][m + 1];
            ctx.completions[r][m] = v;
        }
    Feasibility out = run_engine(ctx, cfg.threads);
    out.raw_pattern_space = raw;
    return out;
}

Feasibility k_star_feasible(const DissimilarityMap& d, int k, SignMode mode,
                            const OracleConfig& cfg) {
    return k_star_cover(d.taxa(), d.entries(), k, mode, cfg);
}

PointConfiguration delta2n_points(int n) {
    if (n < 3) throw Error(Errc::too_few_taxa, "need n >= 3");
    PointConfiguration pc;
    pc.n = n;
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            std::vector<int> p(n, 0);
            p[i - 1] = 1;
            p[j - 1] = 1;
            pc.points.push_back(std::move(p));
            pc.labels.push_back({i, j});
        }
    return pc;
}

Feasibility secant_membership(const std::vector<Rational>& heights, int k, bool positivity,
                              const OracleConfig& cfg) {
    if (k < 0) throw Error(Errc::bad_indices, "need k >= 0");
    // n from C(n,2)
    int L = static_cast<int>(heights.size());
    int n = 3;
    while (pair_count(n) < L) ++n;
    if (pair_count(n) != L) throw Error(Errc::length_mismatch, "length is not C(n,2) for any n");
    return k_star_cover(n, heights, k + 1, positivity ? SignMode::positive : SignMode::free_sign,
                        cfg);
}

RankResult star_rank_bounds(const DissimilarityMap& d, SignMode mode, int k_max,
                            const OracleConfig& cfg) {
    RankResult out;
    for (int k = 1; k <= k_max; ++k) {
        unsigned long long budget = cfg.budget ? cfg.budget : default_budget();
        if (saturating_pow(static_cast<unsigned long long>(k), pair_count(d.taxa())) > budget) {
            out.per_k.push_back({k, KStatus::budget_exceeded});
            break; // larger k only grows the pattern space
        }
        Feasibility f = k_star_feasible(d, k, mode, cfg);
        if (f.feasible) {
            out.per_k.push_back({k, KStatus::feasible});
            out.rank = k;
            out.found = std::move(f);
            break;
        }
        out.per_k.push_back({k, KStatus::infeasible});
    }
    return out;
}

std::optional<std::array<int, 4>> cut_obstruction_witness(const DissimilarityMap& d) {
    int n = d.taxa();
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            if (d.at(i, j) != 0) continue;
            for (int k = 1; k <= n; ++k)
                for (int l = k + 1; l <= n; ++l) {
                    if (k == i || k == j || l == i || l == j) continue;
                    if (d.at(k, l) != 0) continue;
                    if (d.at(i, k) > 0 || d.at(i, l) > 0 || d.at(j, k) > 0 || d.at(j, l) > 0)
                        return std::array<int, 4>{i, j, k, l};
                }
        }
    return std::nullopt;
}

bool cut_obstruction(const DissimilarityMap& d) { return cut_obstruction_witness(d).has_value(); }

} // namespace stm
