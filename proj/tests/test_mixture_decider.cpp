#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stm/error.hpp"
#include "stm/mixture.hpp"
#include "stm/oracle.hpp"
#include "testutil.hpp"

#include <random>
#include <set>

using namespace stm;
using namespace stm::testutil;

namespace {

const std::vector<std::string> all_1x{"1.1", "1.2", "1.3", "1.4"};
const std::vector<std::string> all_8{"1.1", "1.2", "1.3", "1.4", "2.1", "2.2", "2.3", "2.4"};

std::vector<std::vector<Rational>> unordered_pair(const std::pair<StarTree, StarTree>& p) {
    std::vector<std::vector<Rational>> v{p.first.weights, p.second.weights};
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace

TEST_CASE("offsets from star pairs") {
    Offsets o = offsets_from_stars(StarTree({rat("1"), rat("1"), rat("1"), rat("1")}),
                                   StarTree({rat("2"), rat("1"), rat("1"), rat("1")}));
    CHECK(o.s == 1);
    CHECK(o.t == 0);
    CHECK(o.x == 1);
    CHECK(o.y == 0);
    CHECK(o.u == 1);
    CHECK(o.w == 0);

    StarTree d({rat("2"), rat("6"), rat("1"), rat("1")});
    Offsets zero = offsets_from_stars(d, d);
    CHECK(zero.s == 0);
    CHECK(zero.w == 0);

    // case-1.1 fixture pair: recomputed by brute subtraction
    StarTree dbar({rat("15/2"), rat("3/2"), rat("1/2"), rat("1/2")});
    Offsets f = offsets_from_stars(d, dbar);
    CHECK(f.s == 5);
    CHECK(f.t == -5);
    CHECK(f.x == 5);
    CHECK(f.y == -5);
    CHECK(f.u == 1);
    CHECK(f.w == -1);
    CHECK(f.s + f.t == f.x + f.y);
    CHECK(f.x + f.y == f.u + f.w);

    std::mt19937_64 rng(30);
    CHECK_THROWS_AS(offsets_from_stars(d, random_star(rng, 5)), Error);
}

TEST_CASE("offset identity holds for arbitrary star pairs") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 500; ++t) {
        Offsets o = offsets_from_stars(random_star(rng, 4), random_star(rng, 4));
        CHECK(o.s + o.t == o.x + o.y);
        CHECK(o.x + o.y == o.u + o.w);
    }
}

TEST_CASE("quartet characterization") {
    CHECK_FALSE(quartet_is_12_34({rat("1"), rat("0"), rat("1"), rat("0"), rat("1"), rat("0")}));
    CHECK_FALSE(quartet_is_12_34({rat("0"), rat("0"), rat("0"), rat("0"), rat("0"), rat("0")}));
    // the verified case-1.1 witness pair
    StarTree d({rat("2"), rat("6"), rat("1"), rat("1")});
    StarTree dbar({rat("15/2"), rat("3/2"), rat("1/2"), rat("1/2")});
    CHECK(quartet_is_12_34(offsets_from_stars(d, dbar)));
    TopologyClass cls = classify_topology(tropical_mix(star_metric(d), star_metric(dbar)));
    REQUIRE(cls.kind == Topology::double_star);
    CHECK(cls.dstar->I == std::vector<int>{1, 2});
}

TEST_CASE("characterization agrees with classification on random pairs") {
    std::mt19937_64 rng(32);
    for (int t = 0; t < 1000; ++t) {
        StarTree a = random_star(rng, 4), b = random_star(rng, 4);
        bool by_offsets = quartet_is_12_34(offsets_from_stars(a, b));
        TopologyClass cls = classify_topology(tropical_mix(star_metric(a), star_metric(b)));
        bool by_topology = cls.kind == Topology::double_star && cls.dstar->I == std::vector<int>{1, 2};
        CHECK(by_offsets == by_topology);
    }
}

TEST_CASE("decide: quartet with one admissible side") {
    DissimilarityMap t =
        double_star_metric(DoubleStar({1, 2}, rat("2"), {rat("5"), rat("4"), rat("1"), rat("1")}));
    MixtureDecision dec = decide_two_star_mixture(t);
    CHECK(dec.verdict == Verdict::yes);
    CHECK(dec.basis == Basis::quartet);
    CHECK(dec.families == all_1x); // e3, e4 < g excludes 2.x
    REQUIRE(dec.witness.has_value());
    CHECK(verify_decomposition(t, dec.witness->first, dec.witness->second));
}

TEST_CASE("decide: weight condition failure confirmed by the oracle") {
    DissimilarityMap t =
        double_star_metric(DoubleStar({1, 2}, rat("2"), {rat("1"), rat("1"), rat("1"), rat("1")}));
    MixtureDecision dec = decide_two_star_mixture(t);
    CHECK(dec.verdict == Verdict::no);
    CHECK(dec.basis == Basis::weight_condition_failed);
    CHECK_FALSE(k_star_feasible(t, 2, SignMode::positive).feasible);
}

TEST_CASE("decide: trees with two internal edges are excluded") {
    WeightedTree cat(5, 8,
                     {{1, 6, rat("1")},
                      {2, 6, rat("1")},
                      {6, 7, rat("1")},
                      {3, 7, rat("1")},
                      {7, 8, rat("1")},
                      {4, 8, rat("1")},
                      {5, 8, rat("1")}});
    MixtureDecision dec = decide_two_star_mixture(tree_metric(cat));
    CHECK(dec.verdict == Verdict::no);
    CHECK(dec.basis == Basis::topology_excluded);
}

TEST_CASE("decide: stars are their own mixtures") {
    StarTree s({rat("1"), rat("2"), rat("3"), rat("4")});
    MixtureDecision dec = decide_two_star_mixture(star_metric(s));
    CHECK(dec.verdict == Verdict::yes);
    CHECK(dec.basis == Basis::star_trivial);
    REQUIRE(dec.witness.has_value());
    CHECK(dec.witness->first.weights == s.weights);
    CHECK(dec.witness->second.weights == s.weights);

    // degenerate star is not a strict mixture but is a closed one
    DissimilarityMap deg = star_metric(StarTree({rat("0"), rat("1"), rat("1"), rat("1")}, Regime::closed));
    CHECK(decide_two_star_mixture(deg).verdict == Verdict::no);
    CHECK(decide_two_star_mixture(deg, false, Regime::closed).verdict == Verdict::yes);
    CHECK_FALSE(k_star_feasible(deg, 2, SignMode::positive).feasible);
    CHECK(k_star_feasible(deg, 2, SignMode::nonnegative).feasible);
}

TEST_CASE("decide: both sides admissible gives eight families") {
    DissimilarityMap t =
        double_star_metric(DoubleStar({1, 2}, rat("2"), {rat("5"), rat("4"), rat("3"), rat("3")}));
    MixtureDecision dec = decide_two_star_mixture(t);
    CHECK(dec.verdict == Verdict::yes);
    CHECK(dec.families == all_8);
    CHECK(enumerate_fiber_cases(t).size() == 8);
}

TEST_CASE("decide: |I|=2 at n=5") {
    DissimilarityMap t = double_star_metric(
        DoubleStar({1, 2}, rat("1"), {rat("4"), rat("3"), rat("1"), rat("2"), rat("2")}));
    MixtureDecision dec = decide_two_star_mixture(t);
    CHECK(dec.verdict == Verdict::yes);
    CHECK(dec.basis == Basis::double_star_i2);
    CHECK(dec.families == all_1x);
}

TEST_CASE("decide: degenerate pendant blocks strict mixtures") {
    DissimilarityMap t =
        double_star_metric(DoubleStar({1, 2}, rat("2"), {rat("5"), rat("4"), rat("1"), rat("0")}));
    MixtureDecision dec = decide_two_star_mixture(t);
    CHECK(dec.verdict == Verdict::no);
    CHECK_FALSE(k_star_feasible(t, 2, SignMode::positive).feasible);
}

TEST_CASE("decide: closed regime at the boundary e1 = g") {
    DissimilarityMap t =
        double_star_metric(DoubleStar({1, 2}, rat("2"), {rat("2"), rat("3"), rat("1"), rat("1")}));
    CHECK(decide_two_star_mixture(t).verdict == Verdict::no); // strict needs e1 > g
    MixtureDecision closed = decide_two_star_mixture(t, false, Regime::closed);
    CHECK(closed.verdict == Verdict::yes);
    REQUIRE(closed.witness.has_value());
    CHECK(verify_decomposition(t, closed.witness->first, closed.witness->second, Regime::closed));
    CHECK_FALSE(k_star_feasible(t, 2, SignMode::positive).feasible);
    CHECK(k_star_feasible(t, 2, SignMode::nonnegative).feasible);
}

TEST_CASE("decide is invariant under positive scaling") {
    std::mt19937_64 rng(33);
    for (int t = 0; t < 40; ++t) {
        DissimilarityMap m = double_star_metric(random_double_star_i2(rng, 4 + t % 3));
        Rational lambda = random_weight(rng);
        MixtureDecision a = decide_two_star_mixture(m);
        MixtureDecision b = decide_two_star_mixture(scaled(m, lambda));
        CHECK(a.verdict == b.verdict);
        CHECK(a.families == b.families);
    }
}

TEST_CASE("enumerate: fixture domains match the case tables") {
    DissimilarityMap t =
        double_star_metric(DoubleStar({1, 2}, rat("2"), {rat("5"), rat("4"), rat("1"), rat("1")}));
    std::vector<CaseFamily> fams = enumerate_fiber_cases(t);
    REQUIRE(fams.size() == 4);
    const CaseFamily& c11 = fams[0];
    CHECK(c11.id == "1.1");
    // u in [0, 3), w in (-2, 0): min{e2-g, e3, e4} = min{2,1,1} = 1
    CHECK(c11.u_lower.c0 == 0);
    CHECK_FALSE(c11.u_lower.open);
    CHECK(c11.u_upper.c0 == 3);
    CHECK(c11.u_upper.open);
    CHECK(c11.w_lower.c0 == -2);
    CHECK(c11.w_lower.open);
    CHECK(c11.w_upper.c0 == 0);
    CHECK(c11.w_upper.open);
}

TEST_CASE("enumerate: n=5 case 1.2 domain from the five-taxon blocks") {
    DissimilarityMap t = double_star_metric(
        DoubleStar({1, 2}, rat("1"), {rat("4"), rat("3"), rat("1"), rat("2"), rat("2")}));
    std::vector<CaseFamily> fams = enumerate_fiber_cases(t);
    REQUIRE(fams.size() == 4);
    const CaseFamily& c12 = fams[1];
    CHECK(c12.id == "1.2");
    // 0 >= u > g-e2 = -2 and 2*min{e1-g, e3, e4, e5} = 2 > w >= 0
    CHECK(c12.u_upper.c0 == 0);
    CHECK_FALSE(c12.u_upper.open); // closed at zero for n >= 5
    CHECK(c12.u_lower.c0 == -2);
    CHECK(c12.u_lower.open);
    CHECK(c12.w_lower.c0 == 0);
    CHECK_FALSE(c12.w_lower.open);
    CHECK(c12.w_upper.c0 == 2);
    CHECK(c12.w_upper.open);
}

TEST_CASE("enumerate: error cases") {
    StarTree s({rat("1"), rat("2"), rat("3"), rat("4")});
    CHECK_THROWS_WITH_AS(enumerate_fiber_cases(star_metric(s)), doctest::Contains("StarInput"), Error);
    WeightedTree cat(5, 8,
                     {{1, 6, rat("1")},
                      {2, 6, rat("1")},
                      {6, 7, rat("1")},
                      {3, 7, rat("1")},
                      {7, 8, rat("1")},
                      {4, 8, rat("1")},
                      {5, 8, rat("1")}});
    CHECK_THROWS_WITH_AS(enumerate_fiber_cases(tree_metric(cat)), doctest::Contains("NotInImage"), Error);
    DissimilarityMap no = double_star_metric(DoubleStar({1, 2}, rat("2"), {rat("1"), rat("1"), rat("1"), rat("1")}));
    CHECK_THROWS_WITH_AS(enumerate_fiber_cases(no), doctest::Contains("NotInImage"), Error);
    DissimilarityMap i3 = double_star_metric(
        DoubleStar({1, 2, 3}, rat("1"), std::vector<Rational>(6, Rational(2))));
    CHECK_THROWS_WITH_AS(enumerate_fiber_cases(i3), doctest::Contains("Unsupported"), Error);
}

TEST_CASE("sample: the three derived fixtures") {
    DissimilarityMap t1 =
        double_star_metric(DoubleStar({1, 2}, rat("2"), {rat("5"), rat("4"), rat("1"), rat("1")}));
    auto s1 = sample_decomposition(t1, "1.1", rat("1"), rat("-1"));
    CHECK(s1.first.weights == std::vector<Rational>{rat("2"), rat("6"), rat("1"), rat("1")});
    CHECK(s1.second.weights == std::vector<Rational>{rat("15/2"), rat("3/2"), rat("1/2"), rat("1/2")});

    DissimilarityMap t2 =
        double_star_metric(DoubleStar({1, 2}, rat("1"), {rat("3"), rat("2"), rat("1"), rat("1")}));
    auto s2 = sample_decomposition(t2, "1.4", rat("-1/4"), rat("-1/2"));
    CHECK(s2.first.weights == std::vector<Rational>{rat("2"), rat("3"), rat("1"), rat("1")});
    CHECK(s2.second.weights ==
          std::vector<Rational>{rat("17/4"), rat("1/2"), rat("3/4"), rat("3/4")});

    DissimilarityMap t3 = double_star_metric(
        DoubleStar({1, 2}, rat("1"), {rat("4"), rat("3"), rat("1"), rat("2"), rat("2")}));
    auto s3 = sample_decomposition(t3, "1.2", rat("-1"), rat("1"));
    CHECK(s3.first.weights ==
          std::vector<Rational>{rat("5/2"), rat("9/2"), rat("1/2"), rat("3/2"), rat("3/2")});
    CHECK(s3.second.weights ==
          std::vector<Rational>{rat("5"), rat("1"), rat("1"), rat("2"), rat("2")});
}

TEST_CASE("sample: domain boundaries rejected in the strict regime") {
    DissimilarityMap t =
        double_star_metric(DoubleStar({1, 2}, rat("2"), {rat("5"), rat("4"), rat("1"), rat("1")}));
    CHECK_THROWS_WITH_AS(sample_decomposition(t, "1.1", rat("3"), rat("-1")),
                         doctest::Contains("OutOfDomain"), Error); // u = e1-g
    CHECK_THROWS_WITH_AS(sample_decomposition(t, "1.1", rat("0"), rat("-1")),
                         doctest::Contains("OutOfDomain"), Error); // u = 0 is boundary
    CHECK_THROWS_WITH_AS(sample_decomposition(t, "1.1", rat("1"), rat("0")),
                         doctest::Contains("OutOfDomain"), Error); // w = 0
    CHECK_THROWS_WITH_AS(sample_decomposition(t, "2.1", rat("1"), rat("-1/2")),
                         doctest::Contains("OutOfDomain"), Error); // 2.x not admissible
    // closed regime accepts the closure
    auto s = sample_decomposition(t, "1.1", rat("0"), rat("-1"), Regime::closed);
    CHECK(verify_decomposition(t, s.first, s.second, Regime::closed));
}

TEST_CASE("verify_decomposition is exact") {
    DissimilarityMap t =
        double_star_metric(DoubleStar({1, 2}, rat("2"), {rat("5"), rat("4"), rat("1"), rat("1")}));
    auto s = sample_decomposition(t, "1.1", rat("1"), rat("-1"));
    CHECK(verify_decomposition(t, s.first, s.second));
    CHECK(verify_decomposition(t, s.second, s.first)); // swap is again a witness
    // bump a weight that attains the maximum somewhere: breaks exact equality
    StarTree bumped = s.second;
    bumped.weights[0] += 1;
    CHECK_FALSE(verify_decomposition(t, s.first, bumped));
    StarTree sq({rat("1"), rat("2"), rat("3"), rat("4")});
    CHECK(verify_decomposition(star_metric(sq), sq, sq));
}

TEST_CASE("all families verify on interior grids; distinct cases differ") {
    std::mt19937_64 rng(34);
    for (int t = 0; t < 12; ++t) {
        int n = 4 + t % 3;
        DissimilarityMap m = double_star_metric(random_double_star_i2(rng, n));
        std::vector<CaseFamily> fams;
        try {
            fams = enumerate_fiber_cases(m);
        } catch (const Error&) {
            continue; // side condition may fail for random J pendants at n=4
        }
        std::set<std::vector<std::vector<Rational>>> seen_by_family;
        for (const auto& fam : fams) {
            std::set<std::vector<std::vector<Rational>>> mine;
            for (int i = 1; i <= 3; ++i)
                for (int j = 1; j <= 3; ++j) {
                    auto [u, w] = family_grid_point(fam, i, j, 3);
                    auto stars = sample_decomposition(m, fam.id, u, w);
                    CHECK(verify_decomposition(m, stars.first, stars.second));
                    auto key = unordered_pair(stars);
                    CHECK_FALSE(seen_by_family.count(key)); // disjoint from other families
                    mine.insert(key);
                }
            for (auto& k : mine) seen_by_family.insert(k);
        }
    }
}

namespace {

// true iff the case formulas at (u,w) yield positive stars whose mix is t
bool formulas_work(const DissimilarityMap& t, const CaseFamily& fam, const Rational& u,
                   const Rational& w) {
    try {
        auto stars = fam.weights_at(u, w, Regime::strict);
        return verify_decomposition(t, stars.first, stars.second);
    } catch (const Error&) {
        return false; // some weight went nonpositive
    }
}

} // namespace

TEST_CASE("domain faces are exactly where the formulas stop working") {
    // the printed bounds delimit positivity and reproduction; stepping just
    // outside any face must break one of them
    for (const auto& shape : {std::vector<std::string>{"5", "4", "1", "1"},
                              std::vector<std::string>{"5", "4", "3", "3"},
                              std::vector<std::string>{"4", "3", "1", "2", "2"}}) {
        std::vector<Rational> pendant;
        for (const auto& s : shape) pendant.push_back(rat(s));
        Rational g = shape.size() == 5 ? rat("1") : rat("2");
        DissimilarityMap t = double_star_metric(DoubleStar({1, 2}, g, pendant));
        Rational eps("1/64");
        for (const auto& fam : enumerate_fiber_cases(t)) {
            auto [u0, w0] = family_grid_point(fam, 1, 1, 1); // interior midpoint
            CHECK(formulas_work(t, fam, u0, w0));
            // cross each face at the other parameter's midpoint
            CHECK_FALSE(formulas_work(t, fam, fam.u_lower.at(w0) - eps, w0));
            CHECK_FALSE(formulas_work(t, fam, fam.u_upper.at(w0) + eps, w0));
            CHECK_FALSE(formulas_work(t, fam, u0, fam.w_lower.at(u0) - eps));
            CHECK_FALSE(formulas_work(t, fam, u0, fam.w_upper.at(u0) + eps));
        }
    }
}

TEST_CASE("relabeled quartets relabel witnesses back") {
    // quartet (13|24): cherry side {1,3}
    DissimilarityMap t =
        double_star_metric(DoubleStar({1, 3}, rat("2"), {rat("5"), rat("1"), rat("4"), rat("1")}));
    MixtureDecision dec = decide_two_star_mixture(t);
    CHECK(dec.verdict == Verdict::yes);
    CHECK(dec.families == all_1x);
    std::vector<CaseFamily> fams = enumerate_fiber_cases(t);
    CHECK(fams[0].canonical_to_original == std::vector<int>{1, 3, 2, 4});
    auto [u, w] = family_grid_point(fams[0], 1, 1, 1);
    auto stars = sample_decomposition(t, "1.1", u, w);
    CHECK(verify_decomposition(t, stars.first, stars.second));
}

TEST_CASE("every actual decomposition is captured by some family") {
    // generate star pairs, mix, and check the ordered pair re-emerges from a
    // family evaluated at the pair's own offset parameters
    std::mt19937_64 rng(37);
    std::uniform_int_distribution<int> quarters(-4, 4);
    std::uniform_int_distribution<int> pos_q(5, 8), neg_q(-8, -5), small_neg_q(-4, -1);
    int covered = 0, applicable = 0;
    for (int trial = 0; trial < 600; ++trial) {
        int n = 4 + trial % 2;
        StarTree a = random_star(rng, n, 8);
        StarTree b = a;
        if (trial % 3 != 2) {
            // equal delta on the far side keeps the four point equality, so
            // the mix lands on a quartet topology; mode 0 picks delta signs
            // that force it, mode 1 draws them freely
            for (auto& q : a.weights) q += 2;
            bool forced = trial % 3 == 0;
            Rational d1(forced ? pos_q(rng) : quarters(rng), 4);
            Rational d2(forced ? neg_q(rng) : quarters(rng), 4);
            Rational dJ(forced ? small_neg_q(rng) : quarters(rng), 4);
            d1.canonicalize();
            d2.canonicalize();
            dJ.canonicalize();
            b = a;
            b.weights[0] += d1;
            b.weights[1] += d2;
            for (int j = 2; j < n; ++j) b.weights[j] += dJ;
        } else {
            b = random_star(rng, n, 8);
        }
        DissimilarityMap t = tropical_mix(star_metric(a), star_metric(b));
        TopologyClass cls = classify_topology(t);
        if (cls.kind != Topology::double_star || cls.dstar->I.size() != 2) continue;
        std::vector<CaseFamily> fams;
        try {
            fams = enumerate_fiber_cases(t);
        } catch (const Error&) {
            continue;
        }
        ++applicable;
        const auto& order = fams.front().canonical_to_original;
        auto relabel = [&](const StarTree& s) {
            std::vector<Rational> w;
            for (int p = 0; p < n; ++p) w.push_back(s.weights[order[p] - 1]);
            return w;
        };
        std::vector<Rational> wa = relabel(a), wb = relabel(b);
        bool found = false;
        for (int swap = 0; swap < 2 && !found; ++swap) {
            const auto& first = swap ? wb : wa;
            const auto& second = swap ? wa : wb;
            // offsets in the canonical frame; u over pair {1,2}, w over {3,4}
            Rational u = (second[0] + second[1]) - (first[0] + first[1]);
            Rational w = (second[2] + second[3]) - (first[2] + first[3]);
            for (const auto& fam : fams) {
                if (!fam.contains(u, w, Regime::closed)) continue;
                bool match = true;
                for (int p = 0; p < n && match; ++p) {
                    match = fam.first_weights[p].eval(u, w) == first[p] &&
                            fam.second_weights[p].eval(u, w) == second[p];
                }
                if (match) found = true;
            }
        }
        if (found) ++covered;
    }
    CHECK(applicable > 200); // the forced mode always hits the quartet image
    CHECK(covered == applicable);
}

TEST_CASE("decide agrees with the oracle on a small exhaustive grid") {
    for (int gi = 1; gi <= 2; ++gi)
        for (int a = 1; a <= 3; ++a)
            for (int b = 1; b <= 3; ++b)
                for (int c = 1; c <= 3; ++c)
                    for (int d = 1; d <= 3; ++d) {
                        DissimilarityMap t = double_star_metric(DoubleStar(
                            {1, 2}, Rational(gi),
                            {Rational(2 * a - 1, 2), Rational(2 * b - 1, 2), Rational(2 * c - 1, 2),
                             Rational(2 * d - 1, 2)},
                            Regime::closed));
                        bool theorem = decide_two_star_mixture(t).verdict == Verdict::yes;
                        bool oracle = k_star_feasible(t, 2, SignMode::positive).feasible;
                        CHECK(theorem == oracle);
                    }
}

TEST_CASE("decide: quartet with only the far side admissible") {
    DissimilarityMap t =
        double_star_metric(DoubleStar({1, 2}, rat("2"), {rat("1"), rat("1"), rat("4"), rat("4")}));
    MixtureDecision dec = decide_two_star_mixture(t);
    CHECK(dec.verdict == Verdict::yes);
    CHECK(dec.families == std::vector<std::string>{"2.1", "2.2", "2.3", "2.4"});
    REQUIRE(dec.witness.has_value());
    CHECK(verify_decomposition(t, dec.witness->first, dec.witness->second));
    CHECK(k_star_feasible(t, 2, SignMode::positive).feasible);
}

TEST_CASE("decide agrees with the oracle on random n=5 and n=6 double stars") {
    std::mt19937_64 rng(36);
    std::uniform_int_distribution<int> num(1, 12);
    for (int t = 0; t < 60; ++t) {
        int n = 5 + t % 2;
        // unconstrained pendants: both verdicts occur
        Rational g(num(rng), 4);
        std::vector<Rational> pendant;
        for (int i = 0; i < n; ++i) pendant.push_back(Rational(num(rng), 4));
        DissimilarityMap m = double_star_metric(DoubleStar({1, 2}, g, pendant, Regime::closed));
        bool theorem = decide_two_star_mixture(m).verdict == Verdict::yes;
        bool oracle = k_star_feasible(m, 2, SignMode::positive).feasible;
        CHECK(theorem == oracle);
    }
}

TEST_CASE("cross-check carries both verdicts on the n=6 open-question instance") {
    DissimilarityMap t = double_star_metric(
        DoubleStar({1, 2, 3}, rat("1"), std::vector<Rational>(6, Rational(2))));
    MixtureDecision dec = decide_two_star_mixture(t, true);
    CHECK(dec.basis == Basis::double_star_i3plus);
    CHECK(dec.theorem_verdict == Verdict::yes); // all e_i > g
    REQUIRE(dec.oracle_verdict.has_value());
    CHECK(*dec.oracle_verdict == Verdict::no); // refuted by exhaustive patterns
    CHECK(dec.disagreement);
    CHECK(dec.verdict == Verdict::no); // oracle takes precedence
    CHECK(dec.provenance == Provenance::oracle_confirmed);
}
