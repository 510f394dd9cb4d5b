#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stm/dissimilarity.hpp"
#include "stm/error.hpp"
#include "stm/trees.hpp"
#include "testutil.hpp"

#include <random>

using namespace stm;
using namespace stm::testutil;

TEST_CASE("entry order is row-major upper-triangular") {
    // entries (1,2),(1,3),(1,4),(2,3),(2,4),(3,4)
    DissimilarityMap d = make_map(4, {"1", "2", "3", "4", "5", "6"});
    CHECK(d.at(1, 2) == 1);
    CHECK(d.at(1, 3) == 2);
    CHECK(d.at(1, 4) == 3);
    CHECK(d.at(2, 3) == 4);
    CHECK(d.at(2, 4) == 5);
    CHECK(d.at(3, 4) == 6);
    CHECK(d.at(4, 3) == 6);
    CHECK(d.at(2, 2) == 0);
}

TEST_CASE("construction validates input") {
    // cut metric (12|34)
    DissimilarityMap cut = make_map(4, {"0", "1", "1", "1", "1", "0"});
    CHECK(cut.at(1, 2) == 0);
    CHECK(cut.at(3, 4) == 0);
    CHECK(cut.at(1, 3) == 1);

    CHECK(DissimilarityMap::zero(4).entries() == std::vector<Rational>(6, Rational(0)));

    CHECK_THROWS_WITH_AS(make_map(4, {"1", "-1", "1", "1", "1", "1"}), doctest::Contains("NegativeEntry"), Error);
    CHECK_THROWS_WITH_AS(make_map(4, {"1", "1", "1"}), doctest::Contains("LengthMismatch"), Error);
    CHECK_THROWS_WITH_AS(make_map(2, {"1"}), doctest::Contains("TooFewTaxa"), Error);
}

TEST_CASE("tropical mix is the entrywise maximum") {
    DissimilarityMap a = star_metric(StarTree({Rational(1), Rational(1), Rational(1), Rational(1)}));
    DissimilarityMap b = star_metric(StarTree({Rational(2), Rational(1), Rational(1), Rational(1)}));
    CHECK(tropical_mix(a, b) == b); // b dominates pointwise
    CHECK(tropical_mix(a, a) == a);

    DissimilarityMap d = star_metric(StarTree({rat("2"), rat("6"), rat("1"), rat("1")}));
    DissimilarityMap dbar = star_metric(StarTree({rat("15/2"), rat("3/2"), rat("1/2"), rat("1/2")}));
    DissimilarityMap quartet =
        double_star_metric(DoubleStar({1, 2}, rat("2"), {rat("5"), rat("4"), rat("1"), rat("1")}));
    CHECK(tropical_mix(d, dbar) == quartet);

    CHECK_THROWS_AS(tropical_mix(a, DissimilarityMap::zero(5)), Error);
}

TEST_CASE("metric predicate") {
    CHECK(is_metric(make_map(4, {"0", "1", "1", "1", "1", "0"})));
    CHECK(is_metric(DissimilarityMap::zero(4)));
    CHECK_FALSE(is_metric(make_map(3, {"1", "1", "5"}))); // 1+1 < 5
}

TEST_CASE("quartet pairing sums and attaining set") {
    DissimilarityMap cut = make_map(4, {"0", "1", "1", "1", "1", "0"});
    QuartetPairing qp = quartet_pairing(cut, 1, 2, 3, 4);
    CHECK(qp.sum_ij_kl == 0);
    CHECK(qp.sum_ik_jl == 2);
    CHECK(qp.sum_il_jk == 2);
    CHECK_FALSE(qp.attains(PairSplit::ij_kl));
    CHECK(qp.attains(PairSplit::ik_jl));
    CHECK(qp.attains(PairSplit::il_jk));
    CHECK(qp.attaining_count() == 2);

    std::mt19937_64 rng(1);
    for (int t = 0; t < 20; ++t) {
        DissimilarityMap s = star_metric(random_star(rng, 5));
        QuartetPairing q = quartet_pairing(s, 1, 2, 4, 5);
        CHECK(q.attaining_count() == 3); // all three sums equal on stars
    }
    CHECK(quartet_pairing(DissimilarityMap::zero(4), 1, 2, 3, 4).attaining_count() == 3);
    CHECK_THROWS_AS(quartet_pairing(cut, 1, 2, 3, 3), Error);
    CHECK_THROWS_AS(quartet_pairing(cut, 0, 2, 3, 4), Error);
}

TEST_CASE("four point condition") {
    CHECK(is_tree_metric(make_map(4, {"0", "1", "1", "1", "1", "0"})));
    // metric whose maximum pair-sum is attained once: sums are 8, 6, 6
    DissimilarityMap bad = make_map(4, {"6", "3", "3", "3", "3", "2"});
    CHECK(is_metric(bad));
    QuartetPairing qp = quartet_pairing(bad, 1, 2, 3, 4);
    CHECK(qp.sum_ij_kl == 8);
    CHECK(qp.sum_ik_jl == 6);
    CHECK(qp.sum_il_jk == 6);
    CHECK(qp.attaining_count() == 1);
    CHECK_FALSE(is_tree_metric(bad));

    std::mt19937_64 rng(2);
    for (int t = 0; t < 25; ++t) {
        WeightedTree tree = random_tree(rng, 4 + static_cast<int>(t % 5));
        CHECK(is_tree_metric(tree_metric(tree)));
    }
}

TEST_CASE("star metric predicate") {
    StarTree s({rat("1"), rat("2"), rat("3"), rat("4")});
    DissimilarityMap d = star_metric(s);
    CHECK(d == make_map(4, {"3", "4", "5", "5", "6", "7"}));
    CHECK(is_star_metric(d));
    CHECK_FALSE(is_star_metric(make_map(4, {"0", "1", "1", "1", "1", "0"})));
    CHECK_FALSE(is_star_metric(
        double_star_metric(DoubleStar({1, 2}, rat("1"), {rat("1"), rat("1"), rat("1"), rat("1")}))));
    // n=3: triangle slacks >= 0 iff metric
    CHECK(is_star_metric(make_map(3, {"2", "3", "3"})));
    CHECK_FALSE(is_star_metric(make_map(3, {"1", "1", "5"})));
}

TEST_CASE("restriction relabels in the given order") {
    DissimilarityMap cut5 = cut_metric(5, {{1, 2}, {3, 4, 5}});
    CHECK(restrict_to(cut5, {1, 2, 3, 4}) == make_map(4, {"0", "1", "1", "1", "1", "0"}));
    DissimilarityMap any = make_map(4, {"1", "2", "3", "4", "5", "6"});
    CHECK(restrict_to(any, {1, 2, 3, 4}) == any);
    std::mt19937_64 rng(3);
    DissimilarityMap s = star_metric(random_star(rng, 6));
    CHECK(is_star_metric(restrict_to(s, {2, 3, 5, 6})));
    CHECK_THROWS_AS(restrict_to(any, {1, 2}), Error);
    CHECK_THROWS_AS(restrict_to(any, {1, 2, 2, 3}), Error);
}

TEST_CASE("mix is commutative, associative, idempotent, monotone") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 50; ++t) {
        DissimilarityMap a = star_metric(random_star(rng, 5));
        DissimilarityMap b = star_metric(random_star(rng, 5));
        DissimilarityMap c = star_metric(random_star(rng, 5));
        CHECK(tropical_mix(a, b) == tropical_mix(b, a));
        CHECK(tropical_mix(tropical_mix(a, b), c) == tropical_mix(a, tropical_mix(b, c)));
        CHECK(tropical_mix(a, a) == a);
        DissimilarityMap m = tropical_mix(a, b);
        for (int p = 0; p < pair_count(5); ++p) CHECK(m.entries()[p] >= a.entries()[p]);
    }
}

TEST_CASE("scaling equivariance and mixture closure") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
        DissimilarityMap a = tree_metric(random_tree(rng, 5));
        DissimilarityMap b = tree_metric(random_tree(rng, 5));
        Rational lambda = random_weight(rng);
        CHECK(scaled(tropical_mix(a, b), lambda) == tropical_mix(scaled(a, lambda), scaled(b, lambda)));
        CHECK(is_metric(tropical_mix(a, b))); // mixtures of metrics are metrics
    }
}

TEST_CASE("predicate implication chain and scale invariance") {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 30; ++t) {
        DissimilarityMap s = star_metric(random_star(rng, 5));
        CHECK(is_star_metric(s));
        CHECK(is_tree_metric(s));
        CHECK(is_metric(s));
        Rational lambda = random_weight(rng);
        CHECK(is_star_metric(scaled(s, lambda)));

        DissimilarityMap tm = tree_metric(random_tree(rng, 6));
        CHECK(is_tree_metric(scaled(tm, lambda)) == is_tree_metric(tm));
        // heredity under restriction to 4-subsets
        for (int i = 1; i <= 3; ++i)
            CHECK(is_tree_metric(restrict_to(tm, {i, i + 1, i + 2, i + 3})));
    }
}

TEST_CASE("violation reporting") {
    DissimilarityMap bad = make_map(3, {"1", "1", "5"});
    auto tri = first_triangle_violation(bad);
    REQUIRE(tri.has_value());
    CHECK(bad.at((*tri)[0], (*tri)[1]) > bad.at((*tri)[0], (*tri)[2]) + bad.at((*tri)[2], (*tri)[1]));
    CHECK_FALSE(first_triangle_violation(DissimilarityMap::zero(4)).has_value());

    DissimilarityMap fp = make_map(4, {"6", "3", "3", "3", "3", "2"});
    auto quad = first_four_point_violation(fp);
    REQUIRE(quad.has_value());
    CHECK(*quad == std::array<int, 4>{1, 2, 3, 4});
}
