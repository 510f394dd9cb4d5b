#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stm/dissimilarity.hpp"
#include "stm/linear.hpp"
#include "testutil.hpp"

#include <random>

using namespace stm;
using namespace stm::testutil;

namespace {

// expr = coeffs . x + c REL 0
LinearConstraint c1(std::vector<Rational> coeffs, Rational c, Rel rel) {
    return {std::move(coeffs), std::move(c), rel};
}

bool holds(const LinearConstraint& c, const std::vector<Rational>& x) {
    Rational v = c.constant;
    for (size_t i = 0; i < c.coeffs.size(); ++i) v += c.coeffs[i] * x[i];
    if (c.rel == Rel::eq) return v == 0;
    if (c.rel == Rel::ge) return v >= 0;
    return v > 0;
}

} // namespace

TEST_CASE("one variable, strict vs closed") {
    LinearSystem sys;
    sys.num_vars = 1;
    sys.add({rat("1")}, rat("0"), Rel::gt);  // x > 0
    sys.add({rat("-1")}, rat("1"), Rel::ge); // 1 - x >= 0
    LinearResult r = solve_linear(sys);
    REQUIRE(r.feasible);
    CHECK(r.witness[0] > 0);
    CHECK(r.witness[0] <= 1);

    LinearSystem bad;
    bad.num_vars = 1;
    bad.add({rat("1")}, rat("0"), Rel::gt);  // x > 0
    bad.add({rat("-1")}, rat("0"), Rel::ge); // -x >= 0
    CHECK_FALSE(solve_linear(bad).feasible);

    LinearSystem point;
    point.num_vars = 1;
    point.add({rat("1")}, rat("0"), Rel::ge);
    point.add({rat("-1")}, rat("0"), Rel::ge); // x == 0 via two weak bounds
    LinearResult rp = solve_linear(point);
    REQUIRE(rp.feasible);
    CHECK(rp.witness[0] == 0);

    LinearSystem open_point;
    open_point.num_vars = 1;
    open_point.add({rat("1")}, rat("-1"), Rel::ge); // x >= 1
    open_point.add({rat("-1")}, rat("1"), Rel::gt); // x < 1
    CHECK_FALSE(solve_linear(open_point).feasible);
}

TEST_CASE("equality substitution") {
    LinearSystem sys;
    sys.num_vars = 2;
    sys.add({rat("1"), rat("1")}, rat("-3"), Rel::eq); // x + y = 3
    sys.add({rat("1"), rat("-1")}, rat("-1"), Rel::ge); // x - y >= 1
    sys.add({rat("0"), rat("1")}, rat("0"), Rel::gt);   // y > 0
    LinearResult r = solve_linear(sys);
    REQUIRE(r.feasible);
    CHECK(r.witness[0] + r.witness[1] == 3);
    CHECK(r.witness[0] - r.witness[1] >= 1);
    CHECK(r.witness[1] > 0);

    LinearSystem inconsistent;
    inconsistent.num_vars = 2;
    inconsistent.add({rat("1"), rat("1")}, rat("-3"), Rel::eq);
    inconsistent.add({rat("1"), rat("1")}, rat("-4"), Rel::eq);
    CHECK_FALSE(solve_linear(inconsistent).feasible);
}

TEST_CASE("unconstrained variables get values") {
    LinearSystem sys;
    sys.num_vars = 3;
    sys.add({rat("1"), rat("0"), rat("0")}, rat("-5"), Rel::gt); // x0 > 5
    LinearResult r = solve_linear(sys);
    REQUIRE(r.feasible);
    CHECK(r.witness.size() == 3);
    CHECK(r.witness[0] > 5);
}

TEST_CASE("the case-1.1 pattern system for the fixture quartet is feasible") {
    // quartet e=(5,4,1,1), g=2; pattern assigns pairs 12,13,14 to the second
    // star and 23,24,34 to the first; vars p1..p4,q1..q4
    DissimilarityMap t = make_map(4, {"9", "8", "8", "7", "7", "2"});
    LinearSystem sys;
    sys.num_vars = 8;
    int assigned[6] = {1, 1, 1, 0, 0, 0};
    int p = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j, ++p) {
            std::vector<Rational> eq(8, Rational(0));
            eq[assigned[p] * 4 + i] = 1;
            eq[assigned[p] * 4 + j] = 1;
            sys.add(eq, -t.at(i + 1, j + 1), Rel::eq);
            for (int m = 0; m < 2; ++m) {
                std::vector<Rational> le(8, Rational(0));
                le[m * 4 + i] = -1;
                le[m * 4 + j] = -1;
                sys.add(le, t.at(i + 1, j + 1), Rel::ge);
            }
        }
    for (int v = 0; v < 8; ++v) {
        std::vector<Rational> pos(8, Rational(0));
        pos[v] = 1;
        sys.add(pos, rat("0"), Rel::gt);
    }
    LinearResult r = solve_linear(sys);
    REQUIRE(r.feasible);
    for (const auto& c : sys.constraints) CHECK(holds(c, r.witness));
}

TEST_CASE("planted solutions are always found") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> coeff(-3, 3);
    std::uniform_int_distribution<int> nvars(1, 5);
    std::uniform_int_distribution<int> ncons(1, 10);
    std::uniform_int_distribution<int> relpick(0, 2);
    for (int trial = 0; trial < 300; ++trial) {
        int n = nvars(rng);
        std::vector<Rational> planted;
        for (int v = 0; v < n; ++v) planted.push_back(Rational(coeff(rng), 2));
        LinearSystem sys;
        sys.num_vars = n;
        int m = ncons(rng);
        for (int i = 0; i < m; ++i) {
            std::vector<Rational> cs;
            Rational dot(0);
            for (int v = 0; v < n; ++v) {
                cs.push_back(Rational(coeff(rng)));
                dot += cs.back() * planted[v];
            }
            switch (relpick(rng)) {
            case 0: sys.add(cs, -dot, Rel::eq); break;            // == planted value
            case 1: sys.add(cs, -dot, Rel::ge); break;            // >= planted value
            default: sys.add(cs, -dot + 1, Rel::gt); break;       // > planted value - 1
            }
        }
        LinearResult r = solve_linear(sys);
        REQUIRE(r.feasible); // planted point satisfies everything
        for (const auto& c : sys.constraints) CHECK(holds(c, r.witness));
    }
}

TEST_CASE("random systems: feasible answers carry valid witnesses") {
    std::mt19937_64 rng(22);
    std::uniform_int_distribution<int> coeff(-2, 2);
    std::uniform_int_distribution<int> relpick(0, 2);
    int feasible_count = 0;
    for (int trial = 0; trial < 300; ++trial) {
        LinearSystem sys;
        sys.num_vars = 3;
        for (int i = 0; i < 6; ++i) {
            std::vector<Rational> cs;
            for (int v = 0; v < 3; ++v) cs.push_back(Rational(coeff(rng)));
            Rel rel = relpick(rng) == 0 ? Rel::eq : (relpick(rng) == 1 ? Rel::ge : Rel::gt);
            sys.add(cs, Rational(coeff(rng)), rel);
        }
        LinearResult r = solve_linear(sys);
        if (r.feasible) {
            ++feasible_count;
            for (const auto& c : sys.constraints) CHECK(holds(c, r.witness));
        }
    }
    CHECK(feasible_count > 0); // sanity: both outcomes occur
}
