#pragma once

#include "stm/dissimilarity.hpp"
#include "stm/oracle.hpp"
#include "stm/rational.hpp"
#include "stm/trees.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace stm {

/// Relative differences of two 4-taxon stars: s,t,x,y,u,w pair the six
/// unordered pairs as {1,3},{2,4},{1,4},{2,3},{1,2},{3,4}. Always satisfies
/// s+t = x+y = u+w.
struct Offsets {
    Rational s, t, x, y, u, w;
};

Offsets offsets_from_stars(const StarTree& first, const StarTree& second);

// The mixture of the two stars is the quartet (12|34) iff
// u+ + w+ < s+ + t+ = x+ + y+.
bool quartet_is_12_34(const Offsets& o);

/// One 2-parameter fiber family over a non-star mixture, instantiated for a
/// concrete input: bounds for (u,w) (each possibly affine in the other
/// parameter) and affine weight formulas for both stars, all in a canonical
/// relabeling that puts the cherry side at taxa {1,2}.
struct CaseFamily {
    struct Affine {
        Rational c0, cu, cw; // c0 + cu*u + cw*w
        Rational eval(const Rational& u, const Rational& w) const { return c0 + cu * u + cw * w; }
    };
    struct Bound {
        Rational c0;
        Rational cross; // coefficient of the other parameter
        bool open = true;
        Rational at(const Rational& other) const { return c0 + cross * other; }
    };

    std::string id; // "1.1" .. "2.4"
    int n = 0;
    std::vector<int> canonical_to_original;     // canonical position (1-based) -> taxon
    Bound u_lower, u_upper, w_lower, w_upper;   // cross-coefficients multiply the other param
    bool primary_is_w = true;                   // which parameter has pure bounds
    std::vector<Affine> first_weights, second_weights; // canonical taxa 1..n
    std::string u_formula, w_formula;           // symbolic, canonical labels
    std::string u_instantiated, w_instantiated;
    int orbit_size = 2; // family and its swap are distinct

    bool strictly_inside(const Rational& u, const Rational& w) const;
    bool contains(const Rational& u, const Rational& w, Regime regime) const;
    // the two stars at (u,w), in original labeling
    std::pair<StarTree, StarTree> weights_at(const Rational& u, const Rational& w,
                                             Regime regime) const;
};

enum class Verdict { yes, no };
enum class Basis {
    star_trivial,
    quartet,
    double_star_i2,
    double_star_i3plus,
    topology_excluded,
    weight_condition_failed,
};
enum class Provenance { theorem_only, oracle_confirmed };

const char* verdict_name(Verdict v);
const char* basis_name(Basis b);
const char* provenance_name(Provenance p);

struct MixtureDecision {
    Verdict verdict = Verdict::no;
    Basis basis = Basis::topology_excluded;
    std::vector<std::string> families;
    Provenance provenance = Provenance::theorem_only;
    std::optional<std::pair<StarTree, StarTree>> witness;

    Verdict theorem_verdict = Verdict::no;
    std::optional<Verdict> oracle_verdict; // set when the oracle ran
    bool oracle_authoritative = false;     // oracle verdict took precedence
    bool disagreement = false;
    TopologyClass topology;
};

/// The main decision: is D the pointwise-max mixture of two star tree
/// metrics (strict regime: positive weights; closed: nonnegative)?
/// With cross_check, tree-metric inputs are also run through the exact
/// oracle, whose verdict takes precedence; for non-tree-metric inputs the
/// oracle answers a different question (membership in the full mixture image)
/// and is reported informationally only.
MixtureDecision decide_two_star_mixture(const DissimilarityMap& d, bool cross_check = false,
                                        Regime regime = Regime::strict,
                                        const OracleConfig& cfg = {});

/// Concrete fiber families over a non-star mixture: four per satisfied side
/// condition (1.x for the cherry side, 2.x for the opposite side at n = 4).
std::vector<CaseFamily> enumerate_fiber_cases(const DissimilarityMap& d,
                                              Regime regime = Regime::strict);

std::pair<StarTree, StarTree> sample_decomposition(const DissimilarityMap& d,
                                                   const std::string& case_id, const Rational& u,
                                                   const Rational& w,
                                                   Regime regime = Regime::strict);

// Exact check: mix of the two star metrics equals d and both stars satisfy
// the regime.
bool verify_decomposition(const DissimilarityMap& d, const StarTree& first,
                          const StarTree& second, Regime regime = Regime::strict);

// Interior grid point of a family: (primary i/(g+1), secondary j/(g+1)).
std::pair<Rational, Rational> family_grid_point(const CaseFamily& fam, int i, int j,
                                                int grid_size);

} // namespace stm
