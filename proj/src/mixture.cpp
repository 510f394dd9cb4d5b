#include "stm/mixture.hpp"

#include "stm/error.hpp"

#include <algorithm>
#include <sstream>

namespace stm {

const char* verdict_name(Verdict v) { return v == Verdict::yes ? "yes" : "no"; }

const char* basis_name(Basis b) {
    switch (b) {
    case Basis::star_trivial: return "StarTrivial";
    case Basis::quartet: return "Quartet";
    case Basis::double_star_i2: return "DoubleStarI2";
    case Basis::double_star_i3plus: return "DoubleStarI3plus";
    case Basis::topology_excluded: return "TopologyExcluded";
    case Basis::weight_condition_failed: return "WeightConditionFailed";
    }
    return "?";
}

const char* provenance_name(Provenance p) {
    return p == Provenance::theorem_only ? "TheoremOnly" : "OracleConfirmed";
}

Offsets offsets_from_stars(const StarTree& first, const StarTree& second) {
    if (first.taxa() != 4 || second.taxa() != 4)
        throw Error(Errc::size_mismatch, "offsets are defined for 4-taxon stars");
    const auto& a = first.weights;
    const auto& b = second.weights;
    Offsets o;
    o.s = (b[0] + b[2]) - (a[0] + a[2]);
    o.t = (b[1] + b[3]) - (a[1] + a[3]);
    o.x = (b[0] + b[3]) - (a[0] + a[3]);
    o.y = (b[1] + b[2]) - (a[1] + a[2]);
    o.u = (b[0] + b[1]) - (a[0] + a[1]);
    o.w = (b[2] + b[3]) - (a[2] + a[3]);
    return o;
}

bool quartet_is_12_34(const Offsets& o) {
    Rational zero(0);
    Rational sp = std::max(o.s, zero) + std::max(o.t, zero);
    Rational xp = std::max(o.x, zero) + std::max(o.y, zero);
    Rational up = std::max(o.u, zero) + std::max(o.w, zero);
    return up < sp && sp == xp;
}

namespace {

bool below(const Rational& value, const CaseFamily::Bound& upper, const Rational& other,
           bool strict_regime) {
    Rational b = upper.at(other);
    return (upper.open && strict_regime) ? value < b : value <= b;
}

bool above(const Rational& value, const CaseFamily::Bound& lower, const Rational& other,
           bool strict_regime) {
    Rational b = lower.at(other);
    return (lower.open && strict_regime) ? value > b : value >= b;
}

} // namespace

bool CaseFamily::strictly_inside(const Rational& u, const Rational& w) const {
    return u > u_lower.at(w) && u < u_upper.at(w) && w > w_lower.at(u) && w < w_upper.at(u);
}

bool CaseFamily::contains(const Rational& u, const Rational& w, Regime regime) const {
    bool strict = regime == Regime::strict;
    return above(u, u_lower, w, strict) && below(u, u_upper, w, strict) &&
           above(w, w_lower, u, strict) && below(w, w_upper, u, strict);
}

std::pair<StarTree, StarTree> CaseFamily::weights_at(const Rational& u, const Rational& w,
                                                     Regime regime) const {
    std::vector<Rational> first_orig(n), second_orig(n);
    bool zero_seen = false;
    for (int p = 0; p < n; ++p) {
        Rational f = first_weights[p].eval(u, w);
        Rational s = second_weights[p].eval(u, w);
        if (f == 0 || s == 0) zero_seen = true;
        int orig = canonical_to_original[p];
        first_orig[orig - 1] = f;
        second_orig[orig - 1] = s;
    }
    Regime reg = (regime == Regime::closed || zero_seen) ? Regime::closed : Regime::strict;
    return {StarTree(first_orig, reg), StarTree(second_orig, reg)};
}

std::pair<Rational, Rational> family_grid_point(const CaseFamily& fam, int i, int j,
                                                int grid_size) {
    if (i < 1 || i > grid_size || j < 1 || j > grid_size)
        throw Error(Errc::bad_indices, "grid point out of range");
    Rational denom(grid_size + 1);
    const CaseFamily::Bound& plo = fam.primary_is_w ? fam.w_lower : fam.u_lower;
    const CaseFamily::Bound& phi = fam.primary_is_w ? fam.w_upper : fam.u_upper;
    // primary bounds are pure (cross == 0)
    Rational p = plo.c0 + (phi.c0 - plo.c0) * Rational(i) / denom;
    const CaseFamily::Bound& slo = fam.primary_is_w ? fam.u_lower : fam.w_lower;
    const CaseFamily::Bound& shi = fam.primary_is_w ? fam.u_upper : fam.w_upper;
    Rational lo = slo.at(p), hi = shi.at(p);
    Rational s = lo + (hi - lo) * Rational(j) / denom;
    return fam.primary_is_w ? std::make_pair(s, p) : std::make_pair(p, s);
}

namespace {

struct CanonicalFrame {
    int n = 0;
    std::vector<int> canonical_to_original; // 1-based positions -> taxa
    Rational g;
    std::vector<Rational> e; // e[1..n] canonical (index 0 unused)
};

CanonicalFrame make_frame(const DoubleStar& ds) {
    CanonicalFrame f;
    f.n = ds.taxa();
    f.g = ds.g;
    f.canonical_to_original = ds.I;
    for (int t : ds.J) f.canonical_to_original.push_back(t);
    f.e.assign(f.n + 1, Rational(0));
    for (int p = 1; p <= f.n; ++p) f.e[p] = ds.pendant[f.canonical_to_original[p - 1] - 1];
    return f;
}

std::string min_formula(const std::vector<std::string>& parts) {
    std::string s = "min{";
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) s += ",";
        s += parts[i];
    }
    return s + "}";
}

CaseFamily base_family(const CanonicalFrame& fr, const std::string& id) {
    CaseFamily fam;
    fam.id = id;
    fam.n = fr.n;
    fam.canonical_to_original = fr.canonical_to_original;
    fam.first_weights.assign(fr.n, CaseFamily::Affine{Rational(0), Rational(0), Rational(0)});
    fam.second_weights.assign(fr.n, CaseFamily::Affine{Rational(0), Rational(0), Rational(0)});
    return fam;
}

// Families over the cherry side {1,2}: the four 1.x cases, with every
// J-pendant carrying the e3 role. Valid for n = 4 and for |I| = 2 at n >= 5.
std::vector<CaseFamily> families_side_I(const CanonicalFrame& fr) {
    const Rational& g = fr.g;
    const auto& e = fr.e;
    int n = fr.n;
    Rational half(1, 2);

    Rational min_e2g = e[2] - g; // min over {e2-g} u {e_j}
    std::vector<std::string> parts_e2{"e2-g"};
    Rational min_e1g = e[1] - g; // min over {e1-g} u {e_j}
    std::vector<std::string> parts_e1{"e1-g"};
    for (int j = 3; j <= n; ++j) {
        min_e2g = std::min(min_e2g, e[j]);
        min_e1g = std::min(min_e1g, e[j]);
        parts_e2.push_back("e" + std::to_string(j));
        parts_e1.push_back("e" + std::to_string(j));
    }

    std::vector<CaseFamily> out;
    {
        CaseFamily f = base_family(fr, "1.1");
        f.u_lower = {Rational(0), Rational(0), false};
        f.u_upper = {e[1] - g, Rational(0), true};
        f.w_lower = {-2 * min_e2g, Rational(0), true};
        f.w_upper = {Rational(0), Rational(0), true};
        f.primary_is_w = true;
        f.first_weights[0] = {e[1] - g, Rational(-1), Rational(0)};
        f.first_weights[1] = {e[2] + g, Rational(0), Rational(0)};
        f.second_weights[0] = {e[1] + g, Rational(0), -half};
        f.second_weights[1] = {e[2] - g, Rational(0), half};
        for (int j = 3; j <= n; ++j) {
            f.first_weights[j - 1] = {e[j], Rational(0), Rational(0)};
            f.second_weights[j - 1] = {e[j], Rational(0), half};
        }
        f.u_formula = "e1-g > u >= 0";
        f.w_formula = "0 > w > -2*" + min_formula(parts_e2);
        f.u_instantiated = to_string(e[1] - g) + " > u >= 0";
        f.w_instantiated = "0 > w > " + to_string(-2 * min_e2g);
        out.push_back(std::move(f));
    }
    {
        CaseFamily f = base_family(fr, "1.2");
        f.u_lower = {g - e[2], Rational(0), true};
        f.u_upper = {Rational(0), Rational(0), n == 4}; // closed at 0 for n >= 5
        f.w_lower = {Rational(0), Rational(0), false};
        f.w_upper = {2 * min_e1g, Rational(0), true};
        f.primary_is_w = true;
        f.first_weights[0] = {e[1] - g, Rational(0), -half};
        f.first_weights[1] = {e[2] + g, Rational(0), half};
        f.second_weights[0] = {e[1] + g, Rational(0), Rational(0)};
        f.second_weights[1] = {e[2] - g, Rational(1), Rational(0)};
        for (int j = 3; j <= n; ++j) {
            f.first_weights[j - 1] = {e[j], Rational(0), -half};
            f.second_weights[j - 1] = {e[j], Rational(0), Rational(0)};
        }
        f.u_formula = std::string(n == 4 ? "0 > u > g-e2" : "0 >= u > g-e2");
        f.w_formula = "2*" + min_formula(parts_e1) + " > w >= 0";
        f.u_instantiated =
            std::string(n == 4 ? "0 > u > " : "0 >= u > ") + to_string(g - e[2]);
        f.w_instantiated = to_string(2 * min_e1g) + " > w >= 0";
        out.push_back(std::move(f));
    }
    {
        CaseFamily f = base_family(fr, "1.3");
        f.u_lower = {Rational(0), Rational(0), false};
        f.u_upper = {e[1] - g, -half, true}; // e1-g-w/2 > u
        f.w_lower = {Rational(0), Rational(0), false};
        f.w_upper = {2 * min_e1g, Rational(0), true};
        f.primary_is_w = true;
        f.first_weights[0] = {e[1] - g, Rational(-1), -half};
        f.first_weights[1] = {e[2] + g, Rational(0), half};
        f.second_weights[0] = {e[1] + g, Rational(0), Rational(0)};
        f.second_weights[1] = {e[2] - g, Rational(0), Rational(0)};
        for (int j = 3; j <= n; ++j) {
            f.first_weights[j - 1] = {e[j], Rational(0), -half};
            f.second_weights[j - 1] = {e[j], Rational(0), Rational(0)};
        }
        f.u_formula = "e1-g-w/2 > u >= 0";
        f.w_formula = "2*" + min_formula(parts_e1) + " > w >= 0";
        f.u_instantiated = to_string(e[1] - g) + " - w/2 > u >= 0";
        f.w_instantiated = to_string(2 * min_e1g) + " > w >= 0";
        out.push_back(std::move(f));
    }
    {
        CaseFamily f = base_family(fr, "1.4");
        f.u_lower = {g - e[2], -half, true}; // u > g-e2-w/2
        f.u_upper = {Rational(0), Rational(0), true};
        f.w_lower = {-2 * min_e2g, Rational(0), true};
        f.w_upper = {Rational(0), Rational(0), true};
        f.primary_is_w = true;
        f.first_weights[0] = {e[1] - g, Rational(0), Rational(0)};
        f.first_weights[1] = {e[2] + g, Rational(0), Rational(0)};
        f.second_weights[0] = {e[1] + g, Rational(0), -half};
        f.second_weights[1] = {e[2] - g, Rational(1), half};
        for (int j = 3; j <= n; ++j) {
            f.first_weights[j - 1] = {e[j], Rational(0), Rational(0)};
            f.second_weights[j - 1] = {e[j], Rational(0), half};
        }
        f.u_formula = "0 > u > g-e2-w/2";
        f.w_formula = "0 > w > -2*" + min_formula(parts_e2);
        f.u_instantiated = "0 > u > " + to_string(g - e[2]) + " - w/2";
        f.w_instantiated = "0 > w > " + to_string(-2 * min_e2g);
        out.push_back(std::move(f));
    }
    return out;
}

// Families over the side {3,4}; n = 4 only.
std::vector<CaseFamily> families_side_J(const CanonicalFrame& fr) {
    const Rational& g = fr.g;
    const auto& e = fr.e;
    Rational half(1, 2);
    Rational e3g = e[3] - g;
    Rational e4g = e[4] - g;
    Rational min_e3g = std::min({e[1], e[2], e3g});
    Rational min_e4g = std::min({e[1], e[2], e4g});

    std::vector<CaseFamily> out;
    {
        CaseFamily f = base_family(fr, "2.1");
        f.u_lower = {Rational(0), Rational(0), false};
        f.u_upper = {2 * min_e3g, Rational(0), true};
        f.w_lower = {g - e[4], Rational(0), true};
        f.w_upper = {Rational(0), Rational(0), true};
        f.primary_is_w = false;
        f.first_weights[0] = {e[1], -half, Rational(0)};
        f.first_weights[1] = {e[2], -half, Rational(0)};
        f.first_weights[2] = {e[3] - g, -half, Rational(0)};
        f.first_weights[3] = {e[4] + g, half, Rational(0)};
        f.second_weights[0] = {e[1], Rational(0), Rational(0)};
        f.second_weights[1] = {e[2], Rational(0), Rational(0)};
        f.second_weights[2] = {e[3] + g, Rational(0), Rational(0)};
        f.second_weights[3] = {e[4] - g, Rational(0), Rational(1)};
        f.u_formula = "2*min{e1,e2,e3-g} > u >= 0";
        f.w_formula = "0 > w > g-e4";
        f.u_instantiated = to_string(2 * min_e3g) + " > u >= 0";
        f.w_instantiated = "0 > w > " + to_string(g - e[4]);
        out.push_back(std::move(f));
    }
    {
        CaseFamily f = base_family(fr, "2.2");
        f.u_lower = {-2 * min_e4g, Rational(0), true};
        f.u_upper = {Rational(0), Rational(0), true};
        f.w_lower = {Rational(0), Rational(0), false};
        f.w_upper = {e[3] - g, Rational(0), true};
        f.primary_is_w = false;
        f.first_weights[0] = {e[1], Rational(0), Rational(0)};
        f.first_weights[1] = {e[2], Rational(0), Rational(0)};
        f.first_weights[2] = {e[3] - g, Rational(0), Rational(-1)};
        f.first_weights[3] = {e[4] + g, Rational(0), Rational(0)};
        f.second_weights[0] = {e[1], half, Rational(0)};
        f.second_weights[1] = {e[2], half, Rational(0)};
        f.second_weights[2] = {e[3] + g, -half, Rational(0)};
        f.second_weights[3] = {e[4] - g, half, Rational(0)};
        f.u_formula = "0 > u > -2*min{e4-g,e1,e2}";
        f.w_formula = "e3-g > w >= 0";
        f.u_instantiated = "0 > u > " + to_string(-2 * min_e4g);
        f.w_instantiated = to_string(e[3] - g) + " > w >= 0";
        out.push_back(std::move(f));
    }
    {
        CaseFamily f = base_family(fr, "2.3");
        f.u_lower = {Rational(0), Rational(0), false};
        f.u_upper = {2 * min_e3g, Rational(0), true};
        f.w_lower = {Rational(0), Rational(0), false};
        f.w_upper = {e[3] - g, -half, true}; // e3-g-u/2 > w
        f.primary_is_w = false;
        f.first_weights[0] = {e[1], -half, Rational(0)};
        f.first_weights[1] = {e[2], -half, Rational(0)};
        f.first_weights[2] = {e[3] - g, -half, Rational(-1)};
        f.first_weights[3] = {e[4] + g, half, Rational(0)};
        f.second_weights[0] = {e[1], Rational(0), Rational(0)};
        f.second_weights[1] = {e[2], Rational(0), Rational(0)};
        f.second_weights[2] = {e[3] + g, Rational(0), Rational(0)};
        f.second_weights[3] = {e[4] - g, Rational(0), Rational(0)};
        f.u_formula = "2*min{e2,e1,e3-g} > u >= 0";
        f.w_formula = "e3-g-u/2 > w >= 0";
        f.u_instantiated = to_string(2 * min_e3g) + " > u >= 0";
        f.w_instantiated = to_string(e[3] - g) + " - u/2 > w >= 0";
        out.push_back(std::move(f));
    }
    {
        CaseFamily f = base_family(fr, "2.4");
        f.u_lower = {-2 * min_e4g, Rational(0), true};
        f.u_upper = {Rational(0), Rational(0), true};
        f.w_lower = {g - e[4], -half, true}; // w > (g-e4)-u/2
        f.w_upper = {Rational(0), Rational(0), true};
        f.primary_is_w = false;
        f.first_weights[0] = {e[1], Rational(0), Rational(0)};
        f.first_weights[1] = {e[2], Rational(0), Rational(0)};
        f.first_weights[2] = {e[3] - g, Rational(0), Rational(0)};
        f.first_weights[3] = {e[4] + g, Rational(0), Rational(0)};
        f.second_weights[0] = {e[1], half, Rational(0)};
        f.second_weights[1] = {e[2], half, Rational(0)};
        f.second_weights[2] = {e[3] + g, -half, Rational(0)};
        f.second_weights[3] = {e[4] - g, half, Rational(1)};
        f.u_formula = "0 > u > -2*min{e1,e2,e4-g}";
        f.w_formula = "0 > w > (g-e4)-u/2";
        f.u_instantiated = "0 > u > " + to_string(-2 * min_e4g);
        f.w_instantiated = "0 > w > " + to_string(g - e[4]) + " - u/2";
        out.push_back(std::move(f));
    }
    return out;
}

bool side_condition(const Rational& a, const Rational& b, Regime regime) {
    return regime == Regime::strict ? a > b : a >= b;
}

struct SideStatus {
    bool side_I = false;
    bool side_J = false;            // n = 4 only
    bool positivity_guard = false;  // strict regime needs positive pendants
};

SideStatus side_status(const DoubleStar& ds, Regime regime) {
    SideStatus st;
    st.positivity_guard = true;
    if (regime == Regime::strict)
        for (const auto& p : ds.pendant)
            if (p == 0) st.positivity_guard = false;
    if (ds.I.size() == 2) {
        st.side_I = side_condition(ds.pendant[ds.I[0] - 1], ds.g, regime) &&
                    side_condition(ds.pendant[ds.I[1] - 1], ds.g, regime);
        if (ds.taxa() == 4)
            st.side_J = side_condition(ds.pendant[ds.J[0] - 1], ds.g, regime) &&
                        side_condition(ds.pendant[ds.J[1] - 1], ds.g, regime);
    }
    return st;
}

std::vector<CaseFamily> families_for(const DoubleStar& ds, Regime regime) {
    std::vector<CaseFamily> out;
    SideStatus st = side_status(ds, regime);
    if (!st.positivity_guard || ds.I.size() != 2) return out;
    CanonicalFrame fr = make_frame(ds);
    if (st.side_I)
        for (auto& f : families_side_I(fr)) out.push_back(std::move(f));
    if (st.side_J)
        for (auto& f : families_side_J(fr)) out.push_back(std::move(f));
    return out;
}

// a point of the family usable as a witness under the regime
std::pair<Rational, Rational> witness_point(const CaseFamily& fam, Regime regime) {
    if (regime == Regime::closed) {
        // the closure corner (0,0) lies in every 1.1/2.1 closure
        return {Rational(0), Rational(0)};
    }
    return family_grid_point(fam, 1, 1, 1); // interior midpoint
}

} // namespace

bool verify_decomposition(const DissimilarityMap& d, const StarTree& first,
                          const StarTree& second, Regime regime) {
    if (first.taxa() != d.taxa() || second.taxa() != d.taxa())
        throw Error(Errc::size_mismatch, "star sizes must match the metric");
    if (regime == Regime::strict && (first.degenerate() || second.degenerate())) return false;
    return tropical_mix(star_metric(first), star_metric(second)) == d;
}

MixtureDecision decide_two_star_mixture(const DissimilarityMap& d, bool cross_check,
                                        Regime regime, const OracleConfig& cfg) {
    MixtureDecision r;
    r.topology = classify_topology(d);
    switch (r.topology.kind) {
    case Topology::not_tree_metric:
    case Topology::other_tree:
        r.verdict = Verdict::no;
        r.basis = Basis::topology_excluded;
        break;
    case Topology::star: {
        const StarTree& s = *r.topology.star;
        bool ok = regime == Regime::closed || !s.degenerate();
        if (ok) {
            r.verdict = Verdict::yes;
            r.basis = Basis::star_trivial;
            r.witness = std::make_pair(s, s); // D = D (+) D
        } else {
            r.verdict = Verdict::no;
            r.basis = Basis::weight_condition_failed;
        }
        break;
    }
    case Topology::double_star: {
        const DoubleStar& ds = *r.topology.dstar;
        SideStatus st = side_status(ds, regime);
        if (ds.I.size() == 2) {
            bool yes = st.positivity_guard && (st.side_I || st.side_J);
            r.verdict = yes ? Verdict::yes : Verdict::no;
            r.basis = yes ? (d.taxa() == 4 ? Basis::quartet : Basis::double_star_i2)
                          : Basis::weight_condition_failed;
            if (yes) {
                std::vector<CaseFamily> fams = families_for(ds, regime);
                for (const auto& f : fams) r.families.push_back(f.id);
                auto [u, w] = witness_point(fams.front(), regime);
                r.witness = fams.front().weights_at(u, w, regime);
            }
        } else {
            // |I| >= 3: no finite family parametrization; the oracle is the
            // ground truth when cross-checking
            r.basis = Basis::double_star_i3plus;
            bool yes = st.positivity_guard;
            for (const auto& p : ds.pendant) yes = yes && side_condition(p, ds.g, regime);
            r.verdict = yes ? Verdict::yes : Verdict::no;
        }
        break;
    }
    }
    r.theorem_verdict = r.verdict;

    if (cross_check) {
        SignMode sign = regime == Regime::strict ? SignMode::positive : SignMode::nonnegative;
        Feasibility f = k_star_feasible(d, 2, sign, cfg);
        r.oracle_verdict = f.feasible ? Verdict::yes : Verdict::no;
        r.provenance = Provenance::oracle_confirmed;
        if (r.topology.kind != Topology::not_tree_metric) {
            // same membership question; the oracle takes precedence
            r.oracle_authoritative = true;
            r.disagreement = *r.oracle_verdict != r.theorem_verdict;
            r.verdict = *r.oracle_verdict;
            if (r.verdict == Verdict::no) {
                r.witness.reset();
            } else if (!r.witness && f.feasible) {
                bool zero = false;
                for (const auto& star : f.witness)
                    for (const auto& q : star) zero = zero || q == 0;
                Regime reg = zero ? Regime::closed : Regime::strict;
                r.witness = std::make_pair(StarTree(f.witness[0], reg), StarTree(f.witness[1], reg));
            }
        }
        // for non-tree metrics the oracle decides membership in the full
        // mixture image, not in its tree-metric slice; report only
    }
    if (r.witness && !verify_decomposition(d, r.witness->first, r.witness->second, regime))
        throw Error(Errc::postcondition_violation, "decision witness failed verification");
    return r;
}

std::vector<CaseFamily> enumerate_fiber_cases(const DissimilarityMap& d, Regime regime) {
    TopologyClass cls = classify_topology(d);
    if (cls.kind == Topology::star)
        throw Error(Errc::star_input, "fibers over star metrics are not parametrized here");
    if (cls.kind != Topology::double_star)
        throw Error(Errc::not_in_image, "not a two-star mixture (topology excluded)");
    const DoubleStar& ds = *cls.dstar;
    if (ds.I.size() != 2)
        throw Error(Errc::unsupported,
                    "fiber families are parametrized only for quartets and |I| = 2 double stars");
    std::vector<CaseFamily> fams = families_for(ds, regime);
    if (fams.empty()) throw Error(Errc::not_in_image, "weight conditions fail; empty fiber");
    return fams;
}

std::pair<StarTree, StarTree> sample_decomposition(const DissimilarityMap& d,
                                                   const std::string& case_id, const Rational& u,
                                                   const Rational& w, Regime regime) {
    std::vector<CaseFamily> fams = enumerate_fiber_cases(d, regime);
    const CaseFamily* fam = nullptr;
    for (const auto& f : fams)
        if (f.id == case_id) fam = &f;
    if (!fam) throw Error(Errc::out_of_domain, "case " + case_id + " is not admissible here");
    bool ok = regime == Regime::strict ? fam->strictly_inside(u, w)
                                       : fam->contains(u, w, Regime::closed);
    if (!ok)
        throw Error(Errc::out_of_domain, "(u,w) = (" + to_string(u) + "," + to_string(w) +
                                             ") outside case " + case_id);
    auto stars = fam->weights_at(u, w, regime);
    if (!verify_decomposition(d, stars.first, stars.second, regime))
        throw Error(Errc::postcondition_violation, "case formulas failed to reproduce the input");
    return stars;
}

} // namespace stm
