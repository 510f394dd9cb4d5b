#include "stm/json_io.hpp"

#include "stm/error.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace stm {

using nlohmann::json;

std::vector<Rational> parse_rationals(const json& arr) {
    if (!arr.is_array()) throw Error(Errc::parse_error, "expected an array of rationals");
    std::vector<Rational> out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
        if (v.is_string())
            out.push_back(parse_rational(v.get<std::string>()));
        else if (v.is_number_integer())
            out.push_back(Rational(static_cast<long>(v.get<long long>())));
        else
            throw Error(Errc::parse_error, "rationals must be strings or integers");
    }
    return out;
}

namespace {

std::vector<std::string> render(const std::vector<Rational>& v) {
    std::vector<std::string> out;
    out.reserve(v.size());
    for (const auto& q : v) out.push_back(to_string(q));
    return out;
}

DissimilarityMap from_square_matrix(const std::string& text) {
    std::istringstream in(text);
    std::vector<Rational> vals;
    std::string tok;
    while (in >> tok) vals.push_back(parse_rational(tok));
    auto total = vals.size();
    int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(total))));
    if (total == 0 || static_cast<size_t>(n) * n != total)
        throw Error(Errc::parse_error, "matrix input must hold n*n entries");
    if (n < 3) throw Error(Errc::too_few_taxa, "need n >= 3");
    for (int i = 0; i < n; ++i) {
        if (vals[i * n + i] != 0) throw Error(Errc::parse_error, "diagonal must be zero");
        for (int j = 0; j < n; ++j)
            if (vals[i * n + j] != vals[j * n + i])
                throw Error(Errc::parse_error, "matrix must be symmetric");
    }
    std::vector<Rational> entries;
    entries.reserve(pair_count(n));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) entries.push_back(vals[i * n + j]);
    return DissimilarityMap(n, std::move(entries));
}

WeightedTree tree_from_json(const json& j) {
    int n = j.at("n").get<int>();
    int nodes = j.at("nodes").get<int>();
    std::vector<WeightedTree::Edge> edges;
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 3)
            throw Error(Errc::parse_error, "edge must be [u, v, weight]");
        Rational w = e[2].is_string() ? parse_rational(e[2].get<std::string>())
                                      : Rational(static_cast<long>(e[2].get<long long>()));
        edges.push_back({e[0].get<int>(), e[1].get<int>(), std::move(w)});
    }
    return WeightedTree(n, nodes, std::move(edges));
}

} // namespace

DissimilarityMap load_dissimilarity_text(const std::string& text) {
    size_t pos = text.find_first_not_of(" \t\r\n");
    if (pos == std::string::npos) throw Error(Errc::parse_error, "empty input");
    if (text[pos] != '{') return from_square_matrix(text);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(Errc::parse_error, e.what());
    }
    if (j.contains("entries")) {
        int n = j.at("n").get<int>();
        return DissimilarityMap(n, parse_rationals(j.at("entries")));
    }
    if (j.contains("weights"))
        return star_metric(StarTree(parse_rationals(j.at("weights")), Regime::closed));
    if (j.contains("pendant")) {
        std::vector<int> I = j.at("I").get<std::vector<int>>();
        Rational g = j.at("g").is_string() ? parse_rational(j.at("g").get<std::string>())
                                           : Rational(static_cast<long>(j.at("g").get<long long>()));
        return double_star_metric(
            DoubleStar(std::move(I), std::move(g), parse_rationals(j.at("pendant")), Regime::closed));
    }
    if (j.contains("edges")) return tree_metric(tree_from_json(j));
    throw Error(Errc::parse_error, "unrecognized input schema");
}

DissimilarityMap load_dissimilarity_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::parse_error, "cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return load_dissimilarity_text(buf.str());
}

json metric_to_json(const DissimilarityMap& d) {
    return json{{"n", d.taxa()}, {"entries", render(d.entries())}};
}

json star_to_json(const StarTree& s) {
    return json{{"weights", render(s.weights)},
                {"regime", s.regime == Regime::strict ? "strict" : "closed"}};
}

json double_star_to_json(const DoubleStar& ds) {
    return json{{"I", ds.I},
                {"J", ds.J},
                {"g", to_string(ds.g)},
                {"pendant", render(ds.pendant)}};
}

json tree_to_json(const WeightedTree& t) {
    json edges = json::array();
    for (const auto& e : t.edges) edges.push_back(json::array({e.u, e.v, to_string(e.w)}));
    return json{{"n", t.n}, {"nodes", t.nodes}, {"edges", edges}};
}

json feasibility_to_json(const Feasibility& f, int n) {
    json out;
    out["status"] = f.feasible ? "feasible" : "infeasible";
    out["patterns_checked"] = f.patterns_checked;
    out["reduced_pattern_space"] = f.reduced_pattern_space;
    out["raw_pattern_space"] = f.raw_pattern_space;
    if (f.feasible) {
        json witness = json::array();
        for (const auto& star : f.witness) witness.push_back(render(star));
        out["witness"] = witness;
        json pattern = json::object();
        int p = 0;
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) {
                pattern[std::to_string(i) + "," + std::to_string(j)] =
                    f.pattern.star_of_pair[p] + 1;
                ++p;
            }
        out["pattern"] = pattern;
    }
    return out;
}

namespace {

json bound_to_json(const CaseFamily::Bound& b) {
    return json{{"const", to_string(b.c0)}, {"cross", to_string(b.cross)}, {"open", b.open}};
}

json affines_to_json(const std::vector<CaseFamily::Affine>& ws) {
    json arr = json::array();
    for (const auto& a : ws)
        arr.push_back(
            json{{"const", to_string(a.c0)}, {"u", to_string(a.cu)}, {"w", to_string(a.cw)}});
    return arr;
}

} // namespace

json family_to_json(const CaseFamily& f) {
    json out;
    out["id"] = f.id;
    out["n"] = f.n;
    out["canonical_to_original"] = f.canonical_to_original;
    out["orbit_size"] = f.orbit_size;
    out["u"] = json{{"formula", f.u_formula},
                    {"instantiated", f.u_instantiated},
                    {"lower", bound_to_json(f.u_lower)},
                    {"upper", bound_to_json(f.u_upper)}};
    out["w"] = json{{"formula", f.w_formula},
                    {"instantiated", f.w_instantiated},
                    {"lower", bound_to_json(f.w_lower)},
                    {"upper", bound_to_json(f.w_upper)}};
    out["weights"] =
        json{{"first", affines_to_json(f.first_weights)}, {"second", affines_to_json(f.second_weights)}};
    return out;
}

json decision_to_json(const MixtureDecision& d) {
    json out;
    out["verdict"] = verdict_name(d.verdict);
    out["basis"] = basis_name(d.basis);
    out["families"] = d.families;
    out["provenance"] = provenance_name(d.provenance);
    out["theorem_verdict"] = verdict_name(d.theorem_verdict);
    if (d.oracle_verdict) {
        out["oracle_verdict"] = verdict_name(*d.oracle_verdict);
        out["oracle_authoritative"] = d.oracle_authoritative;
        out["disagreement"] = d.disagreement;
    }
    if (d.witness) {
        out["witness"] =
            json{{"first", star_to_json(d.witness->first)}, {"second", star_to_json(d.witness->second)}};
    }
    switch (d.topology.kind) {
    case Topology::star: out["topology"] = "star"; break;
    case Topology::double_star: out["topology"] = "double_star"; break;
    case Topology::other_tree: out["topology"] = "other_tree"; break;
    case Topology::not_tree_metric: out["topology"] = "not_tree_metric"; break;
    }
    return out;
}

} // namespace stm
