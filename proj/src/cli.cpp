#include "stm/cli.hpp"

#include "stm/error.hpp"
#include "stm/json_io.hpp"
#include "stm/mixture.hpp"
#include "stm/oracle.hpp"
#include "stm/trees.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <ostream>
#include <random>

namespace stm {

using nlohmann::json;

namespace {

struct Options {
    std::string input, input2;
    std::string regime = "strict";
    std::string sign = "positive";
    std::string format = "json";
    std::string case_id;
    std::string u_str, w_str;
    int k = 2;
    int max_k = 0; // 0 = n-2
    int decimals = -1;
    int threads = 1;
    unsigned long long budget = 0;
    unsigned long long seed = 0;
    bool quartets = false;
    bool cross_check = false;
    bool positivity = true;
};

Regime parse_regime(const std::string& s) {
    if (s == "strict") return Regime::strict;
    if (s == "closed") return Regime::closed;
    throw Error(Errc::parse_error, "regime must be strict or closed");
}

SignMode parse_sign(const std::string& s) {
    if (s == "positive") return SignMode::positive;
    if (s == "nonnegative") return SignMode::nonnegative;
    if (s == "signed") return SignMode::free_sign;
    throw Error(Errc::parse_error, "sign must be positive, nonnegative or signed");
}

bool looks_rational(const std::string& s) {
    if (s.empty()) return false;
    size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    bool digit = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c)))
            digit = true;
        else if (c != '/' && c != '.')
            return false;
    }
    return digit;
}

// add "<key>_decimal" next to rational-string payloads
void add_decimals(json& j, int digits) {
    if (!j.is_object()) {
        if (j.is_array())
            for (auto& v : j) add_decimals(v, digits);
        return;
    }
    json additions = json::object();
    for (auto& [key, value] : j.items()) {
        if (key == "id" || key == "case" || key == "version") continue;
        if (value.is_string() && looks_rational(value.get<std::string>())) {
            additions[key + "_decimal"] =
                to_decimal_string(parse_rational(value.get<std::string>()), digits);
        } else if (value.is_array() && !value.empty() && value[0].is_string() &&
                   looks_rational(value[0].get<std::string>())) {
            json arr = json::array();
            bool ok = true;
            for (const auto& v : value) {
                if (!v.is_string() || !looks_rational(v.get<std::string>())) {
                    ok = false;
                    break;
                }
                arr.push_back(to_decimal_string(parse_rational(v.get<std::string>()), digits));
            }
            if (ok) additions[key + "_decimal"] = arr;
        } else {
            add_decimals(value, digits);
        }
    }
    for (auto& [key, value] : additions.items()) j[key] = value;
}

void print_table(const json& j, std::ostream& out, const std::string& prefix) {
    if (j.is_object()) {
        for (const auto& [key, value] : j.items())
            print_table(value, out, prefix.empty() ? key : prefix + "." + key);
    } else if (j.is_array()) {
        for (size_t i = 0; i < j.size(); ++i)
            print_table(j[i], out, prefix + "[" + std::to_string(i) + "]");
    } else {
        out << prefix << " = " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
    }
}

void emit(json j, const Options& opt, std::ostream& out) {
    j["version"] = schema_version;
    if (opt.decimals >= 0) add_decimals(j, opt.decimals);
    if (opt.format == "table")
        print_table(j, out, "");
    else
        out << j.dump(2) << "\n";
}

OracleConfig oracle_config(const Options& opt) {
    OracleConfig cfg;
    cfg.budget = opt.budget;
    cfg.threads = opt.threads;
    return cfg;
}

json quartet_report(const DissimilarityMap& d, int i, int j, int k, int l) {
    QuartetPairing qp = quartet_pairing(d, i, j, k, l);
    json attaining = json::array();
    if (qp.attains(PairSplit::ij_kl)) attaining.push_back("ij|kl");
    if (qp.attains(PairSplit::ik_jl)) attaining.push_back("ik|jl");
    if (qp.attains(PairSplit::il_jk)) attaining.push_back("il|jk");
    return json{{"taxa", {i, j, k, l}},
                {"sums", {to_string(qp.sum_ij_kl), to_string(qp.sum_ik_jl), to_string(qp.sum_il_jk)}},
                {"attaining", attaining}};
}

int cmd_classify(const Options& opt, std::ostream& out) {
    DissimilarityMap d = load_dissimilarity_file(opt.input);
    TopologyClass cls = classify_topology(d);
    json j;
    j["command"] = "classify";
    j["n"] = d.taxa();
    j["is_metric"] = is_metric(d);
    j["is_tree_metric"] = cls.kind != Topology::not_tree_metric;
    j["degenerate"] = cls.degenerate;
    switch (cls.kind) {
    case Topology::star:
        j["topology"] = "star";
        j["star"] = star_to_json(*cls.star);
        break;
    case Topology::double_star:
        j["topology"] = "double_star";
        j["double_star"] = double_star_to_json(*cls.dstar);
        break;
    case Topology::other_tree:
        j["topology"] = "other_tree";
        break;
    case Topology::not_tree_metric:
        j["topology"] = "not_tree_metric";
        if (auto t = first_triangle_violation(d)) {
            j["violating_triple"] = {(*t)[0], (*t)[1], (*t)[2]};
        } else if (auto q = first_four_point_violation(d)) {
            j["violating_quartet"] = quartet_report(d, (*q)[0], (*q)[1], (*q)[2], (*q)[3]);
        }
        break;
    }
    if (cls.tree) j["tree"] = tree_to_json(*cls.tree);
    if (opt.quartets && d.taxa() >= 4) {
        json qs = json::array();
        for (int i = 1; i <= d.taxa(); ++i)
            for (int jj = i + 1; jj <= d.taxa(); ++jj)
                for (int k = jj + 1; k <= d.taxa(); ++k)
                    for (int l = k + 1; l <= d.taxa(); ++l)
                        qs.push_back(quartet_report(d, i, jj, k, l));
        j["quartets"] = qs;
    }
    emit(j, opt, out);
    return 0;
}

int cmd_decide(const Options& opt, std::ostream& out) {
    DissimilarityMap d = load_dissimilarity_file(opt.input);
    MixtureDecision dec =
        decide_two_star_mixture(d, opt.cross_check, parse_regime(opt.regime), oracle_config(opt));
    json j = decision_to_json(dec);
    j["command"] = "decide";
    j["n"] = d.taxa();
    j["regime"] = opt.regime;
    emit(j, opt, out);
    return 0;
}

int cmd_fibers(const Options& opt, std::ostream& out) {
    DissimilarityMap d = load_dissimilarity_file(opt.input);
    std::vector<CaseFamily> fams = enumerate_fiber_cases(d, parse_regime(opt.regime));
    json arr = json::array();
    for (const auto& f : fams) arr.push_back(family_to_json(f));
    json j;
    j["command"] = "fibers";
    j["n"] = d.taxa();
    j["regime"] = opt.regime;
    j["families"] = arr;
    emit(j, opt, out);
    return 0;
}

int cmd_sample(const Options& opt, std::ostream& out) {
    DissimilarityMap d = load_dissimilarity_file(opt.input);
    Regime regime = parse_regime(opt.regime);
    Rational u, w;
    bool drew = false;
    if (!opt.u_str.empty() || !opt.w_str.empty()) {
        if (opt.u_str.empty() || opt.w_str.empty())
            throw Error(Errc::parse_error, "--u and --w must be given together");
        u = parse_rational(opt.u_str);
        w = parse_rational(opt.w_str);
    } else {
        // seeded draw from a rational grid strictly inside the domain
        std::vector<CaseFamily> fams = enumerate_fiber_cases(d, regime);
        const CaseFamily* fam = nullptr;
        for (const auto& f : fams)
            if (f.id == opt.case_id) fam = &f;
        if (!fam)
            throw Error(Errc::out_of_domain, "case " + opt.case_id + " is not admissible here");
        std::mt19937_64 rng(opt.seed);
        const int grid = 16;
        std::uniform_int_distribution<int> pick(1, grid);
        auto [uu, ww] = family_grid_point(*fam, pick(rng), pick(rng), grid);
        u = uu;
        w = ww;
        drew = true;
    }
    auto stars = sample_decomposition(d, opt.case_id, u, w, regime);
    json j;
    j["command"] = "sample";
    j["case"] = opt.case_id;
    j["u"] = to_string(u);
    j["w"] = to_string(w);
    j["first"] = star_to_json(stars.first);
    j["second"] = star_to_json(stars.second);
    j["degenerate"] = stars.first.degenerate() || stars.second.degenerate();
    j["verified"] = true; // sample_decomposition verifies before returning
    j["regime"] = opt.regime;
    if (drew) j["seed"] = opt.seed;
    emit(j, opt, out);
    return 0;
}

int cmd_mix(const Options& opt, std::ostream& out) {
    DissimilarityMap a = load_dissimilarity_file(opt.input);
    DissimilarityMap b = load_dissimilarity_file(opt.input2);
    DissimilarityMap m = tropical_mix(a, b);
    json j = metric_to_json(m);
    j["command"] = "mix";
    j["is_metric"] = is_metric(m);
    j["is_tree_metric"] = is_tree_metric(m);
    emit(j, opt, out);
    return 0;
}

int cmd_oracle(const Options& opt, std::ostream& out) {
    DissimilarityMap d = load_dissimilarity_file(opt.input);
    Feasibility f = k_star_feasible(d, opt.k, parse_sign(opt.sign), oracle_config(opt));
    json j = feasibility_to_json(f, d.taxa());
    j["command"] = "oracle";
    j["k"] = opt.k;
    j["sign"] = opt.sign;
    emit(j, opt, out);
    return 0;
}

int cmd_secant(const Options& opt, std::ostream& out) {
    DissimilarityMap d = load_dissimilarity_file(opt.input);
    Feasibility f = secant_membership(d.entries(), opt.k, opt.positivity, oracle_config(opt));
    json j = feasibility_to_json(f, d.taxa());
    if (f.feasible) j["functionals"] = j["witness"];
    j["command"] = "secant";
    j["k"] = opt.k;
    j["positivity"] = opt.positivity;
    emit(j, opt, out);
    return 0;
}

int cmd_rank(const Options& opt, std::ostream& out) {
    DissimilarityMap d = load_dissimilarity_file(opt.input);
    int max_k = opt.max_k > 0 ? opt.max_k : std::max(1, d.taxa() - 2);
    RankResult r = star_rank_bounds(d, parse_sign(opt.sign), max_k, oracle_config(opt));
    json j;
    j["command"] = "rank";
    j["sign"] = opt.sign;
    j["max_k"] = max_k;
    if (r.rank)
        j["rank"] = *r.rank;
    else
        j["rank"] = "above_k_max";
    json per_k = json::array();
    for (const auto& [k, st] : r.per_k) {
        const char* name = st == KStatus::feasible     ? "feasible"
                           : st == KStatus::infeasible ? "infeasible"
                                                       : "budget_exceeded";
        per_k.push_back(json{{"k", k}, {"status", name}});
    }
    j["per_k"] = per_k;
    if (r.found && r.found->feasible) {
        json witness = json::array();
        for (const auto& star : r.found->witness) {
            json row = json::array();
            for (const auto& q : star) row.push_back(to_string(q));
            witness.push_back(row);
        }
        j["witness"] = witness;
    }
    emit(j, opt, out);
    return 0;
}

int cmd_obstruction(const Options& opt, std::ostream& out) {
    DissimilarityMap d = load_dissimilarity_file(opt.input);
    auto wit = cut_obstruction_witness(d);
    json j;
    j["command"] = "obstruction";
    j["obstructed"] = wit.has_value();
    if (wit) j["pairs"] = {{(*wit)[0], (*wit)[1]}, {(*wit)[2], (*wit)[3]}};
    emit(j, opt, out);
    return 0;
}

void add_common(CLI::App* sub, Options& opt) {
    sub->add_option("--format", opt.format, "json or table")->check(CLI::IsMember({"json", "table"}));
    sub->add_option("--decimals", opt.decimals, "also render rationals with N decimals");
}

void add_oracle_opts(CLI::App* sub, Options& opt) {
    sub->add_option("--budget", opt.budget, "max raw pattern count (default STARTREEMIX_BUDGET or 59049)");
    sub->add_option("--threads", opt.threads, "parallel pattern enumeration");
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options opt;
    CLI::App app{"exact toolkit for tropical (pointwise-max) mixtures of star tree metrics"};
    app.require_subcommand(1);

    CLI::App* classify = app.add_subcommand("classify", "tree-metric topology of a map");
    classify->add_option("input", opt.input)->required();
    classify->add_flag("--quartets", opt.quartets, "report all quartet pairings");
    add_common(classify, opt);

    CLI::App* decide = app.add_subcommand("decide", "is the map a mixture of two star tree metrics");
    decide->add_option("input", opt.input)->required();
    decide->add_flag("--cross-check", opt.cross_check, "confirm with the exact oracle");
    decide->add_option("--regime", opt.regime)->check(CLI::IsMember({"strict", "closed"}));
    add_oracle_opts(decide, opt);
    add_common(decide, opt);

    CLI::App* fibers = app.add_subcommand("fibers", "fiber case families over a mixture");
    fibers->add_option("input", opt.input)->required();
    fibers->add_option("--regime", opt.regime)->check(CLI::IsMember({"strict", "closed"}));
    add_common(fibers, opt);

    CLI::App* sample = app.add_subcommand("sample", "sample one decomposition from a case family");
    sample->add_option("input", opt.input)->required();
    sample->add_option("--case", opt.case_id, "family id, e.g. 1.1")->required();
    sample->add_option("--u", opt.u_str);
    sample->add_option("--w", opt.w_str);
    sample->add_option("--seed", opt.seed);
    sample->add_option("--regime", opt.regime)->check(CLI::IsMember({"strict", "closed"}));
    add_common(sample, opt);

    CLI::App* mix = app.add_subcommand("mix", "tropical mixture of two maps");
    mix->add_option("input", opt.input)->required();
    mix->add_option("input2", opt.input2)->required();
    add_common(mix, opt);

    CLI::App* oracle = app.add_subcommand("oracle", "exact k-star mixture feasibility");
    oracle->add_option("input", opt.input)->required();
    oracle->add_option("--k", opt.k);
    oracle->add_option("--sign", opt.sign)->check(CLI::IsMember({"positive", "nonnegative", "signed"}));
    add_oracle_opts(oracle, opt);
    add_common(oracle, opt);

    CLI::App* secant = app.add_subcommand("secant", "k-th tropical secant membership");
    secant->add_option("input", opt.input)->required();
    secant->add_option("--k", opt.k)->default_val(1);
    secant->add_flag("--positive,!--no-positive", opt.positivity, "positive functionals (cone)");
    add_oracle_opts(secant, opt);
    add_common(secant, opt);

    CLI::App* rank = app.add_subcommand("rank", "smallest feasible star count");
    rank->add_option("input", opt.input)->required();
    rank->add_option("--sign", opt.sign)->check(CLI::IsMember({"positive", "nonnegative", "signed"}));
    rank->add_option("--max-k", opt.max_k);
    add_oracle_opts(rank, opt);
    add_common(rank, opt);

    CLI::App* obstruction = app.add_subcommand("obstruction", "cut-metric obstruction check");
    obstruction->add_option("input", opt.input)->required();
    add_common(obstruction, opt);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (classify->parsed()) return cmd_classify(opt, out);
        if (decide->parsed()) return cmd_decide(opt, out);
        if (fibers->parsed()) return cmd_fibers(opt, out);
        if (sample->parsed()) return cmd_sample(opt, out);
        if (mix->parsed()) return cmd_mix(opt, out);
        if (oracle->parsed()) return cmd_oracle(opt, out);
        if (secant->parsed()) return cmd_secant(opt, out);
        if (rank->parsed()) return cmd_rank(opt, out);
        if (obstruction->parsed()) return cmd_obstruction(opt, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        switch (e.code()) {
        case Errc::budget_exceeded: return 2;
        case Errc::out_of_domain: return 3;
        default: return 1;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

} // namespace stm
