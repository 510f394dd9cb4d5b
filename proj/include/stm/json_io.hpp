#pragma once

#include "stm/dissimilarity.hpp"
#include "stm/mixture.hpp"
#include "stm/oracle.hpp"
#include "stm/trees.hpp"

#include <json.hpp>

#include <string>

namespace stm {

inline constexpr int schema_version = 1;

// Accepts metric JSON {"n":..,"entries":[..]}, star JSON {"weights":[..]},
// double-star JSON {"I":[..],"g":"..","pendant":[..]}, tree JSON
// {"n":..,"nodes":..,"edges":[[u,v,"w"],..]}, or a whitespace-separated full
// square matrix; trees and stars are converted to their path metrics.
DissimilarityMap load_dissimilarity_text(const std::string& text);
DissimilarityMap load_dissimilarity_file(const std::string& path);

nlohmann::json metric_to_json(const DissimilarityMap& d);
nlohmann::json star_to_json(const StarTree& s);
nlohmann::json double_star_to_json(const DoubleStar& ds);
nlohmann::json tree_to_json(const WeightedTree& t);
nlohmann::json feasibility_to_json(const Feasibility& f, int n);
nlohmann::json family_to_json(const CaseFamily& f);
nlohmann::json decision_to_json(const MixtureDecision& d);

std::vector<Rational> parse_rationals(const nlohmann::json& arr);

} // namespace stm
