#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qel/dynamics.hpp"

namespace qel {

// Minimal TOML subset: [sections], key = value with strings, numbers,
// booleans and flat arrays; # comments.
using TomlValue = std::variant<double, bool, std::string, std::vector<double>,
                               std::vector<std::string>>;
using TomlTable = std::map<std::string, std::map<std::string, TomlValue>>;
TomlTable parse_toml(const std::string& text);

struct HoleSpec {
    std::string kind = "none";  // none | interval | intervals | attractor_ball
    std::vector<std::pair<double, double>> intervals;
    double radius = 0.0;        // attractor_ball
    int cycle_period = 3;
    double cycle_seed = 0.5;
};

struct WeightSpec {
    std::string kind = "constant";  // constant | tlog
    double value = 0.0;             // constant phi
    double t = 1.0;                 // phi_t = (-t+1) log|T'|
};

struct ExperimentConfig {
    std::string map_id = "doubling";
    std::map<std::string, double> map_params;
    HoleSpec hole;
    WeightSpec weight;

    int resolution = 1024;
    int survivor_depth = 12;
    int survivor_samples = 9;
    int quad_nodes = 3;

    std::vector<double> epsilons{1e-2};
    std::string mode = "global";  // global | local
    int class_index = -1;         // local mode; -1 = dominant
    double tolerance = 1e-2;

    std::string oracle_model = "auto";  // auto | doubling | logistic | none
    int oracle_depth = 12;

    int particles = 10000;
    int horizon = 100;
    std::uint64_t seed = 42;

    std::string out_dir = "out";
    int threads = 1;

    std::string raw_text;  // resolved source text (digest input)
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

nlohmann::json config_to_json(const ExperimentConfig& cfg);
std::string config_digest(const ExperimentConfig& cfg);

// Materialize the configured system.
MapSystem make_map(const ExperimentConfig& cfg);
WeightFunction make_weight(const ExperimentConfig& cfg, const MapSystem& map);

}  // namespace qel
