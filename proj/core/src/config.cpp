#include "qel/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qel/util.hpp"

namespace qel {
namespace {

std::string strip(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// remove a trailing comment that is not inside a string literal
std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_str = !in_str;
        if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

TomlValue parse_scalar(const std::string& tok, int lineno) {
    if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"')
        return tok.substr(1, tok.size() - 2);
    if (tok == "true") return true;
    if (tok == "false") return false;
    try {
        size_t used = 0;
        double d = std::stod(tok, &used);
        if (used == tok.size()) return d;
    } catch (...) {
    }
    throw std::invalid_argument("config: bad value at line " + std::to_string(lineno) + ": " + tok);
}

}  // namespace

TomlTable parse_toml(const std::string& text) {
    TomlTable table;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config: bad section at line " + std::to_string(lineno));
            section = strip(line.substr(1, line.size() - 2));
            table[section];
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value at line " +
                                        std::to_string(lineno));
        std::string key = strip(line.substr(0, eq));
        std::string val = strip(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw std::invalid_argument("config: empty key or value at line " +
                                        std::to_string(lineno));
        if (val.front() == '[') {
            if (val.back() != ']')
                throw std::invalid_argument("config: unterminated array at line " +
                                            std::to_string(lineno));
            std::string body = val.substr(1, val.size() - 2);
            std::vector<std::string> toks;
            std::string cur;
            bool in_str = false;
            for (char c : body) {
                if (c == '"') in_str = !in_str;
                if (c == ',' && !in_str) {
                    toks.push_back(strip(cur));
                    cur.clear();
                } else {
                    cur += c;
                }
            }
            if (!strip(cur).empty()) toks.push_back(strip(cur));
            bool strings = !toks.empty() && !toks[0].empty() && toks[0].front() == '"';
            if (strings) {
                std::vector<std::string> arr;
                for (auto& t : toks) arr.push_back(std::get<std::string>(parse_scalar(t, lineno)));
                table[section][key] = arr;
            } else {
                std::vector<double> arr;
                for (auto& t : toks) arr.push_back(std::get<double>(parse_scalar(t, lineno)));
                table[section][key] = arr;
            }
        } else {
            table[section][key] = parse_scalar(val, lineno);
        }
    }
    return table;
}

namespace {

template <typename T>
T get_or(const TomlTable& t, const std::string& sec, const std::string& key, T dflt) {
    auto si = t.find(sec);
    if (si == t.end()) return dflt;
    auto ki = si->second.find(key);
    if (ki == si->second.end()) return dflt;
    if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::uint64_t>) {
        return T(std::get<double>(ki->second));
    } else {
        return std::get<T>(ki->second);
    }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    auto t = parse_toml(text);
    ExperimentConfig c;
    c.raw_text = text;
    c.map_id = get_or<std::string>(t, "map", "id", c.map_id);
    if (auto si = t.find("map"); si != t.end())
        for (auto& [k, v] : si->second)
            if (k != "id" && std::holds_alternative<double>(v))
                c.map_params[k] = std::get<double>(v);

    c.hole.kind = get_or<std::string>(t, "hole", "kind", c.hole.kind);
    if (c.hole.kind == "interval") {
        c.hole.intervals = {{get_or<double>(t, "hole", "lo", 0.0),
                             get_or<double>(t, "hole", "hi", 0.0)}};
    } else if (c.hole.kind == "intervals") {
        auto los = get_or<std::vector<double>>(t, "hole", "lo", {});
        auto his = get_or<std::vector<double>>(t, "hole", "hi", {});
        if (los.size() != his.size())
            throw std::invalid_argument("config: hole lo/hi arrays differ in length");
        for (size_t i = 0; i < los.size(); ++i) c.hole.intervals.emplace_back(los[i], his[i]);
    } else if (c.hole.kind == "attractor_ball") {
        c.hole.radius = get_or<double>(t, "hole", "radius", 0.02);
        c.hole.cycle_period = get_or<int>(t, "hole", "cycle_period", 3);
        c.hole.cycle_seed = get_or<double>(t, "hole", "cycle_seed", 0.5);
    } else if (c.hole.kind != "none") {
        throw std::invalid_argument("config: unknown hole kind " + c.hole.kind);
    }

    c.weight.kind = get_or<std::string>(t, "weight", "kind", c.weight.kind);
    c.weight.value = get_or<double>(t, "weight", "value", 0.0);
    c.weight.t = get_or<double>(t, "weight", "t", 1.0);
    if (c.weight.kind != "constant" && c.weight.kind != "tlog")
        throw std::invalid_argument("config: unknown weight kind " + c.weight.kind);

    c.resolution = get_or<int>(t, "grid", "resolution", c.resolution);
    c.survivor_depth = get_or<int>(t, "grid", "survivor_depth", c.survivor_depth);
    c.survivor_samples = get_or<int>(t, "grid", "survivor_samples", c.survivor_samples);
    c.quad_nodes = get_or<int>(t, "grid", "quad_nodes", c.quad_nodes);
    if (c.resolution < 1 || (c.resolution & (c.resolution - 1)) != 0)
        throw std::invalid_argument("config: resolution must be a power of two");

    c.epsilons = get_or<std::vector<double>>(t, "sweep", "epsilons", c.epsilons);
    if (auto si = t.find("sweep"); si != t.end() && si->second.count("epsilon"))
        c.epsilons = {std::get<double>(si->second.at("epsilon"))};
    for (size_t i = 0; i < c.epsilons.size(); ++i) {
        if (c.epsilons[i] <= 0.0)
            throw std::invalid_argument("config: epsilons must be positive");
        if (i > 0 && c.epsilons[i] >= c.epsilons[i - 1])
            throw std::invalid_argument("config: epsilons must be strictly descending");
    }
    c.mode = get_or<std::string>(t, "sweep", "mode", c.mode);
    if (c.mode != "global" && c.mode != "local")
        throw std::invalid_argument("config: mode must be global or local");
    c.class_index = get_or<int>(t, "sweep", "class_index", c.class_index);
    c.tolerance = get_or<double>(t, "sweep", "tolerance", c.tolerance);

    c.oracle_model = get_or<std::string>(t, "oracle", "model", c.oracle_model);
    c.oracle_depth = get_or<int>(t, "oracle", "depth", c.oracle_depth);

    c.particles = get_or<int>(t, "simulate", "particles", c.particles);
    c.horizon = get_or<int>(t, "simulate", "horizon", c.horizon);
    c.seed = get_or<std::uint64_t>(t, "simulate", "seed", c.seed);

    c.out_dir = get_or<std::string>(t, "output", "dir", c.out_dir);
    c.threads = get_or<int>(t, "output", "threads", c.threads);
    return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["map"]["id"] = c.map_id;
    for (auto& [k, v] : c.map_params) j["map"][k] = v;
    j["hole"]["kind"] = c.hole.kind;
    if (!c.hole.intervals.empty()) {
        std::vector<double> los, his;
        for (auto& [lo, hi] : c.hole.intervals) {
            los.push_back(lo);
            his.push_back(hi);
        }
        j["hole"]["lo"] = los;
        j["hole"]["hi"] = his;
    }
    if (c.hole.kind == "attractor_ball") {
        j["hole"]["radius"] = c.hole.radius;
        j["hole"]["cycle_period"] = c.hole.cycle_period;
        j["hole"]["cycle_seed"] = c.hole.cycle_seed;
    }
    j["weight"]["kind"] = c.weight.kind;
    j["weight"]["value"] = c.weight.value;
    j["weight"]["t"] = c.weight.t;
    j["grid"] = {{"resolution", c.resolution},
                 {"survivor_depth", c.survivor_depth},
                 {"survivor_samples", c.survivor_samples},
                 {"quad_nodes", c.quad_nodes}};
    j["sweep"] = {{"epsilons", c.epsilons},
                  {"mode", c.mode},
                  {"class_index", c.class_index},
                  {"tolerance", c.tolerance}};
    j["oracle"] = {{"model", c.oracle_model}, {"depth", c.oracle_depth}};
    j["simulate"] = {{"particles", c.particles}, {"horizon", c.horizon}, {"seed", c.seed}};
    j["output"] = {{"dir", c.out_dir}, {"threads", c.threads}};
    return j;
}

std::string config_digest(const ExperimentConfig& cfg) {
    auto j = config_to_json(cfg);
    j.erase("output");  // digest identifies the experiment, not its destination
    return digest_hex(j.dump());
}

MapSystem make_map(const ExperimentConfig& cfg) {
    auto m = build_map(cfg.map_id, cfg.map_params);
    if (cfg.hole.kind == "interval" || cfg.hole.kind == "intervals") {
        m = with_hole(std::move(m), union_interval_hole(cfg.hole.intervals));
    } else if (cfg.hole.kind == "attractor_ball") {
        auto cyc = attracting_cycle(m, cfg.hole.cycle_seed, cfg.hole.cycle_period);
        std::vector<State> centers;
        for (double p : cyc) centers.push_back({p, 0.0});
        m = with_hole(std::move(m), ball_hole(centers, cfg.hole.radius, m.space.dim()));
    }
    return m;
}

WeightFunction make_weight(const ExperimentConfig& cfg, const MapSystem& map) {
    if (cfg.weight.kind == "tlog") return weight_tlog(map, cfg.weight.t);
    return weight_constant(cfg.weight.value);
}

}  // namespace qel
