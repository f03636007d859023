#include "qel/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qel/util.hpp"
#include "qel/wasserstein.hpp"

namespace qel {
namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

// NaN is not representable in JSON; map it to null.
nlohmann::json num_or_null(double x) {
    if (std::isnan(x)) return nullptr;
    return x;
}

std::string cells_csv(const std::vector<std::uint32_t>& cells, const std::vector<double>& vals) {
    std::string s = "cell,value\n";
    for (size_t i = 0; i < cells.size(); ++i)
        s += std::to_string(cells[i]) + "," + fmt_double(vals[i]) + "\n";
    return s;
}

std::vector<std::uint32_t> global_active(const MapSystem& map, const CellPartition& part) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < part.size(); ++i)
        if (!map.in_hole(part.center(i))) out.push_back(i);
    return out;
}

// Class cells grown by enough neighbor rings to cover an epsilon-ball,
// staying off the hole.
std::vector<std::uint32_t> dilate_class(const MapSystem& map, const CellPartition& part,
                                        const std::vector<std::uint32_t>& seed, double epsilon) {
    double w = part.width(0);
    for (int a = 1; a < part.space.dim(); ++a) w = std::min(w, part.width(a));
    int rings = int(std::ceil(epsilon / w)) + 1;
    std::set<std::uint32_t> in(seed.begin(), seed.end());
    std::vector<std::uint32_t> frontier(seed.begin(), seed.end());
    for (int r = 0; r < rings && !frontier.empty(); ++r) {
        std::vector<std::uint32_t> next;
        for (auto c : frontier)
            for (auto nb : part.neighbors(c)) {
                if (in.count(nb) || map.in_hole(part.center(nb))) continue;
                in.insert(nb);
                next.push_back(nb);
            }
        frontier = std::move(next);
    }
    return {in.begin(), in.end()};
}

std::vector<std::uint32_t> class_cells(const RegionGraph& rg, int cls) {
    std::vector<std::uint32_t> cells;
    for (int comp : rg.class_components[cls])
        cells.insert(cells.end(), rg.components[comp].begin(), rg.components[comp].end());
    std::sort(cells.begin(), cells.end());
    return cells;
}

nlohmann::json triple_json(const SingleResult& r) {
    nlohmann::json j;
    j["epsilon"] = r.epsilon;
    j["lambda"] = r.triple.lambda;
    j["log_lambda"] = std::log(r.triple.lambda);
    j["period"] = r.triple.period;
    j["residual"] = r.triple.residual;
    j["near_degenerate"] = r.triple.near_degenerate;
    j["active_cells"] = r.op.cells.size();
    return j;
}

nlohmann::json row_json(const SweepRow& r) {
    nlohmann::json j;
    j["epsilon"] = r.epsilon;
    j["lambda"] = r.lambda;
    j["log_lambda"] = r.log_lambda;
    j["period"] = r.period;
    j["n_classes"] = r.n_classes;
    j["dominant_class"] = r.dominant_class;
    j["w1_distance_to_reference"] = num_or_null(r.w1_distance_to_reference);
    return j;
}

SingleResult single_pass(const ExperimentConfig& cfg, const Pipeline& pipe, double epsilon,
                         const SpectralTriple* warm) {
    SingleResult r;
    r.epsilon = epsilon;
    NoiseKernel kernel{epsilon, pipe.map.space.dim()};
    AssembleOptions aopts{cfg.quad_nodes, cfg.threads};

    std::vector<std::uint32_t> active = pipe.active;
    if (cfg.mode == "local") {
        auto global_op = assemble(pipe.map, kernel, pipe.weight, pipe.partition, pipe.active, aopts);
        auto global_rg = build_regions(global_op, pipe.partition, pipe.survivors);
        int cls = cfg.class_index >= 0 ? cfg.class_index : global_rg.dominant;
        if (cls < 0 || cls >= int(global_rg.class_components.size()))
            throw std::runtime_error("local mode: class index out of range");
        active = dilate_class(pipe.map, pipe.partition, class_cells(global_rg, cls), epsilon);
    }

    r.op = assemble(pipe.map, kernel, pipe.weight, pipe.partition, active, aopts);
    r.regions = build_regions(r.op, pipe.partition, pipe.survivors);

    SolveOptions sopts;
    if (warm && warm->g.size() == r.op.cells.size()) {
        sopts.g_start = &warm->g;
        sopts.m_start = &warm->m;
    }
    r.triple = solve_triple(r.op, sopts);
    r.nu = quasi_ergodic(r.triple, r.op);
    return r;
}

void write_single_artifacts(SingleResult& r, const std::string& dir, const std::string& prefix,
                            bool full) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto emit = [&](const std::string& name, const std::string& text) {
        write_text(dir + "/" + name, text);
        r.artifacts.push_back(name);
    };
    emit(prefix + "triple.json", json_text(triple_json(r)));
    emit(prefix + "nu.csv", cells_csv(r.op.cells, r.nu.weights));
    if (full) {
        dump_operator(r.op, dir + "/" + prefix + "operator.csv",
                      dir + "/" + prefix + "operator.json");
        r.artifacts.push_back(prefix + "operator.csv");
        r.artifacts.push_back(prefix + "operator.json");
        emit(prefix + "g.csv", cells_csv(r.op.cells, r.triple.g));
        emit(prefix + "m.csv", cells_csv(r.op.cells, r.triple.m));
        emit(prefix + "regions.dot", region_dot(r.regions));
        emit(prefix + "regions.json", json_text(region_summary(r.regions)));
    }
}

}  // namespace

Pipeline build_pipeline(const ExperimentConfig& cfg) {
    Pipeline p;
    p.map = make_map(cfg);
    p.weight = make_weight(cfg, p.map);
    p.partition = CellPartition(p.map.space, cfg.resolution);
    p.survivors = survivor_cells(p.map, p.partition, cfg.survivor_depth, cfg.survivor_samples);
    p.active = global_active(p.map, p.partition);
    return p;
}

SingleResult run_single(const ExperimentConfig& cfg, double epsilon, const std::string& out_dir,
                        const SpectralTriple* warm) {
    auto pipe = build_pipeline(cfg);
    auto r = single_pass(cfg, pipe, epsilon, warm);
    if (!out_dir.empty()) write_single_artifacts(r, out_dir, "", true);
    return r;
}

OracleReference build_reference(const ExperimentConfig& cfg, const CellPartition& partition) {
    OracleReference ref;
    std::string model = cfg.oracle_model;
    if (model == "auto")
        model = (cfg.map_id == "doubling" || cfg.map_id == "logistic") ? cfg.map_id : "none";
    if (model == "none") return ref;

    auto map = make_map(cfg);
    auto weight = make_weight(cfg, map);
    std::function<double(double)> phi = [weight](double x) { return weight(State{x, 0.0}); };

    if (model == "doubling") {
        std::function<bool(double)> hole = [map](double x) { return map.in_hole(State{x, 0.0}); };
        ref.model = doubling_hole_model(cfg.oracle_depth, hole, phi);
    } else if (model == "logistic") {
        if (cfg.hole.kind != "attractor_ball" || cfg.hole.cycle_period != 3)
            return ref;  // symbolic model only covers the period-3 window
        double a = map.params.count("a") ? map.params.at("a") : 3.83;
        ref.model = logistic_repeller_model(a, cfg.oracle_depth, cfg.hole.radius, phi);
    } else {
        throw std::invalid_argument("unknown oracle model " + model);
    }

    ref.equilibrium = pressure(ref.model);
    ref.pressure = ref.equilibrium.pressure;
    ref.digest = digest_hex(equilibrium_to_json(ref.equilibrium).dump());

    // push the per-cylinder equilibrium mass onto the grid by overlap
    ref.cell_weights.assign(partition.size(), 0.0);
    double w = partition.width(0);
    for (size_t s = 0; s < ref.model.states.size(); ++s) {
        double p = ref.equilibrium.measure[s];
        if (p <= 0.0) continue;
        auto [lo, hi] = ref.model.intervals[s];
        if (hi <= lo) continue;
        int i0 = std::max(0, int(std::floor(lo / w)));
        int i1 = std::min(partition.resolution - 1, int(std::floor((hi - 1e-15) / w)));
        for (int i = i0; i <= i1; ++i) {
            double ov = std::min(hi, (i + 1) * w) - std::max(lo, i * w);
            if (ov > 0.0) ref.cell_weights[i] += p * ov / (hi - lo);
        }
    }
    ref.available = true;
    return ref;
}

std::vector<double> nu_cell_weights(const UlamOperator& op, const QuasiErgodicMeasure& nu,
                                    const CellPartition& partition) {
    std::vector<double> full(partition.size(), 0.0);
    for (size_t k = 0; k < op.cells.size(); ++k) full[op.cells[k]] = nu.weights[k];
    return full;
}

nlohmann::json SweepReport::to_json(const ExperimentConfig& cfg) const {
    nlohmann::json j;
    j["config"] = config_to_json(cfg);
    j["config"]["output"].erase("dir");  // destination is not part of the experiment
    j["config_digest"] = config_digest(cfg);
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) j["rows"].push_back(row_json(r));
    j["reference"]["available"] = reference.available;
    if (reference.available) {
        j["reference"]["pressure"] = reference.pressure;
        j["reference"]["entropy"] = reference.equilibrium.entropy;
        j["reference"]["integral"] = reference.equilibrium.integral;
        j["reference"]["digest"] = reference.digest;
        j["reference"]["note"] = reference.equilibrium.note;
    }
    j["verdict"]["converged"] = converged;
    j["verdict"]["final_gap"] = num_or_null(final_gap);
    j["verdict"]["tolerance"] = cfg.tolerance;
    return j;
}

SweepReport run_sweep(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    if (cfg.epsilons.empty()) throw std::invalid_argument("sweep: no epsilons configured");
    auto pipe = build_pipeline(cfg);

    SweepReport rep;
    rep.reference = build_reference(cfg, pipe.partition);

    fs::create_directories(cfg.out_dir);
    std::vector<std::string> artifacts;
    SpectralTriple warm;
    bool have_warm = false;

    for (size_t e = 0; e < cfg.epsilons.size(); ++e) {
        auto r = single_pass(cfg, pipe, cfg.epsilons[e], have_warm ? &warm : nullptr);
        warm = r.triple;
        have_warm = true;

        SweepRow row;
        row.epsilon = r.epsilon;
        row.lambda = r.triple.lambda;
        row.log_lambda = std::log(r.triple.lambda);
        row.period = r.triple.period;
        row.n_classes = int(r.regions.class_lambda.size());
        row.dominant_class = r.regions.dominant;
        row.w1_distance_to_reference = std::numeric_limits<double>::quiet_NaN();
        if (rep.reference.available) {
            auto full = nu_cell_weights(r.op, r.nu, pipe.partition);
            row.w1_distance_to_reference =
                w1_distance(pipe.partition, full, rep.reference.cell_weights);
        }
        rep.rows.push_back(row);

        std::string prefix = "eps" + std::to_string(e) + "_";
        write_single_artifacts(r, cfg.out_dir, prefix, e + 1 == cfg.epsilons.size());
        artifacts.insert(artifacts.end(), r.artifacts.begin(), r.artifacts.end());
    }

    rep.final_gap = std::numeric_limits<double>::quiet_NaN();
    if (rep.reference.available) {
        rep.final_gap = std::fabs(rep.rows.back().log_lambda - rep.reference.pressure);
        bool w1_shrinking = true;
        if (rep.rows.size() >= 3) {
            size_t n = rep.rows.size();
            for (size_t i = n - 2; i < n; ++i)
                if (!(rep.rows[i].w1_distance_to_reference <
                      rep.rows[i - 1].w1_distance_to_reference))
                    w1_shrinking = false;
        }
        rep.converged = rep.final_gap <= cfg.tolerance && w1_shrinking;
    }

    write_text(cfg.out_dir + "/report.json", json_text(rep.to_json(cfg)));
    artifacts.push_back("report.json");
    if (rep.reference.available) {
        nlohmann::json oj;
        oj["model"] = model_to_json(rep.reference.model);
        oj["equilibrium"] = equilibrium_to_json(rep.reference.equilibrium);
        write_text(cfg.out_dir + "/oracle.json", json_text(oj));
        artifacts.push_back("oracle.json");
    }

    nlohmann::json extra;
    extra["verdict"] = {{"converged", rep.converged}, {"final_gap", num_or_null(rep.final_gap)}};
    write_manifest(cfg.out_dir, cfg, artifacts, extra);
    return rep;
}

bool validate_report(const nlohmann::json& report, const nlohmann::json& schema,
                     std::string* error) {
    std::function<bool(const nlohmann::json&, const nlohmann::json&, std::string)> check =
        [&](const nlohmann::json& val, const nlohmann::json& sch, std::string path) -> bool {
        auto fail = [&](const std::string& why) {
            if (error) *error = path.empty() ? why : path + ": " + why;
            return false;
        };
        if (sch.contains("type")) {
            auto matches = [&](const std::string& t) {
                if (t == "object") return val.is_object();
                if (t == "array") return val.is_array();
                if (t == "string") return val.is_string();
                if (t == "boolean") return val.is_boolean();
                if (t == "integer") return val.is_number_integer();
                if (t == "number") return val.is_number();
                if (t == "null") return val.is_null();
                return false;
            };
            bool ok = false;
            if (sch["type"].is_array()) {
                for (const auto& t : sch["type"]) ok = ok || matches(t.get<std::string>());
            } else {
                ok = matches(sch["type"].get<std::string>());
            }
            if (!ok) return fail("type mismatch");
        }
        if (sch.contains("required"))
            for (const auto& k : sch["required"])
                if (!val.contains(k.get<std::string>()))
                    return fail("missing key " + k.get<std::string>());
        if (sch.contains("properties") && val.is_object())
            for (auto it = sch["properties"].begin(); it != sch["properties"].end(); ++it)
                if (val.contains(it.key()))
                    if (!check(val.at(it.key()), it.value(), path + "/" + it.key())) return false;
        if (sch.contains("items") && val.is_array()) {
            int i = 0;
            for (const auto& item : val)
                if (!check(item, sch["items"], path + "/" + std::to_string(i++))) return false;
        }
        return true;
    };
    return check(report, schema, "");
}

void write_manifest(const std::string& dir, const ExperimentConfig& cfg,
                    const std::vector<std::string>& artifacts, const nlohmann::json& extra) {
    nlohmann::json j;
    auto cj = config_to_json(cfg);
    cj.erase("output");  // keep the manifest independent of where it lands
    j["config"] = cj;
    j["config_digest"] = config_digest(cfg);
    auto names = artifacts;
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    j["artifacts"] = nlohmann::json::array();
    for (const auto& name : names) {
        nlohmann::json a;
        a["name"] = name;
        a["digest"] = digest_hex(read_text(dir + "/" + name));
        j["artifacts"].push_back(a);
    }
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    write_text(dir + "/manifest.json", json_text(j));
}

}  // namespace qel
