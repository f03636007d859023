#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qel/config.hpp"
#include "qel/oracle.hpp"
#include "qel/regions.hpp"
#include "qel/spectral.hpp"
#include "qel/ulam.hpp"

namespace qel {

struct Pipeline {
    MapSystem map;
    WeightFunction weight;
    CellPartition partition;
    std::vector<std::uint32_t> survivors;  // survivor cover at config depth
    std::vector<std::uint32_t> active;     // operator domain (mode-dependent)
};

// Builds map/weight/partition/survivor cover and the global active set
// (all cells whose center lies outside the hole).
Pipeline build_pipeline(const ExperimentConfig& cfg);

struct SingleResult {
    double epsilon = 0.0;
    UlamOperator op;
    SpectralTriple triple;
    QuasiErgodicMeasure nu;
    RegionGraph regions;
    std::vector<std::string> artifacts;  // file names written (if out_dir given)
};

// One full pipeline pass at a fixed epsilon; writes operator dump, triple,
// nu, and region artifacts when out_dir is non-empty.
SingleResult run_single(const ExperimentConfig& cfg, double epsilon,
                        const std::string& out_dir = "",
                        const SpectralTriple* warm = nullptr);

struct OracleReference {
    bool available = false;
    double pressure = 0.0;
    EquilibriumState equilibrium;
    MarkovModel model;
    std::vector<double> cell_weights;  // pushed onto the partition
    std::string digest;
};

// Oracle equilibrium state for the configured system pushed onto the
// partition (doubling and logistic families; others unavailable).
OracleReference build_reference(const ExperimentConfig& cfg, const CellPartition& partition);

struct SweepRow {
    double epsilon = 0.0;
    double lambda = 0.0;
    double log_lambda = 0.0;
    int period = 1;
    int n_classes = 0;
    int dominant_class = -1;
    double w1_distance_to_reference = 0.0;  // NaN if no reference
};

struct SweepReport {
    std::vector<SweepRow> rows;
    OracleReference reference;
    bool converged = false;
    double final_gap = 0.0;  // |log lambda - pressure| at final epsilon
    nlohmann::json to_json(const ExperimentConfig& cfg) const;
};

// Descending-epsilon sweep with warm-started power iterations; persists
// report.json and manifest.json under cfg.out_dir.
SweepReport run_sweep(const ExperimentConfig& cfg);

// Expand active-local nu weights to a full-partition weight vector.
std::vector<double> nu_cell_weights(const UlamOperator& op, const QuasiErgodicMeasure& nu,
                                    const CellPartition& partition);

// Minimal JSON-schema check (type / required / properties / items).
bool validate_report(const nlohmann::json& report, const nlohmann::json& schema,
                     std::string* error = nullptr);

// Deterministic manifest: resolved config, digest, artifact list with
// content digests. Byte-identical across identical runs.
void write_manifest(const std::string& dir, const ExperimentConfig& cfg,
                    const std::vector<std::string>& artifacts, const nlohmann::json& extra);

}  // namespace qel
