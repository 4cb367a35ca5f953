#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polyreg/config.hpp"
#include "polyreg/core.hpp"
#include "polyreg/evaluation.hpp"

namespace polyreg {

// One coverage summary line: a method at one nominal level (hull methods
// carry no level; has_alpha is false and record.alpha is NaN there).
struct CoverageRow {
    std::string method;
    bool has_alpha{true};
    CalibrationRecord record;
};

// One per-step volume line.  stderr_ is zero for exactly computed volumes
// (scenario boxes, hull triangulations).
struct VolumeRow {
    std::string method;
    long long t{0};
    bool has_alpha{true};
    double alpha{0.0};
    double volume{0.0};
    double stderr_{0.0};
};

struct Refusal {
    std::string method;
    std::string reason;
};

struct PipelineResult {
    std::vector<std::string> active_methods;
    std::vector<Refusal> refusals;
    std::vector<double> alphas;
    std::size_t eval_steps{0};
    std::size_t observed_steps{0};   // evaluation steps carrying a measurement
    std::size_t volume_samples{0};   // per-step Monte Carlo budget (0: skipped)
    std::vector<CoverageRow> coverage;
    std::vector<VolumeRow> volumes;
    std::vector<std::string> notes;
};

// Walk the evaluation range once: at each step build every requested region
// from information strictly before that step, record membership of the
// step's measurement and the region volumes, then absorb the step's error
// into the tracker and score windows.  `marginals` supplies quantile curves
// per time step; pass nullptr to derive Gaussian curves from the tracked
// covariance.  Deterministic in the config seed, including under jobs > 1;
// `partial` (when given) receives whatever full prefix of steps finished if
// evaluation throws.
PipelineResult evaluate_dataset(const RunConfig& cfg, const Dataset& ds,
                                const MarginalSeries* marginals,
                                PipelineResult* partial = nullptr);

struct RunArtifacts {
    std::string coverage_path;
    std::string volumes_path;  // empty when volume estimation is disabled
    std::string summary_path;
};

// Write coverage.csv, volumes.csv and summary.json under cfg.output_dir.
RunArtifacts write_reports(const PipelineResult& result, const RunConfig& cfg);

// Load inputs, evaluate, write reports.  On failure after loading, writes
// failure.json (error text plus whatever partial rows completed) into the
// output directory and rethrows.
RunArtifacts cmd_run(const RunConfig& cfg);

// Diagnose a configuration without running it: returns human-readable
// findings (empty = clean).  Never throws on bad inputs; problems become
// findings.
std::vector<std::string> cmd_check(const RunConfig& cfg);

// Replace `count` training measurements (chosen by `seed`, or the explicit
// indices) with the far corner of the unit cube relative to the forecast:
// coordinate d becomes 1 when the forecast is below 0.5 and 0 otherwise.
struct OutlierSpec {
    std::size_t count{6};
    std::uint64_t seed{0};
    std::vector<std::size_t> indices;  // optional explicit frame indices
};

Dataset inject_outliers(const Dataset& ds, const OutlierSpec& spec,
                        std::vector<std::size_t>* chosen = nullptr);

struct RobustnessRow {
    std::string method;
    double coverage_clean{0.0};
    double coverage_injected{0.0};
    double coverage_delta{0.0};  // injected - clean
    double volume_clean{0.0};    // mean over evaluation steps; NaN when skipped
    double volume_injected{0.0};
    double volume_delta{0.0};
};

struct RobustnessReport {
    double alpha{0.9};
    std::vector<std::size_t> injected_indices;
    std::vector<RobustnessRow> rows;
};

// Paired clean/contaminated evaluation at nominal level 0.9 (which must be
// on the config's alpha grid).  Identical seeds on both runs, so every
// difference is caused by the injected outliers.
RobustnessReport outlier_robustness(const RunConfig& cfg, const Dataset& ds,
                                    const MarginalSeries* marginals, const OutlierSpec& spec);

}  // namespace polyreg
