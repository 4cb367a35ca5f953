#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polyreg/core.hpp"
#include "polyreg/covariance.hpp"

namespace polyreg {

// Everything a batch evaluation run needs.  Fields map 1:1 onto config-file
// keys (see parse_config_file); command-line flags override file values.
struct RunConfig {
    std::string data_path;
    CsvFormat data_format{CsvFormat::kWide};
    DimensionSpec spec;
    std::string marginals_path;  // empty: derive Gaussian curves from the tracker

    // Which region constructions to evaluate.
    std::vector<std::string> methods{"p1", "pinf", "ellipsoid", "mpi"};

    double alpha_min{0.05};
    double alpha_max{0.95};
    double alpha_step{0.05};

    std::size_t window{300};
    EwmaConfig ewma;

    std::size_t scenario_count{500};
    std::uint64_t seed{1};

    // Monte Carlo sample count per region volume estimate.  Unset: pick by
    // dimension (1e5 up to dim 6, 5e5 above).  Zero: skip volume estimation.
    std::optional<std::size_t> volume_samples;

    double trim_significance{0.001};
    double trim_multiplier{1.0};

    double train_fraction{0.5};
    std::optional<std::size_t> train_count;

    std::string output_dir{"out"};
    std::size_t jobs{0};  // 0: use hardware concurrency

    void validate() const;
    std::vector<double> alpha_grid() const;
    std::size_t resolve_volume_samples(std::size_t dim) const;
    std::size_t resolve_train_count(std::size_t total) const;
};

const std::vector<std::string>& known_methods();

// Flat "key = value" file with '#' comments.  Returns the pairs in file
// order; duplicate keys are an error, as are lines without '='.
std::map<std::string, std::string> parse_config_file(const std::string& path);

// Apply file pairs onto a config.  Unknown keys raise ConfigError naming the
// key, so typos never pass silently.
void apply_config_pairs(RunConfig& cfg, const std::map<std::string, std::string>& pairs);

RunConfig load_run_config(const std::string& path);

std::vector<std::string> split_methods(const std::string& csv);

}  // namespace polyreg
