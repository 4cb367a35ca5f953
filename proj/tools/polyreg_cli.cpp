#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "polyreg/config.hpp"
#include "polyreg/core.hpp"
#include "polyreg/errors.hpp"
#include "polyreg/evaluation.hpp"
#include "polyreg/hull.hpp"
#include "polyreg/intervals.hpp"
#include "polyreg/pipeline.hpp"
#include "polyreg/polyhedra.hpp"
#include "polyreg/scenarios.hpp"
#include "polyreg/simulate.hpp"

namespace {

using namespace polyreg;

// Options shared by `run` and `check`.  Optional fields override the config
// file only when given on the command line.
struct RunCliOpts {
    std::string config_path;
    std::optional<std::string> data;
    std::optional<std::string> format;
    std::optional<std::string> marginals;
    std::optional<std::string> methods;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> horizons;
    std::optional<std::size_t> locations;
    std::optional<std::size_t> window;
    std::optional<std::size_t> scenarios;
    std::optional<std::size_t> volume_samples;
    std::optional<std::size_t> train_count;
    std::optional<std::size_t> jobs;
    std::optional<double> alpha_min;
    std::optional<double> alpha_max;
    std::optional<double> alpha_step;
    std::optional<double> lambda;
    std::optional<double> epsilon;
    std::optional<double> trim_significance;
    std::optional<double> trim_multiplier;
    std::optional<double> train_fraction;
    std::optional<std::uint64_t> seed;
    bool center_errors{false};
    bool center_errors_given{false};
};

void add_run_options(CLI::App* cmd, RunCliOpts& o) {
    cmd->add_option("--config", o.config_path, "key = value configuration file");
    cmd->add_option("--data", o.data, "forecast/measurement CSV path");
    cmd->add_option("--format", o.format, "CSV layout: wide or long");
    cmd->add_option("--horizons", o.horizons, "forecast horizons per step");
    cmd->add_option("--locations", o.locations, "locations per horizon");
    cmd->add_option("--marginals", o.marginals, "marginal quantile curve CSV");
    cmd->add_option("--methods", o.methods,
                    "comma list from p1,pinf,ellipsoid,hull,hull-trimmed,mpi");
    cmd->add_option("--alpha-min", o.alpha_min, "lowest nominal level");
    cmd->add_option("--alpha-max", o.alpha_max, "highest nominal level");
    cmd->add_option("--alpha-step", o.alpha_step, "level grid step");
    cmd->add_option("--window", o.window, "rolling score window length");
    cmd->add_option("--lambda", o.lambda, "covariance smoothing weight");
    cmd->add_option("--epsilon", o.epsilon, "covariance diagonal loading");
    cmd->add_flag_callback(
        "--center-errors",
        [&o]() {
            o.center_errors = true;
            o.center_errors_given = true;
        },
        "subtract the tracked error mean");
    cmd->add_option("--scenarios", o.scenarios, "scenario draws per step");
    cmd->add_option("--seed", o.seed, "master random seed");
    cmd->add_option("--volume-samples", o.volume_samples,
                    "Monte Carlo samples per volume (0 skips volumes)");
    cmd->add_option("--trim-significance", o.trim_significance,
                    "outlier trim tail probability");
    cmd->add_option("--trim-multiplier", o.trim_multiplier, "outlier trim radius multiplier");
    cmd->add_option("--train-fraction", o.train_fraction, "training share of the series");
    cmd->add_option("--train-count", o.train_count, "training steps (overrides the fraction)");
    cmd->add_option("--out", o.out_dir, "report output directory");
    cmd->add_option("--jobs", o.jobs, "worker threads (0: hardware)");
}

RunConfig make_run_config(const RunCliOpts& o) {
    RunConfig cfg;
    if (!o.config_path.empty()) apply_config_pairs(cfg, parse_config_file(o.config_path));
    if (o.data) cfg.data_path = *o.data;
    if (o.format) cfg.data_format = csv_format_from_string(*o.format);
    if (o.horizons) cfg.spec.horizons = *o.horizons;
    if (o.locations) cfg.spec.locations = *o.locations;
    if (o.marginals) cfg.marginals_path = *o.marginals;
    if (o.methods) cfg.methods = split_methods(*o.methods);
    if (o.alpha_min) cfg.alpha_min = *o.alpha_min;
    if (o.alpha_max) cfg.alpha_max = *o.alpha_max;
    if (o.alpha_step) cfg.alpha_step = *o.alpha_step;
    if (o.window) cfg.window = *o.window;
    if (o.lambda) cfg.ewma.lambda = *o.lambda;
    if (o.epsilon) cfg.ewma.epsilon = *o.epsilon;
    if (o.center_errors_given) cfg.ewma.center_errors = o.center_errors;
    if (o.scenarios) cfg.scenario_count = *o.scenarios;
    if (o.seed) cfg.seed = *o.seed;
    if (o.volume_samples) cfg.volume_samples = *o.volume_samples;
    if (o.trim_significance) cfg.trim_significance = *o.trim_significance;
    if (o.trim_multiplier) cfg.trim_multiplier = *o.trim_multiplier;
    if (o.train_fraction) cfg.train_fraction = *o.train_fraction;
    if (o.train_count) cfg.train_count = *o.train_count;
    if (o.out_dir) cfg.output_dir = *o.out_dir;
    if (o.jobs) cfg.jobs = *o.jobs;
    return cfg;
}

int run_simulate(const SimulateConfig& sc, const std::string& out_path,
                 const std::string& marginals_path, const std::string& format) {
    const CsvFormat fmt = csv_format_from_string(format);
    const SimulatedData data = simulate_dataset(sc);
    save_dataset(data.dataset, out_path, fmt);
    if (!marginals_path.empty()) save_marginals(data.marginals, marginals_path);
    std::cout << "wrote " << data.dataset.size() << " steps (training "
              << data.dataset.train_count() << ", dimension " << data.dataset.spec().dim()
              << ") to " << out_path << "\n";
    if (!marginals_path.empty())
        std::cout << "wrote marginal quantile curves to " << marginals_path << "\n";
    return 0;
}

int run_run(const RunCliOpts& opts) {
    const RunConfig cfg = make_run_config(opts);
    const RunArtifacts art = cmd_run(cfg);
    std::cout << "coverage: " << art.coverage_path << "\n";
    if (!art.volumes_path.empty()) std::cout << "volumes: " << art.volumes_path << "\n";
    std::cout << "summary: " << art.summary_path << "\n";
    return 0;
}

int run_check(const RunCliOpts& opts) {
    const RunConfig cfg = make_run_config(opts);
    const std::vector<std::string> findings = cmd_check(cfg);
    if (findings.empty()) {
        std::cout << "ok: no findings\n";
    } else {
        for (const std::string& f : findings) std::cout << "finding: " << f << "\n";
        std::cout << findings.size() << " finding(s)\n";
    }
    return 0;
}

int run_hull(const std::string& scenarios_path, const std::string& out_path, bool trim,
             double significance, double multiplier) {
    ScenarioSet cloud = load_scenario_csv(scenarios_path);
    if (trim) {
        const std::size_t dim = cloud.dim;
        const double s = static_cast<double>(cloud.points.size());
        Vec mean(dim, 0.0);
        for (const Vec& p : cloud.points)
            for (std::size_t d = 0; d < dim; ++d) mean[d] += p[d];
        for (std::size_t d = 0; d < dim; ++d) mean[d] /= s;
        SymmetricMatrix cov(dim);
        for (const Vec& p : cloud.points)
            for (std::size_t i = 0; i < dim; ++i)
                for (std::size_t j = 0; j <= i; ++j)
                    cov.add(i, j, (p[i] - mean[i]) * (p[j] - mean[j]));
        cov.scale(1.0 / s);
        const std::size_t before = cloud.points.size();
        cloud = trim_outliers(cloud, cov, mean, significance, multiplier);
        std::cout << "trimmed " << before - cloud.points.size() << " of " << before
                  << " scenarios\n";
    }
    const ConvexHull hull = quickhull(cloud);
    std::size_t degenerate = 0;
    const double volume = hull_volume(hull, &degenerate);
    std::cout << "vertices: " << hull.vertices.size() << "\n";
    std::cout << "facets: " << hull.facets.size() << "\n";
    std::cout << "volume: " << format_double(volume) << "\n";
    if (degenerate > 0) std::cout << "degenerate facets: " << degenerate << "\n";
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw DataError("cannot write '" + out_path + "'");
        out << hull_to_json(hull) << "\n";
        std::cout << "hull: " << out_path << "\n";
    }
    return 0;
}

int run_volume(const std::string& region_path, std::size_t samples, std::uint64_t seed) {
    std::ifstream in(region_path);
    if (!in) throw DataError("cannot open '" + region_path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(std::string("region JSON parse error: ") + e.what());
    }

    VolumeRecord rec;
    if (j.contains("kind")) {
        const PolyhedralRegion region = region_from_json(text);
        rec = monte_carlo_volume([&region](const Vec& x) { return contains(region, x); },
                                 region.center.size(), samples, seed);
    } else if (j.contains("lower")) {
        const BoxRegion box = box_from_json(text);
        rec = monte_carlo_volume([&box](const Vec& x) { return box_contains(box, x); },
                                 box.lower.size(), samples, seed);
    } else {
        throw DataError("region JSON: expected a norm-ball region ('kind') or a box ('lower')");
    }

    nlohmann::json out;
    out["volume"] = rec.volume;
    out["stderr"] = rec.stderr_;
    out["samples"] = rec.samples;
    out["hits"] = rec.hits;
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Polyhedral predictive regions for correlated forecast errors"};
    app.require_subcommand(1);

    // simulate
    SimulateConfig sc;
    std::string sim_out = "data.csv";
    std::string sim_marginals;
    std::string sim_format = "wide";
    CLI::App* sim = app.add_subcommand("simulate", "generate a synthetic forecast series");
    sim->add_option("--out", sim_out, "dataset CSV to write")->required();
    sim->add_option("--marginals-out", sim_marginals, "marginal quantile CSV to write");
    sim->add_option("--format", sim_format, "CSV layout: wide or long");
    sim->add_option("--horizons", sc.spec.horizons, "forecast horizons per step");
    sim->add_option("--locations", sc.spec.locations, "locations per horizon");
    sim->add_option("--steps", sc.steps, "time steps to generate");
    sim->add_option("--train-fraction", sc.train_fraction, "training share of the series");
    sim->add_option("--seed", sc.seed, "random seed");
    sim->add_option("--noise", sc.noise_scale, "base error standard deviation");
    sim->add_option("--correlation", sc.correlation, "central equicorrelation strength");
    sim->add_option("--corr-wander", sc.corr_wander, "correlation drift amplitude");
    sim->add_option("--vol-wander", sc.vol_wander, "volatility drift amplitude");
    sim->add_flag("--bounded", sc.bounded, "squash errors into a bounded range");

    // run / check
    RunCliOpts run_opts;
    CLI::App* run = app.add_subcommand("run", "evaluate region constructions over a series");
    add_run_options(run, run_opts);
    RunCliOpts check_opts;
    CLI::App* check = app.add_subcommand("check", "diagnose a configuration without running");
    add_run_options(check, check_opts);

    // hull
    std::string hull_scenarios;
    std::string hull_out;
    bool hull_trim = false;
    double hull_significance = 0.001;
    double hull_multiplier = 1.0;
    CLI::App* hull = app.add_subcommand("hull", "build the convex hull of a scenario cloud");
    hull->add_option("--scenarios", hull_scenarios, "scenario CSV (header x_1..x_D)")
        ->required();
    hull->add_option("--out", hull_out, "hull JSON to write");
    hull->add_flag("--trim", hull_trim, "drop spread outliers before building");
    hull->add_option("--significance", hull_significance, "trim tail probability");
    hull->add_option("--multiplier", hull_multiplier, "trim radius multiplier");

    // volume
    std::string volume_region;
    std::size_t volume_samples = 100000;
    std::uint64_t volume_seed = 1;
    CLI::App* volume = app.add_subcommand("volume", "Monte Carlo volume of a stored region");
    volume->add_option("--region", volume_region, "region JSON (norm-ball or box)")->required();
    volume->add_option("--samples", volume_samples, "Monte Carlo sample count");
    volume->add_option("--seed", volume_seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (sim->parsed()) return run_simulate(sc, sim_out, sim_marginals, sim_format);
        if (run->parsed()) return run_run(run_opts);
        if (check->parsed()) return run_check(check_opts);
        if (hull->parsed())
            return run_hull(hull_scenarios, hull_out, hull_trim, hull_significance,
                            hull_multiplier);
        if (volume->parsed())
            return run_volume(volume_region, volume_samples, volume_seed);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
