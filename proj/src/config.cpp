#include "polyreg/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "polyreg/errors.hpp"

namespace polyreg {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' needs a number, got '" + value + "'");
    }
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        if (!value.empty() && value[0] == '-') throw std::invalid_argument("negative");
        unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' needs a non-negative integer, got '" +
                          value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("config: key '" + key + "' needs true/false, got '" + value + "'");
}

}  // namespace

const std::vector<std::string>& known_methods() {
    static const std::vector<std::string> methods = {"p1",   "pinf",         "ellipsoid",
                                                     "hull", "hull-trimmed", "mpi"};
    return methods;
}

std::vector<std::string> split_methods(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(item);
    }
    return out;
}

void RunConfig::validate() const {
    spec.validate();
    if (methods.empty()) throw ConfigError("config: no methods selected");
    const auto& known = known_methods();
    for (const auto& m : methods) {
        if (std::find(known.begin(), known.end(), m) == known.end()) {
            std::string allowed;
            for (const auto& k : known) allowed += (allowed.empty() ? "" : ", ") + k;
            throw ConfigError("config: unknown method '" + m + "' (known: " + allowed + ")");
        }
        if (std::count(methods.begin(), methods.end(), m) != 1)
            throw ConfigError("config: method '" + m + "' listed more than once");
    }
    if (!(alpha_min > 0.0) || !(alpha_max < 1.0) || !(alpha_step > 0.0) ||
        alpha_min > alpha_max + 1e-12)
        throw ConfigError("config: alpha grid must satisfy 0 < min <= max < 1 with step > 0");
    if (window < 1) throw ConfigError("config: window must be at least 1");
    if (!(ewma.lambda > 0.0) || !(ewma.lambda < 1.0))
        throw ConfigError("config: covariance.lambda must lie in (0,1)");
    if (ewma.epsilon < 0.0) throw ConfigError("config: covariance.epsilon must be >= 0");
    if (scenario_count < 1) throw ConfigError("config: scenarios.count must be at least 1");
    if (!(trim_significance > 0.0) || !(trim_significance < 1.0))
        throw ConfigError("config: trim.significance must lie in (0,1)");
    if (!(trim_multiplier > 0.0)) throw ConfigError("config: trim.multiplier must be > 0");
    if (!train_count.has_value() &&
        (!(train_fraction > 0.0) || train_fraction > 1.0))
        throw ConfigError("config: train.fraction must lie in (0,1]");
}

std::vector<double> RunConfig::alpha_grid() const {
    std::vector<double> grid;
    const long long count =
        static_cast<long long>(std::floor((alpha_max - alpha_min) / alpha_step + 1e-9));
    for (long long k = 0; k <= count; ++k) {
        double a = alpha_min + static_cast<double>(k) * alpha_step;
        // Snap accumulated floating point drift so grid levels print and
        // compare as the values the user wrote (e.g. 0.15, not 0.15000...02).
        a = std::round(a * 1e12) / 1e12;
        if (a >= 1.0 || a <= 0.0) break;
        grid.push_back(a);
    }
    if (grid.empty()) throw ConfigError("config: empty alpha grid");
    return grid;
}

std::size_t RunConfig::resolve_volume_samples(std::size_t dim) const {
    if (volume_samples.has_value()) return *volume_samples;
    return dim <= 6 ? 100000u : 500000u;
}

std::size_t RunConfig::resolve_train_count(std::size_t total) const {
    std::size_t train;
    if (train_count.has_value()) {
        train = *train_count;
    } else {
        train = static_cast<std::size_t>(
            std::llround(static_cast<double>(total) * train_fraction));
    }
    if (train < 1 || train > total)
        throw ConfigError("config: training split (" + std::to_string(train) +
                          ") outside the dataset size (" + std::to_string(total) + ")");
    return train;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::map<std::string, std::string> pairs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) +
                              " of '" + path + "' has no '='");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config: line " + std::to_string(lineno) + " of '" + path +
                              "' has an empty key");
        if (!pairs.emplace(key, value).second)
            throw ConfigError("config: duplicate key '" + key + "' at line " +
                              std::to_string(lineno) + " of '" + path + "'");
    }
    return pairs;
}

void apply_config_pairs(RunConfig& cfg, const std::map<std::string, std::string>& pairs) {
    for (const auto& [key, value] : pairs) {
        if (key == "data.path") {
            cfg.data_path = value;
        } else if (key == "data.format") {
            cfg.data_format = csv_format_from_string(value);
        } else if (key == "data.horizons") {
            cfg.spec.horizons = static_cast<std::size_t>(parse_uint(key, value));
        } else if (key == "data.locations") {
            cfg.spec.locations = static_cast<std::size_t>(parse_uint(key, value));
        } else if (key == "marginals.path") {
            cfg.marginals_path = value;
        } else if (key == "methods") {
            cfg.methods = split_methods(value);
        } else if (key == "alpha.min") {
            cfg.alpha_min = parse_double(key, value);
        } else if (key == "alpha.max") {
            cfg.alpha_max = parse_double(key, value);
        } else if (key == "alpha.step") {
            cfg.alpha_step = parse_double(key, value);
        } else if (key == "window") {
            cfg.window = static_cast<std::size_t>(parse_uint(key, value));
        } else if (key == "covariance.lambda") {
            cfg.ewma.lambda = parse_double(key, value);
        } else if (key == "covariance.epsilon") {
            cfg.ewma.epsilon = parse_double(key, value);
        } else if (key == "covariance.center_errors") {
            cfg.ewma.center_errors = parse_bool(key, value);
        } else if (key == "scenarios.count") {
            cfg.scenario_count = static_cast<std::size_t>(parse_uint(key, value));
        } else if (key == "seed") {
            cfg.seed = parse_uint(key, value);
        } else if (key == "volume.samples") {
            cfg.volume_samples = static_cast<std::size_t>(parse_uint(key, value));
        } else if (key == "trim.significance") {
            cfg.trim_significance = parse_double(key, value);
        } else if (key == "trim.multiplier") {
            cfg.trim_multiplier = parse_double(key, value);
        } else if (key == "train.fraction") {
            cfg.train_fraction = parse_double(key, value);
        } else if (key == "train.count") {
            cfg.train_count = static_cast<std::size_t>(parse_uint(key, value));
        } else if (key == "output.dir") {
            cfg.output_dir = value;
        } else if (key == "jobs") {
            cfg.jobs = static_cast<std::size_t>(parse_uint(key, value));
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }
}

RunConfig load_run_config(const std::string& path) {
    RunConfig cfg;
    apply_config_pairs(cfg, parse_config_file(path));
    return cfg;
}

}  // namespace polyreg
