#include "polyreg/scenarios.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "polyreg/rng.hpp"
#include "polyreg/special.hpp"

namespace polyreg {

ScenarioSet ScenarioSet::from_points(std::vector<Vec> pts) {
    if (pts.empty()) throw std::invalid_argument("ScenarioSet::from_points: empty point list");
    ScenarioSet s;
    s.dim = pts.front().size();
    if (s.dim == 0) throw std::invalid_argument("ScenarioSet::from_points: zero-dimensional points");
    for (const Vec& p : pts) {
        if (p.size() != s.dim) {
            throw std::invalid_argument("ScenarioSet::from_points: ragged point list");
        }
    }
    s.points = std::move(pts);
    return s;
}

SymmetricMatrix correlation_from_covariance(const SymmetricMatrix& cov) {
    const std::size_t d = cov.dim();
    Vec sd(d);
    for (std::size_t i = 0; i < d; ++i) {
        double v = cov(i, i);
        sd[i] = v > 0.0 ? std::sqrt(v) : 0.0;
    }
    SymmetricMatrix r(d);
    for (std::size_t i = 0; i < d; ++i) {
        r.set(i, i, 1.0);
        for (std::size_t j = 0; j < i; ++j) {
            if (sd[i] > 0.0 && sd[j] > 0.0) {
                // Round-off can push a ratio a hair outside [-1,1]; keep it in.
                double c = cov(i, j) / (sd[i] * sd[j]);
                r.set(i, j, std::min(1.0, std::max(-1.0, c)));
            }
        }
    }
    return r;
}

ScenarioSet sample_scenarios(const MarginalQuantileCurve& marginals,
                             const SymmetricMatrix& correlation, std::size_t count,
                             std::uint64_t seed) {
    const std::size_t d = marginals.dim();
    if (d == 0) throw std::invalid_argument("sample_scenarios: empty marginals");
    if (count < 1) throw std::invalid_argument("sample_scenarios: count must be at least 1");
    if (correlation.dim() != d) {
        throw std::invalid_argument("sample_scenarios: correlation dimension mismatch");
    }
    for (std::size_t i = 0; i < d; ++i) {
        if (std::fabs(correlation(i, i) - 1.0) > 1e-8) {
            throw std::invalid_argument("sample_scenarios: correlation diagonal must be 1");
        }
    }
    // Throws NotPositiveDefinite for an invalid correlation matrix.
    std::vector<double> chol = cholesky_lower(correlation);
    auto lat = [&](std::size_t i, std::size_t j) { return chol[i * (i + 1) / 2 + j]; };

    ScenarioSet out;
    out.dim = d;
    out.seed = seed;
    out.correlation = correlation;
    out.points.reserve(count);

    Rng rng(seed);
    Vec g(d), z(d), x(d);
    for (std::size_t s = 0; s < count; ++s) {
        for (std::size_t i = 0; i < d; ++i) g[i] = rng.gaussian();
        for (std::size_t i = 0; i < d; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j <= i; ++j) acc += lat(i, j) * g[j];
            z[i] = acc;
        }
        for (std::size_t i = 0; i < d; ++i) {
            double u = normal_cdf(z[i]);
            double v = marginals.quantile(i, u);
            x[i] = std::min(1.0, std::max(0.0, v));
        }
        out.points.push_back(x);
    }
    return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

double parse_unit_value(const std::string& text, std::size_t lineno) {
    double v = 0.0;
    try {
        std::size_t pos = 0;
        v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
        throw DataError("scenario CSV line " + std::to_string(lineno) + ": '" + text +
                        "' is not a number");
    }
    if (v < 0.0) {
        if (v < -1e-9)
            throw DataError("scenario CSV line " + std::to_string(lineno) +
                            ": value below 0");
        v = 0.0;
    }
    if (v > 1.0) {
        if (v > 1.0 + 1e-9)
            throw DataError("scenario CSV line " + std::to_string(lineno) +
                            ": value above 1");
        v = 1.0;
    }
    return v;
}

}  // namespace

ScenarioSet load_scenario_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open scenario CSV '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw DataError("scenario CSV '" + path + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_csv(line);
    const std::size_t dim = header.size();
    if (dim == 0) throw DataError("scenario CSV '" + path + "' has an empty header");
    for (std::size_t i = 0; i < dim; ++i) {
        const std::string expected = "x_" + std::to_string(i + 1);
        if (header[i] != expected)
            throw DataError("scenario CSV '" + path + "': header column " +
                            std::to_string(i + 1) + " is '" + header[i] + "', expected '" +
                            expected + "'");
    }
    std::vector<Vec> pts;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv(line);
        if (fields.size() != dim)
            throw DataError("scenario CSV line " + std::to_string(lineno) + ": expected " +
                            std::to_string(dim) + " fields, got " +
                            std::to_string(fields.size()));
        Vec p(dim);
        for (std::size_t i = 0; i < dim; ++i) p[i] = parse_unit_value(fields[i], lineno);
        pts.push_back(std::move(p));
    }
    if (pts.empty()) throw DataError("scenario CSV '" + path + "' has no data rows");
    return ScenarioSet::from_points(std::move(pts));
}

void save_scenario_csv(const ScenarioSet& scenarios, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write scenario CSV '" + path + "'");
    for (std::size_t i = 0; i < scenarios.dim; ++i)
        out << (i == 0 ? "" : ",") << "x_" << (i + 1);
    out << '\n';
    for (const Vec& p : scenarios.points) {
        for (std::size_t i = 0; i < scenarios.dim; ++i)
            out << (i == 0 ? "" : ",") << format_double(p[i]);
        out << '\n';
    }
}

}  // namespace polyreg
