#include "polyreg/polyhedra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace polyreg {

std::string to_string(RegionKind k) {
    switch (k) {
        case RegionKind::kP1: return "p1";
        case RegionKind::kPinf: return "pinf";
        case RegionKind::kEllipsoid: return "ellipsoid";
    }
    throw std::logic_error("unreachable region kind");
}

RegionKind region_kind_from_string(const std::string& s) {
    if (s == "p1") return RegionKind::kP1;
    if (s == "pinf") return RegionKind::kPinf;
    if (s == "ellipsoid") return RegionKind::kEllipsoid;
    throw ConfigError("unknown region kind '" + s + "'");
}

double score(const UpperTriangularFactor& factor, const Vec& center, const Vec& x,
             RegionKind kind) {
    const std::size_t d = factor.dim();
    if (center.size() != d || x.size() != d) {
        throw std::invalid_argument("score: dimension mismatch");
    }
    Vec diff(d);
    for (std::size_t i = 0; i < d; ++i) diff[i] = x[i] - center[i];
    Vec y = factor.apply(diff);
    double v = 0.0;
    switch (kind) {
        case RegionKind::kP1:
            for (double t : y) v += std::fabs(t);
            return v;
        case RegionKind::kPinf:
            for (double t : y) v = std::max(v, std::fabs(t));
            return v;
        case RegionKind::kEllipsoid:
            for (double t : y) v += t * t;
            return std::sqrt(v);
    }
    throw std::logic_error("unreachable region kind");
}

bool contains(const PolyhedralRegion& region, const Vec& x) {
    return score(region.factor, region.center, x, region.kind) <= region.scale;
}

ScoreSeries::ScoreSeries(std::size_t window, RegionKind kind) : window_(window), kind_(kind) {
    if (window_ < 1) throw std::invalid_argument("ScoreSeries: window must be at least 1");
}

void ScoreSeries::push(double value) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw std::invalid_argument("ScoreSeries::push: score must be finite and non-negative");
    }
    scores_.push_back(value);
    if (scores_.size() > window_) scores_.pop_front();
}

std::vector<double> ScoreSeries::sorted() const {
    std::vector<double> v(scores_.begin(), scores_.end());
    std::sort(v.begin(), v.end());
    return v;
}

double fit_scale_sorted(const std::vector<double>& sorted_scores, double alpha) {
    if (sorted_scores.empty()) throw EmptyWindow("fit_scale: empty score window");
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("fit_scale: alpha must lie in (0,1)");
    }
    const auto len = static_cast<double>(sorted_scores.size());
    const long long n = std::llround(len * alpha);
    if (n < 1) {
        throw std::invalid_argument("fit_scale: alpha " + std::to_string(alpha) +
                                    " rounds to zero scores over a window of " +
                                    std::to_string(sorted_scores.size()));
    }
    return sorted_scores[static_cast<std::size_t>(n) - 1];
}

double fit_scale(const ScoreSeries& scores, double alpha) {
    return fit_scale_sorted(scores.sorted(), alpha);
}

PolyhedralRegion build_region(const Vec& forecast, const UpperTriangularFactor& factor,
                              const ScoreSeries& scores, double alpha, RegionKind kind) {
    if (scores.kind() != kind) {
        throw std::invalid_argument("build_region: score window tracks a different norm kind");
    }
    if (forecast.size() != factor.dim()) {
        throw std::invalid_argument("build_region: dimension mismatch");
    }
    return PolyhedralRegion{kind, forecast, factor, fit_scale(scores, alpha), alpha};
}

double analytic_volume_unclipped(const PolyhedralRegion& region) {
    const auto d = static_cast<double>(region.factor.dim());
    const double sqrt_det_sigma = 1.0 / region.factor.det();
    const double s = region.scale;
    switch (region.kind) {
        case RegionKind::kP1:
            return std::pow(2.0 * s, d) / std::tgamma(d + 1.0) * sqrt_det_sigma;
        case RegionKind::kPinf:
            return std::pow(2.0 * s, d) * sqrt_det_sigma;
        case RegionKind::kEllipsoid:
            return std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0) * std::pow(s, d) *
                   sqrt_det_sigma;
    }
    throw std::logic_error("unreachable region kind");
}

std::string region_to_json(const PolyhedralRegion& region) {
    nlohmann::json j;
    j["kind"] = to_string(region.kind);
    j["dim"] = region.factor.dim();
    j["alpha"] = region.alpha;
    j["scale"] = region.scale;
    j["center"] = region.center;
    j["factor"] = region.factor.packed();
    return j.dump(2);
}

PolyhedralRegion region_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(std::string("region JSON parse error: ") + e.what());
    }
    try {
        const auto dim = j.at("dim").get<std::size_t>();
        if (dim == 0) throw DataError("region JSON: dim must be positive");
        UpperTriangularFactor f(dim);
        auto packed = j.at("factor").get<std::vector<double>>();
        if (packed.size() != f.packed().size()) {
            throw DataError("region JSON: factor entry count mismatch");
        }
        f.packed() = packed;
        for (std::size_t i = 0; i < dim; ++i) {
            if (!(f(i, i) > 0.0)) throw DataError("region JSON: factor diagonal must be positive");
        }
        PolyhedralRegion r{region_kind_from_string(j.at("kind").get<std::string>()),
                           j.at("center").get<Vec>(), f, j.at("scale").get<double>(),
                           j.at("alpha").get<double>()};
        if (r.center.size() != dim) throw DataError("region JSON: center length mismatch");
        if (!(r.scale >= 0.0)) throw DataError("region JSON: scale must be non-negative");
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("region JSON: ") + e.what());
    }
}

}  // namespace polyreg
