#include "polyreg/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace polyreg {

namespace {

constexpr int kGridBits = 12;  // beta grid step 2^-12, well under the 1e-3 target

BoxRegion box_at_level(const MarginalQuantileCurve& marginals, double beta, double alpha) {
    const std::size_t d = marginals.dim();
    BoxRegion box;
    box.alpha = alpha;
    box.lower.resize(d);
    box.upper.resize(d);
    for (std::size_t c = 0; c < d; ++c) {
        double lo = marginals.quantile(c, (1.0 - beta) / 2.0);
        double hi = marginals.quantile(c, (1.0 + beta) / 2.0);
        // Asymmetric clamps: floor at zero, cap at the 99.5% quantile.
        lo = std::max(lo, 0.0);
        hi = std::min(hi, marginals.upper_limit(c));
        box.lower[c] = std::min(lo, hi);
        box.upper[c] = std::max(lo, hi);
    }
    return box;
}

std::size_t count_inside(const BoxRegion& box, const ScenarioSet& scenarios) {
    std::size_t n = 0;
    for (const Vec& p : scenarios.points) n += box_contains(box, p);
    return n;
}

}  // namespace

AdjustedBox adjust_intervals(const MarginalQuantileCurve& marginals, const ScenarioSet& scenarios,
                             double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("adjust_intervals: alpha must lie in (0,1)");
    }
    if (scenarios.points.empty()) {
        throw std::invalid_argument("adjust_intervals: empty scenario set");
    }
    if (marginals.dim() != scenarios.dim) {
        throw std::invalid_argument("adjust_intervals: dimension mismatch");
    }
    const auto s = static_cast<double>(scenarios.points.size());
    const auto needed = static_cast<std::size_t>(std::ceil(alpha * s - 1e-9));

    // Coverage is non-decreasing in beta, so binary search the fixed grid
    // for the smallest level at or above alpha that reaches the target.
    // Anchoring every alpha to the same grid makes the returned boxes
    // exactly nested across alpha levels.
    const int grid = 1 << kGridBits;
    auto level = [&](int k) { return static_cast<double>(k) / static_cast<double>(grid); };
    int lo = static_cast<int>(std::ceil(alpha * static_cast<double>(grid) - 1e-9));
    int hi = grid - 1;
    if (lo > hi) lo = hi;
    if (lo < 1) lo = 1;

    AdjustedBox result;
    BoxRegion widest = box_at_level(marginals, level(hi), alpha);
    std::size_t widest_cov = count_inside(widest, scenarios);
    if (widest_cov < needed) {
        result.box = widest;
        result.beta = level(hi);
        result.covered = widest_cov;
        result.attained = false;
        return result;
    }
    while (lo < hi) {
        int mid = lo + (hi - lo) / 2;
        BoxRegion b = box_at_level(marginals, level(mid), alpha);
        if (count_inside(b, scenarios) >= needed)
            hi = mid;
        else
            lo = mid + 1;
    }
    result.box = box_at_level(marginals, level(hi), alpha);
    result.beta = level(hi);
    result.covered = count_inside(result.box, scenarios);
    result.attained = true;
    return result;
}

bool box_contains(const BoxRegion& box, const Vec& x) {
    if (x.size() != box.lower.size()) {
        throw std::invalid_argument("box_contains: dimension mismatch");
    }
    for (std::size_t c = 0; c < x.size(); ++c) {
        if (x[c] < box.lower[c] || x[c] > box.upper[c]) return false;
    }
    return true;
}

double box_volume(const BoxRegion& box) {
    double v = 1.0;
    for (std::size_t c = 0; c < box.lower.size(); ++c) v *= box.upper[c] - box.lower[c];
    return v;
}

std::string box_to_json(const BoxRegion& box) {
    nlohmann::json j;
    j["alpha"] = box.alpha;
    j["lower"] = box.lower;
    j["upper"] = box.upper;
    return j.dump(2);
}

BoxRegion box_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(std::string("box JSON parse error: ") + e.what());
    }
    try {
        BoxRegion box;
        box.alpha = j.at("alpha").get<double>();
        box.lower = j.at("lower").get<Vec>();
        box.upper = j.at("upper").get<Vec>();
        if (box.lower.size() != box.upper.size() || box.lower.empty()) {
            throw DataError("box JSON: bound length mismatch");
        }
        for (std::size_t c = 0; c < box.lower.size(); ++c) {
            if (box.lower[c] > box.upper[c]) throw DataError("box JSON: lower bound above upper");
        }
        return box;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("box JSON: ") + e.what());
    }
}

}  // namespace polyreg
