#pragma once

#include "polyreg/core.hpp"
#include "polyreg/scenarios.hpp"

namespace polyreg {

// Axis-aligned box built from marginal prediction intervals.
struct BoxRegion {
    Vec lower;
    Vec upper;
    double alpha{0.0};
};

struct AdjustedBox {
    BoxRegion box;
    double beta{0.0};       // symmetric marginal level actually used
    std::size_t covered{0};  // scenarios inside the returned box
    bool attained{true};     // false when even the widest box falls short
};

// Widen symmetric marginal intervals until the joint box captures at least
// ceil(alpha * S) of the scenarios.  The box at marginal level beta spans
// [q((1-beta)/2), q((1+beta)/2)] per coordinate; beta is the smallest
// sufficient point of a fixed dyadic grid of step 2^-12 (finer than the
// 1e-3 resolution target) at or above alpha, which makes the returned
// boxes exactly nested across alpha levels.  When no level suffices, the
// widest box is returned flagged attained = false.  Bounds are clamped to
// [0, q(0.995)] per coordinate.
AdjustedBox adjust_intervals(const MarginalQuantileCurve& marginals, const ScenarioSet& scenarios,
                             double alpha);

// Boundary inclusive on both sides.
bool box_contains(const BoxRegion& box, const Vec& x);

// Product of side lengths.
double box_volume(const BoxRegion& box);

std::string box_to_json(const BoxRegion& box);
BoxRegion box_from_json(const std::string& text);

}  // namespace polyreg
