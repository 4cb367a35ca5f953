#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "polyreg/core.hpp"
#include "polyreg/linalg.hpp"

namespace polyreg {

// A cloud of joint trajectories for one time step, plus the seed and step
// needed to reproduce it.
struct ScenarioSet {
    std::size_t dim{0};
    std::vector<Vec> points;
    std::uint64_t seed{0};
    long long time_step{0};
    std::optional<SymmetricMatrix> correlation;

    static ScenarioSet from_points(std::vector<Vec> pts);
};

// Correlation matrix of a covariance: unit diagonal, entries
// cov(i,j)/sqrt(cov(i,i)cov(j,j)).  A coordinate with (near) zero variance
// degrades to an independent unit-diagonal row rather than dividing by zero.
SymmetricMatrix correlation_from_covariance(const SymmetricMatrix& cov);

// Draw `count` joint scenarios by the Gaussian copula: correlated standard
// normals from the Cholesky factor of `correlation`, mapped through the
// normal CDF to uniforms and then through each coordinate's inverse marginal
// quantile curve.  Deterministic in `seed`.  Coordinates land in [0,1].
ScenarioSet sample_scenarios(const MarginalQuantileCurve& marginals,
                             const SymmetricMatrix& correlation, std::size_t count,
                             std::uint64_t seed);

// Scenario cloud CSV: header x_1,...,x_D, one row per scenario, values in
// [0,1] (clamped when within 1e-9 of the bounds).  Errors cite line numbers.
ScenarioSet load_scenario_csv(const std::string& path);
void save_scenario_csv(const ScenarioSet& scenarios, const std::string& path);

}  // namespace polyreg
