#pragma once

#include <cstdint>

#include "polyreg/core.hpp"

namespace polyreg {

// Synthetic forecast/measurement generator with slowly drifting correlated
// errors.  Forecasts follow smooth seasonal paths inside [0.2, 0.8]; errors
// are Gaussian with an equicorrelation structure whose strength and per-
// coordinate volatility wander through bounded AR(1) latents, so estimators
// downstream must track a moving covariance.  With `bounded` set the errors
// pass through a tanh squashing before being added, giving bounded non-
// Gaussian errors with the matching exact quantile curves.
struct SimulateConfig {
    DimensionSpec spec;
    std::size_t steps{3000};
    double train_fraction{0.5};
    std::uint64_t seed{1};
    double noise_scale{0.05};      // base error standard deviation; 0 = noiseless
    double correlation{0.6};       // central equicorrelation strength
    double corr_wander{0.15};      // amplitude of the correlation drift
    double corr_persistence{0.995};
    double vol_wander{0.5};        // log-amplitude of volatility drift
    double vol_persistence{0.995};
    bool bounded{false};
};

struct SimulatedData {
    Dataset dataset;
    MarginalSeries marginals;  // exact conditional quantile curves per step
};

SimulatedData simulate_dataset(const SimulateConfig& config);

}  // namespace polyreg
