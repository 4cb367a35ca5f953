#include "polyreg/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "polyreg/errors.hpp"
#include "polyreg/linalg.hpp"
#include "polyreg/rng.hpp"
#include "polyreg/special.hpp"

namespace polyreg {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Squashing strength for the bounded-error mode; errors stay within 1/kSquash.
constexpr double kSquash = 2.5;
constexpr int kBurnIn = 128;

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// Mean-zero AR(1) step with unit stationary variance.
double ar_step(double prev, double persistence, Rng& rng) {
    const double innov = std::sqrt(std::max(0.0, 1.0 - persistence * persistence));
    return persistence * prev + innov * rng.gaussian();
}

std::vector<double> marginal_levels() {
    std::vector<double> levels;
    for (int k = 1; k <= 39; ++k) levels.push_back(0.025 * k);
    levels.push_back(0.995);
    return levels;
}

}  // namespace

SimulatedData simulate_dataset(const SimulateConfig& config) {
    config.spec.validate();
    const std::size_t dim = config.spec.dim();
    if (config.steps < 2) throw ConfigError("simulate: need at least 2 steps");
    if (!(config.train_fraction > 0.0) || config.train_fraction > 1.0)
        throw ConfigError("simulate: train_fraction must lie in (0,1]");
    if (config.noise_scale < 0.0) throw ConfigError("simulate: noise_scale must be >= 0");
    if (!(config.corr_persistence >= 0.0) || config.corr_persistence >= 1.0 ||
        !(config.vol_persistence >= 0.0) || config.vol_persistence >= 1.0)
        throw ConfigError("simulate: persistence parameters must lie in [0,1)");

    // Correlation drift has to stay inside the positive-definite band of an
    // equicorrelation matrix: (-1/(D-1), 1).
    const double corr_lo = dim > 1 ? -1.0 / static_cast<double>(dim - 1) + 0.02 : 0.0;
    const double corr_hi = 0.95;
    if (dim > 1 && (config.correlation <= corr_lo || config.correlation >= corr_hi))
        throw ConfigError("simulate: correlation outside the representable band");

    Rng rng(derive_seed(config.seed, 0, 17));

    // Latent drivers: one for the shared correlation strength, one per
    // coordinate for volatility, one per coordinate for the forecast wobble.
    double corr_latent = 0.0;
    std::vector<double> vol_latent(dim, 0.0);
    std::vector<double> wobble(dim, 0.0);
    auto advance_latents = [&]() {
        corr_latent = ar_step(corr_latent, config.corr_persistence, rng);
        for (std::size_t d = 0; d < dim; ++d)
            vol_latent[d] = ar_step(vol_latent[d], config.vol_persistence, rng);
        for (std::size_t d = 0; d < dim; ++d) wobble[d] = ar_step(wobble[d], 0.98, rng);
    };
    for (int i = 0; i < kBurnIn; ++i) advance_latents();

    const std::vector<double> levels = marginal_levels();
    std::vector<double> level_z(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i) level_z[i] = normal_quantile(levels[i]);

    std::vector<ForecastFrame> frames;
    frames.reserve(config.steps);
    MarginalSeries marginals;

    Vec gauss(dim), err(dim), sigma(dim);
    for (std::size_t t = 0; t < config.steps; ++t) {
        advance_latents();

        ForecastFrame frame;
        frame.t = static_cast<long long>(t);
        frame.forecast.resize(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            const double phase = 2.0 * kPi * static_cast<double>(d) / static_cast<double>(dim);
            const double season =
                0.22 * std::sin(2.0 * kPi * static_cast<double>(t) / 96.0 + phase);
            frame.forecast[d] = 0.5 + season + 0.06 * std::tanh(wobble[d]);
        }

        const double rho =
            dim > 1
                ? std::min(corr_hi, std::max(corr_lo, config.correlation +
                                                          config.corr_wander *
                                                              std::tanh(corr_latent)))
                : 0.0;
        for (std::size_t d = 0; d < dim; ++d)
            sigma[d] = config.noise_scale * std::exp(config.vol_wander * std::tanh(vol_latent[d]));

        if (config.noise_scale == 0.0) {
            std::fill(err.begin(), err.end(), 0.0);
            // Keep the draw count identical to the noisy path so that seeds
            // stay comparable across noise settings.
            for (std::size_t d = 0; d < dim; ++d) (void)rng.gaussian();
        } else {
            SymmetricMatrix corr = SymmetricMatrix::identity(dim);
            for (std::size_t i = 0; i < dim; ++i)
                for (std::size_t j = 0; j < i; ++j) corr.set(i, j, rho);
            const std::vector<double> chol = cholesky_lower(corr);
            for (std::size_t d = 0; d < dim; ++d) gauss[d] = rng.gaussian();
            // err = diag(sigma) * chol(R) * gauss, chol packed row-major lower
            for (std::size_t i = 0; i < dim; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j <= i; ++j) acc += chol[i * (i + 1) / 2 + j] * gauss[j];
                err[i] = sigma[i] * acc;
            }
        }

        Vec measurement(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            const double e =
                config.bounded ? std::tanh(kSquash * err[d]) / kSquash : err[d];
            measurement[d] = clamp01(frame.forecast[d] + e);
        }
        frame.measurement = std::move(measurement);

        // Exact conditional quantile curves for the generated error law.
        std::vector<std::vector<QuantilePoint>> per_dim(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            per_dim[d].reserve(levels.size());
            for (std::size_t i = 0; i < levels.size(); ++i) {
                const double shift = sigma[d] * level_z[i];
                const double e =
                    config.bounded ? std::tanh(kSquash * shift) / kSquash : shift;
                per_dim[d].push_back({levels[i], clamp01(frame.forecast[d] + e)});
            }
        }
        marginals.emplace(frame.t, MarginalQuantileCurve(std::move(per_dim)));
        frames.push_back(std::move(frame));
    }

    std::size_t train = static_cast<std::size_t>(
        std::llround(static_cast<double>(config.steps) * config.train_fraction));
    train = std::min(config.steps, std::max<std::size_t>(1, train));

    return SimulatedData{Dataset(config.spec, std::move(frames), train), std::move(marginals)};
}

}  // namespace polyreg
