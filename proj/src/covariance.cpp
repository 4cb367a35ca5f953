#include "polyreg/covariance.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace polyreg {

EwmaCovarianceState::EwmaCovarianceState(std::size_t dim, EwmaConfig config)
    : config_(config), raw_(dim), mean_(dim, 0.0) {
    if (!(config_.lambda > 0.0 && config_.lambda < 1.0)) {
        throw ConfigError("EwmaCovarianceState: lambda must lie in (0,1)");
    }
    if (config_.epsilon < 0.0) {
        throw ConfigError("EwmaCovarianceState: epsilon must be non-negative");
    }
}

void EwmaCovarianceState::update(const Vec& error) {
    const std::size_t d = raw_.dim();
    if (error.size() != d) throw std::invalid_argument("EwmaCovarianceState::update: size mismatch");
    const double lambda = config_.lambda;
    Vec e = error;
    if (config_.center_errors) {
        for (std::size_t i = 0; i < d; ++i) e[i] -= mean_[i];
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            raw_.set(i, j, lambda * raw_(i, j) + (1.0 - lambda) * e[i] * e[j]);
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        mean_[i] = lambda * mean_[i] + (1.0 - lambda) * error[i];
    }
    ++count_;
}

SymmetricMatrix EwmaCovarianceState::covariance() const {
    if (is_positive_definite(raw_)) return raw_;
    SymmetricMatrix loaded = raw_;
    loaded.add_diagonal(config_.epsilon);
    return loaded;
}

UpperTriangularFactor EwmaCovarianceState::factor() const {
    return cholesky_inverse_factor(covariance());
}

void EwmaCovarianceState::seed(const SymmetricMatrix& sigma, const Vec& mean, std::size_t count) {
    if (sigma.dim() != raw_.dim() || mean.size() != raw_.dim()) {
        throw std::invalid_argument("EwmaCovarianceState::seed: size mismatch");
    }
    raw_ = sigma;
    mean_ = mean;
    count_ = count;
}

EwmaCovarianceState initialize_covariance(const std::vector<Vec>& errors, std::size_t dim,
                                          EwmaConfig config) {
    if (errors.size() < dim + 1) {
        throw DataError("initialize_covariance: need at least " + std::to_string(dim + 1) +
                        " error vectors, got " + std::to_string(errors.size()));
    }
    const std::size_t seed_count = std::min(errors.size(), std::max(dim + 1, std::size_t{30}));

    Vec mean(dim, 0.0);
    for (std::size_t k = 0; k < seed_count; ++k) {
        if (errors[k].size() != dim) {
            throw std::invalid_argument("initialize_covariance: error vector size mismatch");
        }
        for (std::size_t i = 0; i < dim; ++i) mean[i] += errors[k][i];
    }
    for (double& m : mean) m /= static_cast<double>(seed_count);

    SymmetricMatrix sample(dim);
    for (std::size_t k = 0; k < seed_count; ++k) {
        Vec e = errors[k];
        if (config.center_errors) {
            for (std::size_t i = 0; i < dim; ++i) e[i] -= mean[i];
        }
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j <= i; ++j) sample.add(i, j, e[i] * e[j]);
        }
    }
    sample.scale(1.0 / static_cast<double>(seed_count));

    EwmaCovarianceState state(dim, config);
    state.seed(sample, mean, seed_count);
    for (std::size_t k = seed_count; k < errors.size(); ++k) state.update(errors[k]);
    return state;
}

}  // namespace polyreg
