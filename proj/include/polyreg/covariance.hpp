#pragma once

#include <cstddef>

#include "polyreg/linalg.hpp"

namespace polyreg {

struct EwmaConfig {
    double lambda{0.97};     // smoothing weight on the previous covariance
    double epsilon{1e-6};    // diagonal loading applied when the factorization pivot fails
    bool center_errors{false};  // subtract the tracked mean before the outer product
};

// Exponentially weighted error covariance.  The recursion
//   S_t = lambda * S_{t-1} + (1 - lambda) * e_t e_t^T
// is kept un-shrunk in the state; covariance() emits S_t as is when it passes
// the factorization pivot test and S_t + epsilon*I otherwise, so the emitted
// matrix is what downstream region builders factor.  The error mean is
// tracked with the same weight but only subtracted when center_errors is set.
class EwmaCovarianceState {
public:
    EwmaCovarianceState(std::size_t dim, EwmaConfig config);

    void update(const Vec& error);

    // Emitted covariance: the running matrix, diagonally loaded if its
    // factorization pivot fails.
    SymmetricMatrix covariance() const;

    // Factor F with F^T F = covariance()^{-1}.  Throws NotPositiveDefinite
    // when even the loaded matrix fails (possible only with tiny epsilon).
    UpperTriangularFactor factor() const;

    const SymmetricMatrix& raw_covariance() const { return raw_; }
    const Vec& mean_error() const { return mean_; }
    std::size_t count() const { return count_; }
    std::size_t dim() const { return raw_.dim(); }
    const EwmaConfig& config() const { return config_; }

    // Replace the running matrix; used to seed from a sample covariance.
    void seed(const SymmetricMatrix& sigma, const Vec& mean, std::size_t count);

private:
    EwmaConfig config_;
    SymmetricMatrix raw_;
    Vec mean_;
    std::size_t count_{0};
};

// Burn-in construction: seed with the sample covariance of the first
// min(n, max(dim+1, 30)) errors, then run the recursion over the remainder.
// Requires at least dim + 1 error vectors.
EwmaCovarianceState initialize_covariance(const std::vector<Vec>& errors, std::size_t dim,
                                          EwmaConfig config);

}  // namespace polyreg
