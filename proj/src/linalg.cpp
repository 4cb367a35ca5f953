#include "polyreg/linalg.hpp"

#include <cmath>
#include <string>

namespace polyreg {

SymmetricMatrix::SymmetricMatrix(std::size_t dim)
    : dim_(dim), data_(dim * (dim + 1) / 2, 0.0) {
    if (dim == 0) throw std::invalid_argument("SymmetricMatrix: dimension must be positive");
}

SymmetricMatrix SymmetricMatrix::identity(std::size_t dim) {
    SymmetricMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m.set(i, i, 1.0);
    return m;
}

SymmetricMatrix SymmetricMatrix::diagonal(const Vec& d) {
    SymmetricMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m.set(i, i, d[i]);
    return m;
}

void SymmetricMatrix::add_diagonal(double v) {
    for (std::size_t i = 0; i < dim_; ++i) add(i, i, v);
}

void SymmetricMatrix::scale(double c) {
    for (double& v : data_) v *= c;
}

double SymmetricMatrix::max_diagonal() const {
    double m = (*this)(0, 0);
    for (std::size_t i = 1; i < dim_; ++i) m = std::max(m, (*this)(i, i));
    return m;
}

Vec SymmetricMatrix::matvec(const Vec& x) const {
    if (x.size() != dim_) throw std::invalid_argument("SymmetricMatrix::matvec: size mismatch");
    Vec y(dim_, 0.0);
    for (std::size_t i = 0; i < dim_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) s += (*this)(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

UpperTriangularFactor::UpperTriangularFactor(std::size_t dim)
    : dim_(dim), data_(dim * (dim + 1) / 2, 0.0) {
    if (dim == 0) throw std::invalid_argument("UpperTriangularFactor: dimension must be positive");
}

Vec UpperTriangularFactor::apply(const Vec& x) const {
    if (x.size() != dim_) throw std::invalid_argument("UpperTriangularFactor::apply: size mismatch");
    Vec y(dim_, 0.0);
    for (std::size_t i = 0; i < dim_; ++i) {
        double s = 0.0;
        for (std::size_t j = i; j < dim_; ++j) s += data_[index(i, j)] * x[j];
        y[i] = s;
    }
    return y;
}

double UpperTriangularFactor::det() const {
    double p = 1.0;
    for (std::size_t i = 0; i < dim_; ++i) p *= data_[index(i, i)];
    return p;
}

namespace {

// In-place packed lower Cholesky with the shared relative pivot rule.
// Returns the failing diagonal index, or dim on success.
std::size_t cholesky_lower_inplace(std::vector<double>& a, std::size_t dim, double max_diag) {
    const double threshold = kPivotTol * max_diag;
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * (i + 1) / 2 + j]; };
    for (std::size_t k = 0; k < dim; ++k) {
        double d = at(k, k);
        for (std::size_t m = 0; m < k; ++m) d -= at(k, m) * at(k, m);
        if (!(d > threshold)) return k;
        d = std::sqrt(d);
        at(k, k) = d;
        for (std::size_t i = k + 1; i < dim; ++i) {
            double s = at(i, k);
            for (std::size_t m = 0; m < k; ++m) s -= at(i, m) * at(k, m);
            at(i, k) = s / d;
        }
    }
    return dim;
}

}  // namespace

std::vector<double> cholesky_lower(const SymmetricMatrix& a) {
    std::vector<double> g = a.packed();
    std::size_t fail = cholesky_lower_inplace(g, a.dim(), a.max_diagonal());
    if (fail < a.dim()) {
        throw NotPositiveDefinite(
            "cholesky_lower: pivot " + std::to_string(fail) + " failed positivity test", fail);
    }
    return g;
}

namespace {

// Factorization core: Cholesky of the index-reversed matrix.  On success the
// packed lower factor of the reversed matrix is left in `g`; on failure the
// returned index is the failing pivot in the ORIGINAL ordering.
std::size_t try_reversed_cholesky(const SymmetricMatrix& sigma, std::vector<double>& g) {
    const std::size_t n = sigma.dim();
    g.assign(n * (n + 1) / 2, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            g[i * (i + 1) / 2 + j] = sigma(n - 1 - i, n - 1 - j);
    std::size_t fail = cholesky_lower_inplace(g, n, sigma.max_diagonal());
    return fail < n ? n - 1 - fail : n;
}

}  // namespace

UpperTriangularFactor cholesky_inverse_factor(const SymmetricMatrix& sigma) {
    const std::size_t n = sigma.dim();
    std::vector<double> g;
    std::size_t fail = try_reversed_cholesky(sigma, g);
    if (fail < n) {
        throw NotPositiveDefinite(
            "cholesky_inverse_factor: pivot " + std::to_string(fail) + " failed positivity test",
            fail);
    }
    auto gat = [&](std::size_t i, std::size_t j) { return g[i * (i + 1) / 2 + j]; };

    // Invert the lower factor column by column (forward substitution).
    std::vector<double> inv(n * (n + 1) / 2, 0.0);
    auto iat = [&](std::size_t i, std::size_t j) -> double& { return inv[i * (i + 1) / 2 + j]; };
    for (std::size_t j = 0; j < n; ++j) {
        iat(j, j) = 1.0 / gat(j, j);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = 0.0;
            for (std::size_t m = j; m < i; ++m) s += gat(i, m) * iat(m, j);
            iat(i, j) = -s / gat(i, i);
        }
    }

    // Reverse both indices: the inverse of the reversed lower factor becomes
    // the upper-triangular factor of Sigma^{-1} with positive diagonal.
    UpperTriangularFactor f(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            f.set(i, j, iat(n - 1 - i, n - 1 - j));
    return f;
}

bool is_positive_definite(const SymmetricMatrix& sigma) {
    std::vector<double> g;
    return try_reversed_cholesky(sigma, g) == sigma.dim();
}

double log_det(const SymmetricMatrix& sigma) {
    std::vector<double> g = cholesky_lower(sigma);
    const std::size_t n = sigma.dim();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::log(g[i * (i + 1) / 2 + i]);
    return 2.0 * s;
}

Vec solve_triangular(const UpperTriangularFactor& f, const Vec& b) {
    const std::size_t n = f.dim();
    if (b.size() != n) throw std::invalid_argument("solve_triangular: size mismatch");
    Vec y(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= f(ii, j) * y[j];
        double d = f(ii, ii);
        if (d == 0.0) {
            throw NumericalError("solve_triangular: zero diagonal at index " + std::to_string(ii));
        }
        y[ii] = s / d;
    }
    return y;
}

}  // namespace polyreg
