#pragma once

#include <cstddef>
#include <vector>

#include "polyreg/errors.hpp"

namespace polyreg {

using Vec = std::vector<double>;

// Dense symmetric matrix, row-major packed lower triangle.  Entry (i,j) with
// i >= j lives at index i*(i+1)/2 + j; the upper triangle is implied, so the
// matrix is symmetric by construction.
class SymmetricMatrix {
public:
    explicit SymmetricMatrix(std::size_t dim);

    static SymmetricMatrix identity(std::size_t dim);
    static SymmetricMatrix diagonal(const Vec& d);

    std::size_t dim() const { return dim_; }

    double operator()(std::size_t i, std::size_t j) const {
        return i >= j ? data_[i * (i + 1) / 2 + j] : data_[j * (j + 1) / 2 + i];
    }
    void set(std::size_t i, std::size_t j, double v) {
        if (i >= j)
            data_[i * (i + 1) / 2 + j] = v;
        else
            data_[j * (j + 1) / 2 + i] = v;
    }
    void add(std::size_t i, std::size_t j, double v) { set(i, j, (*this)(i, j) + v); }

    void add_diagonal(double v);
    void scale(double c);
    double max_diagonal() const;
    Vec matvec(const Vec& x) const;

    const std::vector<double>& packed() const { return data_; }
    std::vector<double>& packed() { return data_; }

private:
    std::size_t dim_;
    std::vector<double> data_;  // dim*(dim+1)/2 entries
};

// Upper-triangular matrix with positive diagonal, row-major packed upper
// triangle.  Entry (i,j) with j >= i lives at index i*dim - i*(i-1)/2 + (j-i).
// Used as the factor L with L^T L = Sigma^{-1}.
class UpperTriangularFactor {
public:
    explicit UpperTriangularFactor(std::size_t dim);

    std::size_t dim() const { return dim_; }

    double operator()(std::size_t i, std::size_t j) const {
        return j >= i ? data_[index(i, j)] : 0.0;
    }
    void set(std::size_t i, std::size_t j, double v) { data_[index(i, j)] = v; }

    // y = F x
    Vec apply(const Vec& x) const;

    // Product of the diagonal; the determinant of the factor.
    double det() const;

    const std::vector<double>& packed() const { return data_; }
    std::vector<double>& packed() { return data_; }

private:
    std::size_t index(std::size_t i, std::size_t j) const {
        return i * dim_ - i * (i - 1) / 2 + (j - i);
    }
    std::size_t dim_;
    std::vector<double> data_;
};

// Relative pivot threshold shared by every factorization entry point: a
// pivot d at diagonal k fails when d <= kPivotTol * max(diagonal).
inline constexpr double kPivotTol = 1e-12;

// Lower Cholesky factor G of a positive definite matrix, A = G G^T, packed
// like SymmetricMatrix.  Throws NotPositiveDefinite with the failing
// zero-based diagonal index.
std::vector<double> cholesky_lower(const SymmetricMatrix& a);

// Upper-triangular F with positive diagonal and F^T F = Sigma^{-1}, computed
// without forming Sigma^{-1}: Cholesky of the index-reversed matrix, a
// triangular inverse, and reversal back.  Throws NotPositiveDefinite (pivot
// index reported in the original ordering).
UpperTriangularFactor cholesky_inverse_factor(const SymmetricMatrix& sigma);

// True when cholesky_inverse_factor would succeed; same pivot rule.
bool is_positive_definite(const SymmetricMatrix& sigma);

// log det Sigma via Cholesky; throws NotPositiveDefinite.
double log_det(const SymmetricMatrix& sigma);

// Solve F y = b for upper-triangular F by back substitution.
Vec solve_triangular(const UpperTriangularFactor& f, const Vec& b);

}  // namespace polyreg
