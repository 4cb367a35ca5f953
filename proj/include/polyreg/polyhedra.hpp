#pragma once

#include <deque>
#include <string>
#include <vector>

#include "polyreg/linalg.hpp"

namespace polyreg {

// Region families around a point forecast.  kP1 and kPinf are the affine
// images of the L1 ball and the Linf ball under the inverse of the factor;
// kEllipsoid is the matching L2 ball.  All three share the same membership
// rule: || F (x - center) ||_norm <= scale, boundary inclusive.
enum class RegionKind { kP1, kPinf, kEllipsoid };

std::string to_string(RegionKind k);
RegionKind region_kind_from_string(const std::string& s);

// Norm of F (x - center) matching the region kind: L1, Linf, or L2.
double score(const UpperTriangularFactor& factor, const Vec& center, const Vec& x, RegionKind kind);

struct PolyhedralRegion {
    RegionKind kind;
    Vec center;
    UpperTriangularFactor factor;
    double scale;
    double alpha;
};

bool contains(const PolyhedralRegion& region, const Vec& x);

// Rolling window of nonconformity scores for one norm kind.  Pushing beyond
// the window length drops the oldest score.
class ScoreSeries {
public:
    ScoreSeries(std::size_t window, RegionKind kind);

    void push(double value);
    std::size_t size() const { return scores_.size(); }
    std::size_t window() const { return window_; }
    bool full() const { return scores_.size() == window_; }
    RegionKind kind() const { return kind_; }

    std::vector<double> sorted() const;

private:
    std::size_t window_;
    RegionKind kind_;
    std::deque<double> scores_;
};

// Scale achieving in-window coverage alpha: the N-th smallest score with
// N = round(len * alpha), halves rounded away from zero.  Ties keep the
// conservative (larger) side because order statistics do.  Throws EmptyWindow
// on an empty series and invalid_argument when N rounds to zero.
double fit_scale(const ScoreSeries& scores, double alpha);

// Same rule on an already sorted score vector; lets callers reuse one sort
// across many alpha levels.
double fit_scale_sorted(const std::vector<double>& sorted_scores, double alpha);

// Region centered at the forecast with scale fitted from the score window.
// The window's norm kind must match the requested kind.
PolyhedralRegion build_region(const Vec& forecast, const UpperTriangularFactor& factor,
                              const ScoreSeries& scores, double alpha, RegionKind kind);

// Exact Lebesgue volume of the region ignoring any feasible-set clipping:
//   kP1:        (2 s)^D / D!            * sqrt(det Sigma)
//   kPinf:      (2 s)^D                 * sqrt(det Sigma)
//   kEllipsoid: pi^{D/2}/Gamma(D/2+1) s^D * sqrt(det Sigma)
// where sqrt(det Sigma) = 1 / det(factor).
double analytic_volume_unclipped(const PolyhedralRegion& region);

std::string region_to_json(const PolyhedralRegion& region);
PolyhedralRegion region_from_json(const std::string& text);

}  // namespace polyreg
