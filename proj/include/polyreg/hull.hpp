#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "polyreg/linalg.hpp"
#include "polyreg/scenarios.hpp"

namespace polyreg {

// Hull construction is refused above this dimension: facet counts explode
// combinatorially and runtimes stop being practical.
inline constexpr std::size_t kMaxHullDim = 8;

// Tolerance for facet-side tests: a point counts as inside a facet when its
// signed distance is at most this far above the facet plane.
inline constexpr double kHullTol = 1e-9;

struct HullFacet {
    std::vector<int> vertices;  // indices into ConvexHull::vertices, D per facet
    Vec normal;                 // outward unit normal
    double offset;              // plane is normal . x = offset
};

struct ConvexHull {
    std::size_t dim{0};
    std::vector<Vec> vertices;
    std::vector<int> source;  // original point index of each vertex
    std::vector<HullFacet> facets;
};

// Exact convex hull of the scenario cloud by the quickhull scheme: grow an
// initial simplex by repeatedly lifting each facet's farthest outside point
// (ties broken by lowest point index, so the result is deterministic in the
// input order).  Throws DimensionTooHigh above kMaxHullDim and
// DegenerateInput (with the affine rank found) when the cloud lies within
// kHullTol of a lower-dimensional affine subspace.
ConvexHull quickhull(const ScenarioSet& points);

// Membership via the facet list: inside when below every facet plane within
// `tol`.
bool facet_contains(const ConvexHull& hull, const Vec& y, double tol = kHullTol);

// Membership in the convex hull of the scenarios without building the hull:
// phase-1 simplex feasibility of  A theta = y, sum theta = 1, theta >= 0,
// with Bland's rule; feasible when the artificial objective drops below 1e-9.
bool contains_lp(const ScenarioSet& scenarios, const Vec& y);

// Quantile of the chi-square distribution with `dof` degrees of freedom:
// inverts the regularized incomplete gamma CDF by bracketed Newton steps.
double chi_square_quantile(std::size_t dof, double p);

// Drop scenarios whose squared Mahalanobis distance from `center` under
// `sigma` exceeds multiplier * chi_square_quantile(D, 1 - significance).
// Order is preserved; metadata is carried over.
ScenarioSet trim_outliers(const ScenarioSet& scenarios, const SymmetricMatrix& sigma,
                          const Vec& center, double significance, double multiplier);

// Hull volume by fanning simplices from the vertex centroid: each facet
// contributes |det(facet vertices - centroid)| / D!.  Degenerate facets
// contribute zero; their count is reported through `degenerate_facets` when
// given.
double hull_volume(const ConvexHull& hull, std::size_t* degenerate_facets = nullptr);

std::string hull_to_json(const ConvexHull& hull);
ConvexHull hull_from_json(const std::string& text);

}  // namespace polyreg
