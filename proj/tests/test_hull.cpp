#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "polyreg/hull.hpp"
#include "polyreg/errors.hpp"
#include "polyreg/rng.hpp"
#include "polyreg/special.hpp"

using namespace polyreg;

namespace {

ScenarioSet cloud_of(std::vector<Vec> pts) { return ScenarioSet::from_points(std::move(pts)); }

std::set<int> vertex_sources(const ConvexHull& h) {
    return std::set<int>(h.source.begin(), h.source.end());
}

// Gift-wrapping (Jarvis march) oracle for planar hulls: O(n h), independent
// of the production algorithm.  Returns hull point indices in walk order.
std::vector<int> jarvis_hull(const std::vector<Vec>& pts) {
    const int n = static_cast<int>(pts.size());
    int start = 0;
    for (int i = 1; i < n; ++i) {
        if (pts[i][1] < pts[start][1] ||
            (pts[i][1] == pts[start][1] && pts[i][0] < pts[start][0]))
            start = i;
    }
    std::vector<int> hull;
    int cur = start;
    do {
        hull.push_back(cur);
        int next = cur == 0 ? (n > 1 ? 1 : 0) : 0;
        for (int cand = 0; cand < n; ++cand) {
            if (cand == cur || cand == next) continue;
            const double cross =
                (pts[next][0] - pts[cur][0]) * (pts[cand][1] - pts[cur][1]) -
                (pts[next][1] - pts[cur][1]) * (pts[cand][0] - pts[cur][0]);
            const double d_next = std::hypot(pts[next][0] - pts[cur][0],
                                             pts[next][1] - pts[cur][1]);
            const double d_cand = std::hypot(pts[cand][0] - pts[cur][0],
                                             pts[cand][1] - pts[cur][1]);
            if (cross < 0.0 || (cross == 0.0 && d_cand > d_next)) next = cand;
        }
        cur = next;
    } while (cur != start);
    return hull;
}

// Shoelace area of an ordered planar polygon.
double shoelace(const std::vector<Vec>& pts, const std::vector<int>& order) {
    double acc = 0.0;
    const std::size_t n = order.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec& a = pts[order[i]];
        const Vec& b = pts[order[(i + 1) % n]];
        acc += a[0] * b[1] - b[0] * a[1];
    }
    return std::abs(acc) / 2.0;
}

double chi2_cdf(std::size_t dof, double x) {
    return regularized_gamma_p(static_cast<double>(dof) / 2.0, x / 2.0);
}

// Bisection oracle for the chi-square quantile, far slower but independent.
double chi2_bisect(std::size_t dof, double p) {
    double lo = 0.0, hi = 1.0;
    while (chi2_cdf(dof, hi) < p) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (chi2_cdf(dof, mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

void check_facet_invariants(const ConvexHull& h) {
    for (const HullFacet& f : h.facets) {
        REQUIRE(f.vertices.size() == h.dim);
        double norm = 0.0;
        for (double v : f.normal) norm += v * v;
        CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-9));
        for (int vi : f.vertices) {
            double dot = 0.0;
            for (std::size_t d = 0; d < h.dim; ++d) dot += f.normal[d] * h.vertices[vi][d];
            CHECK(dot == doctest::Approx(f.offset).epsilon(1e-9));
        }
        for (const Vec& v : h.vertices) {
            double dot = 0.0;
            for (std::size_t d = 0; d < h.dim; ++d) dot += f.normal[d] * v[d];
            CHECK(dot <= f.offset + 1e-9);
        }
    }
}

}  // namespace

TEST_SUITE("hull") {

TEST_CASE("a square with an interior point keeps only the corners") {
    const ScenarioSet cloud = cloud_of(
        {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {0.5, 0.5}});
    const ConvexHull h = quickhull(cloud);
    CHECK(h.vertices.size() == 4);
    CHECK(h.facets.size() == 4);
    CHECK(vertex_sources(h) == std::set<int>{0, 1, 2, 3});
    CHECK(hull_volume(h) == doctest::Approx(1.0).epsilon(1e-12));
    check_facet_invariants(h);
    CHECK(facet_contains(h, {0.5, 0.5}));
    CHECK(facet_contains(h, {0.0, 0.0}));   // vertex, boundary inclusive
    CHECK(facet_contains(h, {0.5, 1.0}));   // edge midpoint
    CHECK(!facet_contains(h, {1.1, 0.5}));
}

TEST_CASE("known solids come out with the right counts and volumes") {
    // Corner tetrahedron: volume 1/6.
    const ConvexHull tetra = quickhull(cloud_of(
        {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {0.1, 0.1, 0.1}}));
    CHECK(tetra.vertices.size() == 4);
    CHECK(tetra.facets.size() == 4);
    CHECK(hull_volume(tetra) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    check_facet_invariants(tetra);

    // Cube: 8 vertices, 12 simplicial facets, volume 1.
    std::vector<Vec> corners;
    for (int m = 0; m < 8; ++m)
        corners.push_back({static_cast<double>(m & 1), static_cast<double>((m >> 1) & 1),
                           static_cast<double>((m >> 2) & 1)});
    const ConvexHull cube = quickhull(cloud_of(corners));
    CHECK(cube.vertices.size() == 8);
    CHECK(cube.facets.size() == 12);
    CHECK(hull_volume(cube) == doctest::Approx(1.0).epsilon(1e-12));
    check_facet_invariants(cube);

    // Octahedron: 6 vertices, 8 facets, volume 4/3.
    const ConvexHull octa = quickhull(cloud_of({{1.0, 0.0, 0.0},
                                                {-1.0, 0.0, 0.0},
                                                {0.0, 1.0, 0.0},
                                                {0.0, -1.0, 0.0},
                                                {0.0, 0.0, 1.0},
                                                {0.0, 0.0, -1.0}}));
    CHECK(octa.vertices.size() == 6);
    CHECK(octa.facets.size() == 8);
    CHECK(hull_volume(octa) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("planar hulls match an independent gift wrapping oracle") {
    Rng rng(501);
    for (int rep = 0; rep < 3; ++rep) {
        std::vector<Vec> pts;
        for (int i = 0; i < 500; ++i) pts.push_back({rng.uniform01(), rng.uniform01()});
        const ConvexHull h = quickhull(cloud_of(pts));
        const std::vector<int> oracle = jarvis_hull(pts);
        CHECK(vertex_sources(h) == std::set<int>(oracle.begin(), oracle.end()));
        CHECK(hull_volume(h) == doctest::Approx(shoelace(pts, oracle)).epsilon(1e-12));
        check_facet_invariants(h);
    }
}

TEST_CASE("LP membership agrees with the facet test on random clouds") {
    Rng rng(502);
    std::vector<Vec> pts;
    for (int i = 0; i < 60; ++i)
        pts.push_back({rng.uniform01(), rng.uniform01(), rng.uniform01()});
    const ScenarioSet cloud = cloud_of(pts);
    const ConvexHull h = quickhull(cloud);
    int inside = 0;
    for (int i = 0; i < 300; ++i) {
        const Vec q = {rng.uniform01(), rng.uniform01(), rng.uniform01()};
        const bool lp = contains_lp(cloud, q);
        CHECK(lp == facet_contains(h, q));
        inside += lp ? 1 : 0;
    }
    CHECK(inside > 0);
    CHECK(inside < 300);
}

TEST_CASE("LP membership handles boundary and degenerate clouds") {
    const ScenarioSet square = cloud_of({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}});
    CHECK(contains_lp(square, {0.5, 0.5}));
    CHECK(contains_lp(square, {0.0, 0.0}));
    CHECK(contains_lp(square, {0.5, 0.0}));
    CHECK(!contains_lp(square, {1.0000001, 0.5}));

    // A single repeated point is its own hull.
    const ScenarioSet dot = cloud_of({{0.25, 0.75}, {0.25, 0.75}});
    CHECK(contains_lp(dot, {0.25, 0.75}));
    CHECK(!contains_lp(dot, {0.26, 0.75}));
}

TEST_CASE("chi-square quantiles match the reference value and a bisection oracle") {
    CHECK(chi_square_quantile(2, 0.999) == doctest::Approx(13.815510558).epsilon(1e-6));
    CHECK(chi_square_quantile(1, 0.5) == doctest::Approx(0.45493642311957).epsilon(1e-8));
    for (std::size_t dof = 1; dof <= 24; ++dof) {
        for (double p : {0.5, 0.95, 0.999}) {
            const double q = chi_square_quantile(dof, p);
            CHECK(q == doctest::Approx(chi2_bisect(dof, p)).epsilon(1e-8));
            CHECK(chi2_cdf(dof, q) == doctest::Approx(p).epsilon(1e-10));
        }
    }
}

TEST_CASE("trimming drops exactly the points beyond the distance cutoff") {
    std::vector<Vec> pts = {{0.5, 0.5}, {0.52, 0.48}, {0.45, 0.55}, {0.9, 0.5}};
    ScenarioSet cloud = cloud_of(pts);
    cloud.seed = 77;
    cloud.time_step = 5;
    const SymmetricMatrix sigma = SymmetricMatrix::diagonal({0.01, 0.01});
    const Vec center = {0.5, 0.5};

    // chi2(2, 0.999) = 13.8155; the far point has squared distance 16.
    ScenarioSet trimmed = trim_outliers(cloud, sigma, center, 0.001, 1.0);
    REQUIRE(trimmed.points.size() == 3);
    CHECK(trimmed.points[0] == pts[0]);
    CHECK(trimmed.points[1] == pts[1]);
    CHECK(trimmed.points[2] == pts[2]);
    CHECK(trimmed.seed == 77);
    CHECK(trimmed.time_step == 5);

    // Doubling the multiplier admits everything again.
    CHECK(trim_outliers(cloud, sigma, center, 0.001, 2.0).points.size() == 4);
    // A lax significance keeps everything too.
    CHECK(trim_outliers(cloud, sigma, center, 0.5, 20.0).points.size() == 4);
}

TEST_CASE("hull of hull vertices is the hull itself") {
    Rng rng(503);
    std::vector<Vec> pts;
    for (int i = 0; i < 120; ++i)
        pts.push_back({rng.uniform01(), rng.uniform01(), rng.uniform01()});
    const ConvexHull h = quickhull(cloud_of(pts));
    const ConvexHull again = quickhull(cloud_of(h.vertices));
    CHECK(again.vertices.size() == h.vertices.size());
    CHECK(hull_volume(again) == doctest::Approx(hull_volume(h)).epsilon(1e-12));
}

TEST_CASE("the hull does not depend on the input order") {
    Rng rng(504);
    std::vector<Vec> pts;
    for (int i = 0; i < 200; ++i) pts.push_back({rng.uniform01(), rng.uniform01()});
    const ConvexHull a = quickhull(cloud_of(pts));

    std::vector<Vec> shuffled = pts;
    for (std::size_t i = shuffled.size(); i > 1; --i)
        std::swap(shuffled[i - 1], shuffled[rng.uniform_index(i)]);
    const ConvexHull b = quickhull(cloud_of(shuffled));

    CHECK(hull_volume(a) == doctest::Approx(hull_volume(b)).epsilon(1e-12));
    std::set<Vec> va(a.vertices.begin(), a.vertices.end());
    std::set<Vec> vb(b.vertices.begin(), b.vertices.end());
    CHECK(va == vb);
}

TEST_CASE("one-dimensional hulls are intervals") {
    const ConvexHull h = quickhull(cloud_of({{0.2}, {0.8}, {0.5}, {0.35}}));
    CHECK(h.vertices.size() == 2);
    CHECK(hull_volume(h) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(facet_contains(h, {0.5}));
    CHECK(facet_contains(h, {0.2}));
    CHECK(!facet_contains(h, {0.15}));
}

TEST_CASE("dimension cap and degeneracy are structured refusals") {
    std::vector<Vec> high;
    for (int i = 0; i < 12; ++i) {
        Vec v(9, 0.0);
        if (i < 9) v[i] = 1.0;
        high.push_back(v);
    }
    CHECK_THROWS_AS(quickhull(cloud_of(high)), DimensionTooHigh);

    // Collinear cloud in the plane: affine rank 1.
    try {
        quickhull(cloud_of({{0.1, 0.1}, {0.5, 0.5}, {0.9, 0.9}}));
        FAIL("expected DegenerateInput");
    } catch (const DegenerateInput& e) {
        CHECK(e.rank == 1);
    }

    // A repeated single point: affine rank 0.
    try {
        quickhull(cloud_of({{0.3, 0.3}, {0.3, 0.3}}));
        FAIL("expected DegenerateInput");
    } catch (const DegenerateInput& e) {
        CHECK(e.rank == 0);
    }
}

TEST_CASE("hull JSON round-trips bit for bit") {
    Rng rng(505);
    std::vector<Vec> pts;
    for (int i = 0; i < 40; ++i) pts.push_back({rng.uniform01(), rng.uniform01()});
    const ConvexHull h = quickhull(cloud_of(pts));
    const ConvexHull back = hull_from_json(hull_to_json(h));
    CHECK(back.dim == h.dim);
    CHECK(back.vertices == h.vertices);
    CHECK(back.source == h.source);
    REQUIRE(back.facets.size() == h.facets.size());
    for (std::size_t i = 0; i < h.facets.size(); ++i) {
        CHECK(back.facets[i].vertices == h.facets[i].vertices);
        CHECK(back.facets[i].normal == h.facets[i].normal);
        CHECK(back.facets[i].offset == h.facets[i].offset);
    }
}

}  // TEST_SUITE
