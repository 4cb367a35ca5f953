#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "polyreg/polyhedra.hpp"
#include "polyreg/errors.hpp"
#include "polyreg/rng.hpp"

using namespace polyreg;

namespace {

UpperTriangularFactor identity_factor(std::size_t n) {
    UpperTriangularFactor f(n);
    for (std::size_t i = 0; i < n; ++i) f.set(i, i, 1.0);
    return f;
}

PolyhedralRegion make_region(RegionKind kind, Vec center, UpperTriangularFactor f, double scale,
                             double alpha = 0.5) {
    return PolyhedralRegion{kind, std::move(center), std::move(f), scale, alpha};
}

}  // namespace

TEST_SUITE("polyhedra") {

TEST_CASE("scores are the three norms of the whitened residual") {
    const UpperTriangularFactor eye = identity_factor(2);
    const Vec center = {0.0, 0.0};
    const Vec x = {3.0, 4.0};
    CHECK(score(eye, center, x, RegionKind::kP1) == doctest::Approx(7.0));
    CHECK(score(eye, center, x, RegionKind::kEllipsoid) == doctest::Approx(5.0));
    CHECK(score(eye, center, x, RegionKind::kPinf) == doctest::Approx(4.0));
}

TEST_CASE("the factor whitens before the norm is taken") {
    UpperTriangularFactor f(2);
    f.set(0, 0, 0.5);
    f.set(1, 1, 1.0 / 3.0);
    const Vec center = {1.0, 1.0};
    const Vec x = {3.0, 4.0};  // residual (2, 3) whitens to (1, 1)
    CHECK(score(f, center, x, RegionKind::kP1) == doctest::Approx(2.0));
    CHECK(score(f, center, x, RegionKind::kEllipsoid) == doctest::Approx(std::sqrt(2.0)));
    CHECK(score(f, center, x, RegionKind::kPinf) == doctest::Approx(1.0));
}

TEST_CASE("scale fitting picks the order statistic with halves away from zero") {
    ScoreSeries series(100, RegionKind::kP1);
    std::vector<double> values;
    for (int i = 100; i >= 1; --i) values.push_back(static_cast<double>(i));
    for (double v : values) series.push(v);

    CHECK(fit_scale(series, 0.9) == doctest::Approx(90.0));
    CHECK(fit_scale(series, 0.005) == doctest::Approx(1.0));  // N = round(0.5) = 1
    CHECK(fit_scale(series, 0.95) == doctest::Approx(95.0));
    CHECK_THROWS_AS(fit_scale(series, 0.004), std::invalid_argument);  // N rounds to 0

    ScoreSeries empty(10, RegionKind::kP1);
    CHECK_THROWS_AS(fit_scale(empty, 0.5), EmptyWindow);
}

TEST_CASE("the window rolls, keeping the newest scores") {
    ScoreSeries series(3, RegionKind::kPinf);
    for (double v : {1.0, 2.0, 3.0, 4.0, 5.0}) series.push(v);
    CHECK(series.size() == 3);
    CHECK(series.full());
    const std::vector<double> sorted = series.sorted();
    CHECK(sorted == std::vector<double>{3.0, 4.0, 5.0});
}

TEST_CASE("scores must be finite and non-negative") {
    ScoreSeries series(4, RegionKind::kP1);
    CHECK_THROWS_AS(series.push(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(series.push(std::nan("")), std::invalid_argument);
    CHECK_NOTHROW(series.push(0.0));
}

TEST_CASE("at equal scale the L1 body sits inside the ellipsoid inside the Linf body") {
    Rng rng(31);
    UpperTriangularFactor f(3);
    for (std::size_t i = 0; i < 3; ++i) {
        f.set(i, i, 0.5 + std::abs(rng.gaussian()));
        for (std::size_t j = i + 1; j < 3; ++j) f.set(i, j, 0.3 * rng.gaussian());
    }
    const Vec center = {0.5, 0.5, 0.5};
    const double scale = 1.2;
    const auto p1 = make_region(RegionKind::kP1, center, f, scale);
    const auto ell = make_region(RegionKind::kEllipsoid, center, f, scale);
    const auto pinf = make_region(RegionKind::kPinf, center, f, scale);
    for (int i = 0; i < 2000; ++i) {
        const Vec x = {rng.uniform01(), rng.uniform01(), rng.uniform01()};
        if (contains(p1, x)) CHECK(contains(ell, x));
        if (contains(ell, x)) CHECK(contains(pinf, x));
    }
}

TEST_CASE("membership is invariant under a joint translation") {
    Rng rng(37);
    UpperTriangularFactor f(2);
    f.set(0, 0, 2.0);
    f.set(0, 1, 0.7);
    f.set(1, 1, 1.5);
    const Vec center = {0.4, 0.6};
    const Vec shift = {0.07, -0.11};
    const auto base = make_region(RegionKind::kP1, center, f, 0.8);
    const auto moved =
        make_region(RegionKind::kP1, {center[0] + shift[0], center[1] + shift[1]}, f, 0.8);
    for (int i = 0; i < 500; ++i) {
        const Vec x = {rng.uniform01(), rng.uniform01()};
        const Vec xs = {x[0] + shift[0], x[1] + shift[1]};
        CHECK(contains(base, x) == contains(moved, xs));
    }
}

TEST_CASE("membership is boundary inclusive") {
    const auto region = make_region(RegionKind::kPinf, {0.0}, identity_factor(1), 0.25);
    CHECK(contains(region, {0.25}));
    CHECK(contains(region, {-0.25}));
    CHECK(!contains(region, {0.25000001}));
}

TEST_CASE("fitted scales grow with the target level") {
    ScoreSeries series(200, RegionKind::kEllipsoid);
    Rng rng(41);
    for (int i = 0; i < 200; ++i) series.push(std::abs(rng.gaussian()));
    double prev = 0.0;
    for (double a = 0.05; a < 0.96; a += 0.05) {
        const double s = fit_scale(series, a);
        CHECK(s >= prev);
        prev = s;
    }
}

TEST_CASE("with distinct scores the fitted scale covers exactly its share of the window") {
    ScoreSeries series(100, RegionKind::kP1);
    Rng rng(43);
    std::vector<double> raw;
    for (int i = 0; i < 100; ++i) raw.push_back(std::abs(rng.gaussian()) + 1e-6 * i);
    for (double v : raw) series.push(v);
    const double s = fit_scale(series, 0.9);
    const auto covered = static_cast<std::size_t>(
        std::count_if(raw.begin(), raw.end(), [s](double v) { return v <= s; }));
    CHECK(covered == 90);
}

TEST_CASE("build_region wires the window scale into the requested family") {
    ScoreSeries series(10, RegionKind::kP1);
    for (int i = 1; i <= 10; ++i) series.push(static_cast<double>(i));
    const Vec forecast = {0.5, 0.5};
    const UpperTriangularFactor f = identity_factor(2);
    const PolyhedralRegion r = build_region(forecast, f, series, 0.8, RegionKind::kP1);
    CHECK(r.scale == doctest::Approx(8.0));
    CHECK(r.alpha == 0.8);
    CHECK(r.kind == RegionKind::kP1);
    CHECK_THROWS_AS(build_region(forecast, f, series, 0.8, RegionKind::kPinf),
                    std::invalid_argument);
}

TEST_CASE("unclipped volumes follow the closed forms") {
    // Dimension 1: all three families are the same interval.
    UpperTriangularFactor half(1);
    half.set(0, 0, 0.5);  // sigma = 2
    for (RegionKind k : {RegionKind::kP1, RegionKind::kPinf, RegionKind::kEllipsoid}) {
        const auto r = make_region(k, {0.0}, half, 1.5);
        CHECK(analytic_volume_unclipped(r) == doctest::Approx(6.0).epsilon(1e-12));
    }
    // Dimension 2 with the identity factor and unit scale.
    const UpperTriangularFactor eye = identity_factor(2);
    CHECK(analytic_volume_unclipped(make_region(RegionKind::kP1, {0.0, 0.0}, eye, 1.0)) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(analytic_volume_unclipped(make_region(RegionKind::kPinf, {0.0, 0.0}, eye, 1.0)) ==
          doctest::Approx(4.0).epsilon(1e-12));
    CHECK(analytic_volume_unclipped(make_region(RegionKind::kEllipsoid, {0.0, 0.0}, eye, 1.0)) ==
          doctest::Approx(3.14159265358979324).epsilon(1e-12));
}

TEST_CASE("volume scales as scale to the dimension and with root det covariance") {
    UpperTriangularFactor f(2);
    f.set(0, 0, 0.5);
    f.set(1, 1, 1.0 / 3.0);  // sqrt(det Sigma) = 6
    const auto base = make_region(RegionKind::kPinf, {0.0, 0.0}, f, 1.0);
    const auto doubled = make_region(RegionKind::kPinf, {0.0, 0.0}, f, 2.0);
    CHECK(analytic_volume_unclipped(base) == doctest::Approx(4.0 * 6.0).epsilon(1e-12));
    CHECK(analytic_volume_unclipped(doubled) ==
          doctest::Approx(4.0 * analytic_volume_unclipped(base)).epsilon(1e-12));
}

TEST_CASE("region JSON round-trips bit for bit") {
    UpperTriangularFactor f(2);
    f.set(0, 0, 1.0 / 3.0);
    f.set(0, 1, -0.123456789012345678);
    f.set(1, 1, 7.0 / 11.0);
    for (RegionKind k : {RegionKind::kP1, RegionKind::kPinf, RegionKind::kEllipsoid}) {
        const auto r = make_region(k, {0.1, 2.0 / 3.0}, f, 0.987654321098765432, 0.85);
        const PolyhedralRegion back = region_from_json(region_to_json(r));
        CHECK(back.kind == r.kind);
        CHECK(back.scale == r.scale);
        CHECK(back.alpha == r.alpha);
        CHECK(back.center == r.center);
        CHECK(back.factor.packed() == r.factor.packed());
    }
}

TEST_CASE("region JSON rejects broken payloads") {
    const auto r = make_region(RegionKind::kP1, {0.5, 0.5}, identity_factor(2), 1.0);
    std::string good = region_to_json(r);
    CHECK_THROWS_AS(region_from_json("{"), DataError);
    CHECK_THROWS_AS(region_from_json("{}"), DataError);
    // Flip the factor diagonal negative.
    PolyhedralRegion bad = r;
    bad.factor.set(0, 0, -1.0);
    CHECK_THROWS_AS(region_from_json(region_to_json(bad)), DataError);
}

}  // TEST_SUITE
