#include <doctest.h>

#include <cmath>
#include <vector>

#include "polyreg/errors.hpp"
#include "polyreg/intervals.hpp"
#include "polyreg/scenarios.hpp"

using namespace polyreg;

namespace {

MarginalQuantileCurve identity_curve(std::size_t dim) {
    std::vector<std::vector<QuantilePoint>> per(dim, {{0.005, 0.005}, {0.995, 0.995}});
    return MarginalQuantileCurve(per);
}

MarginalQuantileCurve bent_curve() {
    return MarginalQuantileCurve({{{0.1, 0.1}, {0.5, 0.45}, {0.9, 0.8}},
                                  {{0.05, 0.2}, {0.95, 0.6}}});
}

SymmetricMatrix pair_correlation(double rho) {
    SymmetricMatrix r = SymmetricMatrix::identity(2);
    r.set(1, 0, rho);
    return r;
}

std::size_t needed_for(double alpha, std::size_t s) {
    return static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(s) - 1e-9));
}

}  // namespace

TEST_SUITE("mpi") {

TEST_CASE("an evenly spread cloud is matched at the exact grid level") {
    // 1000 points at (i + 0.5)/1000 with the identity quantile curve: the box
    // for marginal level 0.75 is [0.125, 0.875] and holds exactly 750 points,
    // and 0.75 = 3072/4096 sits on the search grid, so beta comes back exact.
    std::vector<Vec> pts;
    for (int i = 0; i < 1000; ++i) pts.push_back({(i + 0.5) / 1000.0});
    const AdjustedBox r = adjust_intervals(identity_curve(1), ScenarioSet::from_points(pts), 0.75);
    CHECK(r.attained);
    CHECK(r.beta == 0.75);
    CHECK(r.covered == 750);
    CHECK(r.box.lower[0] == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(r.box.upper[0] == doctest::Approx(0.875).epsilon(1e-12));
    CHECK(r.box.alpha == 0.75);
}

TEST_CASE("independent coordinates need a wider marginal level than alpha") {
    // With two independent uniform coordinates the box at marginal level beta
    // captures about beta^2 of the cloud, so reaching joint 0.9 needs
    // beta near sqrt(0.9) = 0.9487.
    const ScenarioSet s =
        sample_scenarios(identity_curve(2), SymmetricMatrix::identity(2), 5000, 41);
    const AdjustedBox r = adjust_intervals(identity_curve(2), s, 0.9);
    CHECK(r.attained);
    CHECK(r.beta > 0.92);
    CHECK(r.beta < 0.97);
    CHECK(r.covered >= needed_for(0.9, 5000));
    // The smallest sufficient grid level should not overshoot by much.
    CHECK(r.covered <= 4550);
}

TEST_CASE("a point mass is covered by a zero width box") {
    const MarginalQuantileCurve flat({{{0.005, 0.4}, {0.995, 0.4}},
                                      {{0.005, 0.4}, {0.995, 0.4}}});
    std::vector<Vec> pts(50, Vec{0.4, 0.4});
    const AdjustedBox r = adjust_intervals(flat, ScenarioSet::from_points(pts), 0.9);
    CHECK(r.attained);
    CHECK(r.covered == 50);
    CHECK(r.box.lower == Vec{0.4, 0.4});
    CHECK(r.box.upper == Vec{0.4, 0.4});
    CHECK(box_volume(r.box) == 0.0);
    // The requested level still snaps to the first grid point at or above it.
    CHECK(r.beta == 3687.0 / 4096.0);
}

TEST_CASE("attained boxes always hold at least the required count") {
    for (std::uint64_t seed : {7ULL, 19ULL, 57ULL}) {
        const ScenarioSet s = sample_scenarios(bent_curve(), pair_correlation(0.5), 800, seed);
        for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9, 0.95}) {
            const AdjustedBox r = adjust_intervals(bent_curve(), s, alpha);
            REQUIRE(r.attained);
            CHECK(r.covered >= needed_for(alpha, 800));
            CHECK(r.beta >= alpha - 1e-12);
            for (std::size_t c = 0; c < 2; ++c) {
                CHECK(r.box.lower[c] >= 0.0);
                CHECK(r.box.upper[c] <= bent_curve().upper_limit(c));
                CHECK(r.box.lower[c] <= r.box.upper[c]);
            }
        }
    }
}

TEST_CASE("boxes are exactly nested as alpha grows") {
    const ScenarioSet s = sample_scenarios(bent_curve(), pair_correlation(0.3), 600, 23);
    AdjustedBox prev = adjust_intervals(bent_curve(), s, 0.05);
    for (double alpha = 0.10; alpha < 0.96; alpha += 0.05) {
        const AdjustedBox cur = adjust_intervals(bent_curve(), s, alpha);
        CHECK(cur.beta >= prev.beta);
        CHECK(cur.covered >= prev.covered);
        for (std::size_t c = 0; c < 2; ++c) {
            CHECK(cur.box.lower[c] <= prev.box.lower[c]);
            CHECK(cur.box.upper[c] >= prev.box.upper[c]);
        }
        prev = cur;
    }
}

TEST_CASE("scenarios beyond the upper clamp make the target unattainable") {
    // The curve tops out at 0.5, so a scenario at 0.9 can never enter the box
    // and alpha = 0.95 over ten points needs all ten.
    const MarginalQuantileCurve capped({{{0.005, 0.0}, {0.995, 0.5}}});
    std::vector<Vec> pts(9, Vec{0.2});
    pts.push_back({0.9});
    const AdjustedBox r = adjust_intervals(capped, ScenarioSet::from_points(pts), 0.95);
    CHECK(!r.attained);
    CHECK(r.covered == 9);
    CHECK(r.beta == 4095.0 / 4096.0);
    CHECK(r.box.upper[0] == 0.5);
    CHECK(r.box.lower[0] == 0.0);
}

TEST_CASE("box membership is boundary inclusive") {
    BoxRegion box;
    box.lower = {0.2, 0.3};
    box.upper = {0.8, 0.9};
    CHECK(box_contains(box, {0.5, 0.5}));
    CHECK(box_contains(box, {0.2, 0.3}));
    CHECK(box_contains(box, {0.8, 0.9}));
    CHECK(box_contains(box, {0.2, 0.9}));
    CHECK(!box_contains(box, {0.8000000001, 0.5}));
    CHECK(!box_contains(box, {0.5, 0.2999999999}));
    CHECK_THROWS_AS(box_contains(box, {0.5}), std::invalid_argument);
}

TEST_CASE("box volume is the product of side lengths") {
    BoxRegion box;
    box.lower = {0.2, 0.3};
    box.upper = {0.8, 0.9};
    CHECK(box_volume(box) == doctest::Approx(0.36).epsilon(1e-12));
    box.upper[0] = 0.2;
    CHECK(box_volume(box) == 0.0);
}

TEST_CASE("box JSON round-trips bit for bit and rejects malformed input") {
    BoxRegion box;
    box.lower = {0.125, 0.25};
    box.upper = {0.875, 0.9375};
    box.alpha = 0.8;
    const BoxRegion back = box_from_json(box_to_json(box));
    CHECK(back.lower == box.lower);
    CHECK(back.upper == box.upper);
    CHECK(back.alpha == box.alpha);

    CHECK_THROWS_AS(box_from_json("{"), DataError);
    CHECK_THROWS_AS(box_from_json("{}"), DataError);
    CHECK_THROWS_AS(
        box_from_json("{\"alpha\":0.5,\"lower\":[0.5],\"upper\":[0.2]}"), DataError);
    CHECK_THROWS_AS(
        box_from_json("{\"alpha\":0.5,\"lower\":[0.1,0.2],\"upper\":[0.9]}"), DataError);
}

TEST_CASE("interval adjustment validates its inputs") {
    const MarginalQuantileCurve c1 = identity_curve(1);
    const ScenarioSet s = ScenarioSet::from_points({{0.5}});
    CHECK_THROWS_AS(adjust_intervals(c1, s, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(adjust_intervals(c1, s, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(adjust_intervals(identity_curve(2), s, 0.5), std::invalid_argument);
    ScenarioSet empty;
    empty.dim = 1;
    CHECK_THROWS_AS(adjust_intervals(c1, empty, 0.5), std::invalid_argument);
}

}  // TEST_SUITE
