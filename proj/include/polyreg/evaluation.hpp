#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "polyreg/linalg.hpp"

namespace polyreg {

// Empirical coverage of a region family at one nominal level: the mean of
// the per-step membership indicators, and its deviation from nominal.
struct CalibrationRecord {
    double alpha{0.0};
    std::vector<std::uint8_t> indicators;
    std::size_t covered{0};
    double empirical{0.0};
    double deviation{0.0};
};

CalibrationRecord empirical_coverage(double alpha, const std::vector<std::uint8_t>& indicators);

// Hit-or-miss volume estimate over the unit hypercube feasible set:
// volume = hits / samples * cube_volume with cube_volume = 1, and
// stderr = sqrt(p (1-p) / samples).
struct VolumeRecord {
    double volume{0.0};
    double stderr_{0.0};
    std::size_t samples{0};
    std::size_t hits{0};
};

using MembershipFn = std::function<bool(const Vec&)>;

// Deterministic uniform draws over [0,1]^dim; the shared sample set for
// common-random-numbers comparisons across regions at one time step.
std::vector<Vec> unit_cube_samples(std::size_t dim, std::size_t count, std::uint64_t seed);

// Estimator shared by every hit-or-miss path: volume = hits/samples over the
// unit-volume feasible set, stderr = sqrt(p(1-p)/samples).
VolumeRecord volume_record_from_counts(std::size_t hits, std::size_t samples);

VolumeRecord volume_from_samples(const MembershipFn& inside, const std::vector<Vec>& samples);

VolumeRecord monte_carlo_volume(const MembershipFn& inside, std::size_t dim, std::size_t samples,
                                std::uint64_t seed);

}  // namespace polyreg
