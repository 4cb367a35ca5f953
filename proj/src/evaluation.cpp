#include "polyreg/evaluation.hpp"

#include <cmath>
#include <stdexcept>

#include "polyreg/rng.hpp"

namespace polyreg {

CalibrationRecord empirical_coverage(double alpha, const std::vector<std::uint8_t>& indicators) {
    if (indicators.empty()) {
        throw std::invalid_argument("empirical_coverage: no membership indicators");
    }
    CalibrationRecord rec;
    rec.alpha = alpha;
    rec.indicators = indicators;
    for (std::uint8_t b : indicators) rec.covered += b ? 1 : 0;
    rec.empirical = static_cast<double>(rec.covered) / static_cast<double>(indicators.size());
    rec.deviation = rec.empirical - alpha;
    return rec;
}

std::vector<Vec> unit_cube_samples(std::size_t dim, std::size_t count, std::uint64_t seed) {
    if (dim == 0) throw std::invalid_argument("unit_cube_samples: dimension must be positive");
    Rng rng(seed);
    std::vector<Vec> samples(count, Vec(dim));
    for (Vec& p : samples) {
        for (double& v : p) v = rng.uniform01();
    }
    return samples;
}

VolumeRecord volume_record_from_counts(std::size_t hits, std::size_t samples) {
    if (samples == 0) throw std::invalid_argument("volume_record_from_counts: no samples");
    VolumeRecord rec;
    rec.samples = samples;
    rec.hits = hits;
    const double n = static_cast<double>(samples);
    const double p = static_cast<double>(hits) / n;
    rec.volume = p;  // feasible-set volume is 1, so the hit rate is the estimate
    rec.stderr_ = std::sqrt(p * (1.0 - p) / n);
    return rec;
}

VolumeRecord volume_from_samples(const MembershipFn& inside, const std::vector<Vec>& samples) {
    if (samples.empty()) throw std::invalid_argument("volume_from_samples: no samples");
    std::size_t hits = 0;
    for (const Vec& p : samples) hits += inside(p) ? 1 : 0;
    return volume_record_from_counts(hits, samples.size());
}

VolumeRecord monte_carlo_volume(const MembershipFn& inside, std::size_t dim, std::size_t samples,
                                std::uint64_t seed) {
    return volume_from_samples(inside, unit_cube_samples(dim, samples, seed));
}

}  // namespace polyreg
