#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polyreg/errors.hpp"
#include "polyreg/linalg.hpp"

namespace polyreg {

// Targets are indexed by forecast horizon and location; the joint error
// vector stacks both, so its dimension is horizons * locations.
struct DimensionSpec {
    std::size_t horizons{1};
    std::size_t locations{1};

    std::size_t dim() const { return horizons * locations; }
    void validate() const;
};

// One time step: a point forecast and, when already observed, the matching
// measurement.  All values live on the normalized scale [0,1].
struct ForecastFrame {
    long long t{0};
    Vec forecast;
    std::optional<Vec> measurement;
};

// Forecast/measurement series with a marker splitting the index range into a
// training prefix and an evaluation suffix.  Frames in the training prefix
// must carry measurements; evaluation frames may still be unobserved.
class Dataset {
public:
    Dataset(DimensionSpec spec, std::vector<ForecastFrame> frames, std::size_t train_count);

    const DimensionSpec& spec() const { return spec_; }
    const std::vector<ForecastFrame>& frames() const { return frames_; }
    std::size_t size() const { return frames_.size(); }
    std::size_t train_count() const { return train_count_; }
    std::size_t eval_count() const { return frames_.size() - train_count_; }

    void set_train_count(std::size_t train_count);

private:
    DimensionSpec spec_;
    std::vector<ForecastFrame> frames_;
    std::size_t train_count_;
};

struct QuantilePoint {
    double level;
    double value;
};

// Per-dimension marginal quantile curves: for each coordinate a list of
// (probability level, quantile value) pairs with strictly increasing levels
// in (0,1) and non-decreasing values in [0,1].  Evaluation interpolates
// linearly; outside the declared levels the curve is extended down to
// (0.005, 0) and up to (0.995, highest declared value), and held flat beyond.
class MarginalQuantileCurve {
public:
    explicit MarginalQuantileCurve(std::vector<std::vector<QuantilePoint>> per_dim);

    std::size_t dim() const { return curves_.size(); }
    double quantile(std::size_t d, double level) const;
    // Quantile value at level 0.995; the upper clamp for interval methods.
    double upper_limit(std::size_t d) const;

    const std::vector<std::vector<QuantilePoint>>& points() const { return declared_; }

private:
    std::vector<std::vector<QuantilePoint>> declared_;
    std::vector<std::vector<QuantilePoint>> curves_;  // with extension anchors
};

using MarginalSeries = std::map<long long, MarginalQuantileCurve>;

enum class CsvFormat { kWide, kLong };

CsvFormat csv_format_from_string(const std::string& s);
std::string to_string(CsvFormat f);

// Load a forecast/measurement CSV.  Wide layout: t, xhat_1..xhat_D, x_1..x_D
// with one row per time step; long layout: t, dim, xhat, x with D rows per
// time step.  A missing measurement is written as empty fields (all D of
// them).  Values are clamped into [0,1] when within 1e-9 of the bounds and
// rejected otherwise.  Errors cite the offending line number.  The returned
// split marker is the first frame without a measurement (or the full size);
// callers normally override it via Dataset::set_train_count.
Dataset load_dataset(const std::string& path, const DimensionSpec& spec, CsvFormat format);

void save_dataset(const Dataset& ds, const std::string& path, CsvFormat format);

// Marginal quantile curve series CSV: t, dim, level, value with contiguous
// rows per time step and ascending levels per (t, dim).
MarginalSeries load_marginals(const std::string& path, std::size_t dim);
void save_marginals(const MarginalSeries& series, const std::string& path);

// Shortest-width decimal formatting that still round-trips the exact double
// (17 significant digits); used by every CSV writer.
std::string format_double(double v);

}  // namespace polyreg
