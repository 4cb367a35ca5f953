#include "polyreg/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace polyreg {

namespace {

constexpr double kClampTol = 1e-9;
constexpr double kLowerAnchorLevel = 0.005;
constexpr double kUpperAnchorLevel = 0.995;

std::string line_msg(const std::string& path, std::size_t line, const std::string& what) {
    return path + ":" + std::to_string(line) + ": " + what;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    for (std::string& f : fields) {
        std::size_t b = f.find_first_not_of(" \t\r");
        std::size_t e = f.find_last_not_of(" \t\r");
        f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
    }
    return fields;
}

double parse_double(const std::string& s, const std::string& path, std::size_t line) {
    if (s.empty()) throw DataError(line_msg(path, line, "empty numeric field"));
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v)) {
        throw DataError(line_msg(path, line, "malformed number '" + s + "'"));
    }
    return v;
}

long long parse_timestamp(const std::string& s, const std::string& path, std::size_t line) {
    if (s.empty()) throw DataError(line_msg(path, line, "empty timestamp field"));
    char* end = nullptr;
    long long v = std::strtoll(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size()) {
        throw DataError(line_msg(path, line, "malformed timestamp '" + s + "'"));
    }
    return v;
}

double clamp_unit(double v, const std::string& path, std::size_t line) {
    if (v < -kClampTol || v > 1.0 + kClampTol) {
        throw DataError(line_msg(path, line,
                                 "value " + std::to_string(v) + " outside [0,1] beyond tolerance"));
    }
    return std::min(1.0, std::max(0.0, v));
}

}  // namespace

void DimensionSpec::validate() const {
    if (horizons < 1 || locations < 1) {
        throw ConfigError("DimensionSpec: horizons and locations must be at least 1");
    }
}

Dataset::Dataset(DimensionSpec spec, std::vector<ForecastFrame> frames, std::size_t train_count)
    : spec_(spec), frames_(std::move(frames)), train_count_(0) {
    spec_.validate();
    if (frames_.empty()) throw DataError("Dataset: no frames");
    const std::size_t d = spec_.dim();
    for (std::size_t i = 0; i < frames_.size(); ++i) {
        const ForecastFrame& f = frames_[i];
        if (f.forecast.size() != d) {
            throw DataError("Dataset: frame " + std::to_string(i) + " forecast length " +
                            std::to_string(f.forecast.size()) + " != " + std::to_string(d));
        }
        if (f.measurement && f.measurement->size() != d) {
            throw DataError("Dataset: frame " + std::to_string(i) + " measurement length mismatch");
        }
        if (i > 0 && frames_[i - 1].t >= f.t) {
            throw DataError("Dataset: timestamps not strictly increasing at frame " +
                            std::to_string(i));
        }
        auto in_unit = [](const Vec& v) {
            return std::all_of(v.begin(), v.end(),
                               [](double x) { return x >= 0.0 && x <= 1.0 && std::isfinite(x); });
        };
        if (!in_unit(f.forecast) || (f.measurement && !in_unit(*f.measurement))) {
            throw DataError("Dataset: frame " + std::to_string(i) + " has values outside [0,1]");
        }
    }
    set_train_count(train_count);
}

void Dataset::set_train_count(std::size_t train_count) {
    if (train_count > frames_.size()) {
        throw ConfigError("Dataset: split marker " + std::to_string(train_count) +
                          " exceeds frame count " + std::to_string(frames_.size()));
    }
    for (std::size_t i = 0; i < train_count; ++i) {
        if (!frames_[i].measurement) {
            throw DataError("Dataset: training frame " + std::to_string(i) +
                            " (t=" + std::to_string(frames_[i].t) + ") has no measurement");
        }
    }
    train_count_ = train_count;
}

MarginalQuantileCurve::MarginalQuantileCurve(std::vector<std::vector<QuantilePoint>> per_dim)
    : declared_(std::move(per_dim)) {
    if (declared_.empty()) throw DataError("MarginalQuantileCurve: no dimensions");
    curves_.reserve(declared_.size());
    for (std::size_t d = 0; d < declared_.size(); ++d) {
        const auto& pts = declared_[d];
        if (pts.size() < 2) {
            throw DataError("MarginalQuantileCurve: dimension " + std::to_string(d) +
                            " needs at least 2 points");
        }
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (!(pts[i].level > 0.0 && pts[i].level < 1.0)) {
                throw DataError("MarginalQuantileCurve: level outside (0,1)");
            }
            if (!(pts[i].value >= 0.0 && pts[i].value <= 1.0)) {
                throw DataError("MarginalQuantileCurve: value outside [0,1]");
            }
            if (i > 0 && pts[i].level <= pts[i - 1].level) {
                throw DataError("MarginalQuantileCurve: levels not strictly increasing");
            }
            if (i > 0 && pts[i].value < pts[i - 1].value) {
                throw DataError("MarginalQuantileCurve: values not non-decreasing");
            }
        }
        std::vector<QuantilePoint> aug;
        if (pts.front().level > kLowerAnchorLevel) aug.push_back({kLowerAnchorLevel, 0.0});
        aug.insert(aug.end(), pts.begin(), pts.end());
        if (pts.back().level < kUpperAnchorLevel) {
            aug.push_back({kUpperAnchorLevel, pts.back().value});
        }
        curves_.push_back(std::move(aug));
    }
}

double MarginalQuantileCurve::quantile(std::size_t d, double level) const {
    const auto& pts = curves_.at(d);
    if (level <= pts.front().level) return pts.front().value;
    if (level >= pts.back().level) return pts.back().value;
    auto it = std::upper_bound(pts.begin(), pts.end(), level,
                               [](double l, const QuantilePoint& q) { return l < q.level; });
    const QuantilePoint& hi = *it;
    const QuantilePoint& lo = *(it - 1);
    double w = (level - lo.level) / (hi.level - lo.level);
    return lo.value + w * (hi.value - lo.value);
}

double MarginalQuantileCurve::upper_limit(std::size_t d) const {
    return quantile(d, kUpperAnchorLevel);
}

CsvFormat csv_format_from_string(const std::string& s) {
    if (s == "wide") return CsvFormat::kWide;
    if (s == "long") return CsvFormat::kLong;
    throw ConfigError("unknown CSV format '" + s + "' (expected wide or long)");
}

std::string to_string(CsvFormat f) {
    return f == CsvFormat::kWide ? "wide" : "long";
}

namespace {

std::vector<std::string> wide_header(std::size_t d) {
    std::vector<std::string> h{"t"};
    for (std::size_t i = 1; i <= d; ++i) h.push_back("xhat_" + std::to_string(i));
    for (std::size_t i = 1; i <= d; ++i) h.push_back("x_" + std::to_string(i));
    return h;
}

void check_header(const std::vector<std::string>& got, const std::vector<std::string>& want,
                  const std::string& path) {
    if (got != want) {
        std::string expect;
        for (std::size_t i = 0; i < want.size(); ++i) expect += (i ? "," : "") + want[i];
        throw DataError(line_msg(path, 1, "bad header (expected '" + expect + "')"));
    }
}

Dataset finish_dataset(const DimensionSpec& spec, std::vector<ForecastFrame> frames,
                       const std::string& path) {
    if (frames.empty()) throw DataError(path + ": no data rows");
    std::size_t split = frames.size();
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (!frames[i].measurement) {
            split = i;
            break;
        }
    }
    return Dataset(spec, std::move(frames), split);
}

Dataset load_wide(std::ifstream& in, const std::string& path, const DimensionSpec& spec) {
    const std::size_t d = spec.dim();
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    ++lineno;
    check_header(split_csv(line), wide_header(d), path);

    std::vector<ForecastFrame> frames;
    long long prev_t = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = split_csv(line);
        if (fields.size() != 1 + 2 * d) {
            throw DataError(line_msg(path, lineno,
                                     "expected " + std::to_string(1 + 2 * d) + " fields, got " +
                                         std::to_string(fields.size())));
        }
        ForecastFrame f;
        f.t = parse_timestamp(fields[0], path, lineno);
        if (!frames.empty() && f.t <= prev_t) {
            throw DataError(line_msg(path, lineno, "timestamps not strictly increasing"));
        }
        prev_t = f.t;
        f.forecast.resize(d);
        for (std::size_t i = 0; i < d; ++i) {
            f.forecast[i] = clamp_unit(parse_double(fields[1 + i], path, lineno), path, lineno);
        }
        std::size_t empty = 0;
        for (std::size_t i = 0; i < d; ++i) empty += fields[1 + d + i].empty();
        if (empty == 0) {
            Vec m(d);
            for (std::size_t i = 0; i < d; ++i) {
                m[i] = clamp_unit(parse_double(fields[1 + d + i], path, lineno), path, lineno);
            }
            f.measurement = std::move(m);
        } else if (empty != d) {
            throw DataError(line_msg(path, lineno, "measurement partially missing"));
        }
        frames.push_back(std::move(f));
    }
    return finish_dataset(spec, std::move(frames), path);
}

Dataset load_long(std::ifstream& in, const std::string& path, const DimensionSpec& spec) {
    const std::size_t d = spec.dim();
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    ++lineno;
    check_header(split_csv(line), {"t", "dim", "xhat", "x"}, path);

    std::vector<ForecastFrame> frames;
    ForecastFrame cur;
    Vec cur_meas(d);
    std::size_t cur_dim = 0;  // next expected 1-based dim; 0 = no open frame
    std::size_t meas_count = 0;

    auto close_frame = [&](std::size_t at_line) {
        if (cur_dim == 0) return;
        if (cur_dim != d + 1) {
            throw DataError(line_msg(path, at_line,
                                     "time step t=" + std::to_string(cur.t) + " has " +
                                         std::to_string(cur_dim - 1) + " of " + std::to_string(d) +
                                         " dimensions"));
        }
        if (meas_count == d) {
            cur.measurement = cur_meas;
        } else if (meas_count != 0) {
            throw DataError(line_msg(path, at_line, "measurement partially missing for t=" +
                                                        std::to_string(cur.t)));
        }
        frames.push_back(cur);
        cur = ForecastFrame{};
        cur_dim = 0;
        meas_count = 0;
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = split_csv(line);
        if (fields.size() != 4) {
            throw DataError(line_msg(path, lineno, "expected 4 fields, got " +
                                                       std::to_string(fields.size())));
        }
        long long t = parse_timestamp(fields[0], path, lineno);
        std::size_t dim_index =
            static_cast<std::size_t>(parse_timestamp(fields[1], path, lineno));
        if (cur_dim != 0 && t != cur.t) close_frame(lineno);
        if (cur_dim == 0) {
            if (!frames.empty() && t <= frames.back().t) {
                throw DataError(line_msg(path, lineno, "timestamps not strictly increasing"));
            }
            cur.t = t;
            cur.forecast.assign(d, 0.0);
            cur_dim = 1;
        }
        if (dim_index != cur_dim) {
            throw DataError(line_msg(path, lineno,
                                     "expected dim " + std::to_string(cur_dim) + ", got " +
                                         std::to_string(dim_index)));
        }
        cur.forecast[dim_index - 1] =
            clamp_unit(parse_double(fields[2], path, lineno), path, lineno);
        if (!fields[3].empty()) {
            cur_meas[dim_index - 1] =
                clamp_unit(parse_double(fields[3], path, lineno), path, lineno);
            ++meas_count;
        }
        ++cur_dim;
    }
    close_frame(lineno);
    return finish_dataset(spec, std::move(frames), path);
}

}  // namespace

Dataset load_dataset(const std::string& path, const DimensionSpec& spec, CsvFormat format) {
    spec.validate();
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file '" + path + "'");
    return format == CsvFormat::kWide ? load_wide(in, path, spec) : load_long(in, path, spec);
}

void save_dataset(const Dataset& ds, const std::string& path, CsvFormat format) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    const std::size_t d = ds.spec().dim();
    if (format == CsvFormat::kWide) {
        auto h = wide_header(d);
        for (std::size_t i = 0; i < h.size(); ++i) out << (i ? "," : "") << h[i];
        out << "\n";
        for (const ForecastFrame& f : ds.frames()) {
            out << f.t;
            for (double v : f.forecast) out << "," << format_double(v);
            for (std::size_t i = 0; i < d; ++i) {
                out << ",";
                if (f.measurement) out << format_double((*f.measurement)[i]);
            }
            out << "\n";
        }
    } else {
        out << "t,dim,xhat,x\n";
        for (const ForecastFrame& f : ds.frames()) {
            for (std::size_t i = 0; i < d; ++i) {
                out << f.t << "," << (i + 1) << "," << format_double(f.forecast[i]) << ",";
                if (f.measurement) out << format_double((*f.measurement)[i]);
                out << "\n";
            }
        }
    }
    if (!out) throw DataError("write failed for '" + path + "'");
}

MarginalSeries load_marginals(const std::string& path, std::size_t dim) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open marginals file '" + path + "'");
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    ++lineno;
    check_header(split_csv(line), {"t", "dim", "level", "value"}, path);

    MarginalSeries series;
    long long cur_t = 0;
    bool open = false;
    std::vector<std::vector<QuantilePoint>> cur(dim);

    auto close_group = [&]() {
        if (!open) return;
        auto [it, inserted] = series.emplace(cur_t, MarginalQuantileCurve(cur));
        if (!inserted) throw DataError(path + ": duplicate time step t=" + std::to_string(cur_t));
        for (auto& v : cur) v.clear();
        open = false;
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = split_csv(line);
        if (fields.size() != 4) {
            throw DataError(line_msg(path, lineno, "expected 4 fields, got " +
                                                       std::to_string(fields.size())));
        }
        long long t = parse_timestamp(fields[0], path, lineno);
        std::size_t d = static_cast<std::size_t>(parse_timestamp(fields[1], path, lineno));
        if (d < 1 || d > dim) {
            throw DataError(line_msg(path, lineno, "dim " + std::to_string(d) + " outside 1.." +
                                                       std::to_string(dim)));
        }
        if (open && t != cur_t) close_group();
        if (!open) {
            cur_t = t;
            open = true;
        }
        double level = parse_double(fields[2], path, lineno);
        double value = clamp_unit(parse_double(fields[3], path, lineno), path, lineno);
        cur[d - 1].push_back({level, value});
    }
    close_group();
    if (series.empty()) throw DataError(path + ": no data rows");
    return series;
}

void save_marginals(const MarginalSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << "t,dim,level,value\n";
    for (const auto& [t, curve] : series) {
        for (std::size_t d = 0; d < curve.dim(); ++d) {
            for (const QuantilePoint& p : curve.points()[d]) {
                out << t << "," << (d + 1) << "," << format_double(p.level) << ","
                    << format_double(p.value) << "\n";
            }
        }
    }
    if (!out) throw DataError("write failed for '" + path + "'");
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace polyreg
