#include "polyreg/pipeline.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include <json.hpp>

#include "polyreg/covariance.hpp"
#include "polyreg/errors.hpp"
#include "polyreg/hull.hpp"
#include "polyreg/intervals.hpp"
#include "polyreg/polyhedra.hpp"
#include "polyreg/rng.hpp"
#include "polyreg/scenarios.hpp"
#include "polyreg/special.hpp"

namespace polyreg {

namespace {

enum class MethodId { kP1, kPinf, kEllipsoid, kHull, kHullTrimmed, kMpi };

MethodId method_id(const std::string& name) {
    if (name == "p1") return MethodId::kP1;
    if (name == "pinf") return MethodId::kPinf;
    if (name == "ellipsoid") return MethodId::kEllipsoid;
    if (name == "hull") return MethodId::kHull;
    if (name == "hull-trimmed") return MethodId::kHullTrimmed;
    if (name == "mpi") return MethodId::kMpi;
    throw ConfigError("unknown method '" + name + "'");
}

bool is_polyhedral(MethodId m) {
    return m == MethodId::kP1 || m == MethodId::kPinf || m == MethodId::kEllipsoid;
}

bool is_hull_method(MethodId m) {
    return m == MethodId::kHull || m == MethodId::kHullTrimmed;
}

bool uses_scenarios(MethodId m) { return is_hull_method(m) || m == MethodId::kMpi; }

// Hull families calibrate by construction, not by a nominal level, so their
// report rows carry no alpha.
bool has_alpha_rows(MethodId m) { return !is_hull_method(m); }

RegionKind kind_of(MethodId m) {
    switch (m) {
        case MethodId::kP1: return RegionKind::kP1;
        case MethodId::kPinf: return RegionKind::kPinf;
        default: return RegionKind::kEllipsoid;
    }
}

// Random-stream tags.  Seeds mix the absolute time step, so a run over a
// shorter suffix of the same data reproduces the longer run's per-step
// draws exactly.
constexpr std::uint64_t kStreamVolume = 1;
constexpr std::uint64_t kStreamScenario = 2;
constexpr std::uint64_t kStreamOutlier = 3;

std::vector<double> derived_marginal_levels() {
    std::vector<double> levels;
    for (int k = 1; k <= 39; ++k) levels.push_back(0.025 * k);
    levels.push_back(0.995);
    return levels;
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// Everything a single evaluation step needs, captured before the tracker
// absorbs that step's error.
struct StepPlan {
    explicit StepPlan(std::size_t dim) : factor(dim) {}

    long long t{0};
    Vec forecast;
    std::optional<Vec> measurement;
    UpperTriangularFactor factor;
    std::array<std::vector<double>, 3> sorted_scores;  // indexed by RegionKind
    std::optional<SymmetricMatrix> correlation;
    std::optional<MarginalQuantileCurve> marginals;
};

struct StepContext {
    std::size_t dim{0};
    std::vector<double> alphas;
    std::vector<MethodId> methods;  // active methods, user order
    std::vector<std::string> method_names;
    std::size_t volume_samples{0};
    std::size_t scenario_count{0};
    double trim_significance{0.001};
    double trim_multiplier{1.0};
    std::uint64_t seed{0};
};

struct StepOutput {
    bool done{false};
    bool has_measurement{false};
    // Membership of the step's measurement: [method][level] with one level
    // slot for hull methods; empty when the step has no measurement.
    std::vector<std::vector<std::uint8_t>> hits;
    // (volume, stderr) per [method][level]; empty when volumes are skipped.
    std::vector<std::vector<std::pair<double, double>>> vols;
    std::vector<std::string> notes;
    std::size_t mpi_unattained{0};
};

void apply_factor(const UpperTriangularFactor& f, const Vec& x, Vec& y) {
    const std::size_t n = f.dim();
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = i; j < n; ++j) acc += f(i, j) * x[j];
        y[i] = acc;
    }
}

struct Norms {
    double l1{0.0};
    double l2{0.0};
    double linf{0.0};
};

Norms norms_of(const Vec& y) {
    Norms n;
    double sq = 0.0;
    for (double v : y) {
        const double a = std::abs(v);
        n.l1 += a;
        sq += v * v;
        n.linf = std::max(n.linf, a);
    }
    n.l2 = std::sqrt(sq);
    return n;
}

double norm_for(const Norms& n, RegionKind k) {
    switch (k) {
        case RegionKind::kP1: return n.l1;
        case RegionKind::kPinf: return n.linf;
        default: return n.l2;
    }
}

std::string step_tag(long long t) { return "t=" + std::to_string(t); }

StepOutput compute_step(const StepPlan& plan, const StepContext& ctx) {
    StepOutput out;
    const std::size_t m_count = ctx.methods.size();
    const std::size_t a_count = ctx.alphas.size();
    const std::size_t dim = ctx.dim;
    out.hits.assign(m_count, {});
    out.vols.assign(m_count, {});
    out.has_measurement = plan.measurement.has_value();

    bool need_scen = false;
    bool mpi_active = false;
    bool hull_active = false;
    bool trimmed_active = false;
    std::array<bool, 3> kind_active{false, false, false};
    for (MethodId m : ctx.methods) {
        need_scen = need_scen || uses_scenarios(m);
        mpi_active = mpi_active || m == MethodId::kMpi;
        hull_active = hull_active || m == MethodId::kHull;
        trimmed_active = trimmed_active || m == MethodId::kHullTrimmed;
        if (is_polyhedral(m)) kind_active[static_cast<int>(kind_of(m))] = true;
    }

    // Scales per polyhedral kind per level, each from one shared sorted
    // window.
    std::array<std::vector<double>, 3> scales;
    for (int k = 0; k < 3; ++k) {
        if (!kind_active[k]) continue;
        scales[k].resize(a_count);
        for (std::size_t ai = 0; ai < a_count; ++ai)
            scales[k][ai] = fit_scale_sorted(plan.sorted_scores[k], ctx.alphas[ai]);
    }

    // One scenario cloud feeds every scenario-backed construction.
    std::optional<ScenarioSet> scen;
    if (need_scen) {
        ScenarioSet s = sample_scenarios(
            *plan.marginals, *plan.correlation, ctx.scenario_count,
            derive_seed(ctx.seed, static_cast<std::uint64_t>(plan.t), kStreamScenario));
        s.time_step = plan.t;
        scen = std::move(s);
    }

    std::vector<BoxRegion> boxes;
    if (mpi_active) {
        boxes.reserve(a_count);
        for (double a : ctx.alphas) {
            AdjustedBox ab = adjust_intervals(*plan.marginals, *scen, a);
            if (!ab.attained) ++out.mpi_unattained;
            boxes.push_back(std::move(ab.box));
        }
    }

    // Trimmed cloud: Mahalanobis trim under the cloud's own spread, with an
    // untrimmed fallback when trimming is impossible or leaves too few
    // points for a full-dimensional hull.
    std::optional<ScenarioSet> trimmed;
    if (trimmed_active) {
        const ScenarioSet& cloud = *scen;
        const double s = static_cast<double>(cloud.points.size());
        Vec mean(dim, 0.0);
        for (const Vec& p : cloud.points)
            for (std::size_t d = 0; d < dim; ++d) mean[d] += p[d];
        for (std::size_t d = 0; d < dim; ++d) mean[d] /= s;
        SymmetricMatrix cov(dim);
        for (const Vec& p : cloud.points)
            for (std::size_t i = 0; i < dim; ++i)
                for (std::size_t j = 0; j <= i; ++j)
                    cov.add(i, j, (p[i] - mean[i]) * (p[j] - mean[j]));
        cov.scale(1.0 / s);
        try {
            ScenarioSet tr =
                trim_outliers(cloud, cov, mean, ctx.trim_significance, ctx.trim_multiplier);
            if (tr.points.size() >= dim + 1) {
                trimmed = std::move(tr);
            } else {
                out.notes.push_back(step_tag(plan.t) +
                                    ": trim left fewer than dim+1 scenarios; kept the full cloud");
                trimmed = cloud;
            }
        } catch (const NotPositiveDefinite&) {
            out.notes.push_back(step_tag(plan.t) +
                                ": scenario spread is degenerate; trim skipped");
            trimmed = cloud;
        }
    }

    if (out.has_measurement) {
        const Vec& x = *plan.measurement;
        Vec diff(dim), y(dim);
        for (std::size_t d = 0; d < dim; ++d) diff[d] = x[d] - plan.forecast[d];
        apply_factor(plan.factor, diff, y);
        const Norms n = norms_of(y);
        for (std::size_t mi = 0; mi < m_count; ++mi) {
            const MethodId m = ctx.methods[mi];
            if (is_polyhedral(m)) {
                const int k = static_cast<int>(kind_of(m));
                out.hits[mi].resize(a_count);
                for (std::size_t ai = 0; ai < a_count; ++ai)
                    out.hits[mi][ai] = norm_for(n, kind_of(m)) <= scales[k][ai] ? 1 : 0;
            } else if (m == MethodId::kMpi) {
                out.hits[mi].resize(a_count);
                for (std::size_t ai = 0; ai < a_count; ++ai)
                    out.hits[mi][ai] = box_contains(boxes[ai], x) ? 1 : 0;
            } else if (m == MethodId::kHull) {
                out.hits[mi] = {static_cast<std::uint8_t>(contains_lp(*scen, x) ? 1 : 0)};
            } else {
                out.hits[mi] = {static_cast<std::uint8_t>(contains_lp(*trimmed, x) ? 1 : 0)};
            }
        }
    }

    if (ctx.volume_samples > 0) {
        // Hit counting for the norm-ball families over one shared stream of
        // unit-cube draws (common random numbers across methods and levels).
        std::array<std::vector<std::size_t>, 3> poly_hits;
        for (int k = 0; k < 3; ++k)
            if (kind_active[k]) poly_hits[k].assign(a_count, 0);
        const bool any_poly = kind_active[0] || kind_active[1] || kind_active[2];
        if (any_poly) {
            Rng vr(derive_seed(ctx.seed, static_cast<std::uint64_t>(plan.t), kStreamVolume));
            Vec x(dim), diff(dim), y(dim);
            for (std::size_t sidx = 0; sidx < ctx.volume_samples; ++sidx) {
                for (std::size_t d = 0; d < dim; ++d) x[d] = vr.uniform01();
                for (std::size_t d = 0; d < dim; ++d) diff[d] = x[d] - plan.forecast[d];
                apply_factor(plan.factor, diff, y);
                const Norms n = norms_of(y);
                for (int k = 0; k < 3; ++k) {
                    if (!kind_active[k]) continue;
                    const double v = norm_for(n, static_cast<RegionKind>(k));
                    for (std::size_t ai = 0; ai < a_count; ++ai)
                        poly_hits[k][ai] += v <= scales[k][ai] ? 1 : 0;
                }
            }
        }
        for (std::size_t mi = 0; mi < m_count; ++mi) {
            const MethodId m = ctx.methods[mi];
            if (is_polyhedral(m)) {
                const int k = static_cast<int>(kind_of(m));
                out.vols[mi].resize(a_count);
                for (std::size_t ai = 0; ai < a_count; ++ai) {
                    const VolumeRecord rec =
                        volume_record_from_counts(poly_hits[k][ai], ctx.volume_samples);
                    out.vols[mi][ai] = {rec.volume, rec.stderr_};
                }
            } else if (m == MethodId::kMpi) {
                // The adjusted box lies inside the unit cube by construction,
                // so its feasible volume is the exact product of side lengths.
                out.vols[mi].resize(a_count);
                for (std::size_t ai = 0; ai < a_count; ++ai)
                    out.vols[mi][ai] = {box_volume(boxes[ai]), 0.0};
            } else {
                // Hull volumes are exact: scenario coordinates live in [0,1],
                // so the hull never crosses the feasible boundary.
                const ScenarioSet& cloud = m == MethodId::kHull ? *scen : *trimmed;
                double vol = 0.0;
                try {
                    ConvexHull hull = quickhull(cloud);
                    std::size_t degenerate = 0;
                    vol = hull_volume(hull, &degenerate);
                    if (degenerate > 0)
                        out.notes.push_back(step_tag(plan.t) + ": " + ctx.method_names[mi] +
                                            " hull has " + std::to_string(degenerate) +
                                            " degenerate facets");
                } catch (const DegenerateInput&) {
                    out.notes.push_back(step_tag(plan.t) + ": " + ctx.method_names[mi] +
                                        " scenario cloud is affinely degenerate; volume 0");
                }
                out.vols[mi] = {{vol, 0.0}};
            }
        }
    }

    out.done = true;
    return out;
}

PipelineResult aggregate(PipelineResult base, const std::vector<StepPlan>& plans,
                         const std::vector<StepOutput>& outputs, std::size_t upto,
                         const StepContext& ctx) {
    PipelineResult r = std::move(base);
    const std::size_t m_count = ctx.methods.size();
    const std::size_t a_count = ctx.alphas.size();
    r.eval_steps = upto;
    r.observed_steps = 0;
    for (std::size_t i = 0; i < upto; ++i)
        if (outputs[i].has_measurement) ++r.observed_steps;

    for (std::size_t mi = 0; mi < m_count; ++mi) {
        const MethodId m = ctx.methods[mi];
        const std::size_t cols = has_alpha_rows(m) ? a_count : 1;
        for (std::size_t ci = 0; ci < cols; ++ci) {
            CoverageRow row;
            row.method = ctx.method_names[mi];
            row.has_alpha = has_alpha_rows(m);
            const double alpha = row.has_alpha ? ctx.alphas[ci] : std::nan("");
            std::vector<std::uint8_t> ind;
            ind.reserve(r.observed_steps);
            for (std::size_t i = 0; i < upto; ++i)
                if (outputs[i].has_measurement) ind.push_back(outputs[i].hits[mi][ci]);
            if (!ind.empty()) {
                row.record = empirical_coverage(alpha, ind);
            } else {
                row.record.alpha = alpha;
                row.record.empirical = std::nan("");
                row.record.deviation = std::nan("");
            }
            r.coverage.push_back(std::move(row));
        }
    }
    if (r.observed_steps == 0 && upto > 0)
        r.notes.push_back("no measurements in the evaluation range; coverage is undefined");

    for (std::size_t i = 0; i < upto; ++i) {
        for (std::size_t mi = 0; mi < m_count; ++mi) {
            const auto& v = outputs[i].vols[mi];
            const bool with_alpha = has_alpha_rows(ctx.methods[mi]);
            for (std::size_t ci = 0; ci < v.size(); ++ci) {
                VolumeRow row;
                row.method = ctx.method_names[mi];
                row.t = plans[i].t;
                row.has_alpha = with_alpha;
                row.alpha = with_alpha ? ctx.alphas[ci] : std::nan("");
                row.volume = v[ci].first;
                row.stderr_ = v[ci].second;
                r.volumes.push_back(std::move(row));
            }
        }
    }

    constexpr std::size_t kMaxNotes = 40;
    std::size_t suppressed = 0;
    std::size_t unattained = 0;
    for (std::size_t i = 0; i < upto; ++i) {
        unattained += outputs[i].mpi_unattained;
        for (const std::string& note : outputs[i].notes) {
            if (r.notes.size() < kMaxNotes)
                r.notes.push_back(note);
            else
                ++suppressed;
        }
    }
    if (suppressed > 0)
        r.notes.push_back("(" + std::to_string(suppressed) + " further step notes suppressed)");
    if (unattained > 0)
        r.notes.push_back("adjusted intervals fell short of the target count in " +
                          std::to_string(unattained) + " (step, level) cases");
    return r;
}

std::string format_level(double alpha) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", alpha);
    return buf;
}

}  // namespace

PipelineResult evaluate_dataset(const RunConfig& cfg, const Dataset& ds,
                                const MarginalSeries* marginals, PipelineResult* partial) {
    cfg.validate();
    const std::size_t dim = ds.spec().dim();

    PipelineResult header;
    header.alphas = cfg.alpha_grid();

    std::vector<MethodId> active;
    std::vector<std::string> active_names;
    for (const std::string& name : cfg.methods) {
        const MethodId m = method_id(name);
        if (is_hull_method(m) && dim > kMaxHullDim) {
            header.refusals.push_back(
                {name, "method '" + name + "' refused: dimension " + std::to_string(dim) +
                           " exceeds the hull limit of " + std::to_string(kMaxHullDim)});
            continue;
        }
        active.push_back(m);
        active_names.push_back(name);
    }
    if (active.empty()) {
        std::string msg = "no runnable methods remain";
        for (const Refusal& r : header.refusals) msg += "; " + r.reason;
        throw ConfigError(msg);
    }
    header.active_methods = active_names;

    const std::size_t total = ds.size();
    const std::size_t train = ds.train_count();
    if (train >= total)
        throw ConfigError("evaluation range is empty: training split covers all " +
                          std::to_string(total) + " steps");

    bool any_poly = false;
    bool need_scen = false;
    std::array<bool, 3> kind_used{false, false, false};
    for (MethodId m : active) {
        if (is_polyhedral(m)) {
            any_poly = true;
            kind_used[static_cast<int>(kind_of(m))] = true;
        }
        need_scen = need_scen || uses_scenarios(m);
    }

    // ---- Sequential prepass: covariance tracking and score windows ----
    const auto& frames = ds.frames();
    const std::size_t seed_len = std::min(train, std::max(dim + 1, std::size_t{30}));
    std::vector<Vec> seed_errors;
    seed_errors.reserve(seed_len);
    for (std::size_t i = 0; i < seed_len; ++i) {
        Vec e(dim);
        const Vec& x = *frames[i].measurement;
        for (std::size_t d = 0; d < dim; ++d) e[d] = x[d] - frames[i].forecast[d];
        seed_errors.push_back(std::move(e));
    }
    EwmaCovarianceState state = initialize_covariance(seed_errors, dim, cfg.ewma);

    std::array<std::optional<ScoreSeries>, 3> windows;
    for (int k = 0; k < 3; ++k)
        if (kind_used[k]) windows[k].emplace(cfg.window, static_cast<RegionKind>(k));

    auto push_scores = [&](const UpperTriangularFactor& f, const Vec& center, const Vec& x) {
        for (int k = 0; k < 3; ++k)
            if (kind_used[k]) windows[k]->push(score(f, center, x, static_cast<RegionKind>(k)));
    };

    for (std::size_t i = seed_len; i < train; ++i) {
        if (any_poly) push_scores(state.factor(), frames[i].forecast, *frames[i].measurement);
        Vec e(dim);
        for (std::size_t d = 0; d < dim; ++d)
            e[d] = (*frames[i].measurement)[d] - frames[i].forecast[d];
        state.update(e);
    }

    if (any_poly) {
        std::size_t have = 0;
        for (int k = 0; k < 3; ++k)
            if (kind_used[k]) have = windows[k]->size();
        if (have == 0)
            throw ConfigError(
                "no score history before the evaluation range: the training split must "
                "extend beyond the " +
                std::to_string(seed_len) + " covariance seeding steps");
        if (have < cfg.window)
            header.notes.push_back("score window holds " + std::to_string(have) + " of " +
                                   std::to_string(cfg.window) +
                                   " entries at the evaluation start");
    }

    const std::vector<double> levels = derived_marginal_levels();
    std::vector<double> level_z;
    level_z.reserve(levels.size());
    for (double l : levels) level_z.push_back(normal_quantile(l));

    std::vector<StepPlan> plans;
    plans.reserve(total - train);
    for (std::size_t i = train; i < total; ++i) {
        const ForecastFrame& fr = frames[i];
        StepPlan p(dim);
        p.t = fr.t;
        p.forecast = fr.forecast;
        p.measurement = fr.measurement;
        p.factor = state.factor();
        for (int k = 0; k < 3; ++k)
            if (kind_used[k]) p.sorted_scores[k] = windows[k]->sorted();
        if (need_scen) {
            const SymmetricMatrix cov = state.covariance();
            p.correlation = correlation_from_covariance(cov);
            if (marginals != nullptr) {
                auto it = marginals->find(fr.t);
                if (it == marginals->end())
                    throw DataError("marginal quantile curves missing for time step " +
                                    std::to_string(fr.t));
                p.marginals = it->second;
            } else {
                // Gaussian curves implied by the tracked covariance diagonal.
                std::vector<std::vector<QuantilePoint>> per_dim(dim);
                for (std::size_t d = 0; d < dim; ++d) {
                    const double sd = std::sqrt(std::max(0.0, cov(d, d)));
                    per_dim[d].reserve(levels.size());
                    for (std::size_t li = 0; li < levels.size(); ++li)
                        per_dim[d].push_back(
                            {levels[li], clamp01(fr.forecast[d] + sd * level_z[li])});
                }
                p.marginals.emplace(std::move(per_dim));
            }
        }
        const bool observed = fr.measurement.has_value();
        plans.push_back(std::move(p));
        if (observed) {
            const ForecastFrame& frm = frames[i];
            if (any_poly) push_scores(plans.back().factor, frm.forecast, *frm.measurement);
            Vec e(dim);
            for (std::size_t d = 0; d < dim; ++d)
                e[d] = (*frm.measurement)[d] - frm.forecast[d];
            state.update(e);
        }
    }

    StepContext ctx;
    ctx.dim = dim;
    ctx.alphas = header.alphas;
    ctx.methods = active;
    ctx.method_names = active_names;
    ctx.volume_samples = cfg.resolve_volume_samples(dim);
    ctx.scenario_count = cfg.scenario_count;
    ctx.trim_significance = cfg.trim_significance;
    ctx.trim_multiplier = cfg.trim_multiplier;
    ctx.seed = cfg.seed;
    header.volume_samples = ctx.volume_samples;

    // ---- Per-step work, parallel over steps ----
    std::vector<StepOutput> outputs(plans.size());
    std::size_t jobs = cfg.jobs != 0
                           ? cfg.jobs
                           : std::max<std::size_t>(1, std::thread::hardware_concurrency());
    jobs = std::min(jobs, plans.size());
    std::exception_ptr failure;
    if (jobs <= 1) {
        for (std::size_t i = 0; i < plans.size() && !failure; ++i) {
            try {
                outputs[i] = compute_step(plans[i], ctx);
            } catch (...) {
                failure = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::atomic<bool> stop{false};
        std::mutex mu;
        auto worker = [&]() {
            while (!stop.load(std::memory_order_relaxed)) {
                const std::size_t i = next.fetch_add(1);
                if (i >= plans.size()) break;
                try {
                    outputs[i] = compute_step(plans[i], ctx);
                } catch (...) {
                    std::lock_guard<std::mutex> g(mu);
                    if (!failure) failure = std::current_exception();
                    stop.store(true);
                    break;
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    if (failure) {
        if (partial != nullptr) {
            std::size_t upto = 0;
            while (upto < outputs.size() && outputs[upto].done) ++upto;
            *partial = aggregate(header, plans, outputs, upto, ctx);
        }
        std::rethrow_exception(failure);
    }
    return aggregate(std::move(header), plans, outputs, outputs.size(), ctx);
}

RunArtifacts write_reports(const PipelineResult& result, const RunConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    RunArtifacts art;

    art.coverage_path = (fs::path(cfg.output_dir) / "coverage.csv").string();
    {
        std::ofstream out(art.coverage_path);
        if (!out) throw DataError("cannot write '" + art.coverage_path + "'");
        out << "method,alpha,coverage,deviation\n";
        for (const CoverageRow& row : result.coverage) {
            out << row.method << ',';
            if (row.has_alpha) out << format_level(row.record.alpha);
            out << ',';
            if (!std::isnan(row.record.empirical)) out << format_double(row.record.empirical);
            out << ',';
            if (row.has_alpha && !std::isnan(row.record.deviation))
                out << format_double(row.record.deviation);
            out << '\n';
        }
    }

    if (result.volume_samples > 0) {
        art.volumes_path = (fs::path(cfg.output_dir) / "volumes.csv").string();
        std::ofstream out(art.volumes_path);
        if (!out) throw DataError("cannot write '" + art.volumes_path + "'");
        out << "method,t,alpha,volume,stderr\n";
        for (const VolumeRow& row : result.volumes) {
            out << row.method << ',' << row.t << ',';
            if (row.has_alpha) out << format_level(row.alpha);
            out << ',' << format_double(row.volume) << ',' << format_double(row.stderr_)
                << '\n';
        }
    }

    art.summary_path = (fs::path(cfg.output_dir) / "summary.json").string();
    {
        nlohmann::json j;
        j["config"] = {{"data_path", cfg.data_path},
                       {"data_format", to_string(cfg.data_format)},
                       {"horizons", cfg.spec.horizons},
                       {"locations", cfg.spec.locations},
                       {"dim", cfg.spec.dim()},
                       {"marginals_path", cfg.marginals_path},
                       {"methods_requested", cfg.methods},
                       {"alpha_min", cfg.alpha_min},
                       {"alpha_max", cfg.alpha_max},
                       {"alpha_step", cfg.alpha_step},
                       {"window", cfg.window},
                       {"covariance_lambda", cfg.ewma.lambda},
                       {"covariance_epsilon", cfg.ewma.epsilon},
                       {"center_errors", cfg.ewma.center_errors},
                       {"scenario_count", cfg.scenario_count},
                       {"seed", cfg.seed},
                       {"volume_samples", result.volume_samples},
                       {"trim_significance", cfg.trim_significance},
                       {"trim_multiplier", cfg.trim_multiplier},
                       {"train_fraction", cfg.train_fraction},
                       {"jobs", cfg.jobs},
                       {"output_dir", cfg.output_dir}};
        if (cfg.train_count.has_value()) j["config"]["train_count"] = *cfg.train_count;
        j["active_methods"] = result.active_methods;
        nlohmann::json refusals = nlohmann::json::array();
        for (const Refusal& r : result.refusals)
            refusals.push_back({{"method", r.method}, {"reason", r.reason}});
        j["refusals"] = refusals;
        j["alphas"] = result.alphas;
        j["eval_steps"] = result.eval_steps;
        j["observed_steps"] = result.observed_steps;
        j["notes"] = result.notes;
        nlohmann::json cov = nlohmann::json::array();
        for (const CoverageRow& row : result.coverage) {
            nlohmann::json jr;
            jr["method"] = row.method;
            if (row.has_alpha)
                jr["alpha"] = row.record.alpha;
            else
                jr["alpha"] = nullptr;
            if (std::isnan(row.record.empirical)) {
                jr["coverage"] = nullptr;
                jr["deviation"] = nullptr;
            } else {
                jr["coverage"] = row.record.empirical;
                if (row.has_alpha)
                    jr["deviation"] = row.record.deviation;
                else
                    jr["deviation"] = nullptr;
            }
            cov.push_back(std::move(jr));
        }
        j["coverage"] = cov;
        std::ofstream out(art.summary_path);
        if (!out) throw DataError("cannot write '" + art.summary_path + "'");
        out << j.dump(2) << '\n';
    }
    return art;
}

namespace {

void write_failure_manifest(const RunConfig& cfg, const PipelineResult& partial,
                            const std::exception& e) {
    try {
        namespace fs = std::filesystem;
        fs::create_directories(cfg.output_dir);
        nlohmann::json j;
        j["error"] = e.what();
        j["completed_steps"] = partial.eval_steps;
        nlohmann::json refusals = nlohmann::json::array();
        for (const Refusal& r : partial.refusals)
            refusals.push_back({{"method", r.method}, {"reason", r.reason}});
        j["refusals"] = refusals;
        j["partial_reports_written"] = !partial.coverage.empty();
        std::ofstream out(fs::path(cfg.output_dir) / "failure.json");
        if (out) out << j.dump(2) << '\n';
        if (!partial.coverage.empty()) write_reports(partial, cfg);
    } catch (...) {
        // Manifest writing must never mask the original failure.
    }
}

}  // namespace

RunArtifacts cmd_run(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.data_path.empty()) throw ConfigError("run: data.path is not set");
    Dataset ds = load_dataset(cfg.data_path, cfg.spec, cfg.data_format);
    ds.set_train_count(cfg.resolve_train_count(ds.size()));
    std::optional<MarginalSeries> series;
    if (!cfg.marginals_path.empty())
        series = load_marginals(cfg.marginals_path, ds.spec().dim());
    PipelineResult partial;
    try {
        PipelineResult result =
            evaluate_dataset(cfg, ds, series.has_value() ? &*series : nullptr, &partial);
        return write_reports(result, cfg);
    } catch (const std::exception& e) {
        write_failure_manifest(cfg, partial, e);
        throw;
    }
}

std::vector<std::string> cmd_check(const RunConfig& cfg) {
    std::vector<std::string> findings;
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        findings.push_back(e.what());
        return findings;
    }
    if (cfg.data_path.empty()) {
        findings.push_back("data.path is not set");
        return findings;
    }
    std::optional<Dataset> ds;
    try {
        ds.emplace(load_dataset(cfg.data_path, cfg.spec, cfg.data_format));
    } catch (const std::exception& e) {
        findings.push_back(std::string("dataset: ") + e.what());
        return findings;
    }
    std::size_t train = 0;
    try {
        train = cfg.resolve_train_count(ds->size());
        ds->set_train_count(train);
    } catch (const std::exception& e) {
        findings.push_back(std::string("training split: ") + e.what());
        return findings;
    }
    const std::size_t dim = ds->spec().dim();
    const auto& frames = ds->frames();

    if (train >= ds->size())
        findings.push_back("training split covers the whole series; nothing left to evaluate");
    if (train < dim + 1)
        findings.push_back("training split too small to seed the covariance (needs at least " +
                           std::to_string(dim + 1) + " steps, has " + std::to_string(train) +
                           ")");

    bool any_poly = false;
    bool need_scen = false;
    for (const std::string& name : cfg.methods) {
        const MethodId m = method_id(name);
        if (is_hull_method(m) && dim > kMaxHullDim)
            findings.push_back("method '" + name + "' will be refused: dimension " +
                               std::to_string(dim) + " exceeds the hull limit of " +
                               std::to_string(kMaxHullDim));
        else if (uses_scenarios(m))
            need_scen = true;
        if (is_polyhedral(m)) any_poly = true;
    }

    const std::size_t seed_len = std::min(train, std::max(dim + 1, std::size_t{30}));
    if (any_poly && train >= dim + 1) {
        if (train == seed_len)
            findings.push_back(
                "no score history before the evaluation range: the training split must extend "
                "beyond the " +
                std::to_string(seed_len) + " covariance seeding steps");
        else if (train - seed_len < cfg.window)
            findings.push_back("score window will hold only " + std::to_string(train - seed_len) +
                               " of " + std::to_string(cfg.window) +
                               " entries at the evaluation start");
    }

    if (need_scen && !cfg.marginals_path.empty()) {
        try {
            const MarginalSeries series = load_marginals(cfg.marginals_path, dim);
            std::size_t missing = 0;
            long long first_missing = 0;
            for (std::size_t i = train; i < frames.size(); ++i) {
                if (series.find(frames[i].t) == series.end()) {
                    if (missing == 0) first_missing = frames[i].t;
                    ++missing;
                }
            }
            if (missing > 0)
                findings.push_back("marginal quantile curves missing for " +
                                   std::to_string(missing) +
                                   " evaluation steps (first at t=" +
                                   std::to_string(first_missing) + ")");
        } catch (const std::exception& e) {
            findings.push_back(std::string("marginals: ") + e.what());
        }
    }

    if (train >= dim + 1) {
        try {
            std::vector<Vec> seed_errors;
            seed_errors.reserve(seed_len);
            for (std::size_t i = 0; i < seed_len; ++i) {
                Vec e(dim);
                for (std::size_t d = 0; d < dim; ++d)
                    e[d] = (*frames[i].measurement)[d] - frames[i].forecast[d];
                seed_errors.push_back(std::move(e));
            }
            EwmaCovarianceState state = initialize_covariance(seed_errors, dim, cfg.ewma);
            std::size_t failures = 0;
            long long first_fail = 0;
            std::size_t first_pivot = 0;
            auto probe = [&](long long t) {
                try {
                    (void)state.factor();
                } catch (const NotPositiveDefinite& npd) {
                    if (failures == 0) {
                        first_fail = t;
                        first_pivot = npd.pivot;
                    }
                    ++failures;
                }
            };
            for (std::size_t i = seed_len; i < train; ++i) {
                probe(frames[i].t);
                Vec e(dim);
                for (std::size_t d = 0; d < dim; ++d)
                    e[d] = (*frames[i].measurement)[d] - frames[i].forecast[d];
                state.update(e);
            }
            probe(frames[train - 1].t + 1);
            if (failures > 0)
                findings.push_back(
                    "covariance factorization fails at " + std::to_string(failures) +
                    " training steps even after diagonal loading (first at t=" +
                    std::to_string(first_fail) + ", pivot index " +
                    std::to_string(first_pivot) +
                    "); raise covariance.epsilon above " + format_double(cfg.ewma.epsilon));
        } catch (const std::exception& e) {
            findings.push_back(std::string("covariance: ") + e.what());
        }
    }

    return findings;
}

Dataset inject_outliers(const Dataset& ds, const OutlierSpec& spec,
                        std::vector<std::size_t>* chosen) {
    const std::size_t train = ds.train_count();
    std::vector<std::size_t> idx;
    if (!spec.indices.empty()) {
        for (std::size_t i : spec.indices) {
            if (i >= ds.size())
                throw ConfigError("outlier injection index " + std::to_string(i) +
                                  " is outside the dataset (size " +
                                  std::to_string(ds.size()) + ")");
            if (i >= train)
                throw ConfigError("outlier injection index " + std::to_string(i) +
                                  " lies in the evaluation range (training covers the first " +
                                  std::to_string(train) + " steps)");
        }
        idx = spec.indices;
        std::sort(idx.begin(), idx.end());
        if (std::adjacent_find(idx.begin(), idx.end()) != idx.end())
            throw ConfigError("duplicate outlier injection index");
    } else {
        if (spec.count > train)
            throw ConfigError("cannot place " + std::to_string(spec.count) +
                              " outliers into " + std::to_string(train) + " training steps");
        Rng rng(derive_seed(spec.seed, 0, kStreamOutlier));
        std::set<std::size_t> picked;
        while (picked.size() < spec.count) picked.insert(rng.uniform_index(train));
        idx.assign(picked.begin(), picked.end());
    }

    std::vector<ForecastFrame> frames = ds.frames();
    for (std::size_t i : idx) {
        const Vec& fc = frames[i].forecast;
        Vec m(fc.size());
        for (std::size_t d = 0; d < fc.size(); ++d) m[d] = fc[d] < 0.5 ? 1.0 : 0.0;
        frames[i].measurement = std::move(m);
    }
    if (chosen != nullptr) *chosen = idx;
    return Dataset(ds.spec(), std::move(frames), train);
}

namespace {

double coverage_at(const PipelineResult& r, const std::string& method, double alpha) {
    for (const CoverageRow& row : r.coverage) {
        if (row.method != method) continue;
        if (!row.has_alpha) return row.record.empirical;
        if (std::abs(row.record.alpha - alpha) < 1e-9) return row.record.empirical;
    }
    return std::nan("");
}

double mean_volume_at(const PipelineResult& r, const std::string& method, double alpha) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const VolumeRow& row : r.volumes) {
        if (row.method != method) continue;
        if (row.has_alpha && std::abs(row.alpha - alpha) >= 1e-9) continue;
        sum += row.volume;
        ++n;
    }
    return n > 0 ? sum / static_cast<double>(n) : std::nan("");
}

}  // namespace

RobustnessReport outlier_robustness(const RunConfig& cfg, const Dataset& ds,
                                    const MarginalSeries* marginals, const OutlierSpec& spec) {
    RobustnessReport rep;
    rep.alpha = 0.9;
    bool on_grid = false;
    for (double a : cfg.alpha_grid())
        if (std::abs(a - rep.alpha) < 1e-9) on_grid = true;
    if (!on_grid)
        throw ConfigError("outlier robustness compares at level 0.9, which the alpha grid "
                          "does not contain");

    const Dataset injected = inject_outliers(ds, spec, &rep.injected_indices);
    const PipelineResult clean = evaluate_dataset(cfg, ds, marginals);
    const PipelineResult dirty = evaluate_dataset(cfg, injected, marginals);

    for (const std::string& name : clean.active_methods) {
        RobustnessRow row;
        row.method = name;
        row.coverage_clean = coverage_at(clean, name, rep.alpha);
        row.coverage_injected = coverage_at(dirty, name, rep.alpha);
        row.coverage_delta = row.coverage_injected - row.coverage_clean;
        row.volume_clean = mean_volume_at(clean, name, rep.alpha);
        row.volume_injected = mean_volume_at(dirty, name, rep.alpha);
        row.volume_delta = row.volume_injected - row.volume_clean;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

}  // namespace polyreg
