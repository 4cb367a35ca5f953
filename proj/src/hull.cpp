#include "polyreg/hull.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "polyreg/special.hpp"

namespace polyreg {

namespace {

constexpr double kVisibleTol = 1e-12;

// Determinant of a small dense row-major matrix by Gaussian elimination with
// partial pivoting; n stays below ten here.
double small_det(std::vector<double> m, std::size_t n) {
    double det = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::fabs(m[r * n + c]) > std::fabs(m[piv * n + c])) piv = r;
        }
        if (m[piv * n + c] == 0.0) return 0.0;
        if (piv != c) {
            for (std::size_t k = 0; k < n; ++k) std::swap(m[piv * n + k], m[c * n + k]);
            det = -det;
        }
        det *= m[c * n + c];
        for (std::size_t r = c + 1; r < n; ++r) {
            double f = m[r * n + c] / m[c * n + c];
            for (std::size_t k = c; k < n; ++k) m[r * n + k] -= f * m[c * n + k];
        }
    }
    return det;
}

// Unit normal of the hyperplane through D points, via the generalized cross
// product: component c is the signed cofactor of the (D-1) x D edge matrix
// with column c removed.
Vec hyperplane_normal(const std::vector<Vec>& pts, const std::vector<int>& verts,
                      std::size_t dim) {
    Vec n(dim, 0.0);
    if (dim == 1) {
        n[0] = 1.0;
        return n;
    }
    const std::size_t rows = dim - 1;
    std::vector<double> edges(rows * dim);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            edges[r * dim + c] = pts[verts[r + 1]][c] - pts[verts[0]][c];
        }
    }
    std::vector<double> minor(rows * rows);
    double sign = 1.0;
    for (std::size_t drop = 0; drop < dim; ++drop) {
        for (std::size_t r = 0; r < rows; ++r) {
            std::size_t k = 0;
            for (std::size_t c = 0; c < dim; ++c) {
                if (c == drop) continue;
                minor[r * rows + k++] = edges[r * dim + c];
            }
        }
        n[drop] = sign * small_det(minor, rows);
        sign = -sign;
    }
    double norm = 0.0;
    for (double v : n) norm += v * v;
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) {
        throw NumericalError("quickhull: degenerate facet normal");
    }
    for (double& v : n) v /= norm;
    return n;
}

struct WorkFacet {
    std::vector<int> verts;      // D point indices; slot k's ridge drops verts[k]
    std::vector<int> neighbors;  // facet id across each ridge slot
    Vec normal;
    double offset{0.0};
    std::vector<int> outside;    // ascending point indices strictly outside
    int furthest{-1};
    double furthest_dist{0.0};
    bool alive{true};
};

class QuickhullRunner {
public:
    QuickhullRunner(const std::vector<Vec>& pts, std::size_t dim) : pts_(pts), dim_(dim) {}

    ConvexHull run() {
        build_initial_simplex();
        assign_initial_outside();
        process();
        return finish();
    }

private:
    double dist(const WorkFacet& f, int p) const {
        double s = -f.offset;
        for (std::size_t c = 0; c < dim_; ++c) s += f.normal[c] * pts_[p][c];
        return s;
    }

    // Greedy farthest-point selection against the growing affine subspace;
    // fails with the affine rank found when the cloud is flat within tolerance.
    void build_initial_simplex() {
        const int n = static_cast<int>(pts_.size());
        int v0 = 0;
        for (int i = 1; i < n; ++i) {
            if (pts_[i][0] < pts_[v0][0]) v0 = i;
        }
        std::vector<int> simplex{v0};
        std::vector<Vec> basis;  // orthonormal directions of the affine span
        while (simplex.size() < dim_ + 1) {
            int best = -1;
            double best_dist = 0.0;
            Vec best_residual;
            for (int i = 0; i < n; ++i) {
                Vec r(dim_);
                for (std::size_t c = 0; c < dim_; ++c) r[c] = pts_[i][c] - pts_[v0][c];
                for (const Vec& b : basis) {
                    double proj = 0.0;
                    for (std::size_t c = 0; c < dim_; ++c) proj += r[c] * b[c];
                    for (std::size_t c = 0; c < dim_; ++c) r[c] -= proj * b[c];
                }
                double d2 = 0.0;
                for (double v : r) d2 += v * v;
                double d = std::sqrt(d2);
                if (d > best_dist) {
                    best_dist = d;
                    best = i;
                    best_residual = std::move(r);
                }
            }
            if (best < 0 || best_dist <= kHullTol) {
                throw DegenerateInput(
                    "quickhull: points span an affine subspace of dimension " +
                        std::to_string(basis.size()) + " (need " + std::to_string(dim_) + ")",
                    basis.size());
            }
            for (double& v : best_residual) v /= best_dist;
            basis.push_back(std::move(best_residual));
            simplex.push_back(best);
        }

        interior_.assign(dim_, 0.0);
        for (int v : simplex) {
            for (std::size_t c = 0; c < dim_; ++c) interior_[c] += pts_[v][c];
        }
        for (double& v : interior_) v /= static_cast<double>(dim_ + 1);

        // One facet per dropped simplex vertex; neighbors resolved by ridge.
        std::map<std::vector<int>, std::vector<std::pair<int, int>>> ridge_users;
        for (std::size_t drop = 0; drop < simplex.size(); ++drop) {
            WorkFacet f;
            for (std::size_t k = 0; k < simplex.size(); ++k) {
                if (k != drop) f.verts.push_back(simplex[k]);
            }
            f.neighbors.assign(dim_, -1);
            orient(f);
            int id = static_cast<int>(facets_.size());
            for (std::size_t slot = 0; slot < dim_; ++slot) {
                std::vector<int> ridge;
                for (std::size_t k = 0; k < dim_; ++k) {
                    if (k != slot) ridge.push_back(f.verts[k]);
                }
                std::sort(ridge.begin(), ridge.end());
                ridge_users[ridge].push_back({id, static_cast<int>(slot)});
            }
            facets_.push_back(std::move(f));
        }
        for (const auto& [ridge, users] : ridge_users) {
            if (users.size() != 2) throw NumericalError("quickhull: inconsistent initial simplex");
            facets_[users[0].first].neighbors[users[0].second] = users[1].first;
            facets_[users[1].first].neighbors[users[1].second] = users[0].first;
        }
    }

    void orient(WorkFacet& f) const {
        f.normal = hyperplane_normal(pts_, f.verts, dim_);
        double off = 0.0;
        for (int v : f.verts) {
            double s = 0.0;
            for (std::size_t c = 0; c < dim_; ++c) s += f.normal[c] * pts_[v][c];
            off += s;
        }
        off /= static_cast<double>(f.verts.size());
        double side = -off;
        for (std::size_t c = 0; c < dim_; ++c) side += f.normal[c] * interior_[c];
        if (side > 0.0) {
            for (double& v : f.normal) v = -v;
            off = -off;
        }
        f.offset = off;
    }

    void push_outside(int facet_id, int p, double d) {
        WorkFacet& f = facets_[facet_id];
        f.outside.push_back(p);
        if (d > f.furthest_dist) {
            f.furthest_dist = d;
            f.furthest = p;
        }
        if (f.outside.size() == 1) stack_.push_back(facet_id);
    }

    void assign_initial_outside() {
        const int n = static_cast<int>(pts_.size());
        for (int p = 0; p < n; ++p) {
            for (std::size_t fid = 0; fid < facets_.size(); ++fid) {
                double d = dist(facets_[fid], p);
                if (d > kHullTol) {
                    push_outside(static_cast<int>(fid), p, d);
                    break;
                }
            }
        }
    }

    void process() {
        std::size_t apex_budget = pts_.size() + 1;
        while (!stack_.empty()) {
            int fid = stack_.back();
            stack_.pop_back();
            WorkFacet& f = facets_[fid];
            if (!f.alive || f.outside.empty()) continue;
            if (apex_budget-- == 0) {
                throw NumericalStall("quickhull: apex iterations exceeded point count",
                                     pts_.size() + 1);
            }
            insert_apex(fid, f.furthest);
        }
    }

    void insert_apex(int start, int apex) {
        // Visible region: breadth-first over neighbors of facets the apex
        // sees.  The horizon is every ridge from a visible facet to a hidden
        // one; each horizon ridge spawns one new facet through the apex.
        std::vector<int> visible{start};
        facets_[start].alive = false;
        std::vector<std::array<int, 3>> horizon;  // visible facet, slot, hidden facet
        for (std::size_t q = 0; q < visible.size(); ++q) {
            int fid = visible[q];
            for (std::size_t slot = 0; slot < dim_; ++slot) {
                int nb = facets_[fid].neighbors[slot];
                if (nb < 0) throw NumericalError("quickhull: missing neighbor");
                if (!facets_[nb].alive) continue;
                if (dist(facets_[nb], apex) > kVisibleTol) {
                    facets_[nb].alive = false;
                    visible.push_back(nb);
                } else {
                    horizon.push_back({fid, static_cast<int>(slot), nb});
                }
            }
        }

        // Hidden-side bookkeeping below distinguishes dead facets from new
        // ones by id, so remember where the new block starts.
        const int first_new = static_cast<int>(facets_.size());
        std::map<std::vector<int>, std::vector<std::pair<int, int>>> ridge_users;
        for (const auto& [vis, slot, hidden] : horizon) {
            WorkFacet nf;
            for (std::size_t k = 0; k < dim_; ++k) {
                if (static_cast<int>(k) != slot) nf.verts.push_back(facets_[vis].verts[k]);
            }
            nf.verts.push_back(apex);
            nf.neighbors.assign(dim_, -1);
            orient(nf);

            int id = static_cast<int>(facets_.size());
            // Slot opposite the apex keeps the hidden facet as neighbor.
            nf.neighbors[dim_ - 1] = hidden;
            for (std::size_t k = 0; k + 1 < dim_; ++k) {
                std::vector<int> ridge;
                for (std::size_t m = 0; m < dim_; ++m) {
                    if (m != k) ridge.push_back(nf.verts[m]);
                }
                std::sort(ridge.begin(), ridge.end());
                ridge_users[ridge].push_back({id, static_cast<int>(k)});
            }
            facets_.push_back(std::move(nf));

            // Patch the hidden facet's slot that pointed at the dead facet.
            WorkFacet& hf = facets_[hidden];
            bool patched = false;
            for (std::size_t k = 0; k < dim_; ++k) {
                if (hf.neighbors[k] == vis) {
                    hf.neighbors[k] = id;
                    patched = true;
                    break;
                }
            }
            if (!patched) throw NumericalError("quickhull: horizon neighbor patch failed");
        }
        for (const auto& [ridge, users] : ridge_users) {
            if (users.size() != 2) throw NumericalError("quickhull: open ridge among new facets");
            facets_[users[0].first].neighbors[users[0].second] = users[1].first;
            facets_[users[1].first].neighbors[users[1].second] = users[0].first;
        }

        // Re-home the orphaned outside points of the dead facets; ascending
        // index order keeps the lowest-index tie rule for farthest selection.
        std::vector<int> orphans;
        for (int fid : visible) {
            for (int p : facets_[fid].outside) {
                if (p != apex) orphans.push_back(p);
            }
            facets_[fid].outside.clear();
        }
        std::sort(orphans.begin(), orphans.end());
        orphans.erase(std::unique(orphans.begin(), orphans.end()), orphans.end());
        const int total = static_cast<int>(facets_.size());
        for (int p : orphans) {
            for (int fid = first_new; fid < total; ++fid) {
                double d = dist(facets_[fid], p);
                if (d > kHullTol) {
                    push_outside(fid, p, d);
                    break;
                }
            }
        }
    }

    ConvexHull finish() {
        ConvexHull hull;
        hull.dim = dim_;
        std::vector<int> used;
        for (const WorkFacet& f : facets_) {
            if (!f.alive) continue;
            used.insert(used.end(), f.verts.begin(), f.verts.end());
        }
        std::sort(used.begin(), used.end());
        used.erase(std::unique(used.begin(), used.end()), used.end());
        std::map<int, int> local;
        for (int p : used) {
            local[p] = static_cast<int>(hull.vertices.size());
            hull.vertices.push_back(pts_[p]);
            hull.source.push_back(p);
        }
        for (const WorkFacet& f : facets_) {
            if (!f.alive) continue;
            HullFacet hf;
            hf.vertices.reserve(dim_);
            for (int v : f.verts) hf.vertices.push_back(local[v]);
            hf.normal = f.normal;
            hf.offset = f.offset;
            hull.facets.push_back(std::move(hf));
        }
        return hull;
    }

    const std::vector<Vec>& pts_;
    std::size_t dim_;
    Vec interior_;
    std::vector<WorkFacet> facets_;
    std::vector<int> stack_;
};

ConvexHull hull_1d(const std::vector<Vec>& pts) {
    int lo = 0, hi = 0;
    for (int i = 1; i < static_cast<int>(pts.size()); ++i) {
        if (pts[i][0] < pts[lo][0]) lo = i;
        if (pts[i][0] > pts[hi][0]) hi = i;
    }
    if (pts[hi][0] - pts[lo][0] <= kHullTol) {
        throw DegenerateInput("quickhull: all points coincide", 0);
    }
    ConvexHull hull;
    hull.dim = 1;
    hull.vertices = {pts[lo], pts[hi]};
    hull.source = {lo, hi};
    hull.facets.push_back({{0}, Vec{-1.0}, -pts[lo][0]});
    hull.facets.push_back({{1}, Vec{1.0}, pts[hi][0]});
    return hull;
}

}  // namespace

ConvexHull quickhull(const ScenarioSet& points) {
    const std::size_t d = points.dim;
    if (d == 0 || points.points.empty()) {
        throw std::invalid_argument("quickhull: empty scenario set");
    }
    if (d > kMaxHullDim) {
        throw DimensionTooHigh("quickhull: dimension " + std::to_string(d) +
                                   " exceeds the hull construction limit of " +
                                   std::to_string(kMaxHullDim),
                               d, kMaxHullDim);
    }
    if (d == 1) return hull_1d(points.points);
    return QuickhullRunner(points.points, d).run();
}

bool facet_contains(const ConvexHull& hull, const Vec& y, double tol) {
    if (y.size() != hull.dim) throw std::invalid_argument("facet_contains: dimension mismatch");
    for (const HullFacet& f : hull.facets) {
        double s = -f.offset;
        for (std::size_t c = 0; c < hull.dim; ++c) s += f.normal[c] * y[c];
        if (s > tol) return false;
    }
    return true;
}

namespace {

constexpr double kLpFeasTol = 1e-9;
constexpr double kLpPivotTol = 1e-11;

}  // namespace

bool contains_lp(const ScenarioSet& scenarios, const Vec& y) {
    const std::size_t d = scenarios.dim;
    const std::size_t s = scenarios.points.size();
    if (s == 0) throw std::invalid_argument("contains_lp: empty scenario set");
    if (y.size() != d) throw std::invalid_argument("contains_lp: dimension mismatch");

    // Phase-1 tableau for A theta = y, 1^T theta = 1, theta >= 0: one
    // artificial per row, minimize their sum.  rows m = d+1, columns are the
    // s real variables then m artificials then the RHS.
    const std::size_t m = d + 1;
    const std::size_t cols = s + m + 1;
    std::vector<double> t(m * cols, 0.0);
    auto at = [&](std::size_t r, std::size_t c) -> double& { return t[r * cols + c]; };

    for (std::size_t j = 0; j < s; ++j) {
        for (std::size_t r = 0; r < d; ++r) at(r, j) = scenarios.points[j][r];
        at(d, j) = 1.0;
    }
    for (std::size_t r = 0; r < d; ++r) at(r, cols - 1) = y[r];
    at(d, cols - 1) = 1.0;
    for (std::size_t r = 0; r < m; ++r) {
        if (at(r, cols - 1) < 0.0) {
            for (std::size_t c = 0; c < cols; ++c) at(r, c) = -at(r, c);
        }
        at(r, s + r) = 1.0;
    }

    std::vector<std::size_t> basis(m);
    for (std::size_t r = 0; r < m; ++r) basis[r] = s + r;
    std::vector<bool> retired(m, false);  // artificials never re-enter once out

    // Reduced costs for minimizing the artificial sum with the artificial
    // basis: z_j = -sum_r a_rj for real columns, objective = sum of RHS.
    std::vector<double> red(s + m, 0.0);
    double obj = 0.0;
    for (std::size_t j = 0; j < s; ++j) {
        double acc = 0.0;
        for (std::size_t r = 0; r < m; ++r) acc += at(r, j);
        red[j] = -acc;
    }
    for (std::size_t r = 0; r < m; ++r) obj += at(r, cols - 1);

    const std::size_t max_iter = 2000 + 50 * (s + m);
    for (std::size_t iter = 0; iter <= max_iter; ++iter) {
        if (obj < kLpFeasTol) return true;

        // Bland: lowest-index eligible column enters.
        std::size_t enter = cols;
        for (std::size_t j = 0; j < s + m; ++j) {
            if (j >= s && retired[j - s]) continue;
            if (red[j] < -kLpFeasTol) {
                enter = j;
                break;
            }
        }
        if (enter == cols) return obj < kLpFeasTol;  // optimal

        // Ratio test; ties by lowest basis variable index (Bland).
        std::size_t leave = m;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < m; ++r) {
            double a = at(r, enter);
            if (a > kLpPivotTol) {
                double ratio = at(r, cols - 1) / a;
                if (ratio < best_ratio - 1e-15 ||
                    (ratio < best_ratio + 1e-15 && (leave == m || basis[r] < basis[leave]))) {
                    best_ratio = ratio;
                    leave = r;
                }
            }
        }
        if (leave == m) {
            // Phase-1 is bounded below; no leaving row means a numerical dead end.
            throw NumericalStall("contains_lp: no admissible pivot row", iter);
        }
        if (iter == max_iter) {
            throw NumericalStall("contains_lp: iteration budget exhausted", iter);
        }

        // Pivot.
        const double piv = at(leave, enter);
        for (std::size_t c = 0; c < cols; ++c) at(leave, c) /= piv;
        for (std::size_t r = 0; r < m; ++r) {
            if (r == leave) continue;
            double f = at(r, enter);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < cols; ++c) at(r, c) -= f * at(leave, c);
        }
        double rc = red[enter];
        for (std::size_t j = 0; j < s + m; ++j) red[j] -= rc * at(leave, j);
        obj += rc * at(leave, cols - 1);
        if (basis[leave] >= s) retired[basis[leave] - s] = true;
        basis[leave] = enter;
        if (obj < 0.0) obj = 0.0;
    }
    return false;  // unreachable
}

double chi_square_quantile(std::size_t dof, double p) {
    if (dof < 1) throw std::invalid_argument("chi_square_quantile: dof must be at least 1");
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("chi_square_quantile: p must lie in (0,1)");
    }
    const double a = static_cast<double>(dof) / 2.0;
    auto cdf = [&](double x) { return regularized_gamma_p(a, x / 2.0); };
    auto pdf = [&](double x) {
        if (x <= 0.0) return 0.0;
        return std::exp((a - 1.0) * std::log(x / 2.0) - x / 2.0 - std::lgamma(a)) / 2.0;
    };

    // Wilson-Hilferty starting point, then Newton confined to a bracket.
    const double k = static_cast<double>(dof);
    const double z = normal_quantile(p);
    double x = k * std::pow(1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k)), 3);
    if (!(x > 0.0)) x = 1e-8;

    double lo = 0.0;
    double hi = std::max(2.0 * x, k + 20.0 * std::sqrt(2.0 * k) + 20.0);
    for (int i = 0; i < 200 && cdf(hi) < p; ++i) hi *= 2.0;
    x = std::min(std::max(x, 1e-12), hi);

    for (int iter = 0; iter < 200; ++iter) {
        double err = cdf(x) - p;
        if (err > 0.0)
            hi = x;
        else
            lo = x;
        if (std::fabs(err) < 1e-14) break;
        double slope = pdf(x);
        double next = slope > 0.0 ? x - err / slope : x;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - x) < 1e-13 * std::max(1.0, x)) {
            x = next;
            break;
        }
        x = next;
    }
    return x;
}

ScenarioSet trim_outliers(const ScenarioSet& scenarios, const SymmetricMatrix& sigma,
                          const Vec& center, double significance, double multiplier) {
    const std::size_t d = scenarios.dim;
    if (sigma.dim() != d || center.size() != d) {
        throw std::invalid_argument("trim_outliers: dimension mismatch");
    }
    if (!(significance > 0.0 && significance < 1.0)) {
        throw std::invalid_argument("trim_outliers: significance must lie in (0,1)");
    }
    if (!(multiplier > 0.0)) {
        throw std::invalid_argument("trim_outliers: multiplier must be positive");
    }
    UpperTriangularFactor f = cholesky_inverse_factor(sigma);
    const double cutoff = multiplier * chi_square_quantile(d, 1.0 - significance);

    ScenarioSet out;
    out.dim = d;
    out.seed = scenarios.seed;
    out.time_step = scenarios.time_step;
    out.correlation = scenarios.correlation;
    Vec diff(d);
    for (const Vec& p : scenarios.points) {
        for (std::size_t c = 0; c < d; ++c) diff[c] = p[c] - center[c];
        Vec y = f.apply(diff);
        double m2 = 0.0;
        for (double v : y) m2 += v * v;
        if (m2 <= cutoff) out.points.push_back(p);
    }
    return out;
}

double hull_volume(const ConvexHull& hull, std::size_t* degenerate_facets) {
    const std::size_t d = hull.dim;
    Vec apex(d, 0.0);
    for (const Vec& v : hull.vertices) {
        for (std::size_t c = 0; c < d; ++c) apex[c] += v[c];
    }
    for (double& v : apex) v /= static_cast<double>(hull.vertices.size());

    double dfact = 1.0;
    for (std::size_t i = 2; i <= d; ++i) dfact *= static_cast<double>(i);

    std::size_t degenerate = 0;
    double volume = 0.0;
    std::vector<double> m(d * d);
    for (const HullFacet& f : hull.facets) {
        double hadamard = 1.0;
        for (std::size_t r = 0; r < d; ++r) {
            double row2 = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                double e = hull.vertices[f.vertices[r]][c] - apex[c];
                m[r * d + c] = e;
                row2 += e * e;
            }
            hadamard *= std::sqrt(row2);
        }
        double det = std::fabs(small_det(m, d));
        if (det <= 1e-12 * hadamard) {
            ++degenerate;
            continue;
        }
        volume += det / dfact;
    }
    if (degenerate_facets) *degenerate_facets = degenerate;
    return volume;
}

std::string hull_to_json(const ConvexHull& hull) {
    nlohmann::json j;
    j["dim"] = hull.dim;
    j["vertices"] = hull.vertices;
    j["source"] = hull.source;
    nlohmann::json facets = nlohmann::json::array();
    for (const HullFacet& f : hull.facets) {
        facets.push_back({{"vertices", f.vertices}, {"normal", f.normal}, {"offset", f.offset}});
    }
    j["facets"] = std::move(facets);
    return j.dump(2);
}

ConvexHull hull_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(std::string("hull JSON parse error: ") + e.what());
    }
    try {
        ConvexHull hull;
        hull.dim = j.at("dim").get<std::size_t>();
        hull.vertices = j.at("vertices").get<std::vector<Vec>>();
        if (j.contains("source")) hull.source = j.at("source").get<std::vector<int>>();
        for (const auto& jf : j.at("facets")) {
            HullFacet f;
            f.vertices = jf.at("vertices").get<std::vector<int>>();
            f.normal = jf.at("normal").get<Vec>();
            f.offset = jf.at("offset").get<double>();
            if (f.vertices.size() != hull.dim || f.normal.size() != hull.dim) {
                throw DataError("hull JSON: facet arity mismatch");
            }
            for (int v : f.vertices) {
                if (v < 0 || v >= static_cast<int>(hull.vertices.size())) {
                    throw DataError("hull JSON: facet vertex index out of range");
                }
            }
            hull.facets.push_back(std::move(f));
        }
        return hull;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("hull JSON: ") + e.what());
    }
}

}  // namespace polyreg
