#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "feigen/raster.hpp"

namespace feigen {

/// Small deterministic generator (splitmix64) so sampled probes give the same points
/// on every platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Inclusion relations between the filled Julia set, the basin and their rescalings.

struct InclusionTally {
    std::int64_t checked = 0;       // determined samples the statement applied to
    std::int64_t violations = 0;
    std::int64_t undetermined = 0;  // samples excluded because some status was Undetermined
};

struct InclusionReport {
    std::int64_t samples = 0;
    InclusionTally julia_scaling;   // (a) z in K  =>  lambda z in K
    InclusionTally julia_in_basin;  // (b) z in K  =>  z / lambda^n in basin, n <= n_max
    InclusionTally basin_scaling;   // (c) z in basin  =>  lambda z in basin
    InclusionTally basin_orbit;     // (d) z/lambda^(n+1) in basin  <=>  z/lambda^n and f(z/lambda^n) in basin
    std::int64_t undetermined_samples = 0;  // samples with any Undetermined status
    double sample_radius = 0.0;

    std::int64_t total_violations() const {
        return julia_scaling.violations + julia_in_basin.violations + basin_scaling.violations +
               basin_orbit.violations;
    }
    double undetermined_fraction() const { return samples ? double(undetermined_samples) / samples : 0.0; }
};

/// Each sample draws two points. The basin statements (c), (d) use a point uniform in
/// the square |Re z|, |Im z| <= sample_radius (default 2 x0/lambda, which contains W).
/// K(f) has no interior and almost no uniform sample lands near it, so (a), (b) use a
/// point uniform in the strip |Re z| <= 1.1, |Im z| <= 0.1 around K(f) on the real
/// axis; membership there is decided with twice the usual orbit budget, so that the
/// hypothesis uses a tighter approximation of K(f) than the conclusion in (a).
///
/// For (d), the relation "z/lambda in the basin iff f(z) in the basin" (for z in the
/// basin) is chained n_max times; it is the step from which the orbit description of
/// the nested intersection of the lambda^n-scaled basins follows.
inline InclusionReport inclusion_check(const RenormFixedPoint& fp, const ExtensionConfig& cfg, int n_max,
                                       std::int64_t samples, std::uint64_t seed = 1, double sample_radius = 0.0) {
    InclusionReport rep;
    rep.samples = samples;
    const double lam = fp.lambda;
    const double R = sample_radius > 0.0 ? sample_radius : 2.0 * fp.x0 / lam;
    rep.sample_radius = R;
    ExtensionConfig strict = cfg;
    strict.julia_iter_max = 2 * cfg.julia_iter_max;
    SplitMix64 rng(seed);
    for (std::int64_t i = 0; i < samples; ++i) {
        const cplx z{rng.uniform(-R, R), rng.uniform(-R, R)};
        const cplx zk{rng.uniform(-1.1, 1.1), rng.uniform(-0.1, 0.1)};
        bool any_undet = false;

        const JuliaStatus jz = in_filled_julia(fp, strict, zk).status;
        if (jz == JuliaStatus::Undetermined) {
            any_undet = true;
            ++rep.julia_scaling.undetermined;
            ++rep.julia_in_basin.undetermined;
        } else if (jz == JuliaStatus::Inside) {
            const JuliaStatus jl = in_filled_julia(fp, cfg, lam * zk).status;
            if (jl == JuliaStatus::Undetermined) {
                any_undet = true;
                ++rep.julia_scaling.undetermined;
            } else {
                ++rep.julia_scaling.checked;
                if (jl != JuliaStatus::Inside) ++rep.julia_scaling.violations;
            }
            bool undet = false, bad = false;
            for (int n = 0; n <= n_max; ++n) {
                const BasinStatus b = classify_basin(fp, cfg, zk / std::pow(lam, n)).status;
                if (b == BasinStatus::Undetermined) undet = true;
                else if (b != BasinStatus::Converged) bad = true;
            }
            if (bad) {
                ++rep.julia_in_basin.checked;
                ++rep.julia_in_basin.violations;
            } else if (undet) {
                any_undet = true;
                ++rep.julia_in_basin.undetermined;
            } else {
                ++rep.julia_in_basin.checked;
            }
        }

        // basin status of z / lambda^n for n = 0 .. n_max + 1
        std::vector<BasinStatus> up(n_max + 2);
        for (int n = 0; n <= n_max + 1; ++n) up[n] = classify_basin(fp, cfg, z / std::pow(lam, n)).status;

        if (up[0] == BasinStatus::Undetermined) {
            any_undet = true;
            ++rep.basin_scaling.undetermined;
        } else if (up[0] == BasinStatus::Converged) {
            const BasinStatus down = classify_basin(fp, cfg, lam * z).status;
            if (down == BasinStatus::Undetermined) {
                any_undet = true;
                ++rep.basin_scaling.undetermined;
            } else {
                ++rep.basin_scaling.checked;
                if (down != BasinStatus::Converged) ++rep.basin_scaling.violations;
            }
        }

        for (int n = 0; n <= n_max; ++n) {
            if (up[n] != BasinStatus::Converged) break;  // relation applies to points of the basin
            const cplx w = z / std::pow(lam, n);
            const EvalOutcome fw = eval_fhat(fp, cfg, w);
            const BasinStatus img = fw.ok() ? classify_basin(fp, cfg, fw.w).status : BasinStatus::Undetermined;
            if (img == BasinStatus::Undetermined || up[n + 1] == BasinStatus::Undetermined) {
                any_undet = true;
                ++rep.basin_orbit.undetermined;
                break;
            }
            ++rep.basin_orbit.checked;
            if ((img == BasinStatus::Converged) != (up[n + 1] == BasinStatus::Converged)) ++rep.basin_orbit.violations;
        }
        if (any_undet) ++rep.undetermined_samples;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Nesting of puzzle pieces across depths.

namespace detail {

inline std::vector<char> touches_border(const ComponentLabels& c) {
    std::vector<char> t(c.count, 0);
    for (int col = 0; col < c.width; ++col) {
        for (int row : {0, c.height - 1}) {
            const int l = c.labels[static_cast<std::size_t>(row) * c.width + col];
            if (l >= 0) t[l] = 1;
        }
    }
    for (int row = 0; row < c.height; ++row) {
        for (int col : {0, c.width - 1}) {
            const int l = c.labels[static_cast<std::size_t>(row) * c.width + col];
            if (l >= 0) t[l] = 1;
        }
    }
    return t;
}

}  // namespace detail

/// One depth-(n+1) piece and the depth-n piece that holds most of its pixels.
struct NestedPair {
    int inner = -1;           // label in the deeper raster
    int outer = -1;           // majority label in the shallower raster, -1 if none
    int inner_pixels = 0;
    int outer_labels = 0;     // distinct shallower labels under the inner piece
    bool inner_interior = false;
    bool outer_interior = false;
};

struct NestingReport {
    int depth = 0;             // pieces of depth+1 checked against depth
    int components = 0;        // interior pieces of the deeper raster with any classified pixel under them
    int nested = 0;
    int components_all = 0;    // same count including pieces cut by the window edge
    int nested_all = 0;
    int vacuous_components = 0;  // interior pieces lying entirely over excluded pixels
    std::int64_t excluded_pixels = 0;  // deeper piece pixels over SkeletonBand/Unknown/Exterior
    double unknown_fraction_outer = 0.0;
    double unknown_fraction_inner = 0.0;
    bool vacuous = false;      // nothing to check
    std::vector<NestedPair> pairs;

    double nested_fraction() const { return components ? double(nested) / components : 1.0; }
    double nested_fraction_all() const { return components_all ? double(nested_all) / components_all : 1.0; }
};

/// Compares the pieces of puzzle(depth+1) with those of puzzle(depth) on the same
/// window. Each interior piece of the deeper puzzle is nested when all of its pixels
/// that are Plus/Minus in the shallower raster carry one and the same piece label.
inline NestingReport nesting_from_rasters(const Raster& outer, const Raster& inner, int depth = 0) {
    NestingReport rep;
    rep.depth = depth;
    const ComponentLabels co = square_components(outer);
    const ComponentLabels ci = square_components(inner);
    const auto border_o = detail::touches_border(co);
    const auto border_i = detail::touches_border(ci);
    const auto ho = color_histogram(outer);
    const auto hi = color_histogram(inner);
    rep.unknown_fraction_outer = double(ho[static_cast<int>(CellColor::Unknown)]) / outer.size();
    rep.unknown_fraction_inner = double(hi[static_cast<int>(CellColor::Unknown)]) / inner.size();

    std::vector<std::map<int, int>> under(ci.count);
    std::vector<int> size(ci.count, 0);
    std::vector<std::int64_t> excluded(ci.count, 0);
    for (std::size_t idx = 0; idx < inner.size(); ++idx) {
        const int li = ci.labels[idx];
        if (li < 0) continue;
        ++size[li];
        const int lo = co.labels[idx];
        if (lo < 0) ++excluded[li];
        else ++under[li][lo];
    }
    for (int li = 0; li < ci.count; ++li) {
        NestedPair p;
        p.inner = li;
        p.inner_pixels = size[li];
        p.inner_interior = !border_i[li];
        p.outer_labels = static_cast<int>(under[li].size());
        int best = 0;
        for (const auto& [lo, cnt] : under[li]) {
            if (cnt > best) {
                best = cnt;
                p.outer = lo;
            }
        }
        p.outer_interior = p.outer >= 0 && !border_o[p.outer];
        rep.pairs.push_back(p);
        if (p.outer_labels > 0) {
            ++rep.components_all;
            if (p.outer_labels == 1) ++rep.nested_all;
        }
        if (!p.inner_interior) continue;
        rep.excluded_pixels += excluded[li];
        if (p.outer_labels == 0) {
            ++rep.vacuous_components;
            continue;
        }
        ++rep.components;
        if (p.outer_labels == 1) ++rep.nested;
    }
    rep.vacuous = rep.components == 0;
    return rep;
}

inline NestingReport puzzle_nesting_check(const RenormFixedPoint& fp, const ExtensionConfig& cfg, const Window& w,
                                          int res, int depth = 0, int workers = 1) {
    const Raster outer = render_raster(fp, cfg, w, res, res, RenderMode::Puzzle, depth, workers);
    const Raster inner = render_raster(fp, cfg, w, res, res, RenderMode::Puzzle, depth + 1, workers);
    return nesting_from_rasters(outer, inner, depth);
}

// ---------------------------------------------------------------------------
// Size statistics of nested pieces.

namespace detail {

/// Diameter of a set of pixel centers (in pixel units), via the convex hull.
inline double pixel_set_diameter(std::vector<std::pair<int, int>> pts) {
    if (pts.size() < 2) return 0.0;
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    auto cross = [](const std::pair<int, int>& o, const std::pair<int, int>& a, const std::pair<int, int>& b) {
        return static_cast<std::int64_t>(a.first - o.first) * (b.second - o.second) -
               static_cast<std::int64_t>(a.second - o.second) * (b.first - o.first);
    };
    std::vector<std::pair<int, int>> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= 0) --k;
        hull[k++] = pts[i - 1];
    }
    hull.resize(k > 1 ? k - 1 : k);
    std::int64_t best = 0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        for (std::size_t j = i + 1; j < hull.size(); ++j) {
            const std::int64_t dx = hull[i].first - hull[j].first;
            const std::int64_t dy = hull[i].second - hull[j].second;
            best = std::max(best, dx * dx + dy * dy);
        }
    }
    return std::sqrt(static_cast<double>(best));
}

inline std::vector<double> component_diameters(const ComponentLabels& c) {
    std::vector<std::vector<std::pair<int, int>>> pts(c.count);
    for (int row = 0; row < c.height; ++row)
        for (int col = 0; col < c.width; ++col) {
            const int l = c.labels[static_cast<std::size_t>(row) * c.width + col];
            if (l >= 0) pts[l].emplace_back(row, col);
        }
    std::vector<double> d(c.count);
    for (int l = 0; l < c.count; ++l) d[l] = pixel_set_diameter(std::move(pts[l]));
    return d;
}

}  // namespace detail

struct PieceRatio {
    int inner = -1;
    int outer = -1;
    double inner_diameter = 0.0;  // complex-plane units
    double outer_diameter = 0.0;
    double ratio = 0.0;           // outer / inner
};

struct ConjectureStats {
    double min_ratio = 0.0;         // min diam(Q)/diam(lambda P) over interior nested pairs
    double max_diameter = 0.0;      // max diam(P) over interior depth-0 pieces, complex units
    double min_piece_diameter = 0.0;  // pieces smaller than this are not paired
    int pairs_considered = 0;
    Window window;
    double unknown_fraction = 0.0;
    std::vector<PieceRatio> table;
};

/// Pairs each interior piece lambda P of puzzle(1) with the interior piece Q of
/// puzzle(0) covering most of it. Pieces with diameter below min_piece_frac times the
/// window width are skipped; at that size pixel diameters are too coarse to compare.
inline ConjectureStats conjecture_stats(const RenormFixedPoint& fp, const ExtensionConfig& cfg, const Window& w,
                                        int res, double min_piece_frac = 0.05, int workers = 1) {
    const Raster outer = render_raster(fp, cfg, w, res, res, RenderMode::Puzzle, 0, workers);
    const Raster inner = render_raster(fp, cfg, w, res, res, RenderMode::Puzzle, 1, workers);
    const NestingReport nest = nesting_from_rasters(outer, inner, 0);
    const ComponentLabels co = square_components(outer);
    const ComponentLabels ci = square_components(inner);
    const auto border_o = detail::touches_border(co);
    const auto d_o = detail::component_diameters(co);
    const auto d_i = detail::component_diameters(ci);
    const double px = w.width / res;

    ConjectureStats st;
    st.window = w;
    st.min_piece_diameter = min_piece_frac * w.width;
    st.unknown_fraction = nest.unknown_fraction_outer;
    st.min_ratio = INFINITY;
    for (int l = 0; l < co.count; ++l)
        if (!border_o[l]) st.max_diameter = std::max(st.max_diameter, d_o[l] * px);
    for (const NestedPair& p : nest.pairs) {
        if (!p.inner_interior || !p.outer_interior) continue;
        const double di = d_i[p.inner] * px;
        const double dq = d_o[p.outer] * px;
        if (di < st.min_piece_diameter || dq < st.min_piece_diameter) continue;
        PieceRatio pr{p.inner, p.outer, di, dq, dq / di};
        st.table.push_back(pr);
        st.min_ratio = std::min(st.min_ratio, pr.ratio);
    }
    st.pairs_considered = static_cast<int>(st.table.size());
    if (st.table.empty()) st.min_ratio = 0.0;
    return st;
}

// ---------------------------------------------------------------------------
// Density of the basin near the corner point.

struct DeepProbeRow {
    double r = 0.0;
    double best_radius = 0.0;
    double ratio = 0.0;  // best_radius / r
    cplx best_center{};
};

namespace detail {

/// A disk passes when its center and 16 points on its boundary are all Converged.
inline bool disk_converged(const RenormFixedPoint& fp, const ExtensionConfig& cfg, cplx c, double rad) {
    if (!classify_basin(fp, cfg, c).converged()) return false;
    for (int k = 0; k < 16; ++k) {
        const cplx p = c + std::polar(rad, 2.0 * std::numbers::pi * k / 16.0);
        if (!classify_basin(fp, cfg, p).converged()) return false;
    }
    return true;
}

}  // namespace detail

/// For each radius r, a grid search over centers in the ball B(x1, r) for the largest
/// disk inside the ball that passes the 16-point Converged test. Candidate radii for
/// a center shrink geometrically from its distance to the ball boundary.
inline std::vector<DeepProbeRow> deep_point_probe(const RenormFixedPoint& fp, const ExtensionConfig& cfg, cplx x1,
                                                  const std::vector<double>& radii, int grid = 16) {
    std::vector<DeepProbeRow> rows;
    for (double r : radii) {
        DeepProbeRow row;
        row.r = r;
        for (int i = 0; i < grid; ++i) {
            for (int j = 0; j < grid; ++j) {
                const cplx off{(2.0 * (i + 0.5) / grid - 1.0) * r, (2.0 * (j + 0.5) / grid - 1.0) * r};
                const double room = r - std::abs(off);
                if (room <= row.best_radius) continue;
                const cplx c = x1 + off;
                for (double rad = room; rad > row.best_radius; rad *= 0.85) {
                    if (detail::disk_converged(fp, cfg, c, rad)) {
                        row.best_radius = rad;
                        row.best_center = c;
                        break;
                    }
                }
            }
        }
        row.ratio = row.best_radius / r;
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Connectivity of the filled Julia set restricted to rescaled copies of W.

struct LcRow {
    int n = 0;
    Window window;
    std::int64_t pixels = 0;      // Inside pixels in lambda^n W
    int components = 0;
    int small_components = 0;     // components of at most 2 pixels, reported as resolution artifacts
    std::int64_t unknown_pixels = 0;
    bool vacuous = false;
    bool saturated = false;       // every pixel of the window is Inside
};

/// For n = 0..n_max, rasterizes the points z of the window lambda^n * base whose orbit
/// stays in W (the filled Julia set) and with z / lambda^n in W, and counts their
/// 4-connected components. The orbit budget is julia_iter_max at every depth; at deep
/// levels the finite-budget set can fill the whole window.
inline std::vector<LcRow> local_connectivity_evidence(const RenormFixedPoint& fp, const ExtensionConfig& cfg,
                                                      int n_max, int res, const Window& base, int workers = 1) {
    std::vector<LcRow> rows;
    for (int n = 0; n <= n_max; ++n) {
        const double scale = std::pow(fp.lambda, n);
        const Window w = base.scaled(scale);
        const Raster r = rasterize(w, res, res, workers, [&](cplx z) {
            const JuliaResult j = in_filled_julia(fp, cfg, z);
            if (j.status == JuliaStatus::Undetermined) return CellSample{CellColor::Unknown, j.steps};
            if (j.status == JuliaStatus::Escaped) return CellSample{CellColor::Exterior, j.steps};
            const Tristate in = in_w(fp, cfg, z / scale);
            if (!in) return CellSample{CellColor::Unknown, j.steps};
            return CellSample{*in ? CellColor::Inside : CellColor::Exterior, j.steps};
        });
        const ComponentLabels c = connected_components(r, [](CellColor x) { return x == CellColor::Inside; });
        LcRow row;
        row.n = n;
        row.window = w;
        row.components = c.count;
        std::vector<int> sz(c.count, 0);
        for (int l : c.labels) {
            if (l >= 0) {
                ++sz[l];
                ++row.pixels;
            }
        }
        for (int s : sz) row.small_components += s <= 2 ? 1 : 0;
        row.unknown_pixels = color_histogram(r)[static_cast<int>(CellColor::Unknown)];
        row.vacuous = c.count == 0;
        row.saturated = row.pixels == static_cast<std::int64_t>(r.size());
        rows.push_back(row);
    }
    return rows;
}

}  // namespace feigen
