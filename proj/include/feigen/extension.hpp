#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

#include "feigen/fixed_point.hpp"

namespace feigen {

/// Budgets and thresholds for evaluating the maximal extension and classifying orbits.
struct ExtensionConfig {
    int depth_max = 64;         // nesting budget of the recursion
    double rho = 1.0;           // series is used directly for |z| <= rho
    double basin_eps = 1e-3;    // orbit counts as converged within this distance of x0
    int iter_max = 200;         // orbit budget for basin classification
    int julia_iter_max = 10;    // orbit budget for filled Julia membership
    double escape_bound = 0.0;  // B
    double skel_tol = 1e-3;     // |Im f| below this is the skeleton band
    double skel_band_px = 0.75; // rasters also band cells this many pixels from the skeleton
    std::int64_t call_budget = 20000;  // total series evaluations per top-level query
    double core_radius = 0.0;   // radius of a disk around 0 known to lie in W; 0 = unknown
    double orbit_tol = 1e-10;   // relative uncertainty attached to a starting point
};

/// True when w lies on one of the two real slits removed from the plane.
inline bool on_slit(cplx w, double lambda, double tol = 0.0) {
    return std::abs(w.imag()) <= tol && (w.real() <= -1.0 / lambda || w.real() >= 1.0 / (lambda * lambda));
}

/// Largest radius r <= 0.98 rho (on a 0.01 grid, less 1%) such that the image of the
/// circle |z| = r under the series avoids the slits. The image of the closed disk then
/// avoids them too, so the disk lies in W.
inline double compute_core_radius(const RenormFixedPoint& fp) {
    const auto& s = fp.series;
    const double lam = fp.lambda;
    const double sector = std::numbers::pi / fp.ell();
    constexpr int kAngles = 512;
    auto circle_ok = [&](double r) {
        cplx prev = s(cplx{r, 0.0});
        if (on_slit(cplx{prev.real(), 0.0}, lam)) return false;
        for (int i = 1; i <= kAngles; ++i) {
            const cplx cur = s(std::polar(r, sector * i / kAngles));
            if ((prev.imag() <= 0.0) != (cur.imag() <= 0.0) || cur.imag() == 0.0) {
                const double t = prev.imag() / (prev.imag() - cur.imag());
                const double re = std::isfinite(t) ? prev.real() + t * (cur.real() - prev.real()) : cur.real();
                if (on_slit(cplx{re, 0.0}, lam)) return false;
            }
            prev = cur;
        }
        return true;
    };
    double good = 0.0;
    for (double r = 0.01; r <= 0.98 * fp.rho(); r += 0.01) {
        if (!circle_ok(r)) break;
        good = r;
    }
    return 0.99 * good;
}

inline ExtensionConfig default_config(const RenormFixedPoint& fp) {
    ExtensionConfig cfg;
    cfg.rho = fp.rho();
    cfg.escape_bound = 2.0 / (fp.lambda * fp.lambda);
    cfg.core_radius = compute_core_radius(fp);
    return cfg;
}

/// Throws if the configuration violates its own invariants for this fixed point.
inline void validate(const ExtensionConfig& cfg, const RenormFixedPoint& fp) {
    if (cfg.depth_max < 1) throw Error("depth_max must be >= 1");
    if (!(cfg.rho > 0.0)) throw Error("rho must be positive");
    if (!(cfg.basin_eps > 0.0 && cfg.basin_eps < fp.x0 / 10.0)) throw Error("basin_eps must lie in (0, x0/10)");
    if (!(cfg.escape_bound > 1.0 / (fp.lambda * fp.lambda))) throw Error("escape bound must exceed 1/lambda^2");
    if (cfg.iter_max < 1 || cfg.julia_iter_max < 1) throw Error("orbit budgets must be >= 1");
}

enum class EvalStatus : std::uint8_t { Value, Undetermined, NotInDomain };

struct EvalOutcome {
    EvalStatus status = EvalStatus::Undetermined;
    cplx w{};
    cplx dw{};  // derivative of the extension at the evaluation point
    int depth_used = 0;

    bool ok() const noexcept { return status == EvalStatus::Value; }

    static EvalOutcome value(cplx w, cplx dw, int depth) { return {EvalStatus::Value, w, dw, depth}; }
    static EvalOutcome undetermined() { return {EvalStatus::Undetermined, {}, {}, 0}; }
    static EvalOutcome not_in_domain() { return {EvalStatus::NotInDomain, {}, {}, 0}; }
};

namespace detail {

struct EvalContext {
    const RenormFixedPoint& fp;
    const ExtensionConfig& cfg;
    std::int64_t calls = 0;
};

inline EvalOutcome eval_fhat_rec(EvalContext& ctx, cplx z, int depth) {
    if (++ctx.calls > ctx.cfg.call_budget) return EvalOutcome::undetermined();
    if (std::abs(z) <= ctx.cfg.rho) {
        const auto j = ctx.fp.series.jet(z);
        return EvalOutcome::value(j.value, j.deriv, depth);
    }
    if (depth >= ctx.cfg.depth_max) return EvalOutcome::undetermined();

    const double lam = ctx.fp.lambda;
    const EvalOutcome inner = eval_fhat_rec(ctx, lam * z, depth + 1);
    if (!inner.ok()) return inner;
    // The inner value is the next point of the orbit of z under f(lambda .); a jump far
    // beyond the scale of z is taken as leaving the domain.
    if (std::abs(inner.w) > ctx.cfg.escape_bound * std::max(1.0, std::abs(z))) return EvalOutcome::not_in_domain();
    const EvalOutcome outer = eval_fhat_rec(ctx, inner.w, depth + 1);
    if (!outer.ok()) return outer;
    // d/dz [-(1/lam) f(f(lam z))] = -f'(f(lam z)) f'(lam z)
    return EvalOutcome::value(-outer.w / lam, -outer.dw * inner.dw, std::max(inner.depth_used, outer.depth_used));
}

}  // namespace detail

/// Maximal analytic extension: the series inside the trusted disk, otherwise the
/// functional equation f(z) = -(1/lambda) f(f(lambda z)) applied recursively.
inline EvalOutcome eval_fhat(const RenormFixedPoint& fp, const ExtensionConfig& cfg, cplx z) {
    detail::EvalContext ctx{fp, cfg};
    return detail::eval_fhat_rec(ctx, z, 0);
}

/// g(z) = f(lambda z), whose basin of x0 is the domain of the extension.
inline EvalOutcome eval_g(const RenormFixedPoint& fp, const ExtensionConfig& cfg, cplx z) {
    EvalOutcome r = eval_fhat(fp, cfg, fp.lambda * z);
    r.dw *= fp.lambda;
    return r;
}

}  // namespace feigen
