#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "feigen/extension.hpp"

namespace feigen {

enum class BasinStatus : std::uint8_t { Converged, Diverged, Undetermined };

struct BasinResult {
    BasinStatus status = BasinStatus::Undetermined;
    int steps = 0;      // iterations of g needed to come within basin_eps of x0
    cplx fhat{};        // extension value at the starting point, valid when Converged
    cplx fhat_deriv{};  // its derivative, valid when Converged
    bool converged() const noexcept { return status == BasinStatus::Converged; }
};

/// Follows the orbit of z under g(z) = f(lambda z). Converged once the orbit is within
/// basin_eps of x0 and the next three steps contract with ratio close to -lambda.
///
/// The starting point carries an uncertainty of orbit_tol * max(1, |z|). A first-order
/// bound on how far orbits from that disk can spread is carried along (amplified by
/// |g'|, plus rounding at each step). The verdict is Converged only if the spread is
/// still small against basin_eps on arrival, so points shadowing a repelling cycle on
/// the boundary come out Undetermined instead of drifting in by roundoff.
///
/// The extension value comes for free: f(z) = (-1/lambda)^k f(g^k(z)), and its
/// derivative by the chain rule.
inline BasinResult classify_basin(const RenormFixedPoint& fp, const ExtensionConfig& cfg, cplx z) {
    constexpr double kUnit = 4.0 * std::numeric_limits<double>::epsilon();
    const double lam = fp.lambda;
    const cplx x0{fp.x0, 0.0};
    const double err_cap = 0.1 * cfg.basin_eps;
    BasinResult out;
    cplx cur = z;
    double err = cfg.orbit_tol * std::max(1.0, std::abs(z));
    double scale = 1.0;  // (-1/lambda)^k
    cplx chain{1.0, 0.0};  // derivative of g^k at z
    for (int k = 0; k <= cfg.iter_max; ++k) {
        if (std::abs(cur - x0) < cfg.basin_eps) {
            out.steps = k;
            if (err > err_cap) return {BasinStatus::Undetermined, k, {}};
            const auto j = fp.series.jet(cur);
            out.fhat = scale * j.value;
            out.fhat_deriv = scale * j.deriv * chain;
            cplx p = cur;
            for (int j = 0; j < 3; ++j) {
                const EvalOutcome nx = eval_g(fp, cfg, p);
                if (!nx.ok()) return {nx.status == EvalStatus::NotInDomain ? BasinStatus::Diverged : BasinStatus::Undetermined, k, {}};
                if (std::abs(p - x0) > 1e-11) {
                    const cplx ratio = (nx.w - x0) / (p - x0);
                    if (std::abs(ratio + lam) > 0.25 * lam) return {BasinStatus::Undetermined, k, {}};
                }
                p = nx.w;
            }
            out.status = BasinStatus::Converged;
            return out;
        }
        if (k == cfg.iter_max) break;
        const EvalOutcome nx = eval_g(fp, cfg, cur);
        if (nx.status == EvalStatus::NotInDomain) return {BasinStatus::Diverged, k, {}};
        if (!nx.ok()) return {BasinStatus::Undetermined, k, {}};
        err = std::abs(nx.dw) * err + kUnit * std::max(1.0, std::abs(nx.w));
        if (!(err < 1.0)) return {BasinStatus::Undetermined, k, {}};
        cur = nx.w;
        chain *= nx.dw;
        scale *= -1.0 / lam;
    }
    out.status = BasinStatus::Undetermined;
    return out;
}

}  // namespace feigen
