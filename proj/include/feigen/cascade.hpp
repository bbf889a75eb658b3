#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "feigen/errors.hpp"
#include "feigen/series.hpp"

namespace feigen {

/// Superstable parameters of the family z -> z^ell + c along the period-doubling cascade.
struct SuperstableCascade {
    int ell = 2;
    std::vector<double> s;                // s[n]: critical orbit has period 2^n
    std::vector<double> d;                // d[n-1]: the 2^(n-1)-th iterate of 0 at s[n], n >= 1
    std::vector<double> residuals;        // |2^n-th iterate of 0| at s[n]
    std::vector<double> delta_estimates;  // (s[n-1]-s[n]) / (s[n]-s[n+1])
    std::vector<double> alpha_estimates;  // |d[n] / d[n+1]|
};

inline constexpr int kMaxCascadeDepth = 14;

/// The m-th iterate of 0 under z^ell + c. Orbits leaving |z| <= 4 return +infinity,
/// which for even ell has the same sign as the true (large positive) value.
inline double critical_iterate(int ell, double c, std::int64_t m) {
    double z = 0.0;
    for (std::int64_t i = 0; i < m; ++i) {
        z = ipow(z, ell) + c;
        if (std::abs(z) > 4.0) return std::numeric_limits<double>::infinity();
    }
    return z;
}

namespace detail {

/// Bisection on the sign of the 2^n-th critical iterate over [lo, hi], run until the
/// interval cannot be split further in double precision.
inline double bisect_superstable(int ell, std::int64_t period, double lo, double hi) {
    double flo = critical_iterate(ell, lo, period);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = critical_iterate(ell, mid, period);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    const double fl = std::abs(critical_iterate(ell, lo, period));
    const double fh = std::abs(critical_iterate(ell, hi, period));
    return fl <= fh ? lo : hi;
}

}  // namespace detail

/// Walks down the cascade from s_0 = 0. The bracket for s_n lies just below s_{n-1}, of
/// width a quarter of the previous gap, widened by 1.5x until the critical iterate
/// changes sign across it.
inline SuperstableCascade superstable_params(int ell, int n_max, double bisect_tol) {
    if (ell < 2 || ell % 2 != 0) throw Error("ell must be even and >= 2");
    if (n_max < 0 || n_max > kMaxCascadeDepth) throw Error("n_max must lie in [0, 14]");
    if (!(bisect_tol >= 1e-14)) throw Error("bisect_tol must be >= 1e-14");

    SuperstableCascade out;
    out.ell = ell;
    out.s.push_back(0.0);
    out.residuals.push_back(0.0);
    double gap = 2.0;  // stands in for the gap before s_0
    for (int n = 1; n <= n_max; ++n) {
        const std::int64_t period = std::int64_t{1} << n;
        const double prev = out.s.back();
        const double hi = prev - 1e-9 * gap;
        double width = gap / 4.0;
        double lo = prev - width;
        bool bracketed = false;
        for (int attempt = 0; attempt < 40; ++attempt) {
            const double fl = critical_iterate(ell, lo, period);
            const double fh = critical_iterate(ell, hi, period);
            if ((fl < 0.0) != (fh < 0.0)) {
                bracketed = true;
                break;
            }
            width *= 1.5;
            lo = prev - width;
            if (lo < -4.0) break;
        }
        if (!bracketed) throw BracketFailure("no sign change below the previous superstable parameter", n);

        const double sn = detail::bisect_superstable(ell, period, lo, hi);
        const double res = std::abs(critical_iterate(ell, sn, period));
        if (!(res < bisect_tol)) {
            throw NoConvergence("superstable parameter not resolved to bisect_tol", n, res);
        }
        gap = prev - sn;
        out.s.push_back(sn);
        out.residuals.push_back(res);
        out.d.push_back(critical_iterate(ell, sn, period / 2));
    }
    for (std::size_t n = 1; n + 1 < out.s.size(); ++n) {
        out.delta_estimates.push_back((out.s[n - 1] - out.s[n]) / (out.s[n] - out.s[n + 1]));
    }
    for (std::size_t n = 0; n + 1 < out.d.size(); ++n) {
        out.alpha_estimates.push_back(std::abs(out.d[n] / out.d[n + 1]));
    }
    return out;
}

inline double estimate_delta(const SuperstableCascade& c) {
    if (c.s.size() < 4) throw InsufficientDepth("delta needs at least 4 superstable parameters");
    return c.delta_estimates.back();
}

inline double estimate_alpha(const SuperstableCascade& c) {
    if (c.d.size() < 3) throw InsufficientDepth("alpha needs at least 3 orbit points");
    return c.alpha_estimates.back();
}

}  // namespace feigen
