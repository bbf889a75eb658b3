#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "feigen/errors.hpp"

namespace feigen {

using cplx = std::complex<double>;

/// Integer power by repeated squaring. Exact for z -> -z and z -> i z when the
/// exponent is even, which keeps the degree-ell symmetry of F(z^ell) structural.
template <typename T>
T ipow(T z, int n) {
    T result{1.0};
    while (n > 0) {
        if (n & 1) result *= z;
        z *= z;
        n >>= 1;
    }
    return result;
}

/// Value and derivative of a holomorphic function at a point.
template <typename T>
struct Jet {
    T value;
    T deriv;
};

/// f(z) = F(z^ell) with F(u) = sum_k c_k u^k truncated at degree N.
///
/// Coefficients live in the variable u = z^ell, so evaluation depends on z only
/// through z^ell. `trusted_radius` is the radius in z inside which the
/// truncation error was accepted when the series was built.
class TruncatedEvenSeries {
public:
    TruncatedEvenSeries(int ell, std::vector<double> coeffs, double trusted_radius)
        : ell_(ell), coeffs_(std::move(coeffs)), rho_(trusted_radius) {
        if (ell_ < 2 || ell_ % 2 != 0) throw Error("critical degree ell must be even and >= 2");
        if (coeffs_.size() < 2) throw Error("series needs at least c0 and c1");
        if (coeffs_.front() != 1.0) throw Error("series must satisfy c0 = 1 (f(0) = 1)");
        if (!(rho_ > 0.0)) throw Error("trusted radius must be positive");
    }

    int ell() const noexcept { return ell_; }
    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    std::span<const double> coeffs() const noexcept { return coeffs_; }
    double trusted_radius() const noexcept { return rho_; }

    TruncatedEvenSeries with_trusted_radius(double rho) const {
        return TruncatedEvenSeries(ell_, coeffs_, rho);
    }

    /// F(u) by Horner's scheme.
    template <typename T>
    T eval_u(T u) const {
        T acc{coeffs_.back()};
        for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it) acc = acc * u + *it;
        return acc;
    }

    /// F'(u).
    template <typename T>
    T eval_u_deriv(T u) const {
        const int n = degree();
        T acc{n * coeffs_[n]};
        for (int k = n - 1; k >= 1; --k) acc = acc * u + static_cast<double>(k) * coeffs_[k];
        return acc;
    }

    template <typename T>
    T operator()(T z) const {
        return eval_u(ipow(z, ell_));
    }

    /// ell z^(ell-1) F'(z^ell).
    template <typename T>
    T deriv(T z) const {
        const T zl1 = ipow(z, ell_ - 1);
        return static_cast<double>(ell_) * zl1 * eval_u_deriv(zl1 * z);
    }

    template <typename T>
    Jet<T> jet(T z) const {
        const T zl1 = ipow(z, ell_ - 1);
        const T u = ipow(z, ell_);
        return {eval_u(u), static_cast<double>(ell_) * zl1 * eval_u_deriv(u)};
    }

private:
    int ell_;
    std::vector<double> coeffs_;
    double rho_;
};

template <typename T>
T eval_series(const TruncatedEvenSeries& s, T z) {
    return s(z);
}

template <typename T>
T eval_deriv(const TruncatedEvenSeries& s, T z) {
    return s.deriv(z);
}

/// Geometric envelope |c_k| <= scale * ratio^k fitted to the tail of a coefficient list.
struct TailEnvelope {
    double ratio = 0.0;
    double scale = 0.0;
    bool zero_tail = false;
};

/// Fits the envelope over the last quarter of the coefficients: ratio from a least
/// squares fit of log|c_k| against k, scale as the smallest constant that dominates
/// every coefficient in the window.
inline TailEnvelope fit_tail_envelope(std::span<const double> c) {
    const int n = static_cast<int>(c.size()) - 1;
    if (n < 4) throw Error("tail envelope needs N >= 4");
    const int first = n - std::max(2, n / 4) + 1;

    std::vector<std::pair<double, double>> pts;
    for (int k = first; k <= n; ++k)
        if (c[k] != 0.0) pts.emplace_back(static_cast<double>(k), std::log(std::abs(c[k])));

    TailEnvelope env;
    if (pts.empty()) {
        env.zero_tail = true;
        return env;
    }
    if (pts.size() < 2) throw NonDecayingTail("too few nonzero tail coefficients to measure decay");

    double mk = 0.0, ml = 0.0;
    for (auto [k, l] : pts) {
        mk += k;
        ml += l;
    }
    mk /= pts.size();
    ml /= pts.size();
    double sxy = 0.0, sxx = 0.0;
    for (auto [k, l] : pts) {
        sxy += (k - mk) * (l - ml);
        sxx += (k - mk) * (k - mk);
    }
    const double slope = sxy / sxx;
    env.ratio = std::exp(slope);
    if (!(env.ratio < 1.0))
        throw NonDecayingTail("tail coefficients do not decay geometrically (fitted ratio " +
                              std::to_string(env.ratio) + ")");
    double log_scale = -INFINITY;
    for (auto [k, l] : pts) log_scale = std::max(log_scale, l - k * slope);
    env.scale = std::exp(log_scale);
    return env;
}

/// Upper bound on sum_{k>N} |c_k| u^k implied by the envelope, for u >= 0.
inline double tail_bound(const TailEnvelope& env, int n, double u) {
    if (env.zero_tail) return 0.0;
    const double qu = env.ratio * u;
    if (qu >= 1.0) return INFINITY;
    return env.scale * std::pow(qu, n + 1) / (1.0 - qu);
}

inline constexpr double kDefaultMaxTrustedRadius = 4.0;

/// Largest r (capped at max_radius) with tail_bound(r^ell) <= tail_tol.
inline double estimate_trusted_radius(std::span<const double> c, int ell, double tail_tol,
                                      double max_radius = kDefaultMaxTrustedRadius) {
    const int n = static_cast<int>(c.size()) - 1;
    const TailEnvelope env = fit_tail_envelope(c);
    if (env.zero_tail) return max_radius;
    auto bound_at = [&](double r) { return tail_bound(env, n, std::pow(r, ell)); };
    if (bound_at(max_radius) <= tail_tol) return max_radius;

    double lo = 0.0;
    double hi = std::min(max_radius, std::pow(1.0 / env.ratio, 1.0 / ell));
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (bound_at(mid) <= tail_tol ? lo : hi) = mid;
    }
    return lo;
}

inline double estimate_trusted_radius(const TruncatedEvenSeries& s, double tail_tol,
                                      double max_radius = kDefaultMaxTrustedRadius) {
    return estimate_trusted_radius(s.coeffs(), s.ell(), tail_tol, max_radius);
}

/// Decimal text with enough digits to round-trip a double exactly.
inline std::string format_exact(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace feigen
