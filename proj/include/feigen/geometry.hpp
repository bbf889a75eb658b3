#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "feigen/basin.hpp"
#include "feigen/extension.hpp"

namespace feigen {

enum class CellColor : std::uint8_t { Plus, Minus, SkeletonBand, Exterior, Unknown, Inside };

inline CellColor chess_color(const RenormFixedPoint& fp, const ExtensionConfig& cfg, cplx z) {
    const BasinResult b = classify_basin(fp, cfg, z);
    if (b.status == BasinStatus::Diverged) return CellColor::Exterior;
    if (b.status == BasinStatus::Undetermined) return CellColor::Unknown;
    const double im = b.fhat.imag();
    if (im > cfg.skel_tol) return CellColor::Plus;
    if (im < -cfg.skel_tol) return CellColor::Minus;
    return CellColor::SkeletonBand;
}

/// Three-valued membership: nullopt when the budget ran out.
using Tristate = std::optional<bool>;

namespace detail {

/// Maps z into the closed sector 0 <= arg <= pi/ell using the rotation and conjugation
/// symmetries of W.
inline cplx fold_to_sector(cplx z, int ell) {
    const double sector = std::numbers::pi / ell;
    if (ell == 2) {
        if (z.real() < 0.0) z = -z;
    } else if (ell == 4) {
        while (!(z.real() >= 0.0 && std::abs(z.imag()) <= z.real())) {
            z = cplx{z.imag(), -z.real()};  // multiply by -i
            if (std::abs(z) == 0.0) break;
        }
    } else {
        const double a = std::arg(z);
        const double k = std::round(a / (2.0 * sector));
        z = std::polar(std::abs(z), a - 2.0 * sector * k);
    }
    if (z.imag() < 0.0) z = std::conj(z);
    return z;
}

inline bool in_closed_sector(cplx z, int ell) {
    // -0 imaginary parts count as the real axis; std::arg would put them at -pi
    return z.imag() >= 0.0 && std::arg(cplx{z.real(), std::abs(z.imag())}) <= std::numbers::pi / ell + 1e-15;
}

/// Membership in the closure of W_+ for z in the closed sector. Uses
/// z in W_+  <=>  lambda z in W_+ and g(z) in W_-,
/// with a disk of radius core_radius around 0 known to lie in W.
inline Tristate in_w_sector(const RenormFixedPoint& fp, const ExtensionConfig& cfg, cplx z, int depth) {
    for (int step = 0; step < cfg.iter_max; ++step) {
        if (std::abs(z) < cfg.core_radius) return true;
        if (depth >= cfg.depth_max) return std::nullopt;
        const Tristate inner = in_w_sector(fp, cfg, fp.lambda * z, depth + 1);
        if (!inner) return std::nullopt;
        if (!*inner) return false;
        const EvalOutcome w = eval_g(fp, cfg, z);
        if (w.status == EvalStatus::NotInDomain) return false;
        if (!w.ok()) return std::nullopt;
        const cplx next = std::conj(w.w);
        if (!in_closed_sector(next, fp.ell())) return false;
        z = next;
    }
    return std::nullopt;
}

}  // namespace detail

/// Membership in the closure of W, the domain of the polynomial-like restriction of f.
inline Tristate in_w(const RenormFixedPoint& fp, const ExtensionConfig& cfg, cplx z) {
    if (cfg.core_radius <= 0.0) throw Error("in_w needs a positive core radius");
    return detail::in_w_sector(fp, cfg, detail::fold_to_sector(z, fp.ell()), 0);
}

enum class JuliaStatus : std::uint8_t { Inside, Escaped, Undetermined };

struct JuliaResult {
    JuliaStatus status = JuliaStatus::Undetermined;
    int steps = 0;
};

/// Escape-time membership in the filled Julia set K(f) of f: W -> C_lambda. The orbit
/// escapes at the first step it leaves W or exceeds the escape bound. K(f) has no
/// interior, so "Inside" means the orbit stayed in W for julia_iter_max steps: it is
/// the topological disk f^-N(W), whose thinnest parts must stay above pixel size.
inline JuliaResult in_filled_julia(const RenormFixedPoint& fp, const ExtensionConfig& cfg, cplx z) {
    for (int k = 0; k < cfg.julia_iter_max; ++k) {
        if (std::abs(z) > cfg.escape_bound) return {JuliaStatus::Escaped, k};
        const Tristate inside = in_w(fp, cfg, z);
        if (!inside) return {JuliaStatus::Undetermined, k};
        if (!*inside) return {JuliaStatus::Escaped, k};
        const EvalOutcome nx = eval_fhat(fp, cfg, z);
        if (!nx.ok()) return {JuliaStatus::Undetermined, k};
        z = nx.w;
    }
    return {JuliaStatus::Inside, cfg.julia_iter_max};
}

struct CornerPoint {
    cplx x1;
    cplx multiplier;  // derivative of g o g at x1
    double residual;  // |g(g(x1)) - x1|
};

namespace detail {

struct CycleCandidate {
    cplx z;
    cplx mult;
    double residual;
};

/// Damped Newton on g(g(z)) = z. Empty when g leaves its domain or no root is reached.
inline std::optional<CycleCandidate> newton_two_cycle(const RenormFixedPoint& fp, const ExtensionConfig& cfg,
                                                      cplx z, int max_iter) {
    auto g2 = [&](cplx p, cplx& d) -> std::optional<cplx> {
        const EvalOutcome a = eval_g(fp, cfg, p);
        if (!a.ok()) return std::nullopt;
        const EvalOutcome b = eval_g(fp, cfg, a.w);
        if (!b.ok()) return std::nullopt;
        d = b.dw * a.dw;
        return b.w;
    };
    cplx d{};
    for (int it = 0; it < max_iter; ++it) {
        const auto v = g2(z, d);
        if (!v) return std::nullopt;
        const cplx val = *v - z;
        if (std::abs(val) < 1e-13) break;
        cplx step = val / (d - 1.0);
        if (std::abs(step) > 0.1) step *= 0.1 / std::abs(step);
        z -= step;
    }
    const auto v = g2(z, d);
    if (!v) return std::nullopt;
    return CycleCandidate{z, d, std::abs(*v - z)};
}

}  // namespace detail

/// The repelling 2-cycle {x1, conj x1} of g(z) = f(lambda z) at the corner of W_+.
///
/// Newton on g(g(z)) = z. The first seed sits at 0.95 x0/lambda on the ray of angle
/// pi/(2 ell), but from there Newton usually lands on x0, which is also a fixed point of
/// g o g. Further seeds walk outward in radius and over a fan of angles; the first root
/// off the real axis with |(g o g)'| > 1 and g(x1) = conj x1 is accepted.
inline CornerPoint find_x1(const RenormFixedPoint& fp, const ExtensionConfig& cfg, int max_iter = 60) {
    const double base = fp.x0 / fp.lambda;
    const double sector = std::numbers::pi / fp.ell();
    std::vector<cplx> seeds{std::polar(0.95 * base, 0.5 * sector)};
    for (double rs : {0.95, 1.2, 1.4, 1.6, 1.8}) {
        for (double as : {0.55, 0.65, 0.75, 0.45, 0.85}) seeds.push_back(std::polar(rs * base, as * sector));
    }
    bool found_attracting = false;
    for (const cplx seed : seeds) {
        auto c = detail::newton_two_cycle(fp, cfg, seed, max_iter);
        if (!c || !(c->residual < 1e-10)) continue;
        cplx z = c->z;
        if (std::abs(z.imag()) < 1e-6 * std::abs(z)) continue;  // x0 or another real orbit
        if (z.imag() < 0.0) z = std::conj(z);
        const EvalOutcome gz = eval_g(fp, cfg, z);
        if (!gz.ok() || std::abs(gz.w - std::conj(z)) > 1e-8) continue;
        if (!(std::abs(c->mult) > 1.0)) {
            found_attracting = true;
            continue;
        }
        return {z, c->mult, c->residual};
    }
    if (found_attracting) throw NotRepelling("the corner 2-cycle found is not repelling");
    throw NewtonFailed("no 2-cycle {x1, conj x1} found from any seed");
}

}  // namespace feigen
