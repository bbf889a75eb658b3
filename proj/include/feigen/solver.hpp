#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "feigen/extension.hpp"
#include "feigen/fixed_point.hpp"
#include "feigen/series.hpp"

namespace feigen {

struct SolveOptions {
    double fd_step = 1e-7;
    double tail_tol = 1e-12;
    /// Radii (in u = z^ell) of the complex collocation circle, tried in order.
    std::vector<double> circle_radii{2.0, 1.5, 1.0, 0.7, 0.5};
    int sign_scan_points = 10000;
};

/// Chebyshev-distributed points of (0, 1): (1 + cos((2j+1) pi / 2n)) / 2.
inline std::vector<double> chebyshev_nodes01(int n) {
    std::vector<double> x(n);
    for (int j = 0; j < n; ++j) x[j] = 0.5 * (1.0 + std::cos((2.0 * j + 1.0) * std::numbers::pi / (2.0 * n)));
    return x;
}

/// Collocation points z_j = u_j^(1/ell) over Chebyshev nodes u_j of (0, 1].
inline std::vector<double> collocation_points(int ell, int n) {
    auto u = chebyshev_nodes01(n);
    for (auto& v : u) v = std::pow(v, 1.0 / ell);
    return u;
}

/// The 4N validation points in [0, 1]; Chebyshev-distributed in z, disjoint from the
/// collocation points.
inline std::vector<double> validation_points(int n) { return chebyshev_nodes01(4 * n); }

namespace detail {

/// F(u) = sum_k a_k T_k(2u - 1), used for the first, well-conditioned Newton phase.
struct ChebyshevF {
    std::vector<double> a;

    double operator()(double u) const {
        const double x = 2.0 * u - 1.0;
        double b1 = 0.0, b2 = 0.0;
        for (int k = static_cast<int>(a.size()) - 1; k >= 1; --k) {
            const double b0 = 2.0 * x * b1 - b2 + a[k];
            b2 = b1;
            b1 = b0;
        }
        return x * b1 - b2 + a[0];
    }

    /// a_1.. a_N given, a_0 fixed by F(0) = 1 (T_k(-1) = (-1)^k).
    static ChebyshevF from_unknowns(const Eigen::VectorXd& v) {
        ChebyshevF f;
        f.a.assign(v.size() + 1, 0.0);
        double s = 0.0;
        for (int k = 1; k <= v.size(); ++k) {
            f.a[k] = v[k - 1];
            s += (k % 2 ? -1.0 : 1.0) * v[k - 1];
        }
        f.a[0] = 1.0 - s;
        return f;
    }

    /// Monomial coefficients in u, dropping Chebyshev terms at roundoff level.
    std::vector<double> to_monomial(int n_out) const {
        const int n = static_cast<int>(a.size()) - 1;
        double amax = 0.0;
        for (double v : a) amax = std::max(amax, std::abs(v));
        std::vector<double> out(n_out + 1, 0.0);
        std::vector<double> t_prev{1.0}, t_cur{-1.0, 2.0};  // T_0, T_1 in powers of u
        auto add = [&](const std::vector<double>& t, double coef) {
            if (std::abs(coef) < 1e-14 * amax) return;
            for (size_t i = 0; i < t.size() && i < out.size(); ++i) out[i] += coef * t[i];
        };
        add(t_prev, a[0]);
        if (n >= 1) add(t_cur, a[1]);
        for (int k = 2; k <= n; ++k) {
            std::vector<double> t_next(t_cur.size() + 1, 0.0);
            for (size_t i = 0; i < t_cur.size(); ++i) {
                t_next[i] -= 2.0 * t_cur[i];
                t_next[i + 1] += 4.0 * t_cur[i];
            }
            for (size_t i = 0; i < t_prev.size(); ++i) t_next[i] -= t_prev[i];
            t_prev = std::move(t_cur);
            t_cur = std::move(t_next);
            add(t_cur, a[k]);
        }
        out[0] = 1.0;
        return out;
    }
};

template <typename F>
double cf_residual_at(const F& f, int ell, double lambda, double z) {
    return f(ipow(z, ell)) + f(ipow(f(ipow(lambda * z, ell)), ell)) / lambda;
}

template <typename Residual>
Eigen::MatrixXd fd_jacobian(const Residual& res, const Eigen::VectorXd& x, const Eigen::VectorXd& r0, double h) {
    Eigen::MatrixXd jac(r0.size(), x.size());
    Eigen::VectorXd xp = x;
    for (int j = 0; j < x.size(); ++j) {
        xp[j] = x[j] + h;
        jac.col(j) = (res(xp) - r0) / h;
        xp[j] = x[j];
    }
    return jac;
}

inline double sup_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

struct MonomialPhase {
    std::vector<double> coeffs;
    int iterations = 0;
    double residual = INFINITY;
};

/// Gauss-Newton on monomial coefficients c_1..c_N with equations at the real
/// collocation points and at M points on the upper half circle |u| = radius.
inline MonomialPhase monomial_refine(int ell, const std::vector<double>& seed, double radius, int max_iter,
                                     double fd_step, double tol) {
    const int n = static_cast<int>(seed.size()) - 1;
    const auto zr = collocation_points(ell, n);
    const int m = (n + 1) / 2;
    std::vector<cplx> zc(m);
    for (int j = 0; j < m; ++j) {
        const double th = (j + 0.5) * std::numbers::pi / m;
        zc[j] = std::pow(std::polar(radius, th), 1.0 / ell);
    }

    auto residual = [&](const Eigen::VectorXd& c) {
        std::vector<double> full(n + 1);
        full[0] = 1.0;
        for (int k = 1; k <= n; ++k) full[k] = c[k - 1];
        auto F = [&](auto u) {
            decltype(u) acc{full[n]};
            for (int k = n - 1; k >= 0; --k) acc = acc * u + full[k];
            return acc;
        };
        const double lam = -F(1.0);
        Eigen::VectorXd r(n + 2 * m);
        for (int j = 0; j < n; ++j) r[j] = cf_residual_at(F, ell, lam, zr[j]);
        for (int j = 0; j < m; ++j) {
            const cplx z = zc[j];
            const cplx v = F(ipow(z, ell)) + F(ipow(F(ipow(lam * z, ell)), ell)) / lam;
            r[n + 2 * j] = v.real();
            r[n + 2 * j + 1] = v.imag();
        }
        return r;
    };

    Eigen::VectorXd c(n);
    for (int k = 1; k <= n; ++k) c[k - 1] = seed[k];
    MonomialPhase out;
    Eigen::VectorXd r = residual(c);
    double best = sup_norm(r);
    Eigen::VectorXd best_c = c;
    for (int it = 0; it < max_iter && std::isfinite(best); ++it) {
        if (best < 1e-2 * tol) break;
        const Eigen::MatrixXd jac = fd_jacobian(residual, c, r, fd_step);
        const Eigen::VectorXd step = jac.colPivHouseholderQr().solve(r);
        c -= step;
        r = residual(c);
        ++out.iterations;
        const double now = sup_norm(r);
        if (!std::isfinite(now)) break;
        if (now < best) {
            best = now;
            best_c = c;
        } else if (out.iterations > 3) {
            break;  // stalled at the roundoff floor
        }
    }
    out.residual = best;
    out.coeffs.assign(n + 1, 1.0);
    for (int k = 1; k <= n; ++k) out.coeffs[k] = best_c[k - 1];
    return out;
}

}  // namespace detail

/// sup over real validation points of |f(z) + (1/lambda) f(f(lambda z))| using the series only.
inline double validation_residual(const TruncatedEvenSeries& s, double lambda, const std::vector<double>& pts) {
    double sup = 0.0;
    for (double z : pts) sup = std::max(sup, std::abs(s(z) + s(s(lambda * z)) / lambda));
    return sup;
}

/// Smallest root of f in (0, 1), located by a sign scan and refined by bisection.
inline double find_x0(const TruncatedEvenSeries& s) {
    const double f0 = s(0.0), f1 = s(1.0);
    if (f0 * f1 > 0.0) throw RootNotBracketed("f(0) and f(1) have the same sign");
    constexpr int kScan = 1000;
    double lo = 0.0, flo = f0, hi = 1.0;
    for (int i = 1; i <= kScan; ++i) {
        const double x = static_cast<double>(i) / kScan;
        const double fx = s(x);
        if (flo * fx <= 0.0) {
            hi = x;
            break;
        }
        lo = x;
        flo = fx;
    }
    while (hi - lo > 1e-15) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = s(mid);
        if (fm == 0.0) return mid;
        if (flo * fm < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

inline double find_x0(const RenormFixedPoint& fp) { return find_x0(fp.series); }

/// sup over samples of |f(z) + (1/lambda) f(f(lambda z))|, refusing to leave the trusted disk.
inline double cf_residual(const RenormFixedPoint& fp, const std::vector<cplx>& samples) {
    const auto& s = fp.series;
    const double rho = fp.rho();
    double sup = 0.0;
    for (const cplx z : samples) {
        const cplx inner = s(fp.lambda * z);
        if (std::abs(z) > rho || std::abs(fp.lambda * z) > rho || std::abs(inner) > rho)
            throw OutsideTrusted("residual sample leaves the trusted disk");
        sup = std::max(sup, std::abs(s(z) + s(inner) / fp.lambda));
    }
    return sup;
}

/// f' < 0 on (0, x0/lambda), i.e. F' has no zero on (0, (x0/lambda)^ell). Beyond the
/// trusted disk the derivative comes from the extension.
inline bool derivative_sign_scan(const RenormFixedPoint& fp, int points) {
    const ExtensionConfig cfg = default_config(fp);
    const double end = fp.x0 / fp.lambda;
    for (int i = 1; i < points; ++i) {
        const double z = end * i / points;
        const EvalOutcome r = eval_fhat(fp, cfg, cplx{z, 0.0});
        if (!r.ok() || !(r.dw.real() < 0.0)) return false;
    }
    return true;
}

/// Solves the fixed-point equation for f(z) = F(z^ell).
///
/// Phase one runs Newton on the Chebyshev coefficients of F over u in [0, 1] at the
/// collocation points, from F(u) = 1 - 1.5u. Phase two converts to monomials and
/// refines them by Gauss-Newton with extra equations on a complex circle, which
/// pins the monomial tail that real collocation alone leaves undetermined.
inline RenormFixedPoint solve_cf(int ell, int n, double tol, int max_iter, const SolveOptions& opt = {}) {
    if (ell < 2 || ell % 2) throw Error("ell must be even and >= 2");
    if (n < 10) throw Error("need at least 10 coefficients");
    if (tol < 1e-13) throw Error("tolerance below 1e-13 is not attainable in double precision");

    const auto zr = collocation_points(ell, n);
    auto residual1 = [&](const Eigen::VectorXd& v) {
        const auto F = detail::ChebyshevF::from_unknowns(v);
        const double lam = -F(1.0);
        Eigen::VectorXd r(n);
        for (int j = 0; j < n; ++j) r[j] = detail::cf_residual_at(F, ell, lam, zr[j]);
        return r;
    };

    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v[0] = -0.75;  // 1 - 1.5u = 0.25 T_0 - 0.75 T_1
    Eigen::VectorXd r = residual1(v);
    int iters = 0;
    double res = detail::sup_norm(r);
    while (iters < max_iter && res > 1e-2 * tol) {
        const Eigen::MatrixXd jac = detail::fd_jacobian(residual1, v, r, opt.fd_step);
        v -= jac.partialPivLu().solve(r);
        r = residual1(v);
        ++iters;
        const double now = detail::sup_norm(r);
        if (!std::isfinite(now)) break;
        if (now >= res && now < tol) break;
        res = now;
    }
    if (!(res < tol)) throw NoConvergence("Chebyshev Newton phase did not converge", iters, res);

    const auto seed = detail::ChebyshevF::from_unknowns(v).to_monomial(n);
    const auto vpts = validation_points(n);
    double last = res;
    for (double radius : opt.circle_radii) {
        const int budget = max_iter - iters;
        if (budget <= 0) break;
        auto ph = detail::monomial_refine(ell, seed, radius, budget, opt.fd_step, tol);
        last = ph.residual;
        if (!(ph.residual < tol)) continue;
        TruncatedEvenSeries trial(ell, ph.coeffs, 1.0);
        const double lam = -trial(1.0);
        const double vres = validation_residual(trial, lam, vpts);
        if (!(vres < tol) || !(lam > 0.0 && lam < 1.0)) continue;
        double rho = 0.0;
        try {
            rho = estimate_trusted_radius(ph.coeffs, ell, opt.tail_tol);
        } catch (const NonDecayingTail&) {
            continue;
        }
        RenormFixedPoint fp{trial.with_trusted_radius(rho), lam, 0.0, vres, iters + ph.iterations};
        fp.x0 = find_x0(fp.series);
        if (!(fp.x0 > 0.0 && fp.x0 < 1.0)) continue;
        if (!derivative_sign_scan(fp, opt.sign_scan_points)) continue;
        return fp;
    }
    throw NoConvergence("monomial refinement failed on every collocation circle", max_iter, last);
}

// ---------------------------------------------------------------------------
// Text format.
//
//   ell=<int>
//   lambda=<decimal>
//   c_0
//   ...
//   c_N
//   x0=<decimal>
//   residual=<decimal>
//   N=<int>

inline std::string serialize_fixed_point(const RenormFixedPoint& fp) {
    std::ostringstream os;
    os << "ell=" << fp.ell() << '\n' << "lambda=" << format_exact(fp.lambda) << '\n';
    for (double c : fp.series.coeffs()) os << format_exact(c) << '\n';
    os << "x0=" << format_exact(fp.x0) << '\n'
       << "residual=" << format_exact(fp.residual_sup) << '\n'
       << "N=" << fp.series.degree() << '\n';
    return os.str();
}

inline void save_fixed_point(const RenormFixedPoint& fp, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << serialize_fixed_point(fp);
    if (!out) throw IoError("write failed: " + path);
}

namespace detail {

inline double parse_double(const std::string& s, const std::string& what) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || p != e) throw FormatError("bad number for " + what + ": '" + s + "'");
    return v;
}

inline int parse_int(const std::string& s, const std::string& what) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw FormatError("bad integer for " + what + ": '" + s + "'");
    return v;
}

inline std::string expect_key(const std::string& line, const std::string& key) {
    if (line.rfind(key + "=", 0) != 0) throw FormatError("expected '" + key + "=' but got '" + line + "'");
    return line.substr(key.size() + 1);
}

}  // namespace detail

/// Fields of a fixed point file, checked for format only.
struct FixedPointFile {
    int ell = 0;
    double lambda = 0.0;
    std::vector<double> coeffs;
    double x0 = 0.0;
    double residual = 0.0;
    int n = 0;
};

inline FixedPointFile parse_fixed_point_file(const std::string& text) {
    std::istringstream is(text);
    std::vector<std::string> lines;
    for (std::string line; std::getline(is, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line[0] != '#') lines.push_back(line);
    }
    if (lines.size() < 7) throw FormatError("fixed point file too short");
    FixedPointFile f;
    f.ell = detail::parse_int(detail::expect_key(lines[0], "ell"), "ell");
    f.lambda = detail::parse_double(detail::expect_key(lines[1], "lambda"), "lambda");
    const size_t tail = lines.size() - 3;
    for (size_t i = 2; i < tail; ++i) f.coeffs.push_back(detail::parse_double(lines[i], "coefficient"));
    f.x0 = detail::parse_double(detail::expect_key(lines[tail], "x0"), "x0");
    f.residual = detail::parse_double(detail::expect_key(lines[tail + 1], "residual"), "residual");
    f.n = detail::parse_int(detail::expect_key(lines[tail + 2], "N"), "N");
    if (f.n != static_cast<int>(f.coeffs.size()) - 1) throw FormatError("N does not match the number of coefficients");
    if (f.ell < 2 || f.ell % 2) throw FormatError("ell must be even and >= 2");
    return f;
}

/// Builds the fixed point as stored, recomputing only the trusted radius. Used by
/// `verify`, which reports each identity separately instead of stopping at the first.
inline RenormFixedPoint fixed_point_from_file(const FixedPointFile& f) {
    if (f.coeffs.empty() || f.coeffs[0] != 1.0) throw VerificationFailed("c0 != 1 violates f(0) = 1");
    double rho = 0.0;
    try {
        rho = estimate_trusted_radius(f.coeffs, f.ell, 1e-12);
    } catch (const NonDecayingTail& e) {
        throw VerificationFailed(std::string("coefficient tail: ") + e.what());
    }
    TruncatedEvenSeries s(f.ell, f.coeffs, rho);
    return RenormFixedPoint{std::move(s), f.lambda, f.x0, f.residual, 0};
}

/// Parses and re-verifies a fixed point: c0 = 1, lambda = -f(1), the stored x0, and the
/// residual over the validation points must all hold, otherwise VerificationFailed.
inline RenormFixedPoint parse_fixed_point(const std::string& text, double max_residual = 1e-10) {
    RenormFixedPoint fp = fixed_point_from_file(parse_fixed_point_file(text));
    const auto& s = fp.series;
    if (std::abs(fp.lambda + s(1.0)) > 1e-14) throw VerificationFailed("lambda != -f(1)");
    const double vres = validation_residual(s, fp.lambda, validation_points(s.degree()));
    if (!(vres < max_residual)) throw VerificationFailed("residual " + format_exact(vres) + " exceeds tolerance");
    const double x0_check = find_x0(s);
    if (std::abs(x0_check - fp.x0) > 1e-12) throw VerificationFailed("stored x0 is not the first zero of f");
    fp.residual_sup = vres;
    return fp;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline RenormFixedPoint load_fixed_point(const std::string& path, double max_residual = 1e-10) {
    return parse_fixed_point(read_text_file(path), max_residual);
}

}  // namespace feigen
