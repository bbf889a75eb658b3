// feigen: command-line front end of the toolkit.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "feigen/cascade.hpp"
#include "feigen/config.hpp"
#include "feigen/probes.hpp"
#include "feigen/render.hpp"
#include "feigen/skeleton.hpp"
#include "feigen/solver.hpp"
#include "feigen/verify.hpp"

using namespace feigen;

namespace {

constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

std::string fmt(double v) { return format_exact(v); }

std::string fmt_short(double v, int digits = 6) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

cplx parse_center(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw Error("center must be given as re,im");
    try {
        std::size_t a = 0, b = 0;
        const std::string re = s.substr(0, comma), im = s.substr(comma + 1);
        const double x = std::stod(re, &a), y = std::stod(im, &b);
        if (a != re.size() || b != im.size()) throw std::invalid_argument("trailing characters");
        return {x, y};
    } catch (const std::exception&) {
        throw Error("cannot parse center '" + s + "'");
    }
}

std::pair<int, int> parse_range(const std::string& s) {
    const auto dots = s.find("..");
    if (dots == std::string::npos) throw Error("range must be given as k1..k2");
    try {
        const int a = std::stoi(s.substr(0, dots)), b = std::stoi(s.substr(dots + 2));
        if (b < a) throw Error("range end precedes start");
        return {a, b};
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        throw Error("cannot parse range '" + s + "'");
    }
}

/// State shared by the subcommands that read a fixed point.
struct FpOptions {
    std::string path;
    int workers = 1;
    ExtensionOverrides ov;
};

struct WindowOptions {
    std::string center = "0,0";
    double width = 2.0;
    int res = 512;
};

void add_fp_options(CLI::App* sub, FpOptions& o) {
    sub->add_option("--fp", o.path, "fixed point file");
    sub->add_option("--workers", o.workers, "parallel pixel workers")->check(CLI::Range(1, 256));
    sub->add_option("--depth-max", o.ov.depth_max, "recursion budget of the extension");
    sub->add_option("--basin-eps", o.ov.basin_eps, "convergence radius around x0");
    sub->add_option("--iter-max", o.ov.iter_max, "orbit budget for basin classification");
    sub->add_option("--julia-iter-max", o.ov.julia_iter_max, "orbit budget for filled Julia membership");
    sub->add_option("--escape-bound", o.ov.escape_bound, "escape bound B (default 2/lambda^2)");
    sub->add_option("--skel-tol", o.ov.skel_tol, "skeleton band in Im f units");
    sub->add_option("--skel-band-px", o.ov.skel_band_px, "skeleton band in pixels");
    sub->add_option("--call-budget", o.ov.call_budget, "series evaluations per query");
    sub->add_option("--orbit-tol", o.ov.orbit_tol, "relative uncertainty of a starting point");
}

void add_window_options(CLI::App* sub, WindowOptions& w, bool with_center = true) {
    if (with_center) sub->add_option("--center", w.center, "window center re,im");
    if (with_center) sub->add_option("--width", w.width, "window width")->check(CLI::PositiveNumber);
    sub->add_option("--res", w.res, "pixels per side")->check(CLI::Range(kMinRes, kMaxRes));
}

/// Values from a `--config` file fill every option the command line left unset.
void apply_config_file(CLI::App* sub, const std::string& path) {
    for (const auto& [key, value] : load_key_values(path)) {
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr || key == "config") throw Error("unknown config key '" + key + "' for " + sub->get_name());
        if (opt->count() > 0) continue;
        opt->add_result(value);
        opt->run_callback();
    }
}

struct LoadedFp {
    RenormFixedPoint fp;
    std::string hash;
    ExtensionConfig cfg;
};

void require(const std::string& value, const char* flag) {
    if (value.empty()) throw Error(std::string(flag) + " is required");
}

LoadedFp load_fp(const FpOptions& o) {
    require(o.path, "--fp");
    const std::string text = read_text_file(o.path);
    LoadedFp out{parse_fixed_point(text), hex64(fnv1a64(text)), {}};
    out.cfg = default_config(out.fp);
    o.ov.apply(out.cfg);
    validate(out.cfg, out.fp);
    return out;
}

KeyValues window_entries(const WindowOptions& w) {
    const cplx c = parse_center(w.center);
    return {{"center", fmt(c.real()) + "," + fmt(c.imag())}, {"width", fmt(w.width)}, {"res", std::to_string(w.res)}};
}

void append(KeyValues& a, const KeyValues& b) { a.insert(a.end(), b.begin(), b.end()); }

RunConfig run_config(const std::string& command, const FpOptions* fp, const WindowOptions* w) {
    RunConfig rc;
    rc.command = command;
    if (fp) {
        rc.fixed_point_path = fp->path;
        rc.workers = fp->workers;
        rc.overrides = fp->ov;
    }
    if (w) {
        const cplx c = parse_center(w->center);
        rc.center_re = c.real();
        rc.center_im = c.imag();
        rc.width = w->width;
        rc.res = w->res;
    }
    validate(rc);
    return rc;
}

void write_bytes(const std::string& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("write failed: " + path);
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

/// Writes a raster as PPM or as a FEIGRASTER dump, by `format` or (auto) by extension.
void emit_raster(Raster r, const std::string& format, const std::string& path, const Palette& pal,
                 const std::string& command, const std::string& fp_hash, const KeyValues& entries) {
    const bool dump = format == "dump" || (format == "auto" && (ends_with(path, ".raster") || ends_with(path, ".feig")));
    if (dump) {
        r.provenance = provenance_token(fp_hash, entries);
        write_raster_dump(r, path);
    } else {
        const std::string comment =
            "feigen " + command + " fp_fnv1a64=" + (fp_hash.empty() ? "none" : fp_hash) + " " + config_line(entries);
        write_ppm(r, pal, path, comment);
    }
}

std::string histogram_line(const Raster& r) {
    const auto h = color_histogram(r);
    static const char* names[] = {"plus", "minus", "skeleton", "exterior", "unknown", "inside"};
    std::string out = "cells";
    for (int i = 0; i < 6; ++i) out += std::string(" ") + names[i] + "=" + std::to_string(h[i]);
    return out;
}

const char* basin_name(BasinStatus s) {
    switch (s) {
        case BasinStatus::Converged: return "Converged";
        case BasinStatus::Diverged: return "Diverged";
        case BasinStatus::Undetermined: return "Undetermined";
    }
    return "?";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"feigen: renormalization fixed point solver and geometry probes"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_path;
    std::string format = "auto";
    FpOptions fpo;
    WindowOptions wo;
    std::map<CLI::App*, std::function<int()>> actions;

    auto add_config = [&](CLI::App* sub) { sub->add_option("--config", config_path, "key=value config file"); };

    // solve ---------------------------------------------------------------
    int s_ell = 2, s_n = 0, s_max_iter = 25;
    double s_tol = 1e-11;
    auto* solve = app.add_subcommand("solve", "solve the fixed-point equation and save the series");
    solve->add_option("--ell", s_ell, "critical degree (even)")->check(CLI::Range(2, 64));
    solve->add_option("--n-coeffs", s_n, "number of coefficients N (default 30 for ell=2, 40 otherwise)");
    solve->add_option("--tol", s_tol, "residual tolerance");
    solve->add_option("--max-iter", s_max_iter, "Newton iteration budget");
    solve->add_option("--out", out_path, "output fixed point file")->capture_default_str();
    add_config(solve);
    actions[solve] = [&]() {
        require(out_path, "--out");
        const int n = s_n > 0 ? s_n : (s_ell == 2 ? 30 : 40);
        const KeyValues entries{{"ell", std::to_string(s_ell)},
                                {"n-coeffs", std::to_string(n)},
                                {"tol", fmt(s_tol)},
                                {"max-iter", std::to_string(s_max_iter)}};
        const RenormFixedPoint fp = solve_cf(s_ell, n, s_tol, s_max_iter);
        const std::string text = serialize_fixed_point(fp) + "# feigen solve " + config_line(entries) + "\n";
        write_bytes(out_path, text);
        std::cout << report_header("solve", hex64(fnv1a64(text)), entries);
        std::cout << "lambda " << fmt(fp.lambda) << "\nx0 " << fmt(fp.x0) << "\nresidual " << fmt(fp.residual_sup)
                  << "\nnewton_iters " << fp.newton_iters << "\nrho " << fmt(fp.rho()) << "\n";
        return 0;
    };

    // cascade -------------------------------------------------------------
    int c_ell = 2, c_nmax = 10;
    double c_tol = 1e-10;
    auto* cascade = app.add_subcommand("cascade", "superstable parameters of z^ell + c with delta and alpha");
    cascade->add_option("--ell", c_ell, "critical degree (even)")->check(CLI::Range(2, 64));
    cascade->add_option("--n-max", c_nmax, "deepest period 2^n")->check(CLI::Range(0, kMaxCascadeDepth));
    cascade->add_option("--tol", c_tol, "bisection residual tolerance");
    add_config(cascade);
    actions[cascade] = [&]() {
        const KeyValues entries{{"ell", std::to_string(c_ell)}, {"n-max", std::to_string(c_nmax)}, {"tol", fmt(c_tol)}};
        const SuperstableCascade c = superstable_params(c_ell, c_nmax, c_tol);
        std::cout << report_header("cascade", "", entries);
        std::cout << "n s_n delta alpha\n";
        for (int n = 0; n <= c_nmax; ++n) {
            std::cout << n << " " << fmt(c.s[n]) << " ";
            std::cout << (n >= 2 ? fmt(c.delta_estimates[n - 2]) : "-") << " ";
            std::cout << (n >= 2 ? fmt(c.alpha_estimates[n - 2]) : "-") << "\n";
        }
        std::cout << "c_feig_estimate " << fmt(c.s.back()) << "\n";
        return 0;
    };

    // verify --------------------------------------------------------------
    VerifyOptions vopt;
    auto* verify = app.add_subcommand("verify", "run the invariant suite on a fixed point file");
    verify->add_option("--fp", fpo.path, "fixed point file");
    verify->add_option("--workers", fpo.workers, "parallel pixel workers")->check(CLI::Range(1, 256));
    verify->add_option("--max-residual", vopt.max_residual, "accepted validation residual");
    verify->add_option("--inclusion-samples", vopt.inclusion_samples, "samples of the inclusion suite");
    verify->add_option("--nesting-res", vopt.nesting_res, "raster size of the nesting check")
        ->check(CLI::Range(kMinRes, kMaxRes));
    add_config(verify);
    actions[verify] = [&]() {
        require(fpo.path, "--fp");
        const std::string text = read_text_file(fpo.path);
        const std::string hash = hex64(fnv1a64(text));
        const KeyValues entries{{"max-residual", fmt(vopt.max_residual)},
                                {"inclusion-samples", std::to_string(vopt.inclusion_samples)},
                                {"nesting-res", std::to_string(vopt.nesting_res)}};
        std::cout << report_header("verify", hash, entries);
        vopt.workers = fpo.workers;
        RenormFixedPoint fp = fixed_point_from_file(parse_fixed_point_file(text));
        const ExtensionConfig cfg = default_config(fp);
        const VerifyReport rep = verify_fixed_point(fp, cfg, vopt);
        std::cout << "check value limit status note\n";
        for (const auto& c : rep.items) {
            std::cout << c.name << " " << (c.skipped ? "-" : fmt_short(c.value, 4)) << " "
                      << (c.skipped ? "-" : fmt_short(c.limit, 3)) << " "
                      << (c.skipped ? "SKIP" : c.pass ? "PASS" : "FAIL") << " " << (c.note.empty() ? "-" : c.note)
                      << "\n";
        }
        if (rep.ok()) {
            std::cout << "verify PASS\n";
            return 0;
        }
        std::cout << "verify FAIL " << rep.failures() << "\n";
        return kExitViolation;
    };

    // render --------------------------------------------------------------
    std::string r_mode = "chessboard";
    int r_depth = 0;
    auto* render = app.add_subcommand("render", "rasterize the chessboard, skeleton, basin, puzzle or Julia set");
    add_fp_options(render, fpo);
    render->add_option("--mode", r_mode, "chessboard|skeleton|julia|basin|puzzle")
        ->check(CLI::IsMember({"chessboard", "skeleton", "julia", "basin", "puzzle"}));
    render->add_option("--depth", r_depth, "puzzle depth n")->check(CLI::Range(0, 40));
    add_window_options(render, wo);
    render->add_option("--out", out_path, "output file (.ppm, or .raster for a dump)")->capture_default_str();
    render->add_option("--format", format, "auto|ppm|dump")->check(CLI::IsMember({"auto", "ppm", "dump"}));
    add_config(render);
    actions[render] = [&]() {
        require(out_path, "--out");
        const RunConfig rc = run_config("render", &fpo, &wo);
        const LoadedFp l = load_fp(fpo);
        KeyValues entries{{"mode", r_mode}, {"depth", std::to_string(r_depth)}};
        append(entries, window_entries(wo));
        append(entries, extension_entries(l.cfg));
        const Window w = Window::square({rc.center_re, rc.center_im}, rc.width);
        Raster r;
        if (r_mode == "skeleton") {
            r = render_skeleton(l.fp, l.cfg, w, rc.res, rc.workers);
        } else {
            const RenderMode m = r_mode == "chessboard" ? RenderMode::Chessboard
                                 : r_mode == "julia"    ? RenderMode::Julia
                                 : r_mode == "basin"    ? RenderMode::Basin
                                                        : RenderMode::Puzzle;
            r = render_raster(l.fp, l.cfg, w, rc.res, rc.res, m, r_depth, rc.workers);
        }
        emit_raster(r, format, out_path, Palette::standard(), "render", l.hash, entries);
        std::cout << report_header("render", l.hash, entries) << "mode " << r.mode << "\n" << histogram_line(r) << "\n";
        return 0;
    };

    // probe-x1 ------------------------------------------------------------
    auto* probe_x1 = app.add_subcommand("probe-x1", "locate the repelling corner 2-cycle x1");
    add_fp_options(probe_x1, fpo);
    add_config(probe_x1);
    actions[probe_x1] = [&]() {
        const LoadedFp l = load_fp(fpo);
        KeyValues entries;
        append(entries, extension_entries(l.cfg));
        const CornerPoint c = find_x1(l.fp, l.cfg);
        const BasinResult b = classify_basin(l.fp, l.cfg, c.x1);
        const EvalOutcome gx = eval_g(l.fp, l.cfg, c.x1);
        std::cout << report_header("probe-x1", l.hash, entries);
        std::cout << "x1 " << fmt(c.x1.real()) << " " << fmt(c.x1.imag()) << "\n";
        std::cout << "multiplier " << fmt(c.multiplier.real()) << " " << fmt(c.multiplier.imag()) << "\n";
        std::cout << "multiplier_abs " << fmt(std::abs(c.multiplier)) << "\n";
        std::cout << "residual " << fmt_short(c.residual, 4) << "\n";
        std::cout << "g(x1)-conj(x1) " << (gx.ok() ? fmt_short(std::abs(gx.w - std::conj(c.x1)), 4) : "undetermined")
                  << "\n";
        std::cout << "basin " << basin_name(b.status) << "\n";
        return 0;
    };

    // probe-deep ----------------------------------------------------------
    std::string d_radii = "3..10";
    int d_grid = 16;
    auto* probe_deep = app.add_subcommand("probe-deep", "largest Converged disks in balls around x1");
    add_fp_options(probe_deep, fpo);
    probe_deep->add_option("--radii", d_radii, "radii 2^-k for k in k1..k2");
    probe_deep->add_option("--grid", d_grid, "centers per side of the search grid")->check(CLI::Range(2, 256));
    add_config(probe_deep);
    actions[probe_deep] = [&]() {
        const LoadedFp l = load_fp(fpo);
        const auto [k1, k2] = parse_range(d_radii);
        KeyValues entries{{"radii", std::to_string(k1) + ".." + std::to_string(k2)}, {"grid", std::to_string(d_grid)}};
        append(entries, extension_entries(l.cfg));
        const CornerPoint c = find_x1(l.fp, l.cfg);
        std::vector<double> radii;
        for (int k = k1; k <= k2; ++k) radii.push_back(std::ldexp(1.0, -k));
        const auto rows = deep_point_probe(l.fp, l.cfg, c.x1, radii, d_grid);
        std::cout << report_header("probe-deep", l.hash, entries);
        std::cout << "x1 " << fmt(c.x1.real()) << " " << fmt(c.x1.imag()) << "\n";
        std::cout << "k r best_radius ratio\n";
        double min_ratio = INFINITY;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            std::cout << k1 + static_cast<int>(i) << " " << fmt(rows[i].r) << " " << fmt(rows[i].best_radius) << " "
                      << fmt_short(rows[i].ratio) << "\n";
            min_ratio = std::min(min_ratio, rows[i].ratio);
        }
        std::cout << "min_ratio " << fmt_short(min_ratio) << "\n";
        return 0;
    };

    // check-nesting -------------------------------------------------------
    int n_max_depth = 1;
    auto* nesting = app.add_subcommand("check-nesting", "pieces of puzzle(n+1) inside pieces of puzzle(n)");
    add_fp_options(nesting, fpo);
    add_window_options(nesting, wo);
    nesting->add_option("--max-depth", n_max_depth, "check n = 0..max-depth")->check(CLI::Range(0, 20));
    add_config(nesting);
    actions[nesting] = [&]() {
        const RunConfig rc = run_config("check-nesting", &fpo, &wo);
        const LoadedFp l = load_fp(fpo);
        KeyValues entries{{"max-depth", std::to_string(n_max_depth)}};
        append(entries, window_entries(wo));
        append(entries, extension_entries(l.cfg));
        const Window w = Window::square({rc.center_re, rc.center_im}, rc.width);
        std::cout << report_header("check-nesting", l.hash, entries);
        std::cout << "n components nested fraction components_all nested_all fraction_all vacuous excluded_pixels "
                     "unknown_outer unknown_inner\n";
        bool all_nested = true;
        for (int d = 0; d <= n_max_depth; ++d) {
            const NestingReport rep = puzzle_nesting_check(l.fp, l.cfg, w, rc.res, d, rc.workers);
            std::cout << d << " " << rep.components << " " << rep.nested << " " << fmt_short(rep.nested_fraction())
                      << " " << rep.components_all << " " << rep.nested_all << " "
                      << fmt_short(rep.nested_fraction_all()) << " " << (rep.vacuous ? 1 : 0) << " "
                      << rep.excluded_pixels << " " << fmt_short(rep.unknown_fraction_outer, 4) << " "
                      << fmt_short(rep.unknown_fraction_inner, 4) << "\n";
            all_nested = all_nested && rep.nested == rep.components && rep.nested_all == rep.components_all;
        }
        std::cout << "nesting " << (all_nested ? "PASS" : "FAIL") << "\n";
        return all_nested ? 0 : kExitViolation;
    };

    // conjecture-stats ----------------------------------------------------
    double cs_min_piece = 0.05;
    bool cs_table = false;
    WindowOptions cw{"0,0", 8.0, 1024};
    auto* conj = app.add_subcommand("conjecture-stats", "diameter ratios of nested puzzle pieces");
    add_fp_options(conj, fpo);
    add_window_options(conj, cw);
    conj->add_option("--min-piece-frac", cs_min_piece, "pieces below this fraction of the largest are not paired");
    conj->add_flag("--table", cs_table, "print the per-pair table");
    add_config(conj);
    actions[conj] = [&]() {
        const RunConfig rc = run_config("conjecture-stats", &fpo, &cw);
        const LoadedFp l = load_fp(fpo);
        KeyValues entries{{"min-piece-frac", fmt(cs_min_piece)}, {"table", cs_table ? "1" : "0"}};
        append(entries, window_entries(cw));
        append(entries, extension_entries(l.cfg));
        const Window w = Window::square({rc.center_re, rc.center_im}, rc.width);
        const ConjectureStats st = conjecture_stats(l.fp, l.cfg, w, rc.res, cs_min_piece, rc.workers);
        std::cout << report_header("conjecture-stats", l.hash, entries);
        std::cout << "window " << window_token(st.window) << "\n";
        std::cout << "min_ratio " << fmt_short(st.min_ratio) << "\n";
        std::cout << "max_diameter " << fmt_short(st.max_diameter) << "\n";
        std::cout << "min_piece_diameter " << fmt_short(st.min_piece_diameter) << "\n";
        std::cout << "pairs_considered " << st.pairs_considered << "\n";
        std::cout << "unknown_fraction " << fmt_short(st.unknown_fraction, 4) << "\n";
        if (cs_table) {
            std::cout << "inner outer inner_diameter outer_diameter ratio\n";
            for (const auto& p : st.table)
                std::cout << p.inner << " " << p.outer << " " << fmt_short(p.inner_diameter) << " "
                          << fmt_short(p.outer_diameter) << " " << fmt_short(p.ratio) << "\n";
        }
        return 0;
    };

    // lc-evidence ---------------------------------------------------------
    int lc_nmax = 3;
    WindowOptions lcw{"0,0", 3.2, 512};
    auto* lc = app.add_subcommand("lc-evidence", "components of K(f) in rescaled copies of W");
    add_fp_options(lc, fpo);
    lc->add_option("--n-max", lc_nmax, "deepest rescaling n")->check(CLI::Range(0, 20));
    add_window_options(lc, lcw);
    add_config(lc);
    actions[lc] = [&]() {
        const RunConfig rc = run_config("lc-evidence", &fpo, &lcw);
        const LoadedFp l = load_fp(fpo);
        KeyValues entries{{"n-max", std::to_string(lc_nmax)}};
        append(entries, window_entries(lcw));
        append(entries, extension_entries(l.cfg));
        const Window base = Window::square({rc.center_re, rc.center_im}, rc.width);
        const auto rows = local_connectivity_evidence(l.fp, l.cfg, lc_nmax, rc.res, base, rc.workers);
        std::cout << report_header("lc-evidence", l.hash, entries);
        std::cout << "n width pixels components small_components unknown_pixels vacuous saturated\n";
        for (const auto& r : rows)
            std::cout << r.n << " " << fmt_short(r.window.width) << " " << r.pixels << " " << r.components << " "
                      << r.small_components << " " << r.unknown_pixels << " " << (r.vacuous ? 1 : 0) << " "
                      << (r.saturated ? 1 : 0) << "\n";
        return 0;
    };

    // mandelbrot ----------------------------------------------------------
    int m_iter = 1000;
    WindowOptions mw{"-0.75,0", 3.0, 512};
    auto* mandel = app.add_subcommand("mandelbrot", "escape-time image of the Mandelbrot set");
    add_window_options(mandel, mw);
    mandel->add_option("--max-iter", m_iter, "iteration budget")->check(CLI::Range(1, 10000000));
    mandel->add_option("--workers", fpo.workers, "parallel pixel workers")->check(CLI::Range(1, 256));
    mandel->add_option("--out", out_path, "output file (.ppm, or .raster for a dump)")->capture_default_str();
    mandel->add_option("--format", format, "auto|ppm|dump")->check(CLI::IsMember({"auto", "ppm", "dump"}));
    add_config(mandel);
    actions[mandel] = [&]() {
        require(out_path, "--out");
        const RunConfig rc = run_config("mandelbrot", &fpo, &mw);
        KeyValues entries{{"max-iter", std::to_string(m_iter)}};
        append(entries, window_entries(mw));
        const Raster r =
            render_mandelbrot(Window::square({rc.center_re, rc.center_im}, rc.width), rc.res, m_iter, rc.workers);
        emit_raster(r, format, out_path, Palette::escape_time(), "mandelbrot", "", entries);
        std::cout << report_header("mandelbrot", "", entries) << histogram_line(r) << "\n";
        return 0;
    };

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        for (auto& [sub, action] : actions) {
            if (!sub->parsed()) continue;
            if (!config_path.empty()) apply_config_file(sub, config_path);
            return action();
        }
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const VerificationFailed& e) {
        std::cerr << "verification failed: " << e.what() << "\n";
        return kExitViolation;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
