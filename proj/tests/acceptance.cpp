// Acceptance driver: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "feigen/cascade.hpp"
#include "feigen/config.hpp"
#include "feigen/probes.hpp"
#include "feigen/render.hpp"
#include "feigen/solver.hpp"
#include "feigen/verify.hpp"

using namespace feigen;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v, int digits = 6) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Shared {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    RenormFixedPoint fp = solve_cf(2, 30, 1e-11, 25);
    double solve_seconds = seconds_since(t0);
    int solve_iters = fp.newton_iters;
    ExtensionConfig cfg = default_config(fp);
    std::chrono::steady_clock::time_point t1 = std::chrono::steady_clock::now();
    SuperstableCascade cascade = superstable_params(2, 10, 1e-10);
    double cascade_seconds = seconds_since(t1);
};

Shared& shared() {
    static Shared s;
    return s;
}

Outcome c1_residual() {
    const Shared& s = shared();
    const double res = validation_residual(s.fp.series, s.fp.lambda, validation_points(s.fp.series.degree()));
    const auto pts = validation_points(s.fp.series.degree());
    const bool ok = s.solve_iters <= 25 && res < 1e-11 && pts.size() == 120 && s.solve_seconds < 10.0;
    return {ok, "iters=" + std::to_string(s.solve_iters) + " residual=" + num(res, 3) + " points=" +
                    std::to_string(pts.size()) + " time=" + num(s.solve_seconds, 3) + "s"};
}

Outcome c2_identities() {
    const FixedPointIdentities id = fixed_point_identities(shared().fp, shared().cfg);
    const bool ok = id.lambda_defect < 1e-12 && id.x0_fixed < 1e-8 && id.critical_value < 1e-8;
    return {ok, "|f(1)+lambda|=" + num(id.lambda_defect, 3) + " |f(lambda x0)-x0|=" + num(id.x0_fixed, 3) +
                    " |f(x0/lambda)+1/lambda|=" + num(id.critical_value, 3)};
}

Outcome c3_multiplier() {
    const FixedPointIdentities id = fixed_point_identities(shared().fp, shared().cfg);
    return {id.multiplier < 1e-8, "|lambda f'(lambda x0)+lambda|=" + num(id.multiplier, 3)};
}

Outcome c4_cross_oracle() {
    const Shared& s = shared();
    const double alpha = s.cascade.alpha_estimates.back();
    const double prod = std::abs(s.fp.lambda * alpha - 1.0);
    const double dc = std::abs(s.cascade.s.back() + 1.401155);
    const bool ok = prod < 1e-4 && dc < 1e-5 && s.cascade_seconds < 30.0;
    return {ok, "alpha=" + num(alpha, 10) + " |lambda alpha-1|=" + num(prod, 3) + " s10=" + num(s.cascade.s.back(), 12) +
                    " |s10-c_feig|=" + num(dc, 3) + " time=" + num(s.cascade_seconds, 3) + "s"};
}

Outcome c5_cascade_settling() {
    const auto& d = shared().cascade.delta_estimates;
    const auto& a = shared().cascade.alpha_estimates;
    auto spread = [](const std::vector<double>& v) {
        const std::size_t n = v.size();
        return std::max({std::abs(v[n - 1] - v[n - 2]), std::abs(v[n - 1] - v[n - 3]), std::abs(v[n - 2] - v[n - 3])});
    };
    const double sd = spread(d), sa = spread(a);
    return {sd < 1e-3 && sa < 1e-3, "delta_last=" + num(d.back(), 9) + " spread=" + num(sd, 3) +
                                        " alpha_last=" + num(a.back(), 9) + " spread=" + num(sa, 3)};
}

Outcome c6_extension() {
    const ForcedRecursionResult fr = forced_recursion_check(shared().fp, shared().cfg, 500);
    const BasinIdentityResult bi = basin_cf_identity(shared().fp, shared().cfg, 1000);
    const bool ok = fr.sup < 1e-8 && bi.points == 1000 && bi.sup < 1e-7;
    return {ok, "forced_sup=" + num(fr.sup, 3) + " (" + std::to_string(fr.recursed) + "/500 recursed, radius " +
                    num(forced_radius(shared().fp), 4) + ") cf_identity_sup=" + num(bi.sup, 3) + " over " +
                    std::to_string(bi.points) + " Converged points"};
}

Outcome c7_x1() {
    const CornerPoint c = find_x1(shared().fp, shared().cfg);
    const BasinResult b = classify_basin(shared().fp, shared().cfg, c.x1);
    const bool ok = c.residual < 1e-10 && std::abs(c.multiplier) > 1.0 && !b.converged();
    return {ok, "x1=" + num(c.x1.real(), 12) + "+" + num(c.x1.imag(), 12) + "i residual=" + num(c.residual, 3) +
                    " |mult|=" + num(std::abs(c.multiplier)) +
                    " basin=" + (b.status == BasinStatus::Diverged ? "Diverged" : b.converged() ? "Converged" : "Undetermined")};
}

Outcome c8_inclusion() {
    const InclusionReport r = inclusion_check(shared().fp, shared().cfg, 4, 10000);
    const bool ok = r.total_violations() == 0 && r.undetermined_fraction() < 0.2;
    return {ok, "samples=10000 violations=" + std::to_string(r.total_violations()) +
                    " checked(a,b,c,d)=" + std::to_string(r.julia_scaling.checked) + "," +
                    std::to_string(r.julia_in_basin.checked) + "," + std::to_string(r.basin_scaling.checked) + "," +
                    std::to_string(r.basin_orbit.checked) + " undetermined=" + num(r.undetermined_fraction(), 4)};
}

Outcome c9_nesting() {
    bool ok = true;
    std::string detail;
    for (int depth : {0, 1}) {
        const NestingReport n = puzzle_nesting_check(shared().fp, shared().cfg, Window::square({0, 0}, 2.0), 512, depth);
        ok = ok && n.nested_fraction() == 1.0 && n.nested_fraction_all() == 1.0;
        detail += (depth ? " " : "") + std::to_string(depth + 1) + "-in-" + std::to_string(depth) + ": interior " +
                  std::to_string(n.nested) + "/" + std::to_string(n.components) + ", with edge pieces " +
                  std::to_string(n.nested_all) + "/" + std::to_string(n.components_all) + ", excluded px " +
                  std::to_string(n.excluded_pixels) + (n.vacuous ? ", interior vacuous" : "") + ";";
    }
    return {ok, detail};
}

Outcome c10_local_connectivity() {
    const auto rows = local_connectivity_evidence(shared().fp, shared().cfg, 3, 512, Window::square({0, 0}, 3.2));
    bool ok = true;
    std::string detail;
    for (const LcRow& r : rows) {
        ok = ok && r.components == 1;
        detail += "n=" + std::to_string(r.n) + ":" + std::to_string(r.components) + (r.saturated ? "(saturated)" : "") + " ";
    }
    return {ok, detail + "components"};
}

Outcome c11_conjecture() {
    const Window w = Window::square({0, 0}, 8.0);
    const ConjectureStats a = conjecture_stats(shared().fp, shared().cfg, w, 1024);
    const ConjectureStats b = conjecture_stats(shared().fp, shared().cfg, w, 2048);
    const double drift = std::abs(b.min_ratio - a.min_ratio) / a.min_ratio;
    const bool ok = a.pairs_considered > 0 && a.min_ratio > 1.0 && b.min_ratio > 1.0 && drift < 0.05;
    return {ok, "window width 8: min_ratio@1024=" + num(a.min_ratio) + " (" + std::to_string(a.pairs_considered) +
                    " pairs) min_ratio@2048=" + num(b.min_ratio) + " (" + std::to_string(b.pairs_considered) +
                    " pairs) drift=" + num(drift, 3)};
}

struct CliRun {
    int code = -1;
    std::string out;
};

CliRun cli(const std::string& args) {
    FILE* p = popen((std::string(FEIGEN_CLI) + " " + args + " 2>&1").c_str(), "r");
    CliRun r;
    if (!p) return r;
    char buf[4096];
    for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
    const int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

Outcome c12_determinism() {
    const fs::path dir = fs::temp_directory_path() / "feigen_acceptance";
    fs::create_directories(dir);
    const std::string ref = std::string(FEIGEN_DATA_DIR) + "/reference_l2.txt";
    struct Job {
        std::string args;
        std::string file;  // empty: stdout only
    };
    const std::vector<Job> jobs = {
        {"render --fp " + ref + " --mode chessboard --res 256", "chess.raster"},
        {"render --fp " + ref + " --mode puzzle --depth 2 --res 256", "puzzle.raster"},
        {"render --fp " + ref + " --mode julia --res 256 --width 3.2", "julia.raster"},
        {"render --fp " + ref + " --mode basin --res 256 --width 6", "basin.ppm"},
        {"render --fp " + ref + " --mode skeleton --res 256", "skeleton.ppm"},
        {"mandelbrot --res 256", "mandel.ppm"},
        {"check-nesting --fp " + ref + " --res 256", ""},
        {"conjecture-stats --fp " + ref + " --res 256 --table", ""},
        {"lc-evidence --fp " + ref + " --res 128", ""},
        {"verify --fp " + ref + " --nesting-res 128 --inclusion-samples 500", ""},
    };
    int compared = 0;
    for (const Job& j : jobs) {
        std::string first_out, first_file;
        int run = 0;
        for (int workers : {1, 4, 8, 1, 1}) {
            std::string args = j.args + " --workers " + std::to_string(workers);
            const fs::path out = dir / j.file;
            if (!j.file.empty()) args += " --out " + out.string();
            const CliRun r = cli(args);
            if (r.code != 0) return {false, "'" + args + "' exited " + std::to_string(r.code) + ": " + r.out};
            const std::string bytes = j.file.empty() ? std::string() : slurp(out);
            if (run++ == 0) {
                first_out = r.out;
                first_file = bytes;
                continue;
            }
            if (r.out != first_out) return {false, "report differs: " + args};
            if (bytes != first_file) return {false, "output file differs: " + args};
            ++compared;
        }
    }
    return {true, std::to_string(jobs.size()) + " commands x (workers 1,4,8 + 2 reruns), " + std::to_string(compared) +
                      " byte comparisons identical"};
}

Outcome c13_escape_bound() {
    const Window w = Window::square({0, 0}, 3.2);
    ExtensionConfig doubled = shared().cfg;
    doubled.escape_bound *= 2.0;
    auto inside_fraction = [&](const ExtensionConfig& cfg) {
        const Raster r = render_raster(shared().fp, cfg, w, 512, 512, RenderMode::Julia, 0, 1);
        return static_cast<double>(color_histogram(r)[static_cast<int>(CellColor::Inside)]) / r.size();
    };
    const double a = inside_fraction(shared().cfg), b = inside_fraction(doubled);
    const double rel = std::abs(b - a) / a;
    return {rel < 0.02, "B=" + num(shared().cfg.escape_bound, 5) + " inside=" + num(a) + "; B=" + num(doubled.escape_bound, 5) +
                            " inside=" + num(b) + "; relative change=" + num(rel, 3)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"cf_residual", c1_residual},           {"fixed_point_identities", c2_identities},
        {"multiplier", c3_multiplier},          {"cross_oracle_constants", c4_cross_oracle},
        {"cascade_settling", c5_cascade_settling}, {"extension_consistency", c6_extension},
        {"x1_probe", c7_x1},                    {"inclusion_suite", c8_inclusion},
        {"puzzle_nesting", c9_nesting},         {"local_connectivity", c10_local_connectivity},
        {"conjecture_probe", c11_conjecture},   {"determinism", c12_determinism},
        {"escape_bound_stability", c13_escape_bound},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::cout << "criterion " << i + 1 << " " << (o.pass ? "PASS" : "FAIL") << " " << criteria[i].first << ": "
                  << o.detail << " [" << num(seconds_since(t0), 3) << "s]" << std::endl;
    }
    std::cout << "acceptance " << (failed ? "FAIL " + std::to_string(failed) : std::string("PASS")) << std::endl;
    return failed ? 1 : 0;
}
