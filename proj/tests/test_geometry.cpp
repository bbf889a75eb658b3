#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "feigen/geometry.hpp"
#include "feigen/probes.hpp"
#include "feigen/skeleton.hpp"

using namespace feigen;
using feigen::testing::reference_cfg;
using feigen::testing::reference_fp;

namespace {

CellColor mirror(CellColor c) {
    if (c == CellColor::Plus) return CellColor::Minus;
    if (c == CellColor::Minus) return CellColor::Plus;
    return c;
}

}  // namespace

TEST(ChessColor, FirstSquareIsMinusNearZero) {
    // Im f(z) ~ c1 Im(z^2) ~ -1.5e-4 here, below the default band of 1e-3.
    ExtensionConfig cfg = reference_cfg();
    cfg.skel_tol = 1e-5;
    const cplx z = std::polar(0.01, std::numbers::pi / 4.0);
    EXPECT_EQ(chess_color(reference_fp(), cfg, z), CellColor::Minus);
    EXPECT_EQ(chess_color(reference_fp(), reference_cfg(), z), CellColor::SkeletonBand);
}

TEST(ChessColor, RealPointsAreSkeleton) {
    const auto& fp = reference_fp();
    for (double t : {0.05, 0.3, 0.6, 0.9}) {
        EXPECT_EQ(chess_color(fp, reference_cfg(), cplx{t * fp.x0 / fp.lambda, 0.0}), CellColor::SkeletonBand);
    }
}

TEST(ChessColor, ConjugationMirrorsColor) {
    const auto& fp = reference_fp();
    SplitMix64 rng(9);
    for (int i = 0; i < 300; ++i) {
        const cplx z{rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5)};
        EXPECT_EQ(chess_color(fp, reference_cfg(), std::conj(z)), mirror(chess_color(fp, reference_cfg(), z))) << z;
    }
}

TEST(ChessColor, PlusAndMinusOnlyInBasin) {
    const auto& fp = reference_fp();
    SplitMix64 rng(10);
    for (int i = 0; i < 300; ++i) {
        const cplx z{rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)};
        const CellColor c = chess_color(fp, reference_cfg(), z);
        if (c == CellColor::Plus || c == CellColor::Minus) {
            EXPECT_TRUE(classify_basin(fp, reference_cfg(), z).converged());
        }
    }
}

TEST(DomainW, RealTraceIsTheInterval) {
    const auto& fp = reference_fp();
    const double edge = fp.x0 / fp.lambda;
    EXPECT_EQ(in_w(fp, reference_cfg(), cplx{0.0, 0.0}), Tristate(true));
    EXPECT_EQ(in_w(fp, reference_cfg(), cplx{0.99 * edge, 0.0}), Tristate(true));
    EXPECT_EQ(in_w(fp, reference_cfg(), cplx{-0.99 * edge, 0.0}), Tristate(true));
    EXPECT_EQ(in_w(fp, reference_cfg(), cplx{1.01 * edge, 0.0}), Tristate(false));
}

TEST(DomainW, SymmetricUnderConjugationAndNegation) {
    const auto& fp = reference_fp();
    SplitMix64 rng(12);
    for (int i = 0; i < 200; ++i) {
        const cplx z{rng.uniform(-2.5, 2.5), rng.uniform(-1.0, 1.0)};
        const Tristate a = in_w(fp, reference_cfg(), z);
        EXPECT_EQ(a, in_w(fp, reference_cfg(), std::conj(z)));
        EXPECT_EQ(a, in_w(fp, reference_cfg(), -z));
    }
}

TEST(FilledJulia, X0IsInside) {
    const auto& fp = reference_fp();
    EXPECT_EQ(in_filled_julia(fp, reference_cfg(), cplx{fp.x0, 0.0}).status, JuliaStatus::Inside);
}

TEST(FilledJulia, BeyondEscapeRadiusEscapesAtOnce) {
    const auto& fp = reference_fp();
    const JuliaResult j = in_filled_julia(fp, reference_cfg(), cplx{2.0 / (fp.lambda * fp.lambda), 0.0});
    EXPECT_EQ(j.status, JuliaStatus::Escaped);
    EXPECT_LE(j.steps, 1);
}

TEST(FilledJulia, RealSegmentIsInside) {
    const auto& fp = reference_fp();
    for (double x : {-1.0, -0.5, 0.0, 0.25, 0.7, 1.0}) {
        EXPECT_EQ(in_filled_julia(fp, reference_cfg(), cplx{x, 0.0}).status, JuliaStatus::Inside) << x;
    }
}

TEST(FilledJulia, InsideFractionStableUnderDoubledBound) {
    const auto& fp = reference_fp();
    ExtensionConfig wide = reference_cfg();
    wide.escape_bound *= 2.0;
    const Window w = Window::square({0.0, 0.0}, 3.2);
    const Raster a = render_raster(fp, reference_cfg(), w, 128, 128, RenderMode::Julia);
    const Raster b = render_raster(fp, wide, w, 128, 128, RenderMode::Julia);
    const double fa = double(color_histogram(a)[static_cast<int>(CellColor::Inside)]) / a.size();
    const double fb = double(color_histogram(b)[static_cast<int>(CellColor::Inside)]) / b.size();
    ASSERT_GT(fa, 0.0);
    EXPECT_LT(std::abs(fa - fb) / fa, 0.02);
}

TEST(CornerPoint, RepellingTwoCycle) {
    const auto& fp = reference_fp();
    const CornerPoint c = find_x1(fp, reference_cfg());
    EXPECT_LT(c.residual, 1e-10);
    EXPECT_GT(std::abs(c.multiplier), 1.0);
    EXPECT_GT(c.x1.imag(), 0.0);
    const EvalOutcome g = eval_g(fp, reference_cfg(), c.x1);
    ASSERT_TRUE(g.ok());
    EXPECT_LT(std::abs(g.w - std::conj(c.x1)), 1e-8);
}

TEST(CornerPoint, FrozenLocation) {
    const CornerPoint c = find_x1(reference_fp(), reference_cfg());
    EXPECT_NEAR(c.x1.real(), 1.831258984937, 1e-9);
    EXPECT_NEAR(c.x1.imag(), 2.683150900474, 1e-9);
    EXPECT_NEAR(std::abs(c.multiplier), 3.87178, 1e-5);
}

TEST(CornerPoint, QuarticInstance) {
    const RenormFixedPoint fp = solve_cf(4, 40, 1e-10, 25);
    const ExtensionConfig cfg = default_config(fp);
    const CornerPoint c = find_x1(fp, cfg);
    EXPECT_LT(c.residual, 1e-10);
    EXPECT_GT(std::abs(c.multiplier), 1.0);
    EXPECT_FALSE(classify_basin(fp, cfg, c.x1).converged());
}

class SkeletonTest : public ::testing::Test {
protected:
    static const SkeletonTrace& trace() {
        static const SkeletonTrace t =
            trace_skeleton(reference_fp(), reference_cfg(), Window::square({0.0, 0.0}, 2.0), 128);
        return t;
    }
};

TEST_F(SkeletonTest, RealAxisIsTraced) {
    // The axes cross at the saddle 0, so the real segment is split between polylines.
    std::vector<double> xs;
    for (const Polyline& line : trace().polylines)
        for (cplx p : line)
            if (p.imag() == 0.0) xs.push_back(p.real());
    std::sort(xs.begin(), xs.end());
    ASSERT_FALSE(xs.empty());
    EXPECT_LT(xs.front(), -0.98);
    EXPECT_GT(xs.back(), 0.98);
    double gap = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i) gap = std::max(gap, xs[i] - xs[i - 1]);
    EXPECT_LE(gap, 1.01 * trace().cell_size);
}

TEST_F(SkeletonTest, ClosedUnderConjugation) {
    std::vector<std::pair<double, double>> pts, mirrored;
    for (const Polyline& line : trace().polylines) {
        for (cplx p : line) {
            pts.emplace_back(p.real(), p.imag());
            mirrored.emplace_back(p.real(), -p.imag());
        }
    }
    auto snap = [](std::vector<std::pair<double, double>>& v) {
        for (auto& [x, y] : v) {
            x = std::round(x * 1e9) / 1e9;
            y = std::round(y * 1e9) / 1e9 + 0.0;
        }
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    snap(pts);
    snap(mirrored);
    ASSERT_FALSE(pts.empty());
    EXPECT_EQ(pts, mirrored);
}

TEST_F(SkeletonTest, VerticesLieOnTheZeroSet) {
    const auto& t = trace();
    int checked = 0;
    for (const Polyline& line : t.polylines) {
        for (cplx p : line) {
            const BasinResult b = classify_basin(reference_fp(), reference_cfg(), p);
            if (!b.converged()) continue;
            ++checked;
            EXPECT_LT(std::abs(b.fhat.imag()), t.cell_size * std::abs(b.fhat_deriv) + 1e-12) << p;
        }
    }
    EXPECT_GT(checked, 100);
}

TEST(Skeleton, EmptyWhenNothingConverges) {
    const SkeletonTrace t = trace_skeleton(reference_fp(), reference_cfg(), Window::square({60.0, 60.0}, 1.0), 16);
    EXPECT_TRUE(t.polylines.empty());
}
