#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "common.hpp"
#include "feigen/render.hpp"

using namespace feigen;
using feigen::testing::reference_cfg;
using feigen::testing::reference_fp;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

constexpr double kCFeig = -1.401155;

}  // namespace

TEST(Ppm, TwoPixelPayload) {
    Raster r;
    r.width_px = 2;
    r.height_px = 1;
    r.cells = {CellColor::Plus, CellColor::Minus};
    const std::string bytes = encode_ppm(r, Palette::standard());
    EXPECT_EQ(bytes, std::string("P6\n2 1\n255\n") + "\xE0\xE0\xE0" + "\x40\x40\x40");
}

TEST(Ppm, PaletteTable) {
    const Palette p = Palette::standard();
    EXPECT_EQ(p(CellColor::Plus, 0), (Rgb{224, 224, 224}));
    EXPECT_EQ(p(CellColor::Minus, 0), (Rgb{64, 64, 64}));
    EXPECT_EQ(p(CellColor::SkeletonBand, 0), (Rgb{0, 0, 0}));
    EXPECT_EQ(p(CellColor::Exterior, 0), (Rgb{255, 255, 255}));
    EXPECT_EQ(p(CellColor::Unknown, 0), (Rgb{150, 150, 150}));
    EXPECT_EQ(p(CellColor::Inside, 0), (Rgb{0, 0, 0}));
    const Palette g = Palette::escape_time();
    EXPECT_EQ(g(CellColor::Exterior, 0), (Rgb{255, 255, 255}));
    EXPECT_EQ(g(CellColor::Exterior, 10), (Rgb{215, 215, 235}));
    EXPECT_EQ(g(CellColor::Exterior, 1000), g(CellColor::Exterior, 32));
}

TEST(Ppm, CommentLine) {
    Raster r;
    r.width_px = 1;
    r.height_px = 1;
    r.cells = {CellColor::Unknown};
    EXPECT_EQ(encode_ppm(r, Palette::standard(), "a\nb"), std::string("P6\n# a b\n1 1\n255\n") + "\x96\x96\x96");
}

TEST(Ppm, IdenticalFilesForIdenticalRasters) {
    const Raster r = render_mandelbrot(Window::square({-0.75, 0.0}, 3.0), 64, 200);
    const auto dir = std::filesystem::temp_directory_path();
    const std::string a = (dir / "feigen_ppm_a.ppm").string(), b = (dir / "feigen_ppm_b.ppm").string();
    write_ppm(r, Palette::escape_time(), a, "x");
    write_ppm(r, Palette::escape_time(), b, "x");
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_EQ(slurp(a).size(), std::string("P6\n# x\n64 64\n255\n").size() + 3 * 64 * 64);
    std::filesystem::remove(a);
    std::filesystem::remove(b);
}

TEST(Ppm, UnwritablePath) {
    Raster r;
    r.width_px = r.height_px = 1;
    r.cells = {CellColor::Plus};
    EXPECT_THROW(write_ppm(r, Palette::standard(), "/nonexistent-dir/x.ppm"), IoError);
}

TEST(Mandelbrot, OriginDoesNotEscape) { EXPECT_EQ(quadratic_escape(0.0, 0.0, 100000), -1); }

TEST(Mandelbrot, OneEscapes) { EXPECT_GE(quadratic_escape(1.0, 0.0, 100), 0); }

TEST(Mandelbrot, FeigenbaumParameterIsBounded) { EXPECT_EQ(quadratic_escape(kCFeig, 0.0, 10000), -1); }

TEST(Mandelbrot, RasterModeAndCells) {
    const Raster r = render_mandelbrot(Window::square({-0.75, 0.0}, 3.0), 64, 500);
    EXPECT_EQ(r.mode, "mandelbrot");
    const auto h = color_histogram(r);
    EXPECT_GT(h[static_cast<int>(CellColor::Inside)], 0u);
    EXPECT_GT(h[static_cast<int>(CellColor::Exterior)], 0u);
    EXPECT_EQ(h[static_cast<int>(CellColor::Inside)] + h[static_cast<int>(CellColor::Exterior)], r.size());
}

TEST(QuadraticJulia, UnitDiskDynamics) {
    EXPECT_EQ(quadratic_escape(0.0, 0.5, 1000), -1);
    EXPECT_EQ(quadratic_escape(0.0, 3.0, 1000), 0);
}

TEST(QuadraticJulia, OddSymmetry) {
    for (double c : {kCFeig, -1.0}) {
        const Raster r = render_julia_quadratic(c, Window::square({0.0, 0.0}, 4.0), 128, 500);
        for (int row = 0; row < 128; ++row)
            for (int col = 0; col < 128; ++col) ASSERT_EQ(r.at(row, col), r.at(127 - row, 127 - col)) << c;
    }
}

TEST(QuadraticJulia, InteriorOnlyWithAttractingCycle) {
    const Window w = Window::square({0.0, 0.0}, 4.0);
    // c = -1 has an attracting 2-cycle; at c_Feig the filled Julia set has no interior
    EXPECT_GT(color_histogram(render_julia_quadratic(-1.0, w, 128, 500))[static_cast<int>(CellColor::Inside)], 1000u);
    EXPECT_LT(color_histogram(render_julia_quadratic(kCFeig, w, 128, 500))[static_cast<int>(CellColor::Inside)], 20u);
}

TEST(SkeletonRender, DrawsBandCells) {
    const Raster r = render_skeleton(reference_fp(), reference_cfg(), Window::square({0.0, 0.0}, 2.0), 64);
    EXPECT_EQ(r.mode, "skeleton");
    EXPECT_GT(color_histogram(r)[static_cast<int>(CellColor::SkeletonBand)], 64u);
}
