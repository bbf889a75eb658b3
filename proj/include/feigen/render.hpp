#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <string>

#include "feigen/raster.hpp"
#include "feigen/skeleton.hpp"

namespace feigen {

struct Rgb {
    std::uint8_t r, g, b;
    bool operator==(const Rgb&) const = default;
};

/// Fixed cell palette. Exterior cells of escape-time rasters are shaded from white
/// toward light blue-gray by escape step when `graded_exterior` is set.
struct Palette {
    std::array<Rgb, 6> color{{
        {224, 224, 224},  // Plus: light
        {64, 64, 64},     // Minus: dark
        {0, 0, 0},        // SkeletonBand: black
        {255, 255, 255},  // Exterior: white
        {150, 150, 150},  // Unknown: gray
        {0, 0, 0},        // Inside: black
    }};
    bool graded_exterior = false;

    Rgb operator()(CellColor c, int steps) const {
        if (graded_exterior && c == CellColor::Exterior) {
            // steps 0.. fade in over the first 32 iterations
            const int t = std::min(steps, 32);
            const auto v = static_cast<std::uint8_t>(255 - t * 4);
            return {v, v, static_cast<std::uint8_t>(255 - t * 2)};
        }
        return color[static_cast<std::size_t>(c)];
    }

    static Palette standard() { return {}; }
    static Palette escape_time() {
        Palette p;
        p.graded_exterior = true;
        return p;
    }
};

/// Binary PPM bytes. The optional comment becomes one `#` header line (newlines are
/// replaced by spaces).
inline std::string encode_ppm(const Raster& r, const Palette& pal, const std::string& comment = "") {
    std::string out = "P6\n";
    if (!comment.empty()) {
        std::string c = comment;
        for (char& ch : c)
            if (ch == '\n' || ch == '\r') ch = ' ';
        out += "# " + c + "\n";
    }
    out += std::to_string(r.width_px) + " " + std::to_string(r.height_px) + "\n255\n";
    const std::size_t header = out.size();
    out.resize(header + 3 * r.cells.size());
    for (std::size_t i = 0; i < r.cells.size(); ++i) {
        const Rgb c = pal(r.cells[i], r.steps.empty() ? 0 : r.steps[i]);
        out[header + 3 * i] = static_cast<char>(c.r);
        out[header + 3 * i + 1] = static_cast<char>(c.g);
        out[header + 3 * i + 2] = static_cast<char>(c.b);
    }
    return out;
}

inline void write_ppm(const Raster& r, const Palette& pal, const std::string& path, const std::string& comment = "") {
    if (r.cells.size() != static_cast<std::size_t>(r.width_px) * r.height_px) throw Error("raster size mismatch");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path + " for writing");
    const std::string bytes = encode_ppm(r, pal, comment);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("write failed: " + path);
}

/// Escape step of z -> z^2 + c from z0 at radius 2, or -1 if the orbit stays within
/// radius 2 for max_iter steps.
inline int quadratic_escape(cplx c, cplx z, int max_iter) {
    for (int k = 0; k < max_iter; ++k) {
        if (std::norm(z) > 4.0) return k;
        z = z * z + c;
    }
    return std::norm(z) > 4.0 ? max_iter : -1;
}

inline CellSample escape_sample(int step) {
    return step < 0 ? CellSample{CellColor::Inside, 0} : CellSample{CellColor::Exterior, step};
}

/// Parameter plane of z^2 + c: the orbit of 0 at each pixel c.
inline Raster render_mandelbrot(const Window& w, int res, int max_iter, int workers = 1) {
    Raster r = rasterize(w, res, res, workers, [&](cplx c) { return escape_sample(quadratic_escape(c, 0.0, max_iter)); });
    r.mode = "mandelbrot";
    return r;
}

/// Dynamical plane of z^2 + c.
inline Raster render_julia_quadratic(cplx c, const Window& w, int res, int max_iter, int workers = 1) {
    Raster r = rasterize(w, res, res, workers, [&](cplx z) { return escape_sample(quadratic_escape(c, z, max_iter)); });
    r.mode = "juliaq";
    return r;
}

/// Chessboard raster with the traced skeleton drawn over it in SkeletonBand cells.
inline Raster render_skeleton(const RenormFixedPoint& fp, const ExtensionConfig& cfg, const Window& w, int res,
                              int workers = 1) {
    Raster r = render_raster(fp, cfg, w, res, res, RenderMode::Chessboard, 0, workers);
    const SkeletonTrace tr = trace_skeleton(fp, cfg, w, res, workers);
    auto plot = [&](cplx p) {
        const double fx = (p.real() - (w.center.real() - 0.5 * w.width)) / w.width * res;
        const double fy = ((w.center.imag() + 0.5 * w.height) - p.imag()) / w.height * res;
        const int col = static_cast<int>(std::floor(fx)), row = static_cast<int>(std::floor(fy));
        if (row >= 0 && row < res && col >= 0 && col < res)
            r.cells[static_cast<std::size_t>(row) * res + col] = CellColor::SkeletonBand;
    };
    for (const Polyline& line : tr.polylines) {
        for (std::size_t i = 0; i + 1 < line.size(); ++i) {
            for (int k = 0; k <= 4; ++k) plot(line[i] + (line[i + 1] - line[i]) * (k / 4.0));
        }
    }
    r.mode = "skeleton";
    return r;
}

}  // namespace feigen
