#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "feigen/geometry.hpp"

namespace feigen {

/// Axis-aligned rectangle of the complex plane.
struct Window {
    cplx center{0.0, 0.0};
    double width = 2.0;
    double height = 2.0;

    Window scaled(double factor) const { return {center * factor, width * factor, height * factor}; }

    static Window square(cplx center, double width) { return {center, width, width}; }
};

/// Center of pixel (row, col); row 0 is the top edge. Offsets are odd multiples of
/// half a pixel measured from the center, so mirrored pixels get exactly negated
/// offsets.
inline cplx pixel_point(const Window& w, int width_px, int height_px, int row, int col) {
    const double x = w.center.real() + (2 * col + 1 - width_px) * (w.width / (2.0 * width_px));
    const double y = w.center.imag() - (2 * row + 1 - height_px) * (w.height / (2.0 * height_px));
    return {x, y};
}

enum class RenderMode : std::uint8_t { Chessboard, Julia, Basin, Puzzle };

inline const char* mode_name(RenderMode m) {
    switch (m) {
        case RenderMode::Chessboard: return "chessboard";
        case RenderMode::Julia: return "julia";
        case RenderMode::Basin: return "basin";
        case RenderMode::Puzzle: return "puzzle";
    }
    return "?";
}

struct Raster {
    std::string mode;  // e.g. "chessboard", "puzzle2", "julia"
    Window window;
    int width_px = 0;
    int height_px = 0;
    std::vector<CellColor> cells;
    std::vector<std::uint16_t> steps;  // escape/convergence step per cell, used for shading
    std::string provenance;            // config hash, see cli

    CellColor at(int row, int col) const { return cells[static_cast<std::size_t>(row) * width_px + col]; }
    std::size_t size() const noexcept { return cells.size(); }
};

struct CellSample {
    CellColor color;
    int steps;
};

/// Runs fn(row) for every row, dealing rows to `workers` threads in contiguous
/// blocks. Callers write only to per-row storage, so results do not depend on the
/// partition.
inline void for_each_row(int height, int workers, const std::function<void(int)>& fn) {
    workers = std::clamp(workers, 1, std::max(height, 1));
    if (workers == 1) {
        for (int row = 0; row < height; ++row) fn(row);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
        const int begin = static_cast<int>(static_cast<std::int64_t>(height) * t / workers);
        const int end = static_cast<int>(static_cast<std::int64_t>(height) * (t + 1) / workers);
        pool.emplace_back([&fn, begin, end] {
            for (int row = begin; row < end; ++row) fn(row);
        });
    }
    for (auto& th : pool) th.join();
}

/// Fills a raster by evaluating `classify` on every pixel center.
inline Raster rasterize(const Window& w, int width_px, int height_px, int workers,
                        const std::function<CellSample(cplx)>& classify) {
    if (width_px < 1 || height_px < 1) throw Error("raster dimensions must be positive");
    Raster r;
    r.window = w;
    r.width_px = width_px;
    r.height_px = height_px;
    r.cells.assign(static_cast<std::size_t>(width_px) * height_px, CellColor::Unknown);
    r.steps.assign(r.cells.size(), 0);
    for_each_row(height_px, workers, [&](int row) {
        for (int col = 0; col < width_px; ++col) {
            const CellSample s = classify(pixel_point(w, width_px, height_px, row, col));
            const std::size_t idx = static_cast<std::size_t>(row) * width_px + col;
            r.cells[idx] = s.color;
            r.steps[idx] = static_cast<std::uint16_t>(std::clamp(s.steps, 0, 65535));
        }
    });
    return r;
}

/// A chessboard sample: color from the basin classification and sign of Im f.
///
/// Besides |Im f| <= skel_tol, a cell is put in the skeleton band when the first-order
/// distance |Im f| / |f'| to the skeleton is below `band` (complex units). Squares meet
/// at the critical points of f, and where that happens below pixel size two squares of
/// the same color would otherwise touch through 4-adjacent pixels.
inline CellSample chess_sample(const RenormFixedPoint& fp, const ExtensionConfig& cfg, cplx z, double band = 0.0) {
    const BasinResult b = classify_basin(fp, cfg, z);
    CellColor c = CellColor::Unknown;
    if (b.status == BasinStatus::Diverged) {
        c = CellColor::Exterior;
    } else if (b.status == BasinStatus::Converged) {
        const double im = b.fhat.imag();
        const bool near = std::abs(im) <= cfg.skel_tol || std::abs(im) < band * std::abs(b.fhat_deriv);
        c = near ? CellColor::SkeletonBand : im > 0.0 ? CellColor::Plus : CellColor::Minus;
    }
    return {c, b.steps};
}

inline double pixel_band(const ExtensionConfig& cfg, const Window& w, int width_px, int height_px) {
    return cfg.skel_band_px * std::max(w.width / width_px, w.height / height_px);
}

/// Dense classification of a window. puzzle(n) is the chessboard of the window scaled
/// by lambda^-n, so it agrees pixel for pixel with a chessboard raster of that window.
/// Basin mode keeps Converged cells as Plus regardless of sign.
inline Raster render_raster(const RenormFixedPoint& fp, const ExtensionConfig& cfg, const Window& w, int width_px,
                            int height_px, RenderMode mode, int depth = 0, int workers = 1) {
    Raster r;
    switch (mode) {
        case RenderMode::Chessboard:
        {
            const double band = pixel_band(cfg, w, width_px, height_px);
            r = rasterize(w, width_px, height_px, workers, [&](cplx z) { return chess_sample(fp, cfg, z, band); });
            r.mode = "chessboard";
        }
            break;
        case RenderMode::Puzzle: {
            if (depth < 0) throw Error("puzzle depth must be >= 0");
            const Window scaled = w.scaled(std::pow(fp.lambda, -depth));
            const double band = pixel_band(cfg, scaled, width_px, height_px);
            r = rasterize(scaled, width_px, height_px, workers, [&](cplx z) { return chess_sample(fp, cfg, z, band); });
            r.window = w;
            r.mode = "puzzle" + std::to_string(depth);
            break;
        }
        case RenderMode::Basin:
            r = rasterize(w, width_px, height_px, workers, [&](cplx z) {
                const BasinResult b = classify_basin(fp, cfg, z);
                const CellColor c = b.status == BasinStatus::Converged ? CellColor::Plus
                                    : b.status == BasinStatus::Diverged ? CellColor::Exterior
                                                                        : CellColor::Unknown;
                return CellSample{c, b.steps};
            });
            r.mode = "basin";
            break;
        case RenderMode::Julia:
            r = rasterize(w, width_px, height_px, workers, [&](cplx z) {
                const JuliaResult j = in_filled_julia(fp, cfg, z);
                const CellColor c = j.status == JuliaStatus::Inside    ? CellColor::Inside
                                    : j.status == JuliaStatus::Escaped ? CellColor::Exterior
                                                                       : CellColor::Unknown;
                return CellSample{c, j.steps};
            });
            r.mode = "julia";
            break;
    }
    return r;
}

struct ComponentLabels {
    std::vector<int> labels;  // -1 where the predicate is false
    int count = 0;
    int width = 0;
    int height = 0;
};

namespace detail {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b) std::swap(a, b);
        parent[a] = b;  // smaller index is the root, which keeps labeling order-independent
    }
};

}  // namespace detail

/// 4-connected components of the cells satisfying `pred`, labeled 0.. in order of
/// each component's first pixel in row-major order.
template <class Pred>
ComponentLabels connected_components(int width, int height, Pred&& pred) {
    ComponentLabels out;
    out.width = width;
    out.height = height;
    const std::size_t n = static_cast<std::size_t>(width) * height;
    std::vector<char> on(n);
    for (int row = 0; row < height; ++row)
        for (int col = 0; col < width; ++col)
            on[static_cast<std::size_t>(row) * width + col] = pred(row, col) ? 1 : 0;
    detail::UnionFind uf(n);
    for (int row = 0; row < height; ++row) {
        for (int col = 0; col < width; ++col) {
            const int idx = row * width + col;
            if (!on[idx]) continue;
            if (col > 0 && on[idx - 1]) uf.unite(idx, idx - 1);
            if (row > 0 && on[idx - width]) uf.unite(idx, idx - width);
        }
    }
    out.labels.assign(n, -1);
    std::vector<int> root_label(n, -1);
    for (std::size_t idx = 0; idx < n; ++idx) {
        if (!on[idx]) continue;
        const int root = uf.find(static_cast<int>(idx));
        if (root_label[root] < 0) root_label[root] = out.count++;
        out.labels[idx] = root_label[root];
    }
    return out;
}

/// Components of the cells of a raster matching `pred(CellColor)`. Plus and Minus
/// cells are only joined with cells of the same color when pred accepts both; callers
/// that want chess squares pass a same-color predicate per color, or use
/// square_components below.
template <class Pred>
ComponentLabels connected_components(const Raster& r, Pred&& pred) {
    return connected_components(r.width_px, r.height_px, [&](int row, int col) { return pred(r.at(row, col)); });
}

/// Components of Plus and Minus cells, 4-adjacent cells joined only when they have the
/// same color. These are the pixel images of chess squares (or puzzle pieces).
inline ComponentLabels square_components(const Raster& r) {
    ComponentLabels out;
    out.width = r.width_px;
    out.height = r.height_px;
    const int width = r.width_px;
    const std::size_t n = r.cells.size();
    auto is_sq = [](CellColor c) { return c == CellColor::Plus || c == CellColor::Minus; };
    detail::UnionFind uf(n);
    for (int row = 0; row < r.height_px; ++row) {
        for (int col = 0; col < width; ++col) {
            const int idx = row * width + col;
            const CellColor c = r.cells[idx];
            if (!is_sq(c)) continue;
            if (col > 0 && r.cells[idx - 1] == c) uf.unite(idx, idx - 1);
            if (row > 0 && r.cells[idx - width] == c) uf.unite(idx, idx - width);
        }
    }
    out.labels.assign(n, -1);
    std::vector<int> root_label(n, -1);
    for (std::size_t idx = 0; idx < n; ++idx) {
        if (!is_sq(r.cells[idx])) continue;
        const int root = uf.find(static_cast<int>(idx));
        if (root_label[root] < 0) root_label[root] = out.count++;
        out.labels[idx] = root_label[root];
    }
    return out;
}

inline char cell_code(CellColor c) {
    switch (c) {
        case CellColor::Plus: return 'P';
        case CellColor::Minus: return 'M';
        case CellColor::SkeletonBand: return 'S';
        case CellColor::Exterior: return 'E';
        case CellColor::Unknown: return 'U';
        case CellColor::Inside: return 'I';
    }
    return 'U';
}

inline CellColor cell_from_code(char ch) {
    switch (ch) {
        case 'P': return CellColor::Plus;
        case 'M': return CellColor::Minus;
        case 'S': return CellColor::SkeletonBand;
        case 'E': return CellColor::Exterior;
        case 'U': return CellColor::Unknown;
        case 'I': return CellColor::Inside;
        default: throw FormatError(std::string("unknown raster cell code '") + ch + "'");
    }
}

/// Window token of the dump header: re,im,width,height with 17 significant digits.
inline std::string window_token(const Window& w) {
    return format_exact(w.center.real()) + "," + format_exact(w.center.imag()) + "," + format_exact(w.width) + "," +
           format_exact(w.height);
}

/// `FEIGRASTER v1 <mode> <width> <height> <window>` then one byte per cell, row-major.
/// A nonempty provenance is appended to the header line as a sixth token.
inline std::string dump_raster(const Raster& r) {
    std::string out = "FEIGRASTER v1 " + r.mode + " " + std::to_string(r.width_px) + " " +
                      std::to_string(r.height_px) + " " + window_token(r.window) +
                      (r.provenance.empty() ? "" : " " + r.provenance) + "\n";
    out.reserve(out.size() + r.cells.size());
    for (CellColor c : r.cells) out.push_back(cell_code(c));
    return out;
}

inline Raster parse_raster_dump(const std::string& text) {
    const auto nl = text.find('\n');
    if (nl == std::string::npos) throw FormatError("raster dump has no header line");
    char mode[64] = {};
    char win[256] = {};
    char prov[256] = {};
    int w = 0, h = 0;
    const std::string header = text.substr(0, nl);
    const int got = std::sscanf(header.c_str(), "FEIGRASTER v1 %63s %d %d %255s %255s", mode, &w, &h, win, prov);
    if (got < 4 || w < 1 || h < 1) throw FormatError("bad raster dump header: " + header);
    Raster r;
    r.provenance = prov;
    r.mode = mode;
    r.width_px = w;
    r.height_px = h;
    double re = 0, im = 0, ww = 0, hh = 0;
    if (std::sscanf(win, "%lf,%lf,%lf,%lf", &re, &im, &ww, &hh) != 4) throw FormatError("bad raster window token");
    r.window = {{re, im}, ww, hh};
    const std::size_t n = static_cast<std::size_t>(w) * h;
    if (text.size() - nl - 1 != n) throw FormatError("raster payload size does not match header");
    r.cells.reserve(n);
    for (std::size_t i = 0; i < n; ++i) r.cells.push_back(cell_from_code(text[nl + 1 + i]));
    r.steps.assign(n, 0);
    return r;
}

inline void write_raster_dump(const Raster& r, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path + " for writing");
    const std::string s = dump_raster(r);
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!f) throw IoError("write failed: " + path);
}

/// Counts of each cell color, indexed by CellColor.
inline std::array<std::size_t, 6> color_histogram(const Raster& r) {
    std::array<std::size_t, 6> h{};
    for (CellColor c : r.cells) ++h[static_cast<std::size_t>(c)];
    return h;
}

}  // namespace feigen
