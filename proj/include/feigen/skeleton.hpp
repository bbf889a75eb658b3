#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "feigen/raster.hpp"

namespace feigen {

using Polyline = std::vector<cplx>;

struct SkeletonTrace {
    std::vector<Polyline> polylines;
    Window window;
    int res = 0;
    double cell_size = 0.0;  // spacing of the sample grid
};

namespace detail {

struct SkeletonGrid {
    int n = 0;                 // samples per side
    std::vector<double> im;    // Im f at each sample
    std::vector<char> ok;      // sample Converged
    std::vector<cplx> pt;
    double at(int r, int c) const { return im[static_cast<std::size_t>(r) * n + c]; }
    bool good(int r, int c) const { return ok[static_cast<std::size_t>(r) * n + c] != 0; }
};

}  // namespace detail

/// Marching squares on the zero set of Im f over a res x res grid of samples (pixel
/// centers of the window). Only cells whose four corners are Converged contribute.
/// Segment endpoints are keyed by grid edge, and segments sharing an endpoint are
/// chained into polylines; closed loops repeat their first point at the end.
inline SkeletonTrace trace_skeleton(const RenormFixedPoint& fp, const ExtensionConfig& cfg, const Window& w, int res,
                                    int workers = 1) {
    if (res < 2) throw Error("skeleton grid needs at least 2 samples per side");
    SkeletonTrace out;
    out.window = w;
    out.res = res;
    out.cell_size = w.width / res;

    detail::SkeletonGrid g;
    g.n = res;
    g.im.assign(static_cast<std::size_t>(res) * res, 0.0);
    g.ok.assign(g.im.size(), 0);
    g.pt.resize(g.im.size());
    for_each_row(res, workers, [&](int row) {
        for (int col = 0; col < res; ++col) {
            const std::size_t idx = static_cast<std::size_t>(row) * res + col;
            g.pt[idx] = pixel_point(w, res, res, row, col);
            const BasinResult b = classify_basin(fp, cfg, g.pt[idx]);
            if (b.converged()) {
                g.ok[idx] = 1;
                g.im[idx] = b.fhat.imag();
            }
        }
    });

    // Edge keys: horizontal edge (r,c)-(r,c+1) -> 2*(r*n+c), vertical (r,c)-(r+1,c) -> 2*(r*n+c)+1.
    const int n = res;
    auto hkey = [n](int r, int c) { return std::int64_t{2} * (std::int64_t{r} * n + c); };
    auto vkey = [n](int r, int c) { return std::int64_t{2} * (std::int64_t{r} * n + c) + 1; };
    std::unordered_map<std::int64_t, cplx> points;
    auto crossing = [&](std::int64_t key, int r0, int c0, int r1, int c1) {
        if (points.count(key)) return;
        const double v0 = g.at(r0, c0), v1 = g.at(r1, c1);
        const double t = v0 / (v0 - v1);
        const cplx p0 = g.pt[static_cast<std::size_t>(r0) * n + c0];
        const cplx p1 = g.pt[static_cast<std::size_t>(r1) * n + c1];
        points[key] = p0 + t * (p1 - p0);
    };
    std::vector<std::pair<std::int64_t, std::int64_t>> segs;
    for (int r = 0; r + 1 < n; ++r) {
        for (int c = 0; c + 1 < n; ++c) {
            if (!g.good(r, c) || !g.good(r, c + 1) || !g.good(r + 1, c) || !g.good(r + 1, c + 1)) continue;
            const bool a = g.at(r, c) > 0.0, b = g.at(r, c + 1) > 0.0;
            const bool d = g.at(r + 1, c) > 0.0, e = g.at(r + 1, c + 1) > 0.0;
            std::vector<std::int64_t> ks;  // crossings in order top, right, bottom, left
            if (a != b) { crossing(hkey(r, c), r, c, r, c + 1); ks.push_back(hkey(r, c)); }
            if (b != e) { crossing(vkey(r, c + 1), r, c + 1, r + 1, c + 1); ks.push_back(vkey(r, c + 1)); }
            if (d != e) { crossing(hkey(r + 1, c), r + 1, c, r + 1, c + 1); ks.push_back(hkey(r + 1, c)); }
            if (a != d) { crossing(vkey(r, c), r, c, r + 1, c); ks.push_back(vkey(r, c)); }
            if (ks.size() == 2) {
                segs.emplace_back(ks[0], ks[1]);
            } else if (ks.size() == 4) {
                // Saddle: the average of the corners decides which pair of corners is linked.
                const double center = 0.25 * (g.at(r, c) + g.at(r, c + 1) + g.at(r + 1, c) + g.at(r + 1, c + 1));
                if ((center > 0.0) == a) {
                    segs.emplace_back(ks[0], ks[1]);  // top-right, bottom-left
                    segs.emplace_back(ks[2], ks[3]);
                } else {
                    segs.emplace_back(ks[0], ks[3]);  // top-left, right-bottom
                    segs.emplace_back(ks[1], ks[2]);
                }
            }
        }
    }

    std::unordered_map<std::int64_t, std::vector<std::size_t>> incident;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        incident[segs[i].first].push_back(i);
        incident[segs[i].second].push_back(i);
    }
    std::vector<char> used(segs.size(), 0);
    auto walk = [&](std::size_t start, std::int64_t from) {
        Polyline line{points[from]};
        std::size_t seg = start;
        std::int64_t at = from;
        while (true) {
            used[seg] = 1;
            const std::int64_t next = segs[seg].first == at ? segs[seg].second : segs[seg].first;
            line.push_back(points[next]);
            at = next;
            std::size_t cont = segs.size();
            for (std::size_t s : incident[at])
                if (!used[s]) cont = s;
            if (cont == segs.size()) break;
            seg = cont;
        }
        out.polylines.push_back(std::move(line));
    };
    // Open chains first (from an endpoint of degree one), in segment order for determinism.
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (used[i]) continue;
        if (incident[segs[i].first].size() == 1) walk(i, segs[i].first);
        else if (incident[segs[i].second].size() == 1) walk(i, segs[i].second);
    }
    for (std::size_t i = 0; i < segs.size(); ++i)
        if (!used[i]) walk(i, segs[i].first);
    return out;
}

}  // namespace feigen
