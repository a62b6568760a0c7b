#pragma once

// Design rasterization (binary PGM) and run-history export (CSV).

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lstopo/levelset.hpp"
#include "lstopo/optimizer.hpp"

namespace lstopo {

namespace detail {

inline double bilinear(const LevelSet& phi, double x, double y) {
    const int nx = phi.nx();
    const int ny = phi.ny();
    double fx = x / phi.lx * nx;
    double fy = y / phi.ly * ny;
    int i = std::min(std::max(static_cast<int>(std::floor(fx)), 0), nx - 1);
    int j = std::min(std::max(static_cast<int>(std::floor(fy)), 0), ny - 1);
    const double tx = fx - i;
    const double ty = fy - j;
    return (1 - tx) * (1 - ty) * phi.values(j, i) + tx * (1 - ty) * phi.values(j, i + 1) +
           (1 - tx) * ty * phi.values(j + 1, i) + tx * ty * phi.values(j + 1, i + 1);
}

}  // namespace detail

// Binary PGM (P5, maxval 255): black (0) where the bilinear interpolant of
// phi at the pixel center is negative (material), white elsewhere. Image is
// supersample x (Nx, Ny) pixels, row 0 at the top of the domain (y = ly).
inline void render_design(const LevelSet& phi, const std::string& path, int supersample = 4) {
    const int w = supersample * phi.nx();
    const int h = supersample * phi.ny();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("render_design: cannot open " + path);
    out << "P5\n" << w << " " << h << "\n255\n";
    std::vector<unsigned char> row(w);
    for (int j = 0; j < h; ++j) {
        const double y = phi.ly - (j + 0.5) * phi.ly / h;
        for (int i = 0; i < w; ++i) {
            const double x = (i + 0.5) * phi.lx / w;
            row[i] = detail::bilinear(phi, x, y) < 0.0 ? 0 : 255;
        }
        out.write(reinterpret_cast<const char*>(row.data()), w);
    }
    if (!out) throw std::runtime_error("render_design: write failed for " + path);
}

// CSV with one row per accepted iteration, reals at 12 significant digits.
inline void write_history(const RunHistory& history, const std::string& path) {
    if (history.records.empty())
        throw std::invalid_argument("write_history: empty history");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_history: cannot open " + path);
    out << "iter,J,objective,volume,volume_fraction,beta,ls\n";
    char buf[256];
    for (const auto& r : history.records) {
        std::snprintf(buf, sizeof(buf), "%d,%.11e,%.11e,%.11e,%.11e,%.11e,%d\n", r.iter, r.J,
                      r.objective, r.volume, r.volume_fraction, r.beta, r.line_searches);
        out << buf;
    }
    if (!out) throw std::runtime_error("write_history: write failed for " + path);
}

}  // namespace lstopo
