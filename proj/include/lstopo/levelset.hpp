#pragma once

// Level-set transport (Lax-Friedrichs flux, explicit Euler substeps),
// reinitialization toward a signed distance function, and interpolation
// between the Cartesian grid and the crossed mesh.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lstopo/elasticity.hpp"
#include "lstopo/mesh.hpp"

namespace lstopo {

// Nodal values of phi on the Cartesian grid: (Ny+1) x (Nx+1), row j <-> y,
// column i <-> x. Omega = {phi < 0}.
struct LevelSet {
    double lx = 0.0;
    double ly = 0.0;
    Eigen::ArrayXXd values;

    int nx() const { return static_cast<int>(values.cols()) - 1; }
    int ny() const { return static_cast<int>(values.rows()) - 1; }
    double dx() const { return lx / nx(); }
    double dy() const { return ly / ny(); }
};

struct OneSidedDiffs {
    Eigen::ArrayXXd dxm, dxp, dym, dyp;
};

// Backward/forward differences; boundary rows/columns replicate the nearest
// interior difference.
inline OneSidedDiffs one_sided_diffs(const LevelSet& phi) {
    const int nx = phi.nx();
    const int ny = phi.ny();
    const auto& v = phi.values;
    OneSidedDiffs d;
    d.dxm.resize(ny + 1, nx + 1);
    d.dxp.resize(ny + 1, nx + 1);
    d.dym.resize(ny + 1, nx + 1);
    d.dyp.resize(ny + 1, nx + 1);
    const double inv_dx = nx / phi.lx;
    const double inv_dy = ny / phi.ly;
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            const int im = std::max(i, 1);
            const int ip = std::min(i, nx - 1);
            d.dxm(j, i) = (v(j, im) - v(j, im - 1)) * inv_dx;
            d.dxp(j, i) = (v(j, ip + 1) - v(j, ip)) * inv_dx;
            const int jm = std::max(j, 1);
            const int jp = std::min(j, ny - 1);
            d.dym(j, i) = (v(jm, i) - v(jm - 1, i)) * inv_dy;
            d.dyp(j, i) = (v(jp + 1, i) - v(jp, i)) * inv_dy;
        }
    }
    return d;
}

struct AdvectResult {
    LevelSet phi;
    bool moved = false;  // false when max(|vx|+|vy|) == 0
};

// 10 explicit Euler substeps of phi_t + v . grad(phi) = 0 with a
// Lax-Friedrichs flux; dt = beta*lx/(Nx*maxv).
inline AdvectResult advect(const LevelSet& phi, const Eigen::ArrayXXd& vx,
                           const Eigen::ArrayXXd& vy, double beta, int substeps = 10) {
    if (vx.rows() != phi.values.rows() || vx.cols() != phi.values.cols() ||
        vy.rows() != phi.values.rows() || vy.cols() != phi.values.cols())
        throw std::invalid_argument("advect: velocity shape mismatch");
    const double maxv = (vx.abs() + vy.abs()).maxCoeff();
    if (maxv == 0.0) return {phi, false};

    AdvectResult res{phi, true};
    const double dt = beta * res.phi.lx / (res.phi.nx() * maxv);
    const Eigen::ArrayXXd avx = vx.abs();
    const Eigen::ArrayXXd avy = vy.abs();
    for (int k = 0; k < substeps; ++k) {
        const auto d = one_sided_diffs(res.phi);
        const Eigen::ArrayXXd g = 0.5 * (vx * (d.dxp + d.dxm) + vy * (d.dyp + d.dym)) -
                                  0.5 * (avx * (d.dxp - d.dxm) + avy * (d.dyp - d.dym));
        res.phi.values -= dt * g;
    }
    return res;
}

// Two sweeps of the upwind reinitialization scheme with a smoothed sign
// function S computed once from the input and held fixed.
inline LevelSet reinitialize(const LevelSet& phi, int sweeps = 2) {
    LevelSet psi = phi;
    const double h = psi.lx / psi.nx();

    const auto d0 = one_sided_diffs(psi);
    const Eigen::ArrayXXd dxs = 0.5 * (d0.dxm + d0.dxp);
    const Eigen::ArrayXXd dys = 0.5 * (d0.dym + d0.dyp);
    const Eigen::ArrayXXd s =
        psi.values / (psi.values.square() + h * h * (dxs.square() + dys.square())).sqrt();

    const Eigen::ArrayXXd s_pos = s.max(0.0);
    const Eigen::ArrayXXd s_neg = s.min(0.0);
    for (int k = 0; k < sweeps; ++k) {
        const auto d = one_sided_diffs(psi);
        const Eigen::ArrayXXd kp = (d.dxm.max(0.0).square() + d.dxp.min(0.0).square() +
                                    d.dym.max(0.0).square() + d.dyp.min(0.0).square())
                                       .sqrt();
        const Eigen::ArrayXXd km = (d.dxm.min(0.0).square() + d.dxp.max(0.0).square() +
                                    d.dym.min(0.0).square() + d.dyp.max(0.0).square())
                                       .sqrt();
        const Eigen::ArrayXXd g = s_pos * kp + s_neg * km;
        psi.values -= (0.5 * h) * (g - s);
    }
    return psi;
}

// Grid nodes copy their grid value; cell centers get the mean of the four
// surrounding grid values.
inline NodalScalarField interpolate_to_mesh(const LevelSet& phi, const GridMap& map) {
    const int nv = static_cast<int>(map.grid_of_vertex.size());
    NodalScalarField out(nv);
    for (int v = 0; v < nv; ++v) {
        if (map.is_grid_node(v)) {
            const auto [i, j] = map.grid_of_vertex[v];
            out[v] = phi.values(j, i);
        } else {
            const auto [cx, cy] = map.cell_of_center[v];
            out[v] = 0.25 * (phi.values(cy, cx) + phi.values(cy + 1, cx) +
                             phi.values(cy, cx + 1) + phi.values(cy + 1, cx + 1));
        }
    }
    return out;
}

// Triangle gets tag 1 iff phi < 0 at all three vertices, else 0; cells whose
// vertices all lie in a fixed rectangle get tag 2 regardless of phi.
struct Rect {
    double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
    bool contains(const Vec2& p) const {
        return p.x >= x0 - kGeomTol && p.x <= x1 + kGeomTol && p.y >= y0 - kGeomTol &&
               p.y <= y1 + kGeomTol;
    }
};

inline CellTags classify_cells(const NodalScalarField& phi_mesh, const CrossedMesh& mesh,
                               const std::vector<Rect>& fixed_regions = {}) {
    if (static_cast<int>(phi_mesh.size()) != mesh.vertex_count())
        throw std::invalid_argument("classify_cells: field/mesh size mismatch");
    CellTags tags(mesh.triangle_count(), 0);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        if (phi_mesh[tri[0]] < 0.0 && phi_mesh[tri[1]] < 0.0 && phi_mesh[tri[2]] < 0.0)
            tags[t] = 1;
        for (const auto& r : fixed_regions) {
            if (r.contains(mesh.vertices[tri[0]]) && r.contains(mesh.vertices[tri[1]]) &&
                r.contains(mesh.vertices[tri[2]])) {
                tags[t] = 2;
                break;
            }
        }
    }
    return tags;
}

}  // namespace lstopo
