#pragma once

// Crossed-triangle mesh over a rectangle [0,lx]x[0,ly]: Nx x Ny square cells,
// each split into 4 triangles by its diagonals. The grid nodes double as the
// Cartesian grid used by the level-set scheme.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace lstopo {

inline constexpr double kGeomTol = 1e-14;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

enum class VertexKind : std::uint8_t { grid_node, cell_center };

struct CrossedMesh {
    double lx = 0.0;
    double ly = 0.0;
    int nx = 0;
    int ny = 0;
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<VertexKind> vertex_kind;

    double h() const { return lx / nx; }
    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }
    int grid_vertex_count() const { return (nx + 1) * (ny + 1); }

    // Row-major grid nodes first, then row-major cell centers.
    int grid_vertex(int i, int j) const { return j * (nx + 1) + i; }
    int center_vertex(int cx, int cy) const {
        return grid_vertex_count() + cy * nx + cx;
    }

    double triangle_area(int t) const {
        const auto& tri = triangles[t];
        const Vec2& a = vertices[tri[0]];
        const Vec2& b = vertices[tri[1]];
        const Vec2& c = vertices[tri[2]];
        return 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
    }

    Vec2 centroid(int t) const {
        const auto& tri = triangles[t];
        return {(vertices[tri[0]].x + vertices[tri[1]].x + vertices[tri[2]].x) / 3.0,
                (vertices[tri[0]].y + vertices[tri[1]].y + vertices[tri[2]].y) / 3.0};
    }
};

inline CrossedMesh build_mesh(double lx, double ly, int nx, int ny) {
    if (nx < 1 || ny < 1)
        throw std::invalid_argument("build_mesh: Nx, Ny must be >= 1");
    const double cell_x = lx / nx;
    const double cell_y = ly / ny;
    if (std::abs(cell_x - cell_y) > kGeomTol * std::max(std::abs(cell_x), 1.0))
        throw std::invalid_argument("build_mesh: cells must be square (lx/Nx == ly/Ny)");

    CrossedMesh m;
    m.lx = lx;
    m.ly = ly;
    m.nx = nx;
    m.ny = ny;
    m.vertices.reserve((nx + 1) * (ny + 1) + nx * ny);
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            m.vertices.push_back({i * lx / nx, j * ly / ny});
    m.vertex_kind.assign(m.vertices.size(), VertexKind::grid_node);
    for (int cy = 0; cy < ny; ++cy) {
        for (int cx = 0; cx < nx; ++cx) {
            const Vec2& bl = m.vertices[m.grid_vertex(cx, cy)];
            const Vec2& br = m.vertices[m.grid_vertex(cx + 1, cy)];
            const Vec2& tl = m.vertices[m.grid_vertex(cx, cy + 1)];
            const Vec2& tr = m.vertices[m.grid_vertex(cx + 1, cy + 1)];
            m.vertices.push_back({0.25 * (bl.x + br.x + tl.x + tr.x),
                                  0.25 * (bl.y + br.y + tl.y + tr.y)});
            m.vertex_kind.push_back(VertexKind::cell_center);
        }
    }

    m.triangles.reserve(4 * nx * ny);
    for (int cy = 0; cy < ny; ++cy) {
        for (int cx = 0; cx < nx; ++cx) {
            const int bl = m.grid_vertex(cx, cy);
            const int br = m.grid_vertex(cx + 1, cy);
            const int tl = m.grid_vertex(cx, cy + 1);
            const int tr = m.grid_vertex(cx + 1, cy + 1);
            const int c = m.center_vertex(cx, cy);
            m.triangles.push_back({bl, br, c});
            m.triangles.push_back({br, tr, c});
            m.triangles.push_back({tr, tl, c});
            m.triangles.push_back({tl, bl, c});
        }
    }
    return m;
}

// Index maps between mesh vertices and the Cartesian grid.
struct GridMap {
    int nx = 0;
    int ny = 0;
    // (i,j) grid indices for grid_node vertices, {-1,-1} for centers.
    std::vector<std::array<int, 2>> grid_of_vertex;
    // Base cell (cx,cy) for cell_center vertices, {-1,-1} otherwise.
    std::vector<std::array<int, 2>> cell_of_center;

    bool is_grid_node(int v) const { return grid_of_vertex[v][0] >= 0; }

    std::array<std::array<int, 2>, 4> corners_of_center(int v) const {
        const int cx = cell_of_center[v][0];
        const int cy = cell_of_center[v][1];
        if (cx < 0)
            throw std::invalid_argument("corners_of_center: not a cell_center vertex");
        return {{{cx, cy}, {cx + 1, cy}, {cx, cy + 1}, {cx + 1, cy + 1}}};
    }
};

inline GridMap build_grid_map(const CrossedMesh& mesh) {
    GridMap map;
    map.nx = mesh.nx;
    map.ny = mesh.ny;
    const int nv = mesh.vertex_count();
    map.grid_of_vertex.assign(nv, {-1, -1});
    map.cell_of_center.assign(nv, {-1, -1});
    for (int v = 0; v < nv; ++v) {
        // Parity test: a vertex is a grid node iff 2*Nx*x/lx and 2*Ny*y/ly
        // are both even integers; otherwise it is the center of its cell.
        const double px = mesh.vertices[v].x / mesh.lx * 2.0 * mesh.nx;
        const double py = mesh.vertices[v].y / mesh.ly * 2.0 * mesh.ny;
        const long ipx = std::lround(px);
        const long ipy = std::lround(py);
        if (ipx % 2 == 0 && ipy % 2 == 0) {
            map.grid_of_vertex[v] = {static_cast<int>(ipx / 2), static_cast<int>(ipy / 2)};
        } else {
            map.cell_of_center[v] = {static_cast<int>(ipx / 2), static_cast<int>(ipy / 2)};
        }
    }
    return map;
}

enum class Side : std::uint8_t { left, right, bottom, top };

// Axis-aligned interval on one side of the rectangle boundary. The interval
// coordinate is y for left/right sides and x for bottom/top sides.
struct EdgeRegion {
    Side side;
    double lo = 0.0;
    double hi = 0.0;
};

struct TaggedRegion {
    EdgeRegion region;
    int tag = 0;
};

struct BoundaryFacet {
    int a = 0;
    int b = 0;
    int tag = 0;
    Vec2 normal;
};

struct BoundaryFacets {
    std::vector<BoundaryFacet> facets;
};

namespace detail {

inline bool on_side(const CrossedMesh& mesh, const Vec2& p, Side s) {
    switch (s) {
        case Side::left: return std::abs(p.x) < kGeomTol;
        case Side::right: return std::abs(p.x - mesh.lx) < kGeomTol;
        case Side::bottom: return std::abs(p.y) < kGeomTol;
        case Side::top: return std::abs(p.y - mesh.ly) < kGeomTol;
    }
    return false;
}

inline double edge_coord(const Vec2& p, Side s) {
    return (s == Side::left || s == Side::right) ? p.y : p.x;
}

}  // namespace detail

// Enumerates all exterior facets and assigns each the tag of the first
// matching region (both endpoints inside, tol 1e-14); default tag 0.
inline BoundaryFacets tag_boundary(const CrossedMesh& mesh,
                                   const std::vector<TaggedRegion>& regions) {
    for (const auto& r : regions) {
        const double limit =
            (r.region.side == Side::left || r.region.side == Side::right) ? mesh.ly : mesh.lx;
        if (r.region.lo < -kGeomTol || r.region.hi > limit + kGeomTol)
            throw std::invalid_argument("tag_boundary: region outside the domain boundary");
    }

    BoundaryFacets out;
    auto add = [&](int a, int b, Side s, Vec2 n) {
        int tag = 0;
        for (const auto& r : regions) {
            if (r.region.side != s) continue;
            const double ca = detail::edge_coord(mesh.vertices[a], s);
            const double cb = detail::edge_coord(mesh.vertices[b], s);
            if (std::min(ca, cb) >= r.region.lo - kGeomTol &&
                std::max(ca, cb) <= r.region.hi + kGeomTol) {
                tag = r.tag;
                break;
            }
        }
        out.facets.push_back({a, b, tag, n});
    };

    for (int i = 0; i < mesh.nx; ++i) {
        add(mesh.grid_vertex(i, 0), mesh.grid_vertex(i + 1, 0), Side::bottom, {0.0, -1.0});
        add(mesh.grid_vertex(i, mesh.ny), mesh.grid_vertex(i + 1, mesh.ny), Side::top, {0.0, 1.0});
    }
    for (int j = 0; j < mesh.ny; ++j) {
        add(mesh.grid_vertex(0, j), mesh.grid_vertex(0, j + 1), Side::left, {-1.0, 0.0});
        add(mesh.grid_vertex(mesh.nx, j), mesh.grid_vertex(mesh.nx, j + 1), Side::right, {1.0, 0.0});
    }
    return out;
}

// Nearest-vertex snap for pointwise constraints; the benchmarks place these
// at exact grid corners.
inline int nearest_vertex(const CrossedMesh& mesh, Vec2 p) {
    int best = -1;
    double best_d2 = std::numeric_limits<double>::max();
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        const double dx = mesh.vertices[v].x - p.x;
        const double dy = mesh.vertices[v].y - p.y;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best_d2) {
            best_d2 = d2;
            best = v;
        }
    }
    const double diag = mesh.h() * std::sqrt(2.0);
    if (best < 0 || best_d2 > diag * diag)
        throw std::invalid_argument("nearest_vertex: point farther than one cell diagonal");
    return best;
}

}  // namespace lstopo
