#pragma once

// The seven benchmarks: geometry, Lagrange multiplier, loads, boundary
// conditions, spring/monitor data, and initial level-set formulas.

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lstopo/elasticity.hpp"
#include "lstopo/levelset.hpp"
#include "lstopo/mesh.hpp"

namespace lstopo {

// Boundary tags used by the cases.
inline constexpr int kTagFree = 0;
inline constexpr int kTagDirichlet = 1;
inline constexpr int kTagDirichlet2 = 2;
inline constexpr int kTagSpring = 3;    // Gamma_s = Gamma_out (inverter)
inline constexpr int kTagMonitorIn = 4;  // Gamma_in (inverter)

struct DirichletRegion {
    bool pointwise = false;
    Vec2 point;         // used when pointwise
    EdgeRegion region;  // used otherwise
    bool fix_x = true;
    bool fix_y = true;
    double value_x = 0.0;
    double value_y = 0.0;
};

struct RobinSpec {
    EdgeRegion region;
    double ks = 0.0;
};

struct MonitorSpec {
    EdgeRegion gamma_in;
    EdgeRegion gamma_out;
    double eta_in = 0.0;
    double eta_out = 0.0;
};

struct CaseSpec {
    std::string name;
    double lx = 2.0;
    double ly = 1.0;
    int default_nx = 150;
    int default_ny = 75;
    double lambda = 0.0;
    MaterialParams material;
    std::vector<LoadSpec> loads;
    std::vector<DirichletRegion> dirichlet;
    std::optional<RobinSpec> robin;
    std::optional<MonitorSpec> monitor;
    std::vector<Rect> fixed_regions;
    std::function<double(double, double)> init_phi;
    bool is_inverter = false;
    double beta0_init = 0.5;
    double itmax_factor = 1.5;
    double boundary_penalty = 1.0e4;

    int itmax(int nx) const { return static_cast<int>(std::ceil(itmax_factor * nx)); }
};

inline std::vector<std::string> case_names() {
    return {"half_wheel", "bridge", "cantilever", "cantilever_asymmetric",
            "MBB_beam", "cantilever_twoforces", "inverter"};
}

inline CaseSpec get_case(const std::string& name) {
    using std::numbers::pi;
    CaseSpec c;
    c.name = name;

    if (name == "cantilever") {
        c.lambda = 40.0;
        c.loads = {{{c.lx, 0.5}, 1, -1.0}};
        c.dirichlet = {{false, {}, {Side::left, 0.0, c.ly}, true, true}};
        const double lx = c.lx, ly = c.ly;
        c.init_phi = [lx, ly](double x, double y) {
            return -std::cos(8.0 * pi * x / lx) * std::cos(4.0 * pi * y) - 0.4 +
                   std::max(200.0 * (0.01 - x * x - (y - ly / 2) * (y - ly / 2)), 0.0) +
                   std::max(100.0 * (x + y - lx - ly + 0.1), 0.0) +
                   std::max(100.0 * (x - y - lx + 0.1), 0.0);
        };
    } else if (name == "cantilever_asymmetric") {
        c.lambda = 60.0;
        c.loads = {{{c.lx, 0.0}, 1, -1.0}};
        c.dirichlet = {{false, {}, {Side::left, 0.0, c.ly}, true, true}};
        const double lx = c.lx, ly = c.ly;
        c.init_phi = [lx, ly](double x, double y) {
            return -std::cos(6.0 * pi * x / lx) * std::cos(4.0 * pi * y) - 0.4 +
                   std::max(100.0 * (x + y - lx - ly + 0.1), 0.0);
        };
    } else if (name == "half_wheel") {
        c.lambda = 30.0;
        c.loads = {{{c.lx / 2, 0.0}, 1, -1.0}};
        c.dirichlet = {{true, {0.0, 0.0}, {}, true, true},
                       {true, {c.lx, 0.0}, {}, false, true}};
        const double lx = c.lx, ly = c.ly;
        c.init_phi = [lx, ly](double x, double y) {
            return -std::cos(3.0 * pi * (x - 1.0)) * std::cos(7.0 * pi * y) - 0.3 +
                   std::min(5.0 / ly * (y - 1.0) + 4.0, 0.0) +
                   std::max(100.0 * (x + y - lx - ly + 0.1), 0.0) +
                   std::max(100.0 * (-x + y - ly + 0.1), 0.0);
        };
    } else if (name == "bridge") {
        c.lambda = 20.0;
        c.loads = {{{c.lx / 2, 0.0}, 1, -1.0}};
        c.dirichlet = {{true, {0.0, 0.0}, {}, true, true},
                       {true, {c.lx, 0.0}, {}, true, true}};
        const double ly = c.ly;
        c.init_phi = [ly](double x, double y) {
            return -std::cos(4.0 * pi * (x - 1.0)) * std::cos(4.0 * pi * y) - 0.2 +
                   std::max(100.0 * (y - ly + 0.05), 0.0);
        };
    } else if (name == "MBB_beam") {
        c.lx = 3.0;
        c.default_nx = 150;
        c.default_ny = 50;
        c.lambda = 130.0;
        c.loads = {{{0.0, c.ly}, 1, -1.0}};
        c.dirichlet = {{false, {}, {Side::left, 0.0, c.ly}, true, false},
                       {true, {c.lx, 0.0}, {}, false, true}};
        const double lx = c.lx, ly = c.ly;
        c.init_phi = [lx, ly](double x, double y) {
            return -std::cos(4.0 * pi * x / lx) * std::cos(4.0 * pi * y) - 0.4 +
                   std::max(100.0 * (x + y - lx - ly + 0.1), 0.0) +
                   std::min(5.0 / ly * (y - 1.0) + 4.0, 0.0);
        };
    } else if (name == "cantilever_twoforces") {
        c.lx = 1.0;
        c.ly = 1.0;
        c.default_nx = 121;
        c.default_ny = 121;
        c.lambda = 60.0;
        c.loads = {{{c.lx, 0.0}, 1, -1.0}, {{c.lx, 1.0}, 1, -1.0}};
        c.dirichlet = {{false, {}, {Side::left, 0.0, c.ly}, true, true}};
        const double ly = c.ly;
        c.init_phi = [ly](double x, double y) {
            return -std::cos(4.0 * pi * (x - 0.5)) * std::cos(4.0 * pi * (y - 0.5)) - 0.6 -
                   std::max(50.0 * (y - ly + 0.1), 0.0) - std::max(50.0 * (-y + 0.1), 0.0);
        };
    } else if (name == "inverter") {
        c.lx = 1.0;
        c.ly = 1.0;
        c.default_nx = 121;
        c.default_ny = 121;
        c.lambda = 0.01;
        c.material = {20.0, 0.3, 0.01};
        c.loads = {{{0.0, 0.5}, 0, 0.05}};
        c.dirichlet = {{false, {}, {Side::left, 0.0, 0.1}, true, true},
                       {false, {}, {Side::left, 0.9, 1.0}, true, true}};
        c.robin = RobinSpec{{Side::right, 0.43, 0.57}, 0.01};
        c.monitor = MonitorSpec{{Side::left, 0.47, 0.53}, {Side::right, 0.43, 0.57}, 2.0, 1.0};
        c.fixed_regions = {{0.0, 0.05, 0.48, 0.52}, {0.9, 1.0, 0.43, 0.57}};
        c.is_inverter = true;
        c.beta0_init = 1.0;
        c.itmax_factor = 2.0;
        c.boundary_penalty = 1.0e5;
        c.init_phi = [](double x, double y) {
            return -std::cos(6.0 * pi * x) * std::cos(6.0 * pi * y) - 0.3;
        };
    } else {
        std::string valid;
        for (const auto& n : case_names()) valid += (valid.empty() ? "" : ", ") + n;
        throw std::invalid_argument("unknown case '" + name + "' (valid: " + valid + ")");
    }
    return c;
}

// Boundary regions to tag on the mesh for this case (Dirichlet edges, spring,
// monitored boundaries). Pointwise constraints are not facets.
inline std::vector<TaggedRegion> boundary_regions(const CaseSpec& c) {
    std::vector<TaggedRegion> regions;
    int dirichlet_tag = kTagDirichlet;
    for (const auto& d : c.dirichlet) {
        if (!d.pointwise) regions.push_back({d.region, dirichlet_tag});
        dirichlet_tag = kTagDirichlet2;
    }
    if (c.robin) regions.push_back({c.robin->region, kTagSpring});
    if (c.monitor) regions.push_back({c.monitor->gamma_in, kTagMonitorIn});
    return regions;
}

inline BoundaryFacets tag_boundary(const CrossedMesh& mesh, const CaseSpec& c) {
    return tag_boundary(mesh, boundary_regions(c));
}

// Resolves the case's Dirichlet data to (dof, value) constraints.
inline DofConstraints dirichlet_constraints(const CrossedMesh& mesh, const CaseSpec& c) {
    DofConstraints cs;
    for (const auto& d : c.dirichlet) {
        std::vector<int> verts;
        if (d.pointwise) {
            verts.push_back(nearest_vertex(mesh, d.point));
        } else {
            for (int v = 0; v < mesh.vertex_count(); ++v) {
                const Vec2& p = mesh.vertices[v];
                if (!detail::on_side(mesh, p, d.region.side)) continue;
                const double coord = detail::edge_coord(p, d.region.side);
                if (coord >= d.region.lo - kGeomTol && coord <= d.region.hi + kGeomTol)
                    verts.push_back(v);
            }
        }
        for (int v : verts) {
            if (d.fix_x) merge_constraint(cs, dof_index(v, 0), d.value_x);
            if (d.fix_y) merge_constraint(cs, dof_index(v, 1), d.value_y);
        }
    }
    return cs;
}

// Samples the case's closed-form phi0 on the Cartesian grid.
inline LevelSet init_level_set(const CaseSpec& c, int nx, int ny) {
    LevelSet phi;
    phi.lx = c.lx;
    phi.ly = c.ly;
    phi.values.resize(ny + 1, nx + 1);
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            phi.values(j, i) = c.init_phi(i * c.lx / nx, j * c.ly / ny);
    return phi;
}

}  // namespace lstopo
