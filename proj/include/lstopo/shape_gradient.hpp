#pragma once

// Distributed shape derivative assembly (compliance, multi-load, inverter)
// and the H1 descent-direction problem with a boundary-normal penalty.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lstopo/elasticity.hpp"
#include "lstopo/levelset.hpp"
#include "lstopo/mesh.hpp"

namespace lstopo {

// SPD operator for B(theta,xi) = int alpha1 Dtheta:Dxi + alpha2 theta.xi
// plus the penalty on theta.n over the exterior facets. Independent of Omega,
// so the factorization is computed once per run and reused.
struct DescentOperator {
    SparseOperator op;
    NodalVectorField solve(const Eigen::VectorXd& rhs) const { return op.solve(rhs); }
};

using ShapeGradientRHS = Eigen::VectorXd;

struct DescentOperatorParams {
    double alpha1 = 1.0;
    double alpha2 = 0.1;
    double boundary_penalty = 1.0e4;
    double fixed_penalty = 1.0e5;
    // When set, the H1/L2 terms are dropped on tag-2 cells and replaced by
    // fixed_penalty * mass (inverter).
    std::optional<CellTags> fixed_tags;
};

inline DescentOperator assemble_descent_operator(const CrossedMesh& mesh,
                                                 const BoundaryFacets& boundary,
                                                 const DescentOperatorParams& params) {
    if (params.alpha1 <= 0.0 || params.alpha2 <= 0.0 || params.boundary_penalty <= 0.0)
        throw std::invalid_argument("assemble_descent_operator: parameters must be positive");
    const int n = 2 * mesh.vertex_count();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(36 * mesh.triangle_count());

    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto g = detail::p1_gradients(mesh, t);
        const auto& tri = mesh.triangles[t];
        const bool fixed = params.fixed_tags && (*params.fixed_tags)[t] == 2;
        const double a1 = fixed ? 0.0 : params.alpha1;
        const double a2 = fixed ? params.fixed_penalty : params.alpha2;
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                const double stiff =
                    a1 * g.area * (g.grad[a].x * g.grad[b].x + g.grad[a].y * g.grad[b].y);
                // Consistent P1 mass matrix: area/12 * (2 on diagonal, 1 off).
                const double mass = a2 * g.area * (a == b ? 2.0 : 1.0) / 12.0;
                for (int c = 0; c < 2; ++c)
                    trips.emplace_back(dof_index(tri[a], c), dof_index(tri[b], c), stiff + mass);
            }
        }
    }

    for (const auto& f : boundary.facets) {
        const Vec2& pa = mesh.vertices[f.a];
        const Vec2& pb = mesh.vertices[f.b];
        const double len = std::hypot(pb.x - pa.x, pb.y - pa.y);
        // Facets are axis-aligned, so (theta.n)(xi.n) couples only the normal
        // component; edge mass matrix is exact for linear traces.
        const int c = (std::abs(f.normal.x) > 0.5) ? 0 : 1;
        const double m11 = params.boundary_penalty * len / 3.0;
        const double m12 = params.boundary_penalty * len / 6.0;
        trips.emplace_back(dof_index(f.a, c), dof_index(f.a, c), m11);
        trips.emplace_back(dof_index(f.b, c), dof_index(f.b, c), m11);
        trips.emplace_back(dof_index(f.a, c), dof_index(f.b, c), m12);
        trips.emplace_back(dof_index(f.b, c), dof_index(f.a, c), m12);
    }

    Eigen::SparseMatrix<double> B(n, n);
    B.setFromTriplets(trips.begin(), trips.end());
    return DescentOperator{SparseOperator(std::move(B))};
}

namespace detail {

// Constant 2x2 displacement gradient of a P1 field on a triangle.
inline Eigen::Matrix2d field_gradient(const CrossedMesh& mesh, int t,
                                      const NodalVectorField& u, const P1Gradients& g) {
    Eigen::Matrix2d du = Eigen::Matrix2d::Zero();
    const auto& tri = mesh.triangles[t];
    for (int a = 0; a < 3; ++a) {
        const double ux = u[dof_index(tri[a], 0)];
        const double uy = u[dof_index(tri[a], 1)];
        du(0, 0) += ux * g.grad[a].x;
        du(0, 1) += ux * g.grad[a].y;
        du(1, 0) += uy * g.grad[a].x;
        du(1, 1) += uy * g.grad[a].y;
    }
    return du;
}

// Scatter -w * S1 : Dxi for every test field xi into the rhs vector.
// For xi = N_a e_c, S1:Dxi = sum_k S1(c,k) dN_a/dx_k.
inline void scatter_tensor(const CrossedMesh& mesh, int t, const P1Gradients& g,
                           const Eigen::Matrix2d& s1, double w, Eigen::VectorXd& rhs) {
    const auto& tri = mesh.triangles[t];
    for (int a = 0; a < 3; ++a) {
        const double gx = g.grad[a].x;
        const double gy = g.grad[a].y;
        rhs[dof_index(tri[a], 0)] -= w * (s1(0, 0) * gx + s1(0, 1) * gy);
        rhs[dof_index(tri[a], 1)] -= w * (s1(1, 0) * gx + s1(1, 1) * gy);
    }
}

inline Eigen::Matrix2d hooke(const Eigen::Matrix2d& e, double mu, double lambda) {
    return 2.0 * mu * e + lambda * e.trace() * Eigen::Matrix2d::Identity();
}

}  // namespace detail

// RHS of the descent problem for (multi-load) compliance:
// xi -> -sum_loads int c_T S1(u):Dxi - Lambda int_Omega div xi, where
// S1 = 2 Du^T A e(u) - (A e(u):e(u)) I.
inline ShapeGradientRHS compliance_rhs(const CrossedMesh& mesh, const CellTags& tags,
                                       const MaterialParams& mat,
                                       const std::vector<NodalVectorField>& states,
                                       double lambda_vol) {
    if (static_cast<int>(tags.size()) != mesh.triangle_count())
        throw std::invalid_argument("compliance_rhs: tag/mesh size mismatch");
    for (const auto& u : states)
        if (u.size() != 2 * mesh.vertex_count())
            throw std::invalid_argument("compliance_rhs: state/mesh size mismatch");

    const double mu = mat.mu();
    const double lam = mat.lambda();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * mesh.vertex_count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto g = detail::p1_gradients(mesh, t);
        const double w = g.area * detail::phase_factor(tags[t], mat.eps_er);
        for (const auto& u : states) {
            const Eigen::Matrix2d du = detail::field_gradient(mesh, t, u, g);
            const Eigen::Matrix2d e = 0.5 * (du + du.transpose());
            const Eigen::Matrix2d ae = detail::hooke(e, mu, lam);
            const Eigen::Matrix2d s1 =
                2.0 * du.transpose() * ae -
                (ae.cwiseProduct(e)).sum() * Eigen::Matrix2d::Identity();
            detail::scatter_tensor(mesh, t, g, s1, w, rhs);
        }
        if (tags[t] == 1 && lambda_vol != 0.0) {
            // -Lambda int_Omega div xi: div xi = dN_a/dx_c for xi = N_a e_c.
            const auto& tri = mesh.triangles[t];
            for (int a = 0; a < 3; ++a) {
                rhs[dof_index(tri[a], 0)] -= lambda_vol * g.area * g.grad[a].x;
                rhs[dof_index(tri[a], 1)] -= lambda_vol * g.area * g.grad[a].y;
            }
        }
    }
    return rhs;
}

// RHS for the inverter: S1 = -Du^T A e(p) - Dp^T A e(u) + (A e(u):e(p)) I.
inline ShapeGradientRHS inverter_rhs(const CrossedMesh& mesh, const CellTags& tags,
                                     const MaterialParams& mat, const NodalVectorField& u,
                                     const NodalVectorField& p, double lambda_vol) {
    if (u.size() != 2 * mesh.vertex_count() || p.size() != 2 * mesh.vertex_count())
        throw std::invalid_argument("inverter_rhs: state/mesh size mismatch");
    const double mu = mat.mu();
    const double lam = mat.lambda();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * mesh.vertex_count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto g = detail::p1_gradients(mesh, t);
        const double w = g.area * detail::phase_factor(tags[t], mat.eps_er);
        const Eigen::Matrix2d du = detail::field_gradient(mesh, t, u, g);
        const Eigen::Matrix2d dp = detail::field_gradient(mesh, t, p, g);
        const Eigen::Matrix2d eu = 0.5 * (du + du.transpose());
        const Eigen::Matrix2d ep = 0.5 * (dp + dp.transpose());
        const Eigen::Matrix2d aeu = detail::hooke(eu, mu, lam);
        const Eigen::Matrix2d aep = detail::hooke(ep, mu, lam);
        const Eigen::Matrix2d s1 =
            -du.transpose() * aep - dp.transpose() * aeu +
            (aeu.cwiseProduct(ep)).sum() * Eigen::Matrix2d::Identity();
        detail::scatter_tensor(mesh, t, g, s1, w, rhs);
        if (tags[t] == 1 && lambda_vol != 0.0) {
            const auto& tri = mesh.triangles[t];
            for (int a = 0; a < 3; ++a) {
                rhs[dof_index(tri[a], 0)] -= lambda_vol * g.area * g.grad[a].x;
                rhs[dof_index(tri[a], 1)] -= lambda_vol * g.area * g.grad[a].y;
            }
        }
    }
    return rhs;
}

inline NodalVectorField solve_descent(const DescentOperator& op, const ShapeGradientRHS& rhs) {
    return op.solve(rhs);
}

// Extracts the grid-node values of theta into a pair of (Ny+1)x(Nx+1)
// matrices; cell-center values are discarded.
inline std::pair<Eigen::ArrayXXd, Eigen::ArrayXXd> restrict_to_grid(const NodalVectorField& theta,
                                                                    const GridMap& map) {
    Eigen::ArrayXXd tx = Eigen::ArrayXXd::Zero(map.ny + 1, map.nx + 1);
    Eigen::ArrayXXd ty = Eigen::ArrayXXd::Zero(map.ny + 1, map.nx + 1);
    for (int v = 0; v < static_cast<int>(map.grid_of_vertex.size()); ++v) {
        if (!map.is_grid_node(v)) continue;
        const auto [i, j] = map.grid_of_vertex[v];
        tx(j, i) = theta[dof_index(v, 0)];
        ty(j, i) = theta[dof_index(v, 1)];
    }
    return {std::move(tx), std::move(ty)};
}

}  // namespace lstopo
