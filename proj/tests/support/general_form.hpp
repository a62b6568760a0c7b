#pragma once

// Test-only reference paths: the general first-order tensor for the shape
// derivative (arbitrary state/adjoint pair and c1 weight) and the general
// adjoint solve. Assembled with its own element loop, independent of the
// compliance-specific implementation it cross-checks.

#include <Eigen/Dense>

#include "lstopo/elasticity.hpp"
#include "lstopo/mesh.hpp"

namespace lstopo::testing {

// rhs(xi) = -int_D c_T S1 : Dxi - Lambda int_{Omega} div xi with
// S1 = -Du^T A e(p) - Dp^T A e(u) - 2 c1 Du^T A e(u)
//      + (A e(u):e(p) + c1 A e(u):e(u)) I.
inline Eigen::VectorXd general_form_rhs(const CrossedMesh& mesh, const CellTags& tags,
                                        const MaterialParams& mat, const Eigen::VectorXd& u,
                                        const Eigen::VectorXd& p, double c1, double lambda_vol) {
    const double mu = mat.mu();
    const double lam = mat.lambda();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * mesh.vertex_count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        const Vec2& a = mesh.vertices[tri[0]];
        const Vec2& b = mesh.vertices[tri[1]];
        const Vec2& c = mesh.vertices[tri[2]];
        const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
        const double area = 0.5 * std::abs(det);
        const Vec2 grads[3] = {{(b.y - c.y) / det, (c.x - b.x) / det},
                               {(c.y - a.y) / det, (a.x - c.x) / det},
                               {(a.y - b.y) / det, (b.x - a.x) / det}};

        Eigen::Matrix2d du = Eigen::Matrix2d::Zero();
        Eigen::Matrix2d dp = Eigen::Matrix2d::Zero();
        for (int k = 0; k < 3; ++k) {
            for (int comp = 0; comp < 2; ++comp) {
                du(comp, 0) += u[2 * tri[k] + comp] * grads[k].x;
                du(comp, 1) += u[2 * tri[k] + comp] * grads[k].y;
                dp(comp, 0) += p[2 * tri[k] + comp] * grads[k].x;
                dp(comp, 1) += p[2 * tri[k] + comp] * grads[k].y;
            }
        }
        const Eigen::Matrix2d eu = 0.5 * (du + du.transpose());
        const Eigen::Matrix2d ep = 0.5 * (dp + dp.transpose());
        auto hooke = [&](const Eigen::Matrix2d& e) {
            return Eigen::Matrix2d(2.0 * mu * e + lam * e.trace() * Eigen::Matrix2d::Identity());
        };
        const Eigen::Matrix2d aeu = hooke(eu);
        const Eigen::Matrix2d aep = hooke(ep);
        const Eigen::Matrix2d s1 =
            -du.transpose() * aep - dp.transpose() * aeu - 2.0 * c1 * du.transpose() * aeu +
            (aeu.cwiseProduct(ep).sum() + c1 * aeu.cwiseProduct(eu).sum()) *
                Eigen::Matrix2d::Identity();

        const double w = area * (tags[t] == 0 ? mat.eps_er : 1.0);
        for (int k = 0; k < 3; ++k) {
            rhs[2 * tri[k] + 0] -= w * (s1(0, 0) * grads[k].x + s1(0, 1) * grads[k].y);
            rhs[2 * tri[k] + 1] -= w * (s1(1, 0) * grads[k].x + s1(1, 1) * grads[k].y);
            if (tags[t] == 1) {
                rhs[2 * tri[k] + 0] -= lambda_vol * area * grads[k].x;
                rhs[2 * tri[k] + 1] -= lambda_vol * area * grads[k].y;
            }
        }
    }
    return rhs;
}

// Adjoint of the general functional with (c1,c2,c3) = (c1,0,0): solves
// int A e(p):e(phihat) = -2 c1 int A e(u):e(phihat) with the same Dirichlet
// conditions. For the compliance this must return p = -2u.
inline Eigen::VectorXd general_adjoint_solve(const CrossedMesh& mesh, const CellTags& tags,
                                             const MaterialParams& mat,
                                             const DofConstraints& constraints,
                                             const Eigen::VectorXd& u, double c1) {
    SparseOperator k0 = assemble_stiffness(mesh, tags, mat);
    Eigen::VectorXd rhs = -2.0 * c1 * (k0.matrix() * u);
    DofConstraints homogeneous;
    for (const auto& [dof, value] : constraints) homogeneous[dof] = 0.0;
    apply_dirichlet(k0, rhs, homogeneous);
    return k0.solve(rhs);
}

}  // namespace lstopo::testing
