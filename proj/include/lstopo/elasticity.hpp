#pragma once

// Linearized elasticity with ersatz material on the crossed mesh: P1 stiffness
// assembly, point loads, Dirichlet by row replacement, optional Robin spring
// term, sparse LU solves with cached factorization.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lstopo/mesh.hpp"

namespace lstopo {

struct MaterialParams {
    double E = 1.0;
    double nu = 0.3;
    double eps_er = 0.001;

    double mu() const { return E / (2.0 * (1.0 + nu)); }
    double lambda() const { return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)); }
};

// Per-triangle phase: 0 weak (D\Omega), 1 strong (Omega), 2 fixed (inverter).
using CellTags = std::vector<std::uint8_t>;

// Per-vertex 2-vector field, stored interleaved (dof(v,c) = 2v+c).
using NodalVectorField = Eigen::VectorXd;
using NodalScalarField = std::vector<double>;

inline int dof_index(int vertex, int component) { return 2 * vertex + component; }

class SolverError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Sparse square operator with a lazily computed, cached LU factorization.
// The cache is invalidated by any modification of the matrix.
class SparseOperator {
  public:
    SparseOperator() = default;
    explicit SparseOperator(Eigen::SparseMatrix<double> m) : matrix_(std::move(m)) {
        matrix_.makeCompressed();
    }

    const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }
    Eigen::SparseMatrix<double>& mutable_matrix() {
        lu_.reset();
        return matrix_;
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
        if (!lu_) {
            auto lu = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
            lu->compute(matrix_);
            if (lu->info() != Eigen::Success)
                throw SolverError("SparseOperator::solve: factorization failed (singular system?)");
            lu_ = std::move(lu);
        }
        Eigen::VectorXd x = lu_->solve(rhs);
        // One step of iterative refinement keeps the residual well below the
        // 1e-10 contract on the meshes used here.
        x += lu_->solve(rhs - matrix_ * x);
        const double res = (matrix_ * x - rhs).lpNorm<Eigen::Infinity>();
        const double bound = 1e-10 * (1.0 + rhs.lpNorm<Eigen::Infinity>());
        if (!std::isfinite(res) || res > bound)
            throw SolverError("SparseOperator::solve: residual " + std::to_string(res) +
                              " exceeds contract " + std::to_string(bound));
        return x;
    }

  private:
    Eigen::SparseMatrix<double> matrix_;
    mutable std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
};

struct LoadSpec {
    Vec2 point;
    int component = 1;  // 0 = x, 1 = y
    double magnitude = -1.0;
};

struct RobinTerm {
    std::vector<BoundaryFacet> facets;  // subset of boundary facets (Gamma_s)
    double ks = 0.0;
};

namespace detail {

// Gradients of the three P1 shape functions on a triangle, plus its area.
struct P1Gradients {
    std::array<Vec2, 3> grad;
    double area = 0.0;
};

inline P1Gradients p1_gradients(const CrossedMesh& mesh, int t) {
    const auto& tri = mesh.triangles[t];
    const Vec2& a = mesh.vertices[tri[0]];
    const Vec2& b = mesh.vertices[tri[1]];
    const Vec2& c = mesh.vertices[tri[2]];
    const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    if (std::abs(det) < 1e-300)
        throw std::invalid_argument("p1_gradients: degenerate triangle");
    P1Gradients g;
    g.area = 0.5 * std::abs(det);
    g.grad[0] = {(b.y - c.y) / det, (c.x - b.x) / det};
    g.grad[1] = {(c.y - a.y) / det, (a.x - c.x) / det};
    g.grad[2] = {(a.y - b.y) / det, (b.x - a.x) / det};
    return g;
}

inline double phase_factor(std::uint8_t tag, double eps_er) {
    return tag == 0 ? eps_er : 1.0;
}

}  // namespace detail

inline SparseOperator assemble_stiffness(const CrossedMesh& mesh, const CellTags& tags,
                                         const MaterialParams& mat,
                                         const std::optional<RobinTerm>& robin = std::nullopt) {
    if (static_cast<int>(tags.size()) != mesh.triangle_count())
        throw std::invalid_argument("assemble_stiffness: tag/mesh size mismatch");
    const int n = 2 * mesh.vertex_count();
    const double mu = mat.mu();
    const double lambda = mat.lambda();

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(36 * mesh.triangle_count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto g = detail::p1_gradients(mesh, t);
        const double w = g.area * detail::phase_factor(tags[t], mat.eps_er);
        const auto& tri = mesh.triangles[t];
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                const Vec2& ga = g.grad[a];
                const Vec2& gb = g.grad[b];
                const double dot = ga.x * gb.x + ga.y * gb.y;
                const double gax[2] = {ga.x, ga.y};
                const double gbx[2] = {gb.x, gb.y};
                for (int c = 0; c < 2; ++c) {
                    for (int d = 0; d < 2; ++d) {
                        // 2 mu e(u):e(v) + lambda div(u) div(v), P1 exact.
                        double k = mu * gbx[c] * gax[d] + lambda * gax[c] * gbx[d];
                        if (c == d) k += mu * dot;
                        trips.emplace_back(dof_index(tri[a], c), dof_index(tri[b], d), w * k);
                    }
                }
            }
        }
    }

    if (robin && robin->ks != 0.0) {
        for (const auto& f : robin->facets) {
            const Vec2& pa = mesh.vertices[f.a];
            const Vec2& pb = mesh.vertices[f.b];
            const double len = std::hypot(pb.x - pa.x, pb.y - pa.y);
            // P1 edge mass matrix, exact for products of linear traces.
            const double m11 = robin->ks * len / 3.0;
            const double m12 = robin->ks * len / 6.0;
            for (int c = 0; c < 2; ++c) {
                trips.emplace_back(dof_index(f.a, c), dof_index(f.a, c), m11);
                trips.emplace_back(dof_index(f.b, c), dof_index(f.b, c), m11);
                trips.emplace_back(dof_index(f.a, c), dof_index(f.b, c), m12);
                trips.emplace_back(dof_index(f.b, c), dof_index(f.a, c), m12);
            }
        }
    }

    Eigen::SparseMatrix<double> K(n, n);
    K.setFromTriplets(trips.begin(), trips.end());
    return SparseOperator(std::move(K));
}

inline Eigen::VectorXd assemble_point_load(const CrossedMesh& mesh, const LoadSpec& load) {
    if (load.point.x < -kGeomTol || load.point.x > mesh.lx + kGeomTol ||
        load.point.y < -kGeomTol || load.point.y > mesh.ly + kGeomTol)
        throw std::invalid_argument("assemble_point_load: point outside the domain");
    Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * mesh.vertex_count());
    if (load.magnitude == 0.0) return b;

    // Vertex hit (the only case the benchmarks use).
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        if (std::abs(mesh.vertices[v].x - load.point.x) <= 1e-12 &&
            std::abs(mesh.vertices[v].y - load.point.y) <= 1e-12) {
            b[dof_index(v, load.component)] += load.magnitude;
            return b;
        }
    }
    // Otherwise distribute by barycentric weights of the containing triangle.
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        const Vec2& p0 = mesh.vertices[tri[0]];
        const Vec2& p1 = mesh.vertices[tri[1]];
        const Vec2& p2 = mesh.vertices[tri[2]];
        const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
        const double w1 = ((load.point.x - p0.x) * (p2.y - p0.y) -
                           (p2.x - p0.x) * (load.point.y - p0.y)) / det;
        const double w2 = ((p1.x - p0.x) * (load.point.y - p0.y) -
                           (load.point.x - p0.x) * (p1.y - p0.y)) / det;
        const double w0 = 1.0 - w1 - w2;
        if (w0 >= -1e-12 && w1 >= -1e-12 && w2 >= -1e-12) {
            b[dof_index(tri[0], load.component)] += load.magnitude * w0;
            b[dof_index(tri[1], load.component)] += load.magnitude * w1;
            b[dof_index(tri[2], load.component)] += load.magnitude * w2;
            return b;
        }
    }
    throw std::invalid_argument("assemble_point_load: no containing triangle found");
}

// (dof, value) constraints, deduplicated; conflicting duplicates are an error.
using DofConstraints = std::map<int, double>;

inline void merge_constraint(DofConstraints& cs, int dof, double value) {
    auto [it, inserted] = cs.emplace(dof, value);
    if (!inserted && it->second != value)
        throw std::invalid_argument("conflicting Dirichlet values for dof " + std::to_string(dof));
}

// Row replacement: constrained rows become identity rows, columns untouched.
// The matrix is not symmetric afterwards.
inline void apply_dirichlet(SparseOperator& op, Eigen::VectorXd& rhs,
                            const DofConstraints& constraints) {
    if (constraints.empty()) return;
    auto& A = op.mutable_matrix();
    std::vector<std::uint8_t> constrained(A.rows(), 0);
    for (const auto& [dof, value] : constraints) {
        constrained[dof] = 1;
        rhs[dof] = value;
    }
    for (int col = 0; col < A.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, col); it; ++it) {
            if (constrained[it.row()])
                it.valueRef() = (it.row() == col) ? 1.0 : 0.0;
        }
    }
}

}  // namespace lstopo
