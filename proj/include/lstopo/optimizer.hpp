#pragma once

// Main optimization loop: classify the domain, solve the elasticity states
// (and the adjoint for the inverter), evaluate J = objective + Lambda*volume,
// line search on the step size, descent solve, level-set update, stopping test.

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lstopo/cases.hpp"
#include "lstopo/elasticity.hpp"
#include "lstopo/levelset.hpp"
#include "lstopo/mesh.hpp"
#include "lstopo/shape_gradient.hpp"

namespace lstopo {

struct OptimizerConfig {
    double beta0_init = 0.5;
    int ls_max = 3;
    double gamma = 0.8;
    double gamma2 = 0.8;
    int max_iters = 0;  // 0: use the case rule (1.5*Nx compliance, 2*Nx inverter)
    int reinit_every = 5;
    int hj_substeps = 10;
    int reinit_sweeps = 2;
    double beta_floor_factor = 0.1;
    double beta_cap = 1.0;
};

struct IterationRecord {
    int iter = 0;
    double J = 0.0;
    double objective = 0.0;  // compliance or mechanism objective
    double volume = 0.0;
    double volume_fraction = 0.0;
    double beta = 0.0;
    int line_searches = 0;
    // theta' B theta = rhs . theta; -dJ(Omega;theta), positive unless theta=0.
    double descent_pairing = 0.0;
};

enum class StopReason { running, converged, max_iterations, stationary };

struct RunHistory {
    std::vector<IterationRecord> records;
    StopReason stop = StopReason::running;
};

// Per-mesh data that is independent of the design.
struct CaseContext {
    CaseSpec spec;
    CrossedMesh mesh;
    GridMap map;
    BoundaryFacets boundary;
    DofConstraints constraints;
    std::optional<RobinTerm> robin;
};

inline CaseContext make_context(const CaseSpec& spec, int nx, int ny) {
    CaseContext ctx;
    ctx.spec = spec;
    ctx.mesh = build_mesh(spec.lx, spec.ly, nx, ny);
    ctx.map = build_grid_map(ctx.mesh);
    ctx.boundary = tag_boundary(ctx.mesh, spec);
    ctx.constraints = dirichlet_constraints(ctx.mesh, spec);
    if (spec.robin) {
        RobinTerm rt;
        rt.ks = spec.robin->ks;
        for (const auto& f : ctx.boundary.facets)
            if (f.tag == kTagSpring) rt.facets.push_back(f);
        ctx.robin = std::move(rt);
    }
    return ctx;
}

struct ElasticitySolution {
    SparseOperator op;  // Dirichlet-applied operator with cached factorization
    std::vector<NodalVectorField> states;
};

inline ElasticitySolution solve_states(const CaseContext& ctx, const CellTags& tags) {
    ElasticitySolution sol;
    sol.op = assemble_stiffness(ctx.mesh, tags, ctx.spec.material, ctx.robin);
    std::vector<Eigen::VectorXd> rhs;
    rhs.reserve(ctx.spec.loads.size());
    for (const auto& load : ctx.spec.loads)
        rhs.push_back(assemble_point_load(ctx.mesh, load));
    bool first = true;
    for (auto& b : rhs) {
        if (first) {
            apply_dirichlet(sol.op, b, ctx.constraints);
            first = false;
        } else {
            for (const auto& [dof, value] : ctx.constraints) b[dof] = value;
        }
    }
    for (const auto& b : rhs) sol.states.push_back(sol.op.solve(b));
    return sol;
}

// Convenience overload matching the one-shot signature.
inline std::vector<NodalVectorField> solve_states(const CrossedMesh& mesh, const CellTags& tags,
                                                  const MaterialParams& mat,
                                                  const CaseSpec& spec) {
    CaseSpec s = spec;
    s.material = mat;
    CaseContext ctx = make_context(s, mesh.nx, mesh.ny);
    return solve_states(ctx, tags).states;
}

// Adjoint of the inverter objective; reuses the state factorization.
inline NodalVectorField solve_adjoint_inverter(const CaseContext& ctx,
                                               const ElasticitySolution& sol) {
    if (!ctx.spec.monitor)
        throw std::invalid_argument("solve_adjoint_inverter: case has no monitored boundary");
    const auto& mon = *ctx.spec.monitor;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * ctx.mesh.vertex_count());
    for (const auto& f : ctx.boundary.facets) {
        double eta = 0.0;
        if (f.tag == kTagMonitorIn) eta = mon.eta_in;
        else if (f.tag == kTagSpring) eta = mon.eta_out;
        else continue;
        const Vec2& pa = ctx.mesh.vertices[f.a];
        const Vec2& pb = ctx.mesh.vertices[f.b];
        const double len = std::hypot(pb.x - pa.x, pb.y - pa.y);
        // -eta int_facet phihat_1: each endpoint basis integrates to len/2.
        b[dof_index(f.a, 0)] -= eta * len / 2.0;
        b[dof_index(f.b, 0)] -= eta * len / 2.0;
    }
    for (const auto& [dof, value] : ctx.constraints) b[dof] = 0.0;
    return sol.op.solve(b);
}

inline double eval_compliance(const CrossedMesh& mesh, const CellTags& tags,
                              const MaterialParams& mat,
                              const std::vector<NodalVectorField>& states) {
    const double mu = mat.mu();
    const double lam = mat.lambda();
    double total = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto g = detail::p1_gradients(mesh, t);
        const double w = g.area * detail::phase_factor(tags[t], mat.eps_er);
        for (const auto& u : states) {
            const Eigen::Matrix2d du = detail::field_gradient(mesh, t, u, g);
            const Eigen::Matrix2d e = 0.5 * (du + du.transpose());
            total += w * (2.0 * mu * e.cwiseProduct(e).sum() + lam * e.trace() * e.trace());
        }
    }
    return total;
}

inline double eval_volume(const CrossedMesh& mesh, const CellTags& tags) {
    double vol = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t)
        if (tags[t] == 1) vol += mesh.triangle_area(t);
    return vol;
}

// eta_in int_{Gamma_in} u_1 + eta_out int_{Gamma_out} u_1 (trapezoid-exact).
inline double eval_inverter_objective(const CrossedMesh& mesh, const BoundaryFacets& boundary,
                                      const MonitorSpec& mon, const NodalVectorField& u) {
    double total = 0.0;
    for (const auto& f : boundary.facets) {
        double eta = 0.0;
        if (f.tag == kTagMonitorIn) eta = mon.eta_in;
        else if (f.tag == kTagSpring) eta = mon.eta_out;
        else continue;
        const Vec2& pa = mesh.vertices[f.a];
        const Vec2& pb = mesh.vertices[f.b];
        const double len = std::hypot(pb.x - pa.x, pb.y - pa.y);
        total += eta * len * 0.5 * (u[dof_index(f.a, 0)] + u[dof_index(f.b, 0)]);
    }
    return total;
}

// Reference step-size update on acceptance.
inline double beta0_on_accept(double beta0, int ls, const OptimizerConfig& cfg) {
    if (ls == cfg.ls_max) beta0 = std::max(beta0 * cfg.gamma2, cfg.beta_floor_factor * cfg.beta0_init);
    if (ls == 0) beta0 = std::min(beta0 / cfg.gamma2, cfg.beta_cap);
    return beta0;
}

// True iff It > 20 and max_{k in It-5..It-1} |J[k] - J[It-1]| < 2 J[It-1]/Nx^2.
inline bool stopping_criterion(const std::vector<double>& J, int it, int nx) {
    if (it <= 20) return false;
    const double ref = J[it - 1];
    double max_diff = 0.0;
    for (int k = it - 5; k < it; ++k) max_diff = std::max(max_diff, std::abs(J[k] - ref));
    return max_diff < 2.0 * ref / (static_cast<double>(nx) * nx);
}

struct RunResult {
    RunHistory history;
    LevelSet phi;
};

// Called after each accepted iteration, before the level-set update of the
// next design has been classified. phi_mat is the already-advected level set.
using IterationCallback =
    std::function<void(const IterationRecord&, const LevelSet& phi_mat, const CellTags& tags)>;

inline RunResult run(const CaseContext& ctx, OptimizerConfig cfg,
                     const IterationCallback& callback = {}) {
    const CaseSpec& spec = ctx.spec;
    const int nx = ctx.mesh.nx;
    const int ny = ctx.mesh.ny;
    cfg.beta0_init = spec.beta0_init;
    const int it_max = cfg.max_iters > 0 ? cfg.max_iters : spec.itmax(nx);

    DescentOperatorParams dparams;
    dparams.boundary_penalty = spec.boundary_penalty;

    LevelSet phi_mat = init_level_set(spec, nx, ny);
    NodalScalarField phi = interpolate_to_mesh(phi_mat, ctx.map);
    const double domain_area = spec.lx * spec.ly;

    DescentOperator descent;  // factorized once; B is independent of Omega
    bool descent_ready = false;

    RunHistory history;
    std::vector<double> J;
    J.reserve(it_max);
    LevelSet phi_mat_old = phi_mat;
    NodalScalarField phi_old = phi;
    std::pair<Eigen::ArrayXXd, Eigen::ArrayXXd> th_mat;

    double beta0 = cfg.beta0_init;
    double beta = beta0;
    int ls = 0;
    int it = 0;
    LevelSet final_phi = phi_mat;

    while (it < it_max && history.stop == StopReason::running) {
        const CellTags tags = classify_cells(phi, ctx.mesh, spec.fixed_regions);
        if (!descent_ready) {
            if (spec.is_inverter) dparams.fixed_tags = tags;  // fixed cells never change
            descent = assemble_descent_operator(ctx.mesh, ctx.boundary, dparams);
            descent_ready = true;
        }

        const ElasticitySolution sol = solve_states(ctx, tags);
        double objective;
        NodalVectorField adjoint;
        if (spec.is_inverter) {
            adjoint = solve_adjoint_inverter(ctx, sol);
            objective = eval_inverter_objective(ctx.mesh, ctx.boundary, *spec.monitor,
                                                sol.states.front());
        } else {
            objective = eval_compliance(ctx.mesh, tags, spec.material, sol.states);
        }
        const double vol = eval_volume(ctx.mesh, tags);
        const double J_it = objective + spec.lambda * vol;

        if (it > 0 && J_it > J[it - 1] && ls < cfg.ls_max) {
            // Reject: back off the step and replay the advection.
            ++ls;
            beta *= cfg.gamma;
            phi_mat = phi_mat_old;
            auto adv = advect(phi_mat, th_mat.first, th_mat.second, beta, cfg.hj_substeps);
            phi_mat = std::move(adv.phi);
            phi = interpolate_to_mesh(phi_mat, ctx.map);
            continue;
        }

        J.push_back(J_it);
        beta0 = beta0_on_accept(beta0, ls, cfg);
        const int ls_used = ls;
        ls = 0;
        beta = beta0;
        ++it;

        ShapeGradientRHS rhs;
        if (spec.is_inverter) {
            rhs = inverter_rhs(ctx.mesh, tags, spec.material, sol.states.front(), adjoint,
                               spec.lambda);
        } else {
            rhs = compliance_rhs(ctx.mesh, tags, spec.material, sol.states, spec.lambda);
        }
        const NodalVectorField theta = solve_descent(descent, rhs);
        const double pairing = rhs.dot(theta);
        th_mat = restrict_to_grid(theta, ctx.map);

        phi_old = phi;
        phi_mat_old = phi_mat;
        auto adv = advect(phi_mat, th_mat.first, th_mat.second, beta, cfg.hj_substeps);
        if (!adv.moved) {
            history.stop = StopReason::stationary;
        } else {
            phi_mat = std::move(adv.phi);
            if (it % cfg.reinit_every == 0) phi_mat = reinitialize(phi_mat, cfg.reinit_sweeps);
            phi = interpolate_to_mesh(phi_mat, ctx.map);
        }

        IterationRecord rec;
        rec.iter = it - 1;
        rec.J = J_it;
        rec.objective = objective;
        rec.volume = vol;
        rec.volume_fraction = vol / domain_area;
        rec.beta = beta;
        rec.line_searches = ls_used;
        rec.descent_pairing = pairing;
        history.records.push_back(rec);
        final_phi = phi_mat;
        if (callback) callback(rec, phi_mat, tags);

        if (history.stop == StopReason::running && stopping_criterion(J, it, nx))
            history.stop = StopReason::converged;
    }
    if (history.stop == StopReason::running) history.stop = StopReason::max_iterations;
    return {std::move(history), std::move(final_phi)};
}

inline RunResult run(const CaseSpec& spec, int nx, int ny, const OptimizerConfig& cfg = {},
                     const IterationCallback& callback = {}) {
    return run(make_context(spec, nx, ny), cfg, callback);
}

}  // namespace lstopo
