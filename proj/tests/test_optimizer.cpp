#include <catch2/catch_amalgamated.hpp>

#include "lstopo/cases.hpp"
#include "lstopo/optimizer.hpp"

using namespace lstopo;

TEST_CASE("eval_compliance: zero state and uniform strain") {
    const auto m = build_mesh(2, 1, 4, 2);
    const CellTags ones(m.triangle_count(), 1);
    const MaterialParams mat;

    const NodalVectorField zero = NodalVectorField::Zero(2 * m.vertex_count());
    CHECK(eval_compliance(m, ones, mat, {zero}) == 0.0);

    NodalVectorField u(2 * m.vertex_count());
    for (int v = 0; v < m.vertex_count(); ++v) {
        u[dof_index(v, 0)] = m.vertices[v].x;
        u[dof_index(v, 1)] = m.vertices[v].y;
    }
    // e(u) = I on all of D = [0,2]x[0,1]: (4 mu + 4 lambda)*2 = 100/13.
    CHECK_THAT(eval_compliance(m, ones, mat, {u}),
               Catch::Matchers::WithinRel(7.6923076923076925, 1e-9));
}

TEST_CASE("mirrored loads contribute equal compliances") {
    auto spec = get_case("cantilever_twoforces");
    CaseContext ctx = make_context(spec, 11, 11);
    const LevelSet phi = init_level_set(spec, 11, 11);
    const CellTags tags = classify_cells(interpolate_to_mesh(phi, ctx.map), ctx.mesh);
    const auto sol = solve_states(ctx, tags);
    REQUIRE(sol.states.size() == 2);

    const double c0 = eval_compliance(ctx.mesh, tags, spec.material, {sol.states[0]});
    const double c1 = eval_compliance(ctx.mesh, tags, spec.material, {sol.states[1]});
    const double both = eval_compliance(ctx.mesh, tags, spec.material, sol.states);
    CHECK_THAT(c0, Catch::Matchers::WithinRel(c1, 1e-8));
    CHECK_THAT(both, Catch::Matchers::WithinRel(c0 + c1, 1e-12));
}

TEST_CASE("eval_volume") {
    const auto m = build_mesh(2, 1, 4, 2);
    CHECK_THAT(eval_volume(m, CellTags(m.triangle_count(), 1)),
               Catch::Matchers::WithinRel(2.0, 1e-12));
    CHECK(eval_volume(m, CellTags(m.triangle_count(), 0)) == 0.0);

    // Half-plane design phi = x - 1: 10 inside triangles of area 1/16 each.
    NodalScalarField phi(m.vertex_count());
    for (int v = 0; v < m.vertex_count(); ++v) phi[v] = m.vertices[v].x - 1.0;
    CHECK_THAT(eval_volume(m, classify_cells(phi, m)), Catch::Matchers::WithinRel(0.625, 1e-12));
}

TEST_CASE("eval_inverter_objective") {
    auto spec = get_case("inverter");
    const auto m = build_mesh(1, 1, 100, 100);
    const auto bf = tag_boundary(m, spec);

    const NodalVectorField zero = NodalVectorField::Zero(2 * m.vertex_count());
    CHECK(eval_inverter_objective(m, bf, *spec.monitor, zero) == 0.0);

    NodalVectorField ux1(2 * m.vertex_count());
    ux1.setZero();
    for (int v = 0; v < m.vertex_count(); ++v) ux1[dof_index(v, 0)] = 1.0;
    // eta_in*|Gamma_in| + eta_out*|Gamma_out| = 2*0.06 + 1*0.14.
    CHECK_THAT(eval_inverter_objective(m, bf, *spec.monitor, ux1),
               Catch::Matchers::WithinRel(0.26, 1e-12));

    MonitorSpec off = *spec.monitor;
    off.eta_in = off.eta_out = 0.0;
    CHECK(eval_inverter_objective(m, bf, off, ux1) == 0.0);
}

TEST_CASE("step-size bookkeeping") {
    OptimizerConfig cfg;  // beta0_init = 0.5, gamma = gamma2 = 0.8, ls_max = 3

    // Accept on first try: beta0 <- min(beta0/gamma2, 1).
    CHECK_THAT(beta0_on_accept(0.5, 0, cfg), Catch::Matchers::WithinRel(0.625, 1e-15));
    // Forced step after ls_max rejections: beta0 <- max(gamma2*beta0, 0.1*beta0_init).
    CHECK_THAT(beta0_on_accept(0.5, 3, cfg), Catch::Matchers::WithinRel(0.4, 1e-15));
    CHECK(beta0_on_accept(0.05, 3, cfg) == 0.05);  // already at the floor
    CHECK(beta0_on_accept(1.0, 0, cfg) == 1.0);    // capped at 1

    // Rejection backoff is geometric with ratio gamma.
    double beta = 0.5;
    const double expected[3] = {0.4, 0.32, 0.256};
    for (double e : expected) {
        beta *= cfg.gamma;
        CHECK_THAT(beta, Catch::Matchers::WithinRel(e, 1e-15));
    }
}

TEST_CASE("stopping criterion truth table") {
    const int nx = 62;
    {
        std::vector<double> J(25, 5.0);
        CHECK(stopping_criterion(J, 25, nx));
    }
    {
        std::vector<double> J(20, 5.0);
        CHECK_FALSE(stopping_criterion(J, 20, nx));
    }
    {
        std::vector<double> J(25, 5.0);
        J[20] = 5.0 + 3.0 * 5.0 / (static_cast<double>(nx) * nx);  // J[It-5], It = 25
        CHECK_FALSE(stopping_criterion(J, 25, nx));
    }
}

TEST_CASE("short cantilever run: history contract") {
    auto spec = get_case("cantilever");
    OptimizerConfig cfg;
    cfg.max_iters = 10;
    const auto result = run(spec, 26, 13, cfg);
    const auto& rec = result.history.records;

    REQUIRE_FALSE(rec.empty());
    REQUIRE(rec.size() <= 10);
    for (size_t k = 0; k < rec.size(); ++k) {
        CHECK(rec[k].iter == static_cast<int>(k));  // contiguous from 0
        CHECK(std::isfinite(rec[k].J));
        CHECK(rec[k].volume_fraction > 0.0);
        CHECK(rec[k].volume_fraction < 1.0);
        CHECK(rec[k].descent_pairing >= 0.0);
        CHECK(rec[k].line_searches >= 0);
        CHECK(rec[k].line_searches <= cfg.ls_max);
        // Accepted steps with ls < ls_max never increase J.
        if (k > 0 && rec[k].line_searches < cfg.ls_max) CHECK(rec[k].J <= rec[k - 1].J);
    }
    CHECK(result.phi.nx() == 26);
    CHECK(result.phi.ny() == 13);
}

TEST_CASE("runs are deterministic") {
    auto spec = get_case("cantilever");
    OptimizerConfig cfg;
    cfg.max_iters = 8;
    const auto a = run(spec, 26, 13, cfg);
    const auto b = run(spec, 26, 13, cfg);
    REQUIRE(a.history.records.size() == b.history.records.size());
    for (size_t k = 0; k < a.history.records.size(); ++k) {
        const auto& ra = a.history.records[k];
        const auto& rb = b.history.records[k];
        CHECK(ra.J == rb.J);
        CHECK(ra.objective == rb.objective);
        CHECK(ra.volume == rb.volume);
        CHECK(ra.beta == rb.beta);
        CHECK(ra.line_searches == rb.line_searches);
        CHECK(ra.descent_pairing == rb.descent_pairing);
    }
    CHECK((a.phi.values == b.phi.values).all());
    CHECK(a.history.stop == b.history.stop);
}
