#include <catch2/catch_amalgamated.hpp>

#include "lstopo/cases.hpp"

using namespace lstopo;

TEST_CASE("case headline data") {
    CHECK(get_case("cantilever").lambda == 40.0);
    CHECK(get_case("cantilever_asymmetric").lambda == 60.0);
    CHECK(get_case("half_wheel").lambda == 30.0);
    CHECK(get_case("bridge").lambda == 20.0);
    CHECK(get_case("MBB_beam").lx == 3.0);
    CHECK(get_case("MBB_beam").lambda == 130.0);

    const auto inv = get_case("inverter");
    CHECK(inv.monitor->eta_in == 2.0);
    CHECK(inv.monitor->eta_out == 1.0);
    CHECK(inv.material.E == 20.0);
    CHECK(inv.material.eps_er == 0.01);
    CHECK(inv.robin->ks == 0.01);
    CHECK(inv.lambda == 0.01);
    CHECK(inv.beta0_init == 1.0);
    CHECK(inv.fixed_regions.size() == 2);
    CHECK(inv.is_inverter);
}

TEST_CASE("unknown case names are rejected with the valid list") {
    try {
        get_case("foo");
        FAIL("expected an exception");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("foo") != std::string::npos);
        CHECK(msg.find("inverter") != std::string::npos);
        CHECK(msg.find("MBB_beam") != std::string::npos);
    }
}

TEST_CASE("iteration caps") {
    CHECK(get_case("cantilever").itmax(62) == 93);
    CHECK(get_case("cantilever").itmax(150) == 225);
    CHECK(get_case("inverter").itmax(61) == 122);
}

TEST_CASE("cantilever initialization spot values") {
    const auto c = get_case("cantilever");
    // Hole seed at the symmetry point: -1 - 0.4 + 200*0.01 = 0.6.
    CHECK_THAT(c.init_phi(0.0, 0.5), Catch::Matchers::WithinAbs(0.6, 1e-12));
    // Top-right corner: the cut term 100*(x+y-lx-ly+0.1) = 10 dominates.
    CHECK_THAT(c.init_phi(2.0, 1.0), Catch::Matchers::WithinAbs(8.6, 1e-12));
    CHECK(c.init_phi(2.0, 1.0) > 0.0);
}

TEST_CASE("symmetric cases have mirror-symmetric initializations") {
    auto check_mirror_y = [](const CaseSpec& c) {
        for (int i = 0; i <= 40; ++i) {
            for (int j = 0; j <= 20; ++j) {
                const double x = i * c.lx / 40, y = j * c.ly / 20;
                REQUIRE_THAT(c.init_phi(x, c.ly - y),
                             Catch::Matchers::WithinAbs(c.init_phi(x, y), 1e-12));
            }
        }
    };
    auto check_mirror_x = [](const CaseSpec& c) {
        for (int i = 0; i <= 20; ++i) {
            for (int j = 0; j <= 20; ++j) {
                const double x = i * c.lx / 20, y = j * c.ly / 20;
                REQUIRE_THAT(c.init_phi(c.lx - x, y),
                             Catch::Matchers::WithinAbs(c.init_phi(x, y), 1e-12));
            }
        }
    };
    check_mirror_y(get_case("cantilever"));
    check_mirror_y(get_case("cantilever_twoforces"));
    check_mirror_x(get_case("half_wheel"));
    check_mirror_x(get_case("bridge"));
}

TEST_CASE("default grids are valid and initializations produce both phases") {
    for (const auto& name : case_names()) {
        const auto c = get_case(name);
        INFO("case " << name);
        REQUIRE_NOTHROW(build_mesh(c.lx, c.ly, c.default_nx, c.default_ny));
        const auto phi = init_level_set(c, c.default_nx, c.default_ny);
        REQUIRE(phi.values.allFinite());
        CHECK(phi.values.minCoeff() < 0.0);
        CHECK(phi.values.maxCoeff() > 0.0);
    }
}

TEST_CASE("init_level_set samples the closed form on the grid") {
    const auto c = get_case("bridge");
    const auto phi = init_level_set(c, 8, 4);
    REQUIRE(phi.values.rows() == 5);
    REQUIRE(phi.values.cols() == 9);
    for (int j = 0; j <= 4; ++j)
        for (int i = 0; i <= 8; ++i)
            CHECK(phi.values(j, i) == c.init_phi(i * c.lx / 8, j * c.ly / 4));
}

TEST_CASE("dirichlet constraints resolve to the expected dofs") {
    {
        const auto c = get_case("cantilever");
        const auto m = build_mesh(c.lx, c.ly, 4, 2);
        const auto cs = dirichlet_constraints(m, c);
        CHECK(cs.size() == 6);  // 3 left-edge vertices, both components
        for (const auto& [dof, value] : cs) {
            CHECK(value == 0.0);
            CHECK(m.vertices[dof / 2].x == 0.0);
        }
    }
    {
        const auto c = get_case("MBB_beam");
        const auto m = build_mesh(c.lx, c.ly, 6, 2);
        const auto cs = dirichlet_constraints(m, c);
        CHECK(cs.size() == 4);  // u_x on 3 left-edge vertices + u_y at (3,0)
        CHECK(cs.count(dof_index(m.grid_vertex(6, 0), 1)) == 1);
    }
    {
        const auto c = get_case("half_wheel");
        const auto m = build_mesh(c.lx, c.ly, 4, 2);
        const auto cs = dirichlet_constraints(m, c);
        CHECK(cs.size() == 3);  // full clamp at (0,0), u_y only at (2,0)
        CHECK(cs.count(dof_index(m.grid_vertex(4, 0), 0)) == 0);
        CHECK(cs.count(dof_index(m.grid_vertex(4, 0), 1)) == 1);
    }
    {
        const auto c = get_case("bridge");
        const auto m = build_mesh(c.lx, c.ly, 4, 2);
        CHECK(dirichlet_constraints(m, c).size() == 4);  // both corners fully clamped
    }
}

TEST_CASE("boundary regions cover the case data") {
    const auto inv = get_case("inverter");
    CHECK(boundary_regions(inv).size() == 4);  // 2 clamps, spring, monitored input
    const auto cant = get_case("cantilever");
    CHECK(boundary_regions(cant).size() == 1);

    const auto m = build_mesh(1, 1, 100, 100);
    const auto bf = tag_boundary(m, inv);
    int spring = 0, monitor_in = 0;
    for (const auto& f : bf.facets) {
        spring += (f.tag == kTagSpring);
        monitor_in += (f.tag == kTagMonitorIn);
    }
    CHECK(spring == 14);     // {1} x (0.43, 0.57)
    CHECK(monitor_in == 6);  // {0} x (0.47, 0.53)
}
