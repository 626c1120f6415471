#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "rieszmax/instance.hpp"
#include "rieszmax/riesz.hpp"

using namespace rieszmax;

namespace {

// Two cells with centers 0 and 1 cannot sit in a symmetric box; the closest
// symmetric analog has centers -0.5 and 0.5 at distance 1, which reproduces
// the same single nonzero term f(x0) g(x1) j(1).
const Domain kTwoCell(1, 1.0, 2);

}  // namespace

TEST_CASE("kernel catalog") {
    CHECK(make_kernel("exp")(0.0) == 1.0);
    CHECK(make_kernel("exp")(1.0) == Catch::Approx(std::exp(-1.0)));
    CHECK(make_kernel("invpow:2")(1.0) == Catch::Approx(0.25));
    CHECK(make_kernel("cutoff:1.5")(1.0) == 1.0);
    CHECK(make_kernel("cutoff:1.5")(2.0) == 0.0);
    CHECK(make_kernel("const")(7.0) == 1.0);
    CHECK_THROWS_AS(make_kernel("bogus"), Error);
    CHECK_FALSE(make_kernel("cutoff:1").strictly_decreasing);
    CHECK(make_kernel("invpow:1").strictly_decreasing);
}

TEST_CASE("riesz_eval examples") {
    const auto psi = make_product();
    const auto j = make_kernel_exp();
    SECTION("g identically zero") {
        Domain d(1, 2.0, 4);
        GridFunction f(d, {1, 0, 2, 0});
        CHECK(riesz_eval(f, GridFunction::zero(d), psi, j) == 0.0);
    }
    SECTION("single nonzero term 2 e^{-1}") {
        GridFunction f(kTwoCell, {1, 0});
        GridFunction g(kTwoCell, {0, 2});
        CHECK(riesz_eval(f, g, psi, j) == Catch::Approx(2.0 * std::exp(-1.0)));
    }
    SECTION("constant kernel factorizes") {
        Domain d(1, 2.0, 8);
        std::mt19937_64 rng(23);
        GridFunction f = random_feasible(d, ConstraintSpec(1, 2), rng);
        GridFunction g = random_feasible(d, ConstraintSpec(1, 2), rng);
        CHECK(riesz_eval(f, g, psi, make_kernel_const()) ==
              Catch::Approx(integral(f) * integral(g)));
    }
    SECTION("compensated mode agrees") {
        Domain d(1, 2.0, 8);
        std::mt19937_64 rng(29);
        GridFunction f = random_feasible(d, ConstraintSpec(1, 2), rng);
        GridFunction g = random_feasible(d, ConstraintSpec(1, 2), rng);
        CHECK(riesz_eval(f, g, psi, j, true) ==
              Catch::Approx(riesz_eval(f, g, psi, j)).epsilon(1e-14));
    }
}

TEST_CASE("riesz_eval symmetry and monotonicity") {
    Domain d(1, 2.0, 8);
    std::mt19937_64 rng(31);
    const auto j = make_kernel_invpow(2);
    for (int i = 0; i < 10; ++i) {
        GridFunction f = random_feasible(d, ConstraintSpec(1, 3), rng);
        GridFunction g = random_feasible(d, ConstraintSpec(1, 3), rng);
        // symmetric integrands commute
        for (const auto& psi : {make_product(), make_min()})
            CHECK(riesz_eval(f, g, psi, j) == Catch::Approx(riesz_eval(g, f, psi, j)));
        // pointwise-dominated integrand gives a smaller value (on [0,1]^2)
        CHECK(riesz_eval(f, g, make_powerprod(2, 2), j) <=
              riesz_eval(f, g, make_product(), j) + 1e-12);
    }
}

TEST_CASE("potential examples") {
    const auto j = make_kernel_exp();
    Domain d(1, 1.5, 3);  // centers -1, 0, 1
    SECTION("point mass") {
        GridFunction h(d, {0, 1, 0});
        GridFunction nu = potential(h, j);
        CHECK(nu.values[0] == Catch::Approx(std::exp(-1.0)));
        CHECK(nu.values[1] == Catch::Approx(1.0));
        CHECK(nu.values[2] == Catch::Approx(std::exp(-1.0)));
    }
    SECTION("zero density") {
        CHECK(potential(GridFunction::zero(d), j).values ==
              std::vector<double>(3, 0.0));
    }
    SECTION("constant kernel gives the total mass") {
        GridFunction h(d, {0.5, 1.0, 0.25});
        GridFunction nu = potential(h, make_kernel_const());
        for (double v : nu.values) CHECK(v == Catch::Approx(integral(h)));
    }
}

TEST_CASE("potential of Schwarz-symmetric density is radially monotone (1D)") {
    std::mt19937_64 rng(37);
    Domain d(1, 4.0, 16);
    for (const auto& j :
         {make_kernel_exp(), make_kernel_invpow(2), make_kernel_cutoff(2)}) {
        for (int i = 0; i < 30; ++i) {
            GridFunction h =
                schwarz_rearrange(random_feasible(d, ConstraintSpec(2, 8), rng));
            GridFunction nu = potential(h, j);
            const auto order = radial_order(d);
            for (std::size_t k = 1; k < order.size(); ++k)
                CHECK(nu.values[order[k]] <= nu.values[order[k - 1]] + 1e-12);
        }
    }
}

TEST_CASE("layercake_eval examples") {
    const auto psi = make_product();
    const auto j = make_kernel_exp();
    SECTION("single-strip hand computation") {
        GridFunction f(kTwoCell, {1, 0});
        GridFunction g(kTwoCell, {0, 2});
        CHECK(layercake_eval(f, g, psi, j) == Catch::Approx(2.0 * std::exp(-1.0)));
    }
    SECTION("no strips when g vanishes") {
        Domain d(1, 2.0, 4);
        CHECK(layercake_eval(GridFunction(d, {1, 1, 0, 0}), GridFunction::zero(d),
                             psi, j) == 0.0);
    }
}

TEST_CASE("path equivalence on random instances") {
    std::mt19937_64 rng(41);
    Domain d(1, 3.0, 12);
    const auto kernels = {make_kernel_exp(), make_kernel_invpow(2)};
    const auto integrands = {make_product(), make_powerprod(2, 2), make_min(),
                             make_capped_product(), make_threshold(0.3, 0.5)};
    for (int i = 0; i < 10; ++i) {
        GridFunction f = random_feasible(d, ConstraintSpec(1, 3), rng);
        GridFunction g = random_feasible(d, ConstraintSpec(1, 3), rng);
        for (const auto& j : kernels)
            for (const auto& psi : integrands) {
                const double naive = riesz_eval(f, g, psi, j);
                const double lc = layercake_eval(f, g, psi, j);
                CHECK(std::abs(naive - lc) <= 1e-10 * (1.0 + std::abs(naive)));
            }
    }
}

TEST_CASE("hl_bound examples") {
    GammaProfile lin{"x", [](double x) { return x; }, {}};
    SECTION("hand computation") {
        Domain d(1, 1.5, 3);
        GridFunction u(d, {1, 2, 1});
        ConstraintSpec c(1.0, 1.0);
        GridFunction nu(d, {0.5, 0.0, 0.5});
        auto r = hl_bound(u, lin, nu, c);
        CHECK(r.lhs == Catch::Approx(1.0));
        CHECK(r.rhs == Catch::Approx(2.0));
        CHECK(r.holds);
    }
    SECTION("equality at the ball itself") {
        Domain d(1, 2.5, 5);
        ConstraintSpec c(1.0, 3.0);
        GridFunction u(d, {0, 1, 2, 1, 0});
        GridFunction ball = ball_indicator(d, c);
        auto r = hl_bound(u, lin, ball, c);
        CHECK(r.lhs == Catch::Approx(r.rhs));
        CHECK(r.holds);
    }
    SECTION("zero density") {
        Domain d(1, 2.5, 5);
        GridFunction u(d, {0, 1, 2, 1, 0});
        auto r = hl_bound(u, lin, GridFunction::zero(d), ConstraintSpec(1.0, 2.0));
        CHECK(r.lhs == 0.0);
        CHECK(r.holds);
    }
    SECTION("precondition failures") {
        Domain d(1, 2.5, 5);
        GridFunction not_sym(d, {0, 1, 0, 0, 0});
        CHECK_THROWS_AS(hl_bound(not_sym, lin, GridFunction::zero(d),
                                 ConstraintSpec(1, 2)),
                        InfeasibleInputError);
        GridFunction u(d, {0, 1, 2, 1, 0});
        GridFunction fat(d, {1, 1, 1, 1, 1});
        CHECK_THROWS_AS(hl_bound(u, lin, fat, ConstraintSpec(1, 2)),
                        InfeasibleInputError);
    }
}

TEST_CASE("verify_chain examples") {
    const auto psi = make_product();
    const auto j = make_kernel_exp();
    Domain d(1, 4.0, 16);
    ConstraintSpec c1(1.0, 2.0), c2(1.0, 3.0);
    SECTION("ball pair is a fixed point") {
        GridFunction b1 = ball_indicator(d, c1);
        GridFunction b2 = ball_indicator(d, c2);
        auto r = verify_chain(b1, b2, c1, c2, psi, j);
        CHECK(r.slack_rearrange == Catch::Approx(0.0).margin(1e-12));
        CHECK(r.slack_first == Catch::Approx(0.0).margin(1e-12));
        CHECK(r.slack_second == Catch::Approx(0.0).margin(1e-12));
        CHECK(r.j_ff == Catch::Approx(r.j_ball));
    }
    SECTION("zero functions") {
        auto r = verify_chain(GridFunction::zero(d), GridFunction::zero(d), c1, c2,
                              psi, j);
        CHECK(r.j_ff == 0.0);
        CHECK(r.j_star == 0.0);
    }
    SECTION("random feasible pairs satisfy the chain") {
        std::mt19937_64 rng(43);
        for (int i = 0; i < 25; ++i) {
            GridFunction f1 = random_feasible(d, c1, rng);
            GridFunction f2 = random_feasible(d, c2, rng);
            auto r = verify_chain(f1, f2, c1, c2, psi, j);
            CHECK(r.min_slack() >= -1e-9 * (1.0 + std::abs(r.j_ball)));
        }
    }
    SECTION("infeasible input is rejected") {
        GridFunction fat(d, std::vector<double>(d.cell_count(), 1.0));
        CHECK_THROWS_AS(verify_chain(fat, GridFunction::zero(d), c1, c2, psi, j),
                        InfeasibleInputError);
    }
}

TEST_CASE("truncation convergence at the functional level") {
    Domain d(1, 2.0, 4);
    GridFunction f(d, {0, 3, 1, 0});
    GridFunction g(d, {0, 2, 5, 0});
    const auto psi = make_product();
    const auto j = make_kernel_exp();
    const double full = riesz_eval(f, g, psi, j);
    double prev = -1.0;
    for (double L : {1.0, 2.0, 3.0, 4.0, 5.0, 6.0}) {
        const double v = riesz_eval(f, g, truncate(psi, L), j);
        CHECK(v >= prev - 1e-15);
        if (L >= 5.0) CHECK(v == full);
        prev = v;
    }
}
