#include <catch2/catch_amalgamated.hpp>

#include "rieszmax/integrand.hpp"

using namespace rieszmax;

TEST_CASE("check_psi1") {
    CHECK(check_psi1(make_product()).holds);
    CHECK(check_psi1(make_product()).worst_violation == 0.0);
    CHECK(check_psi1(make_min()).holds);

    Integrand shifted = make_product();
    shifted.eval = [](double s, double t) { return s * t + 1.0; };
    auto r = check_psi1(shifted);
    CHECK_FALSE(r.holds);
    CHECK(r.worst_violation == Catch::Approx(1.0));
}

TEST_CASE("check_psi2") {
    SECTION("product is strictly supermodular") {
        auto r = check_psi2(make_product());
        CHECK(r.holds);
        CHECK(r.strict);
        CHECK(r.worst_violation == 0.0);
    }
    SECTION("min is supermodular but not strictly") {
        // rectangle (0,1)x(2,3): min(1,3)-min(1,2)-0+0 = 0
        auto r = check_psi2(make_min(), {{0, 1, 2, 3}});
        CHECK(r.holds);
        CHECK_FALSE(r.strict);
    }
    SECTION("negated product fails") {
        Integrand sub = make_product();
        sub.eval = [](double s, double t) { return -s * t; };
        CHECK_FALSE(check_psi2(sub).holds);
    }
}

TEST_CASE("check_psi3") {
    SECTION("product holds with equality") {
        auto r = check_psi3(make_product());
        CHECK(r.holds);
        CHECK_FALSE(r.strict);
    }
    SECTION("s^2 t^2 strict sample") {
        // x=1, lo=0, hi=1, t=1/2: (t^2 - t) x^2 (hi^2 - lo^2) = -1/4
        auto p = make_powerprod(2, 2);
        auto r = check_psi3(p, {{1.0, 0.0, 1.0, 0.5, true}});
        CHECK(r.holds);
        CHECK(r.strict);
        auto full = check_psi3(p);
        CHECK(full.holds);
    }
    SECTION("concave first slot fails") {
        Integrand sq = make_product();
        sq.eval = [](double s, double t) { return std::sqrt(s) * t; };
        CHECK_FALSE(check_psi3(sq).holds);
    }
}

TEST_CASE("monotonicity consequence of psi1 + psi2") {
    const auto samples = default_samples();
    for (const auto& psi : {make_product(), make_min(), make_capped_product(),
                            make_powerprod(2, 2), make_threshold(1, 2)}) {
        REQUIRE(check_psi1(psi).holds);
        REQUIRE(check_psi2(psi).holds);
        for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
            for (double s : samples) {
                CHECK(psi(samples[i + 1], s) >= psi(samples[i], s) - 1e-12);
                CHECK(psi(s, samples[i + 1]) >= psi(s, samples[i]) - 1e-12);
                CHECK(psi(samples[i], s) >= -1e-12);
            }
        }
    }
}

TEST_CASE("decompose examples") {
    std::vector<double> grid;
    for (int i = 0; i <= 30; ++i) grid.push_back(i / 10.0);

    SECTION("threshold") {
        auto d = decompose(make_threshold(1, 2), grid, 10.0);
        CHECK(d.residual == 0.0);
        CHECK(d.phi1(0.5) == 0.0);
        CHECK(d.phi1(1.0) == 1.0);
        CHECK(d.phi2(1.5) == 0.0);
        CHECK(d.phi2(2.0) == 1.0);
        CHECK(d.tilde(1.0, 1.0) == 1.0);
        CHECK(d.tilde(1.0, 0.0) == 0.0);
        CHECK(std::isfinite(d.lipschitz_bound));
    }
    SECTION("capped product") {
        auto d = decompose(make_capped_product(), grid, 10.0);
        CHECK(d.residual == 0.0);
        CHECK(d.phi1(0.7) == Catch::Approx(0.7));
        CHECK(d.phi1(2.0) == 1.0);
        CHECK(d.tilde(0.5, 0.5) == Catch::Approx(0.25));
    }
    SECTION("zero integrand") {
        Integrand z = make_capped_product();
        z.eval = [](double, double) { return 0.0; };
        z.bound = 0.0;
        auto d = decompose(z, grid, 10.0);
        CHECK(d.residual == 0.0);
        CHECK(d.phi1(3.0) == 0.0);
        CHECK(d.phi2(3.0) == 0.0);
    }
    SECTION("unbounded integrand is rejected") {
        CHECK_THROWS_AS(decompose(make_product(), grid, 10.0), IntegrandError);
    }
}

TEST_CASE("truncate") {
    auto psi = make_product();
    auto t2 = truncate(psi, 2.0);
    CHECK(t2(3, 5) == 4.0);
    CHECK(t2(1.0, 1.5) == psi(1.0, 1.5));
    CHECK(t2(3.0, 0.0) == 0.0);
    CHECK(t2.flags.bounded);
    CHECK(t2.bound == 4.0);
    CHECK_THROWS_AS(truncate(psi, 0.0), IntegrandError);

    SECTION("monotone convergence in L") {
        double prev = -1.0;
        const double s1 = 1.7, s2 = 2.9;
        for (double L : {0.5, 1.0, 2.0, 3.0, 4.0}) {
            const double v = truncate(psi, L)(s1, s2);
            CHECK(v >= prev);
            prev = v;
        }
        CHECK(truncate(psi, 3.0)(s1, s2) == psi(s1, s2));
    }
}

TEST_CASE("derivative_F") {
    CHECK(derivative_F(make_product(), 3.0, 0.7) == 3.0);
    CHECK(derivative_F(make_powerprod(2, 2), 2.0, 0.5) == Catch::Approx(4.0));

    SECTION("finite difference fallback") {
        Integrand p = make_product();
        p.deriv2 = nullptr;
        CHECK(derivative_F(p, 3.0, 0.7) == Catch::Approx(3.0).margin(1e-6));
        CHECK(derivative_F(p, 3.0, 0.0) == Catch::Approx(3.0).margin(1e-5));
    }
    SECTION("F(0, u) = 0 under psi1 + psi2") {
        for (const auto& psi : {make_product(), make_min(), make_capped_product()})
            for (double u : {0.1, 0.5, 2.0})
                CHECK(derivative_F(psi, 0.0, u) == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("F nonnegativity and scaling on samples") {
        const auto psi = make_powerprod(2, 2);
        for (double x : {0.5, 1.0, 2.0})
            for (double u : {0.1, 0.5, 1.0, 2.0}) {
                CHECK(derivative_F(psi, x, u) >= -1e-12);
                for (double t : {0.25, 0.5, 0.75})
                    CHECK(derivative_F(psi, t * x, u) <=
                          t * derivative_F(psi, x, u) + 1e-12);
            }
    }
}

TEST_CASE("check_gamma") {
    GammaProfile lin{"x", [](double x) { return x; }, {}};
    auto rl = check_gamma(lin);
    CHECK(rl.holds);
    CHECK_FALSE(rl.strict);

    GammaProfile sq{"x^2", [](double x) { return x * x; }, {}};
    auto rs = check_gamma(sq);
    CHECK(rs.holds);
    CHECK(rs.strict);

    GammaProfile rt{"sqrt", [](double x) { return std::sqrt(x); }, {}};
    CHECK_FALSE(check_gamma(rt).holds);
}

TEST_CASE("catalog parsing") {
    CHECK(make_integrand("product").name == "product");
    CHECK(make_integrand("min")(2.0, 3.0) == 2.0);
    CHECK(make_integrand("powerprod:2:2")(2.0, 3.0) == 36.0);
    CHECK(make_integrand("cappedprod")(2.0, 0.5) == 0.5);
    CHECK(make_integrand("threshold:1:2")(1.0, 2.0) == 1.0);
    CHECK(make_integrand("threshold:1:2")(1.0, 1.9) == 0.0);
    CHECK_THROWS_AS(make_integrand("nope"), IntegrandError);
    CHECK_THROWS_AS(make_integrand("powerprod:2"), IntegrandError);
}
