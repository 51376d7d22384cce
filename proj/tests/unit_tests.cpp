#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "kn/freefield.hpp"
#include "kn/kernels.hpp"
#include "kn/report.hpp"
#include "kn/special.hpp"
#include "kn/structfn.hpp"
#include "kn/thetaspace.hpp"

using namespace kn;

namespace {
const TruncationConfig tr{};

ParameterSet test_params(int n) {
    // Fixed interior point of the sampling region.
    std::vector<cplx> mu(n, 0.0);
    if (n > 1) {
        mu[0] = cplx(0.13, 0.02);
        mu[1] = -mu[0];
    }
    return build_params(n, cplx(0.80, 0.10), cplx(0.99, 0.05),
                        cplx(0.10, 1.30), mu, false, cplx(1.07, 0.21));
}

double crel(cplx a, cplx b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}
}  // namespace

TEST_CASE("parameter assembly and region enforcement") {
    ParameterSet ps = test_params(3);
    CHECK(crel(ps.q1 * ps.q2 * ps.q3, 1.0) < 1e-14);
    CHECK(crel(ps.q(), ps.q_half * ps.q_half) < 1e-14);
    // p^tau = 1 on the fixed branch.
    CHECK(std::abs(ps.pow_p(ps.tau) - 1.0) < 1e-12);
    // q^2 = p^gamma and d = p^beta.
    CHECK(crel(ps.pow_p(ps.gamma), ps.q2) < 1e-12);
    CHECK(crel(ps.pow_p(ps.beta), ps.d()) < 1e-12);
    // Region violation: |q| >= 1 must be rejected.
    CHECK_THROWS_AS(build_params(2, cplx(1.05, 0.0), cplx(1.0, 0.0),
                                 cplx(0.0, 1.3), {0.0, 0.0}, false),
                    DomainError);
    // Degenerate module context pins C^2 = p q^2.
    ParameterSet im = build_params(3, cplx(0.80, 0.10), cplx(0.99, 0.05),
                                   cplx(0.10, 1.30), {cplx(0), cplx(0), cplx(0)},
                                   true);
    CHECK(crel(im.C * im.C, im.p * im.q2) < 1e-12);
}

TEST_CASE("split_seed separates labelled streams") {
    CHECK(split_seed(1, "a") != split_seed(1, "b"));
    CHECK(split_seed(1, "a") != split_seed(2, "a"));
    CHECK(split_seed(1, "a") == split_seed(1, "a"));
}

TEST_CASE("sampled parameters stay in the convergence region") {
    for (std::uint64_t s : {11ull, 12ull, 13ull}) {
        ParameterSet ps = sample_params(s, 3, false);
        CHECK(std::abs(ps.p) < 1.0);
        CHECK(std::abs(ps.q2) < 1.0);
        CHECK(std::abs(ps.q() * ps.d()) < 1.0);
        CHECK(std::abs(ps.q() / ps.d()) < 1.0);
        cplx musum = 0.0;
        for (cplx m : ps.mu) musum += m;
        CHECK(std::abs(musum) < 1e-12);
    }
}

TEST_CASE("q-Pochhammer basics") {
    ParameterSet ps = test_params(1);
    // (0; p) = 1 and one-term recursion (z; p) = (1-z)(zp; p).
    CHECK(crel(qpochhammer(0.0, ps.p, tr), 1.0) < 1e-15);
    cplx z(0.37, -0.22);
    CHECK(crel(qpochhammer(z, ps.p, tr),
               (1.0 - z) * qpochhammer(z * ps.p, ps.p, tr)) < 1e-13);
}

TEST_CASE("theta function laws and derivative") {
    ParameterSet ps = test_params(1);
    cplx u(0.31, 0.12);
    cplx th = theta_u(u, ps, tr);
    CHECK(std::abs(theta_u(-u, ps, tr) + th) / std::abs(th) < 1e-12);
    CHECK(std::abs(theta_u(u + 1.0, ps, tr) + th) / std::abs(th) < 1e-12);
    cplx mult = -std::exp(cplx(0.0, -2.0 * PI) * u - cplx(0.0, PI) * ps.tau);
    CHECK(std::abs(theta_u(u + ps.tau, ps, tr) - mult * th) / std::abs(th) <
          1e-11);
    CHECK(std::abs(theta_u(0.0, ps, tr)) < 1e-14);
    // theta'(0) against a central difference.
    double h = 1e-5;
    cplx num = (theta_u(cplx(h, 0), ps, tr) - theta_u(cplx(-h, 0), ps, tr)) /
               (2.0 * h);
    CHECK(crel(num, theta_deriv0(ps, tr)) < 1e-8);
}

TEST_CASE("residue extractor on a known pole") {
    cplx c(0.8, -0.3), u0(0.2, 0.05);
    auto f = [&](cplx u) { return c / (u - u0) + std::cos(u); };
    CHECK(crel(residue_at(f, u0, tr), c) < 1e-10);
    // A double pole must be rejected, not silently mis-reported.
    auto g = [&](cplx u) { return c / ((u - u0) * (u - u0)); };
    CHECK_THROWS_AS(residue_at(g, u0, tr), DomainError);
}

TEST_CASE("color classes") {
    CHECK(color_class(0, 0, 1) == ColorClass::n1_all);
    CHECK(color_class(0, 0, 2) == ColorClass::same);
    CHECK(color_class(0, 1, 2) == ColorClass::n2_off);
    CHECK(color_class(1, 2, 3) == ColorClass::next);
    CHECK(color_class(1, 0, 3) == ColorClass::prev);
    CHECK(color_class(0, 2, 5) == ColorClass::far_apart);
}

TEST_CASE("structure function closed forms at a pinned point") {
    ParameterSet ps = test_params(3);
    cplx z(1.13, 0.21), w(0.77, -0.40);
    CHECK(crel(g_fun(1, 1, z, w, ps), z - ps.q2 * w) < 1e-14);
    CHECK(crel(g_fun(1, 2, z, w, ps), z - ps.q1 * w) < 1e-14);
    CHECK(crel(g_fun(1, 0, z, w, ps), z - ps.q3 * w) < 1e-14);
    // Colors 0 and 2 are adjacent for n = 3; far-apart needs n >= 5.
    ParameterSet ps5 = test_params(5);
    CHECK(crel(g_fun(0, 2, z, w, ps5), z - w) < 1e-14);
    // Exchange-factor reflection for every class.
    for (int j = 0; j < 3; ++j) {
        cplx lhs = G_fun(1, j, w / z, ps) * d_factor(1, j, ps) *
                   g_fun(1, j, z, w, ps);
        CHECK(std::abs(lhs + g_fun(j, 1, w, z, ps)) < 1e-12);
    }
}

TEST_CASE("exchange factor at distinguished points") {
    ParameterSet ps = test_params(3);
    // G_{i,i}(x) -> q^2 at x = 0 and G_{i,i}(1) = -1... actually
    // G_{i,i}(1) = q^2 (1 - 1/q^2)/(1 - q^2) = 1 only at q^4 = ... check
    // the defining value at x = 0 for each class instead.
    CHECK(crel(G_fun(1, 1, 0.0, ps), ps.q2) < 1e-14);
    CHECK(crel(G_fun(1, 2, 0.0, ps), 1.0 / ps.q()) < 1e-14);
    CHECK(crel(G_fun(1, 0, 0.0, ps), 1.0 / ps.q()) < 1e-14);
}

TEST_CASE("fusion identities at a pinned point") {
    ParameterSet ps = test_params(3);
    CHECK(check_fusion_identities(1, cplx(0.83, 0.29), ps) < 1e-12);
}

TEST_CASE("quasi-periodicity space: basis and laws") {
    for (int n : {1, 2, 3}) {
        ParameterSet ps = sample_params(31 + n, n, false);
        auto basis = build_basis(ps, tr);
        REQUIRE(static_cast<int>(basis.size()) == n);
        for (int c = 0; c < n; ++c) {
            CHECK(basis[c].coset == c);
            CHECK(check_quasiperiodicity(basis[c], ps, 25, 99) < 1e-8);
        }
    }
}

TEST_CASE("theta-space coefficients live on the zero-sum lattice") {
    ParameterSet ps = sample_params(77, 3, false);
    auto basis = build_basis(ps, tr);
    for (const auto& el : basis)
        for (const auto& [k, c] : el.coeffs) {
            int s = 0, lbl = 0;
            for (int j = 0; j < 3; ++j) {
                s += k[j];
                lbl += j * k[j];
            }
            CHECK(s == 0);
            CHECK(((lbl % 3) + 3) % 3 == el.coset);
        }
}

TEST_CASE("oscillator contraction table spot values") {
    ParameterSet ps = test_params(3);
    std::vector<cplx> us = {cplx(1.0, 0.0), cplx(0.9, 0.1), cplx(1.1, -0.1)};
    ExampleFamily fam = make_example_module(3, us, ps);
    CHECK(crel(fam.ps.C, fam.ps.pow_q(2.0)) < 1e-13);
    cplx x(0.23, 0.11);
    Slot s1{1, false}, s2{2, false}, s1b{1, true};
    // Same color, a < b, not a bar pair.
    CHECK(crel(contract(fam, 1, s1, 1, s2, x),
               (1.0 - x / fam.ps.q2) / (1.0 - fam.ps.q2 * x)) < 1e-13);
    // Same color, a > b, not a bar pair: trivial.
    CHECK(crel(contract(fam, 1, s2, 1, s1, x), 1.0) < 1e-14);
    // Equal slots.
    CHECK(crel(contract(fam, 1, s1, 1, s1, x),
               (1.0 - x) * (1.0 - x / fam.ps.q2)) < 1e-13);
    // Bar pair, a < b: includes the central factors.
    cplx C2 = fam.ps.C * fam.ps.C;
    cplx expect = (1.0 - x / fam.ps.q2) / (1.0 - fam.ps.q2 * x) /
                  ((1.0 - C2 * x) * (1.0 - C2 / fam.ps.q2 * x));
    CHECK(crel(contract(fam, 1, s1, 1, s1b, x), expect) < 1e-13);
    // Far colors contract trivially.
    ParameterSet ps5 = test_params(5);
    ExampleFamily fam5 = make_example_module(3, us, ps5);
    CHECK(crel(contract(fam5, 0, s1, 2, s2, x), 1.0) < 1e-14);
}

TEST_CASE("boundary scalar identities") {
    ParameterSet ps = test_params(3);
    CHECK(std::abs(quadres_check_boundaryB(ps, ps.q())) < 1e-12);
    CHECK(std::abs(quadres_check_boundaryB(ps, 1.4 * ps.q())) > 1e-3);
    cplx z(1.07, 0.33);
    CHECK(std::abs(serre_check_boundaryB(ps, +1, z, ps.q() * ps.q() * z,
                                         ps.q() / ps.d() * z)) < 1e-12);
    CHECK(std::abs(serre_check_boundaryB(ps, +1, z, ps.q() * z,
                                         z / ps.d())) < 1e-12);
    CHECK(std::abs(fd_gzero_check(ps, z)) < 1e-13);
}

TEST_CASE("partition-sum identity at a small pinned case") {
    ParameterSet ps = sample_params(5, 2, false);
    auto basis = build_basis(ps, tr);
    auto u = sample_grid(17, 2, 2, ps, tr);
    cplx alpha(0.27, 0.04);
    SumResult r = phi_residual(1, 1, alpha, u, theta_fn_of(basis[0]),
                               theta_fn_of(basis[1]), ps, tr);
    CHECK(std::abs(r.value) / r.scale < 1e-9);
}

TEST_CASE("symmetrized integrand matches the partition sum") {
    ParameterSet ps = sample_params(6, 2, false);
    auto basis = build_basis(ps, tr);
    ThetaFn th1 = theta_fn_of(basis[0]), th2 = theta_fn_of(basis[1]);
    auto w = sample_grid(23, 2, 2, ps, tr);
    std::vector<std::vector<cplx>> u(2), v(2);
    for (int i = 0; i < 2; ++i) {
        u[i] = {w[i][0]};
        v[i] = {w[i][1]};
    }
    cplx alpha = ps.beta + 0.5 * ps.gamma;
    cplx st = sym_T(u, v, th1, th2, ps, tr, false);
    cplx stp = sym_T(u, v, th1, th2, ps, tr, true);
    SumResult l = theta_identity_side(true, 1, 1, alpha, w, th1, th2, ps, tr);
    SumResult r = theta_identity_side(false, 1, 1, alpha, w, th1, th2, ps, tr);
    CHECK(std::abs(st - l.value) / l.scale < 1e-9);
    CHECK(std::abs(stp - r.value) / r.scale < 1e-9);
    CHECK(std::abs(st - stp) / std::max(l.scale, r.scale) < 1e-9);
}

TEST_CASE("cost envelopes throw instead of hanging") {
    ParameterSet ps = sample_params(9, 1, false);
    auto grid = sample_grid(3, 1, 24, ps, tr);
    CHECK_THROWS_AS(theta_identity_side(true, 12, 12, cplx(0.3, 0.0), grid,
                                        const_theta_fn(1.0),
                                        const_theta_fn(1.0), ps, tr),
                    CostError);
}

TEST_CASE("report serialization and explain") {
    CampaignConfig cfg;
    cfg.campaign = "boundary";
    cfg.seeds = {4};
    Report rep = run_campaign(cfg);
    CHECK(rep.schema == 1);
    CHECK(!rep.records.empty());
    std::string a = report_json(rep, false);
    std::string b = report_json(run_campaign(cfg), false);
    CHECK(a == b);
    CHECK(explain("wheel-vanishing").size() > 20);
    CHECK_THROWS_AS(explain("no-such-check"), DomainError);
    CampaignConfig bad;
    bad.seeds.clear();
    CHECK_THROWS_AS(run_campaign(bad), DomainError);
    bad.seeds = {1};
    bad.campaign = "nope";
    CHECK_THROWS_AS(run_campaign(bad), DomainError);
}
