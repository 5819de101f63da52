#include "csma/equilibrium.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <random>

using namespace csma;
using namespace csma::testing;

TEST_CASE("reduced targets of the symmetric two-node example") {
    SystemParams params = make_params(2, 3.0, 0.0, 1, 0.2);
    auto profiles = uniform_profiles(2, 10, 3.125 / 7.25);
    ReducedTargets rt = reduced_targets(params, profiles);
    // Eq. 9: rho~_i must equal G_i at the equilibrium p = (0.5, 0.5)
    CHECK(rt.rho_tilde[0] == doctest::Approx(0.3125).epsilon(1e-12));
    CHECK(rt.rho_tilde[1] == doctest::Approx(0.3125).epsilon(1e-12));
    CHECK(rt.leader == 0);
}

TEST_CASE("reduced targets are linear in demand") {
    SystemParams params = make_params(2, 3.0, 0.0, 1, 0.2);
    auto profiles = uniform_profiles(2, 10);
    profiles[0].demand = 0.4;
    profiles[1].demand = 0.2;
    ReducedTargets rt = reduced_targets(params, profiles);
    CHECK(rt.rho_tilde[0] / rt.rho_tilde[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rt.leader == 0);
}

TEST_CASE("zero demands give zero targets") {
    auto profiles = uniform_profiles(3, 10, 0.0);
    ReducedTargets rt = reduced_targets(make_params(3, 3.0), profiles);
    CHECK(rt.rho_tilde.sum() == 0.0);
}

TEST_CASE("follower map fixed points and hand example") {
    Vector targets(2);
    targets << 1.0, 1.0;
    RequestVector p = follower_map(0.6, targets, 0, 0.75);
    CHECK(p[1] == doctest::Approx(0.6).epsilon(1e-14));  // symmetric

    CHECK(follower_map(0.0, targets, 0, 0.75).sum() == 0.0);

    // ratio 0.5, alpha 0.75, leader at 0.8: p_j = 0.4/(1-0.6+0.3) = 4/7
    Vector skew(2);
    skew << 1.0, 0.5;
    RequestVector q = follower_map(0.8, skew, 0, 0.75);
    CHECK(q[1] == doctest::Approx(4.0 / 7.0).epsilon(1e-14));
    // ratio identity p_j/(1-a p_j) = r * p_i/(1-a p_i)
    CHECK(q[1] / (1.0 - 0.75 * q[1]) ==
          doctest::Approx(0.5 * 0.8 / (1.0 - 0.75 * 0.8)).epsilon(1e-12));
}

TEST_CASE("symmetric demands recover p = (0.5, 0.5)") {
    SystemParams params = make_params(2, 3.0, 0.0, 1, 0.2);
    auto profiles = uniform_profiles(2, 10, 3.125 / 7.25);
    FeasibilityVerdict v = solve(params, profiles);
    REQUIRE(v.feasible);
    CHECK(v.better->p[0] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(v.better->p[1] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(v.better->sum_p <= 4.0 / 3.0 + 1e-12);
    CHECK(v.better->residual < 1e-10);
}

TEST_CASE("symmetric maximum lands on p = 1/(n alpha)") {
    // b=3, M'=10, n=2: n rho = M' Gamma(2) / (1 + M' Gamma(2)),
    // Gamma(2) = 2/3, so per-node rho = (20/3)/(1+20/3)/2 = 10/23
    SystemParams params = make_params(2, 3.0, 0.0, 1, 0.2);
    auto profiles = uniform_profiles(2, 10, 10.0 / 23.0);
    FeasibilityVerdict v = solve(params, profiles, true);
    REQUIRE(v.feasible);
    CHECK(v.better->p[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    CHECK(v.better->sum_p == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
    REQUIRE(v.worse.has_value());
    CHECK(v.worse->p[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("zero demands are trivially feasible") {
    auto profiles = uniform_profiles(3, 10, 0.0);
    FeasibilityVerdict v = solve(make_params(3, 3.0), profiles);
    REQUIRE(v.feasible);
    CHECK(v.better->p.sum() == 0.0);
}

TEST_CASE("demands above the symmetric maximum are infeasible") {
    SystemParams params = make_params(2, 3.0, 0.0, 1, 0.2);
    auto profiles = uniform_profiles(2, 10, 10.0 / 23.0 + 0.01);
    FeasibilityVerdict v = solve(params, profiles);
    CHECK_FALSE(v.feasible);
    CHECK(v.margin < 0.0);
    CHECK_FALSE(region_membership(params, profiles));
}

TEST_CASE("round trip over random feasible demands") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 150; ++trial) {
        auto sc = random_feasible_scenario(rng, 16, 1.5, 10.0, false, 0.5, true);
        FeasibilityVerdict v = solve(sc.params, sc.profiles);
        REQUIRE(v.feasible);
        Performance perf = performance(v.better->p, sc.params, sc.profiles);
        for (int i = 0; i < sc.params.n; ++i)
            CHECK(perf.throughput[i] ==
                  doctest::Approx(sc.profiles[i].demand).epsilon(1e-8));
        CHECK(v.better->sum_p <=
              (sc.params.b + 1.0) / sc.params.b + 1e-12);
    }
}

TEST_CASE("dichotomy of better and worse branches") {
    std::mt19937_64 rng(43);
    int seen_worse = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto sc = random_feasible_scenario(rng, 6);
        FeasibilityVerdict v = solve(sc.params, sc.profiles, true);
        REQUIRE(v.feasible);
        double limit = (sc.params.b + 1.0) / sc.params.b;
        CHECK(v.better->sum_p <= limit + 1e-12);
        if (v.worse) {
            ++seen_worse;
            CHECK(v.worse->sum_p >= limit - 1e-12);
            // the worse branch also satisfies the demands
            Performance perf = performance(v.worse->p, sc.params, sc.profiles);
            for (int i = 0; i < sc.params.n; ++i)
                CHECK(perf.throughput[i] ==
                      doctest::Approx(sc.profiles[i].demand).epsilon(1e-7));
        }
    }
    CHECK(seen_worse > 0);
}

TEST_CASE("follower ratio identity holds at solver output") {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 50; ++trial) {
        auto sc = random_feasible_scenario(rng, 8);
        ReducedTargets rt = reduced_targets(sc.params, sc.profiles);
        FeasibilityVerdict v = solve(sc.params, sc.profiles);
        REQUIRE(v.feasible);
        const RequestVector& p = v.better->p;
        double alpha = sc.params.alpha();
        int i = rt.leader;
        if (rt.rho_tilde[i] == 0.0 || p[i] == 0.0) continue;
        double lead_ratio = p[i] / (1.0 - alpha * p[i]);
        for (int j = 0; j < sc.params.n; ++j) {
            if (j == i || rt.rho_tilde[j] == 0.0) continue;
            double lhs = p[j] / (1.0 - alpha * p[j]);
            double rhs = rt.rho_tilde[j] / rt.rho_tilde[i] * lead_ratio;
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
}

TEST_CASE("solver objective is unimodal") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 20; ++trial) {
        auto sc = random_feasible_scenario(rng, 8);
        ReducedTargets rt = reduced_targets(sc.params, sc.profiles);
        if ((rt.rho_tilde <= 0.0).any()) continue;
        const int grid = 2000;
        int peak = -1;
        double best = -std::numeric_limits<double>::infinity();
        std::vector<double> g(grid);
        for (int k = 0; k < grid; ++k) {
            double x = (k + 1.0) / grid;
            g[k] = solver_objective(x, rt.rho_tilde, rt.leader,
                                    sc.params.alpha());
            if (g[k] > best) {
                best = g[k];
                peak = k;
            }
        }
        for (int k = 1; k <= peak; ++k) CHECK(g[k] >= g[k - 1] - 1e-10);
        for (int k = peak + 1; k < grid; ++k) CHECK(g[k] <= g[k - 1] + 1e-10);
    }
}

TEST_CASE("successive update is a fixed point for unchanged periods") {
    std::mt19937_64 rng(59);
    auto sc = random_feasible_scenario(rng, 5);
    FeasibilityVerdict v = solve(sc.params, sc.profiles);
    REQUIRE(v.feasible);
    RequestVector out =
        successive_update(sc.params, sc.profiles, sc.profiles, v.better->p);
    CHECK((out - v.better->p).abs().maxCoeff() < 1e-11);
}

TEST_CASE("successive update reaches the direct solution monotonically") {
    SystemParams params = make_params(2, 3.0, 0.0, 1, 0.2);
    auto profiles = uniform_profiles(2, 10, 0.3);
    FeasibilityVerdict v0 = solve(params, profiles);
    REQUIRE(v0.feasible);

    auto scaled = profiles;
    for (auto& np : scaled) np.period = 20;
    std::vector<RequestVector> trace;
    RequestVector limit =
        successive_update(params, profiles, scaled, v0.better->p, &trace);

    FeasibilityVerdict v1 = solve(params, scaled);
    REQUIRE(v1.feasible);
    CHECK((limit - v1.better->p).abs().maxCoeff() < 1e-9);

    RequestVector prev = v0.better->p;
    for (const auto& iter : trace) {
        CHECK((iter <= prev + 1e-12).all());
        prev = iter;
    }
}

TEST_CASE("successive update rejects a bad starting point") {
    SystemParams params = make_params(2, 3.0, 0.0, 1, 0.2);
    auto profiles = uniform_profiles(2, 10, 0.3);
    RequestVector bogus = RequestVector::Constant(2, 0.9);
    CHECK_THROWS_AS(successive_update(params, profiles, profiles, bogus),
                    NotAnEquilibrium);
}

TEST_CASE("region grows with the periods") {
    std::mt19937_64 rng(61);
    std::uniform_int_distribution<int> extra(0, 15);
    for (int trial = 0; trial < 50; ++trial) {
        auto sc = random_feasible_scenario(rng, 6);
        REQUIRE(region_membership(sc.params, sc.profiles));
        auto grown = sc.profiles;
        for (auto& np : grown) np.period += extra(rng);
        CHECK(region_membership(sc.params, grown));
    }
}

TEST_CASE("zero-demand nodes are excluded and reinserted at zero") {
    SystemParams params = make_params(3, 3.0, 0.0, 1, 0.2);
    auto profiles = uniform_profiles(3, 10, 0.2);
    profiles[1].demand = 0.0;
    FeasibilityVerdict v = solve(params, profiles);
    REQUIRE(v.feasible);
    CHECK(v.better->p[1] == 0.0);
    Performance perf = performance(v.better->p, params, profiles);
    CHECK(perf.throughput[0] == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(perf.throughput[2] == doctest::Approx(0.2).epsilon(1e-9));
}
