#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "nari/equilibrium.hpp"
#include "nari/serialization.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace nari;

namespace {

ModelSpec worked_spec(double lambda = 0.6) {
  return ModelSpec::make(1, {1.0 / 3, 1.0 / 3, 1.0 / 3}, {-0.05, 0.0, 0.05},
                         UtilityKind::Distance, 10.0, CostKind::QuadraticCost, lambda);
}

constexpr double kXiP0 = 5.0 / 6;              // 0.833333...
constexpr double kXiP1 = 5.0 / 6 - 0.05;       // 0.783333...
constexpr double kXiPm1 = 19.0 / 30 + 0.05;    // 0.683333...
constexpr double kXiB0 = 0.7171292729553324;

}  // namespace

TEST_CASE("susceptibility: worked examples") {
  const ModelSpec spec = worked_spec();
  SECTION("deviation to the median bliss point at a = 0.5") {
    const Marginals m = solve_marginals(spec, Technology::Personalized, 0.5);
    REQUIRE_THAT(susceptibility(spec, m, 0.0, coalition_mask({0}, 1)),
                 Catch::Matchers::WithinAbs(0.5 - 5.0 / 6, 1e-9));
  }
  SECTION("no deviation leaves the voter's own margin") {
    const Marginals m = solve_marginals(spec, Technology::Personalized, 0.3);
    REQUIRE_THAT(susceptibility(spec, m, 0.3, coalition_mask({0}, 1)),
                 Catch::Matchers::WithinAbs(m.mu_L(spec, 0), 1e-12));
  }
  SECTION("opposition voters can be attracted at a = 0.75") {
    const Marginals m = solve_marginals(spec, Technology::Personalized, 0.75);
    const double phi = susceptibility(spec, m, -0.05, coalition_mask({-1}, 1));
    REQUIRE_THAT(phi, Catch::Matchers::WithinAbs(0.7 - 19.0 / 30, 1e-9));
    REQUIRE(phi > 0.0);
    REQUIRE(attracts(spec, m, -0.05, coalition_mask({-1}, 1)));
  }
  SECTION("coalition susceptibility is the worst member margin") {
    const Marginals m = solve_marginals(spec, Technology::Personalized, 0.5);
    const double both = susceptibility(spec, m, 0.02, coalition_mask({-1, 1}, 1));
    const double left = susceptibility(spec, m, 0.02, -1);
    const double right = susceptibility(spec, m, 0.02, 1);
    REQUIRE(both == std::min(left, right));
  }
  SECTION("repulsion companion flag") {
    const Marginals m = solve_marginals(spec, Technology::Personalized, 0.75);
    REQUIRE_FALSE(repels(spec, m, -0.05, -1));
    // A far-left deviation repels the right wing even under favorable news:
    // v(-0.75, -1.5, 1) = 0.8 - 1.55 = -0.75 < -mu_R(1) = -0.633333.
    REQUIRE(repels(spec, m, -1.5, 1));
  }
}

TEST_CASE("policy latitude: worked singleton values") {
  const ModelSpec spec = worked_spec();
  const LatitudeReport p0 = policy_latitude(spec, Technology::Personalized, {0});
  const LatitudeReport p1 = policy_latitude(spec, Technology::Personalized, {1});
  const LatitudeReport pm1 = policy_latitude(spec, Technology::Personalized, {-1});
  const LatitudeReport b0 = policy_latitude(spec, Technology::Broadcast, {0});

  REQUIRE_THAT(p0.xi, Catch::Matchers::WithinAbs(kXiP0, 1e-8));
  REQUIRE_THAT(p1.xi, Catch::Matchers::WithinAbs(kXiP1, 1e-8));
  REQUIRE_THAT(pm1.xi, Catch::Matchers::WithinAbs(kXiPm1, 1e-8));
  REQUIRE_THAT(b0.xi, Catch::Matchers::WithinAbs(kXiB0, 1e-8));

  SECTION("latitude decomposition for singletons") {
    REQUIRE(p1.has_components);
    REQUIRE_THAT(p1.component_neg_bliss, Catch::Matchers::WithinAbs(-0.05, 1e-15));
    REQUIRE_THAT(p1.component_belief_magnitude, Catch::Matchers::WithinAbs(5.0 / 6, 1e-9));
    REQUIRE_THAT(p1.component_neg_bliss + p1.component_belief_magnitude,
                 Catch::Matchers::WithinAbs(p1.xi, 1e-8));
    REQUIRE_THAT(pm1.component_neg_bliss, Catch::Matchers::WithinAbs(0.05, 1e-15));
    REQUIRE_THAT(pm1.component_belief_magnitude, Catch::Matchers::WithinAbs(19.0 / 30, 1e-9));
  }
  SECTION("binding deviation is the bliss point for singletons") {
    REQUIRE(p1.binding_deviation == 0.05);
    REQUIRE(pm1.binding_deviation == -0.05);
  }
  SECTION("none saturated at a_bar = 10") {
    REQUIRE_FALSE(p0.saturated);
    REQUIRE_FALSE(b0.saturated);
  }
}

TEST_CASE("policy latitude: saturation at a small policy bound") {
  ModelSpec spec = worked_spec();
  spec.a_bar = 0.5;  // below every latitude
  const LatitudeReport rep = policy_latitude(spec, Technology::Personalized, {0});
  REQUIRE(rep.saturated);
  REQUIRE(rep.xi == 0.5);
}

TEST_CASE("policy latitude: oracle agreement and set monotonicity") {
  const ModelSpec spec = worked_spec();
  SECTION("grid-scan oracle within 1e-6") {
    for (int k : {-1, 0, 1}) {
      const double xi = policy_latitude(spec, Technology::Personalized, {k}).xi;
      REQUIRE_THAT(xi, Catch::Matchers::WithinAbs(
                           oracle::latitude(spec, Technology::Personalized, {k}), 1e-6));
    }
    REQUIRE_THAT(policy_latitude(spec, Technology::Broadcast, {0}).xi,
                 Catch::Matchers::WithinAbs(oracle::latitude(spec, Technology::Broadcast, {0}),
                                            1e-6));
  }
  SECTION("attracting a set is weakly harder than any member") {
    for (Technology tech : {Technology::Personalized, Technology::Broadcast}) {
      const std::vector<std::vector<int>> sets = {{-1, 0}, {0, 1}, {-1, 1}, {-1, 0, 1}};
      for (const auto& D : sets) {
        const double xi_set = policy_latitude(spec, tech, D).xi;
        for (int k : D) {
          REQUIRE(xi_set >= policy_latitude(spec, tech, {k}).xi - 1e-9);
        }
      }
    }
  }
  SECTION("latitude exceeds the extreme member's bliss point") {
    for (const auto& D : std::vector<std::vector<int>>{{1}, {-1, 1}, {-1, 0, 1}}) {
      REQUIRE(policy_latitude(spec, Technology::Personalized, D).xi > 0.05);
    }
  }
}

TEST_CASE("quadratic-cost susceptibility shape across types") {
  // phi falls away from the median on each side, and right-wing types are
  // weakly harder to attract than their mirror images.
  std::mt19937_64 rng(99u);
  for (int trial = 0; trial < 8; ++trial) {
    const ModelSpec spec = gen::baseline_equilibrium_spec(rng, gen::symmetric_population(rng, 1));
    for (double a : {0.1, 0.4, 0.8}) {
      if (a > spec.a_bar) continue;
      const Marginals m = solve_marginals(spec, Technology::Personalized, a);
      for (double ap : linspace(-a, a, 9)) {
        const double phi_m1 = susceptibility(spec, m, ap, -1);
        const double phi_0 = susceptibility(spec, m, ap, 0);
        const double phi_p1 = susceptibility(spec, m, ap, 1);
        REQUIRE(phi_m1 >= phi_0 - 1e-12);
        REQUIRE(phi_p1 <= phi_m1 + 1e-12);
      }
    }
  }
}

TEST_CASE("equilibrium set: worked scenario") {
  const ModelSpec spec = worked_spec();
  SECTION("personalized with independent signals, uniform population") {
    const EquilibriumSet eq = equilibrium_set(spec, Technology::Personalized,
                                              independent_star_columns(3), spec.populations);
    REQUIRE_THAT(eq.a_star, Catch::Matchers::WithinAbs(kXiPm1, 1e-8));
    REQUIRE(eq.disciplining == std::vector<int>{-1});
    REQUIRE(eq.interval.first == 0.0);
    REQUIRE(eq.interval.second == eq.a_star);
    REQUIRE(eq.latitudes.size() == 3);
  }
  SECTION("broadcast: median latitude for any population") {
    for (const std::vector<double>& q :
         {std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}, std::vector<double>{0.2, 0.6, 0.2},
          std::vector<double>{0.3, 0.4, 0.3}}) {
      const EquilibriumSet eq =
          equilibrium_set(spec, Technology::Broadcast, broadcast_star_columns(3), q);
      REQUIRE_THAT(eq.a_star, Catch::Matchers::WithinAbs(kXiB0, 1e-8));
    }
  }
  SECTION("personalized with a dominant median") {
    const EquilibriumSet eq = equilibrium_set(spec, Technology::Personalized,
                                              independent_star_columns(3), {0.2, 0.6, 0.2});
    REQUIRE_THAT(eq.a_star, Catch::Matchers::WithinAbs(kXiP0, 1e-8));
    REQUIRE(eq.disciplining == std::vector<int>{0});
  }
}

TEST_CASE("equilibrium set: brute-force lattice agreement on the worked scenario") {
  ModelSpec spec = worked_spec();
  spec.a_bar = 1.1;
  const double step = 1e-3;
  for (Technology tech : {Technology::Personalized, Technology::Broadcast}) {
    const auto chi = tech == Technology::Broadcast ? broadcast_star_columns(3)
                                                   : independent_star_columns(3);
    const EquilibriumSet eq = equilibrium_set(spec, tech, chi, spec.populations);
    const BruteForceResult brute =
        brute_force_equilibrium(spec, tech, chi, spec.populations, step);
    INFO(to_string(tech));
    REQUIRE(std::fabs(eq.a_star - brute.a_max) <= step + 1e-12);
  }
}

TEST_CASE("equilibrium at K=2: both technologies agree with the lattice scan") {
  // Broadcast minimal influential coalitions at K=2 are genuine multi-member
  // sets, so this exercises the coalition susceptibility envelope and the
  // multi-step window induction.
  const ModelSpec spec =
      ModelSpec::make(2, {0.14, 0.2, 0.32, 0.2, 0.14}, {-0.05, -0.02, 0.0, 0.02, 0.05},
                      UtilityKind::Distance, 1.0, CostKind::QuadraticCost, 0.7);
  REQUIRE(assumption2_check(spec, Technology::Personalized, 7).pass);
  REQUIRE(assumption2_check(spec, Technology::Broadcast, 7).pass);
  for (Technology tech : {Technology::Personalized, Technology::Broadcast}) {
    const auto chi = tech == Technology::Broadcast ? broadcast_star_columns(5)
                                                   : independent_star_columns(5);
    const EquilibriumSet eq = equilibrium_set(spec, tech, chi, spec.populations);
    const BruteForceResult brute =
        brute_force_equilibrium(spec, tech, chi, spec.populations, 1e-3);
    INFO(to_string(tech) << " a*=" << eq.a_star << " brute=" << brute.a_max);
    REQUIRE(std::fabs(eq.a_star - brute.a_max) <= 1e-3 + 1e-12);
  }
  SECTION("personalized minimal coalitions are the singletons") {
    const EquilibriumSet eq = equilibrium_set(spec, Technology::Personalized,
                                              independent_star_columns(5), spec.populations);
    REQUIRE(eq.latitudes.size() == 5);
    REQUIRE(eq.disciplining.size() == 1);
  }
}

TEST_CASE("equilibrium set: constraint never binding returns the policy bound") {
  ModelSpec spec = worked_spec();
  spec.a_bar = 0.4;  // below every latitude
  const BruteForceResult brute = brute_force_equilibrium(
      spec, Technology::Personalized, independent_star_columns(3), spec.populations, 1e-3);
  REQUIRE_THAT(brute.a_max, Catch::Matchers::WithinAbs(0.4, 1e-9));
  const EquilibriumSet eq = equilibrium_set(spec, Technology::Personalized,
                                            independent_star_columns(3), spec.populations);
  REQUIRE(eq.a_star == 0.4);
  REQUIRE(eq.any_saturated);
}

TEST_CASE("equilibrium interval shrinks as attention gets costlier") {
  double prev = 2.0;
  for (double lambda : {0.55, 0.6, 0.7, 0.9}) {
    ModelSpec spec = worked_spec(lambda);
    spec.a_bar = 1.1;
    const BruteForceResult brute = brute_force_equilibrium(
        spec, Technology::Personalized, independent_star_columns(3), spec.populations, 1e-3);
    REQUIRE(brute.a_max < prev);
    prev = brute.a_max;
  }
}

TEST_CASE("larger deviations never profit") {
  // Any a' > a attracting some right-wing type repels its mirror image.
  const ModelSpec spec = worked_spec();
  for (double a : {0.1, 0.5, 0.9}) {
    const Marginals m = solve_marginals(spec, Technology::Personalized, a);
    for (double ap : linspace(a + 1e-6, spec.a_bar, 25)) {
      for (int k : {1}) {
        if (susceptibility(spec, m, ap, k) > 0.0) {
          REQUIRE(repels(spec, m, ap, -k));
        }
      }
      REQUIRE(susceptibility(spec, m, ap, 0) < 0.0);
      REQUIRE(susceptibility(spec, m, ap, -1) < 0.0);
    }
  }
}

TEST_CASE("richer configurations weakly shrink the equilibrium set") {
  const ModelSpec spec = worked_spec();
  std::mt19937_64 rng(123u);
  const std::vector<std::uint32_t> full = independent_star_columns(3);
  for (int trial = 0; trial < 5; ++trial) {
    const auto drawn = draw_consistent_configuration(spec, Technology::Personalized, rng);
    if (!drawn) continue;
    REQUIRE(is_richer(full, *drawn));
    const EquilibriumSet rich =
        equilibrium_set(spec, Technology::Personalized, full, spec.populations);
    const EquilibriumSet poor =
        equilibrium_set(spec, Technology::Personalized, *drawn, spec.populations);
    REQUIRE(rich.a_star <= poor.a_star + 1e-12);
  }
}

TEST_CASE("equilibrium set JSON") {
  const ModelSpec spec = worked_spec();
  const EquilibriumSet eq = equilibrium_set(spec, Technology::Personalized,
                                            independent_star_columns(3), spec.populations);
  const nlohmann::json j = eq;
  REQUIRE(j.at("disciplining") == std::vector<int>{-1});
  REQUIRE(j.at("interval")[0] == 0.0);
  REQUIRE_THAT(j.at("a_star").get<double>(), Catch::Matchers::WithinAbs(kXiPm1, 1e-8));
}
