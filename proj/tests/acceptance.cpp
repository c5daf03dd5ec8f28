// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerance in code; the oracles live in
// tests/support and share no solver internals with the implementation.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "nari/statics.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace nari;

namespace {

struct CheckFailure {
  std::string message;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw CheckFailure{message};
}

void require_close(double got, double want, double tol, const std::string& what) {
  if (!(std::fabs(got - want) <= tol)) {
    throw CheckFailure{what + ": got " + format_double(got) + ", want " + format_double(want) +
                       " within " + format_double(tol)};
  }
}

ModelSpec worked_spec(CostKind cost = CostKind::QuadraticCost, double lambda = 0.6,
                      double a_bar = 10.0) {
  return ModelSpec::make(1, {1.0 / 3, 1.0 / 3, 1.0 / 3}, {-0.05, 0.0, 0.05},
                         UtilityKind::Distance, a_bar, cost, lambda);
}

// --- criterion 1 -----------------------------------------------------------

void criterion_quadratic_closed_form() {
  std::mt19937_64 rng(101u);
  std::uniform_real_distribution<double> pol(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const ModelSpec spec = gen::quadratic_distance_spec(rng);
    const double a = pol(rng);
    for (int k = -spec.K; k <= spec.K; ++k) {
      const double v = policy_value_diff(spec, -a, a, k);
      const double want =
          k <= 0 ? -2.0 * v - 1.0 / (2.0 * spec.lambda) : -1.0 / (2.0 * spec.lambda);
      const SignalSolveResult r = optimal_personalized_signal(spec, a, k);
      require(r.regime == SolveRegime::BindingParticipation,
              "trial " + std::to_string(trial) + " k=" + std::to_string(k) +
                  ": expected a binding solve");
      require_close(r.signal->mu_L(), want, 1e-6,
                    "trial " + std::to_string(trial) + " k=" + std::to_string(k) + " mu_L");
    }
  }
}

// --- criterion 2 -----------------------------------------------------------

void criterion_worked_scenario() {
  const ModelSpec spec = worked_spec();
  const double a = 0.5;
  const double mu_p[3] = {0.2 - 5.0 / 6, -5.0 / 6, -5.0 / 6};
  for (int k : {-1, 0, 1}) {
    const SignalSolveResult r = optimal_personalized_signal(spec, a, k);
    require_close(r.signal->mu_L(), mu_p[k + 1], 1e-6, "mu_L^p k=" + std::to_string(k));
    const oracle::SignalPoint g = oracle::personalized(spec, a, k, 1e-4);
    require_close(r.signal->mu_L(), g.mu_L, 1e-6, "oracle mu_L^p k=" + std::to_string(k));
    require_close(r.signal->mu_R(), g.mu_R, 1e-6, "oracle mu_R^p k=" + std::to_string(k));
  }
  const BroadcastSolveResult b = optimal_broadcast_signal(spec, a);
  require_close(b.solve.signal->mu_L(), -0.7171292729553324, 1e-6, "mu_L^b");
  const oracle::SignalPoint gb = oracle::broadcast_all_in(spec, a, 1e-4);
  require_close(b.solve.signal->mu_L(), gb.mu_L, 1e-6, "oracle mu_L^b");

  const double xi_pm1 = policy_latitude(spec, Technology::Personalized, {-1}).xi;
  const double xi_p0 = policy_latitude(spec, Technology::Personalized, {0}).xi;
  const double xi_p1 = policy_latitude(spec, Technology::Personalized, {1}).xi;
  const double xi_b0 = policy_latitude(spec, Technology::Broadcast, {0}).xi;
  require_close(xi_pm1, 19.0 / 30 + 0.05, 1e-6, "xi_p(-1)");
  require_close(xi_p0, 5.0 / 6, 1e-6, "xi_p(0)");
  require_close(xi_p1, 5.0 / 6 - 0.05, 1e-6, "xi_p(1)");
  require_close(xi_b0, 0.7171292729553324, 1e-6, "xi_b(0)");
  require_close(xi_pm1, oracle::latitude(spec, Technology::Personalized, {-1}), 1e-6,
                "oracle xi_p(-1)");
  require_close(xi_p0, oracle::latitude(spec, Technology::Personalized, {0}), 1e-6,
                "oracle xi_p(0)");
  require_close(xi_p1, oracle::latitude(spec, Technology::Personalized, {1}), 1e-6,
                "oracle xi_p(1)");
  require_close(xi_b0, oracle::latitude(spec, Technology::Broadcast, {0}), 1e-6,
                "oracle xi_b(0)");

  const ConditionEvaluation cond = evaluate_conditions(spec);
  require(cond.evaluable && cond.assumption2, "worked scenario must be regular");
  require(cond.star, "condition (*) must hold");
  require_close(cond.star_lhs, 0.2, 1e-6, "condition (*) lhs");
  require_close(cond.star_rhs, 0.1, 1e-12, "condition (*) rhs");
  require(!cond.doublestar, "condition (**) must fail");

  const PersonalizationReport rep = compare_personalization(spec);
  require_close(rep.a_personalized, 19.0 / 30 + 0.05, 1e-6, "a^p");
  require_close(rep.a_broadcast, 0.7171292729553324, 1e-6, "a^b");
  require(rep.a_personalized < rep.a_broadcast, "a^p < a^b");
  // Oracle side: polarization is the smallest oracle latitude over the
  // minimal influential coalitions (singletons / majority pairs).
  const double oracle_ap = std::min(
      {oracle::latitude(spec, Technology::Personalized, {-1}),
       oracle::latitude(spec, Technology::Personalized, {0}),
       oracle::latitude(spec, Technology::Personalized, {1})});
  require_close(rep.a_personalized, oracle_ap, 1e-6, "oracle a^p");
}

// --- criterion 3 -----------------------------------------------------------

void criterion_skewness_invariants() {
  std::mt19937_64 rng(303u);
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const bool entropy = trial % 2 == 1;
    const ModelSpec spec = gen::regular_spec_any_cost(rng, entropy);
    for (double frac : {0.04, 0.12, 0.3, 0.55, 0.85}) {
      const double a = frac * spec.a_bar;
      const SkewnessReport rep = skewness_report(spec, a);
      require(rep.broadcast_symmetric, "broadcast symmetry violated");
      require(rep.median_symmetric, "median symmetry violated");
      require(rep.extreme_skew_signs, "extreme skewness signs violated");
      require(rep.cross_type_mirror, "cross-type mirror symmetry violated");
      require(rep.strict_obedience, "strict obedience violated");
      require(rep.bayes_plausible, "Bayes plausibility violated at 1e-12");
      require(rep.broadcast_less_attentive, "I^b < I^p violated");
      ++checked;
    }
  }
  require(checked == 100, "expected 20 specs x 5 policies");
}

// --- criterion 4 -----------------------------------------------------------

void criterion_equilibrium_oracle() {
  std::mt19937_64 rng(404u);
  const std::vector<double> uniform = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  const std::vector<double> centered = {0.2, 0.6, 0.2};
  const double step = 1e-3;
  for (int trial = 0; trial < 20; ++trial) {
    ModelSpec spec = gen::baseline_equilibrium_spec(rng, uniform);
    {
      ModelSpec probe = spec;
      probe.populations = centered;
      if (!assumption2_check(probe, Technology::Broadcast, 7).pass) {
        --trial;  // the window choice depends on q; redraw
        continue;
      }
    }
    for (const std::vector<double>& q : {uniform, centered}) {
      spec.populations = q;
      for (Technology tech : {Technology::Broadcast, Technology::Personalized}) {
        const auto chi = tech == Technology::Broadcast ? broadcast_star_columns(3)
                                                       : independent_star_columns(3);
        const EquilibriumSet eq = equilibrium_set(spec, tech, chi, q);
        const BruteForceResult brute = brute_force_equilibrium(spec, tech, chi, q, step);
        require(std::fabs(eq.a_star - brute.a_max) <= step + 1e-12,
                "trial " + std::to_string(trial) + " " + to_string(tech) +
                    ": |a*-brute| = " + format_double(std::fabs(eq.a_star - brute.a_max)));
      }
    }
  }
}

// --- criterion 5 -----------------------------------------------------------

bool is_majority(const std::vector<double>& q, std::uint32_t mask) {
  double m = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if ((mask >> i) & 1u) m += q[i];
  }
  return m > 0.5;
}

void criterion_table1() {
  struct Case {
    int K;
    std::vector<double> q;
  };
  const std::vector<Case> cases = {
      {1, {1.0 / 3, 1.0 / 3, 1.0 / 3}},
      {1, {0.3, 0.4, 0.3}},
      {1, {0.2, 0.6, 0.2}},
      {2, {0.2, 0.2, 0.2, 0.2, 0.2}},
      {2, {0.05, 0.1, 0.6, 0.1, 0.05}},
  };
  for (const Case& c : cases) {
    const int n = 2 * c.K + 1;
    const std::uint32_t total = 1u << n;
    const auto star = broadcast_star_columns(n);
    const auto indep = independent_star_columns(n);
    const double q0 = c.q[static_cast<std::size_t>(c.K)];
    for (std::uint32_t mask = 1; mask < total; ++mask) {
      const bool majority = is_majority(c.q, mask);
      require(is_influential(star, n, c.q, mask) == majority,
              "broadcast influence must equal majority (K=" + std::to_string(c.K) + ")");
      const bool indep_influential = is_influential(indep, n, c.q, mask);
      if (q0 > 0.5) {
        require(indep_influential == majority,
                "independent influence must equal majority when q(0) > 1/2");
      } else {
        require(indep_influential, "all nonempty coalitions influential when q(0) < 1/2");
      }
    }
  }
}

// --- criterion 6 -----------------------------------------------------------

void criterion_monotonicity() {
  // Polarization strictly decreasing in lambda, both technologies.
  const SweepReport sweep =
      lambda_sweep(worked_spec(), {0.55, 0.62, 0.7, 0.8, 0.95, 1.15});
  for (const auto& row : sweep.rows) {
    require(row.evaluable_broadcast && row.evaluable_personalized,
            "lambda ladder point failed regularity at lambda=" + format_double(row.lambda));
  }
  require(sweep.monotone_broadcast, "broadcast polarization not strictly decreasing");
  require(sweep.monotone_personalized, "personalized polarization not strictly decreasing");

  // Competitive signals lose Blackwell informativeness as the cost rises.
  for (CostKind cost : {CostKind::QuadraticCost, CostKind::EntropyCost}) {
    const ModelSpec spec = worked_spec(cost, 1.0);
    for (int k : {-1, 0}) {
      double prev_L = -2.0, prev_R = 2.0;
      for (double lt : {0.55, 0.7, 0.9, 1.2, 1.6, 2.1}) {
        const SignalSolveResult r = competitive_signal(spec, 0.3, k, lt);
        require(r.regime == SolveRegime::Interior, "competitive ladder point degenerate");
        require(r.signal->mu_R() < prev_R && r.signal->mu_L() > prev_L,
                "competitive Blackwell monotonicity violated (" + to_string(cost) + ")");
        prev_L = r.signal->mu_L();
        prev_R = r.signal->mu_R();
      }
    }
  }

  // Monopoly signals dominate competitive informativeness at equal lambda.
  std::mt19937_64 rng(606u);
  std::uniform_real_distribution<double> pol(0.0, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    const ModelSpec spec = gen::quadratic_distance_spec(rng);
    const double a = pol(rng);
    for (int k = -spec.K; k <= spec.K; ++k) {
      const SignalSolveResult p = optimal_personalized_signal(spec, a, k);
      const SignalSolveResult c = competitive_signal(spec, a, k, spec.lambda);
      require(p.signal->mu_L() < c.signal->mu_L(),
              "mu_L^p < mu_L^c violated at trial " + std::to_string(trial));
    }
  }
}

// --- criterion 7 -----------------------------------------------------------

void criterion_richness_and_sosd() {
  const ModelSpec spec = worked_spec();
  const auto full = independent_star_columns(3);
  const std::vector<std::vector<double>> populations = {
      {1.0 / 3, 1.0 / 3, 1.0 / 3},
      {0.2, 0.6, 0.2},
      {0.3, 0.4, 0.3},
      {0.26, 0.48, 0.26},
      {0.12, 0.76, 0.12},
  };
  const double min_xi = std::min({policy_latitude(spec, Technology::Personalized, {-1}).xi,
                                  policy_latitude(spec, Technology::Personalized, {0}).xi,
                                  policy_latitude(spec, Technology::Personalized, {1}).xi});
  const double a_uniform =
      equilibrium_set(spec, Technology::Personalized, full, populations[0]).a_star;
  require_close(a_uniform, min_xi, 1e-9,
                "uniform independent polarization must equal the minimal latitude");

  std::mt19937_64 rng(20240807u);
  int draws = 0;
  for (int attempt = 0; attempt < 400 && draws < 10; ++attempt) {
    const auto chi = draw_consistent_configuration(spec, Technology::Personalized, rng);
    if (!chi) continue;
    ++draws;
    require(is_richer(full, *chi), "drawn configuration must be a chi** sub-support");
    for (const auto& q : populations) {
      const double a_q = equilibrium_set(spec, Technology::Personalized, full, q, {}, false)
                             .a_star;
      const double a_chi =
          equilibrium_set(spec, Technology::Personalized, *chi, q, {}, false).a_star;
      require(a_uniform <= a_q + 1e-12, "a(chi**,uniform) <= a(chi**,q) violated");
      require(a_q <= a_chi + 1e-12, "a(chi**,q) <= a(chi,q) violated");
    }
  }
  require(draws == 10, "expected 10 accepted configuration draws, got " +
                           std::to_string(draws));

  // SOSD ordering at K=2 under quadratic cost.
  const ModelSpec spec2 =
      ModelSpec::make(2, {0.075, 0.16, 0.53, 0.16, 0.075}, {-0.04, -0.02, 0.0, 0.02, 0.04},
                      UtilityKind::Distance, 5.0, CostKind::QuadraticCost, 0.8);
  const auto chi2 = independent_star_columns(5);
  const std::vector<double> epsilons = {0.005, 0.009, 0.012, 0.021, 0.027,
                                        0.033, 0.041, 0.052, 0.06, 0.071};
  for (double eps : epsilons) {
    const std::vector<double> q = spec2.populations;
    const std::vector<double> q_prime = {0.075 + eps, 0.16, 0.53 - 2 * eps, 0.16, 0.075 + eps};
    const MassPolarizationReport rep =
        mass_polarization_effect(spec2, chi2, q, q_prime);
    require(rep.ordered, "SOSD ordering violated at eps=" + format_double(eps));
  }
}

// --- criterion 8 -----------------------------------------------------------

void criterion_region_properties() {
  ModelSpec base = worked_spec(CostKind::EntropyCost, 1.0, 10.0);
  const RegionGrid grid = region_scan(base, {"lambda", 0.5, 3.0, 50}, {"t1", 0.01, 0.5, 50},
                                      {"assumption2", "star"});
  int evaluable = 0, star_cells = 0;
  for (const auto& c : grid.cells) {
    if (c.evaluable) ++evaluable;
    if (c.evaluable && c.star) ++star_cells;
  }
  require(evaluable > 200, "too few evaluable cells to assert region properties");
  require(star_cells > 0, "the skewness condition never holds on the grid");
  require(star_cells < evaluable, "the skewness condition holds everywhere on the grid");

  // Northeast monotonicity of the (*) region on evaluable cells.
  for (int iy = 0; iy < grid.y.n; ++iy) {
    for (int ix = 0; ix < grid.x.n; ++ix) {
      const ConditionEvaluation& c = grid.cell(ix, iy);
      if (!c.evaluable || !c.star) continue;
      for (int jy = iy; jy < grid.y.n; ++jy) {
        for (int jx = ix; jx < grid.x.n; ++jx) {
          const ConditionEvaluation& ne = grid.cell(jx, jy);
          if (ne.evaluable && !ne.star) {
            throw CheckFailure{"(*) region not northeast-monotone at (" +
                               format_double(axis_value(grid.x, ix)) + "," +
                               format_double(axis_value(grid.y, iy)) + ") vs (" +
                               format_double(axis_value(grid.x, jx)) + "," +
                               format_double(axis_value(grid.y, jy)) + ")"};
          }
        }
      }
    }
  }

  // The regularity region is a lambda-band excluding the smallest lambda.
  for (int iy = 0; iy < grid.y.n; ++iy) {
    require(!grid.cell(0, iy).assumption2,
            "lambda = 0.5 must violate regularity (posteriors at the boundary)");
    int first = -1, last = -1;
    for (int ix = 0; ix < grid.x.n; ++ix) {
      if (grid.cell(ix, iy).assumption2) {
        if (first < 0) first = ix;
        last = ix;
      }
    }
    for (int ix = std::max(first, 0); ix <= last; ++ix) {
      require(grid.cell(ix, iy).assumption2,
              "regularity region not contiguous in lambda at row " + std::to_string(iy));
    }
  }
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* label;
    std::function<void()> run;
    double time_limit;  // seconds; 0 = no stated budget
  };
  const std::vector<Criterion> criteria = {
      {1, "quadratic closed-form oracle (50 random specs, 1e-6)",
       criterion_quadratic_closed_form, 10.0},
      {2, "worked scenario vs independent grid-search oracle (1e-6)",
       criterion_worked_scenario, 60.0},
      {3, "skewness invariant suite (20 specs x 5 policies)", criterion_skewness_invariants,
       0.0},
      {4, "equilibrium oracle agreement (20 specs, step 1e-3)", criterion_equilibrium_oracle,
       300.0},
      {5, "influential-coalition families at K=1 and K=2", criterion_table1, 0.0},
      {6, "monotonicity suites (cost ladders, informativeness ranking)",
       criterion_monotonicity, 0.0},
      {7, "richness chain and SOSD ordering", criterion_richness_and_sosd, 0.0},
      {8, "entropy-cost condition regions (50x50 grid)", criterion_region_properties, 600.0},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string failure;
    try {
      c.run();
    } catch (const CheckFailure& f) {
      failure = f.message;
    } catch (const std::exception& e) {
      failure = std::string("unexpected error: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (failure.empty() && c.time_limit > 0.0 && secs > c.time_limit) {
      failure = "runtime " + format_double(secs) + "s exceeds the " +
                format_double(c.time_limit) + "s budget";
    }
    if (failure.empty()) {
      std::printf("[PASS] criterion %d: %s (%.1fs)\n", c.id, c.label, secs);
    } else {
      std::printf("[FAIL] criterion %d: %s (%.1fs) -- %s\n", c.id, c.label, secs,
                  failure.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
