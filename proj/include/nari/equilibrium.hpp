#pragma once

// Equilibrium layer: susceptibilities, policy latitudes, and the symmetric
// equilibrium policy set [0, a*] disciplined by the influential coalition
// with the smallest latitude. a* is computed both as a direct minimum and by
// the window induction over bliss points; the two must agree exactly.

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nari/configuration.hpp"
#include "nari/model.hpp"
#include "nari/optimizer.hpp"

namespace nari {

struct Marginals {
  Technology tech = Technology::Personalized;
  double a = 0.0;
  std::vector<SignalSolveResult> per_type;  // ordered k = -K..K
  std::optional<BroadcastSolveResult> broadcast;

  const SignalSolveResult& result(const ModelSpec& spec, int k) const {
    return per_type[static_cast<std::size_t>(spec.index(k))];
  }
  double mu_L(const ModelSpec& spec, int k) const {
    const auto& r = result(spec, k);
    if (!r.signal) throw NumericError("marginals: degenerate signal for k=" + std::to_string(k));
    return r.signal->mu_L();
  }
  double mu_R(const ModelSpec& spec, int k) const {
    const auto& r = result(spec, k);
    if (!r.signal) throw NumericError("marginals: degenerate signal for k=" + std::to_string(k));
    return r.signal->mu_R();
  }
  MarginalProbs probs(const ModelSpec& spec) const {
    MarginalProbs p;
    p.n = spec.n_types();
    for (int k = -spec.K; k <= spec.K; ++k) {
      const auto& r = result(spec, k);
      if (!r.signal) throw NumericError("marginals: degenerate signal for k=" + std::to_string(k));
      const ConditionalProbs c = conditionals(*r.signal);
      p.r_plus.push_back(c.r_given_plus);
      p.r_minus.push_back(c.r_given_minus);
    }
    return p;
  }
};

inline Marginals solve_marginals(const ModelSpec& spec, Technology tech, double a,
                                 const SolverOptions& opt = {}) {
  Marginals m;
  m.tech = tech;
  m.a = a;
  m.per_type.resize(static_cast<std::size_t>(spec.n_types()));
  if (tech == Technology::Broadcast) {
    m.broadcast = optimal_broadcast_signal(spec, a, opt);
    for (int k = -spec.K; k <= spec.K; ++k)
      m.per_type[static_cast<std::size_t>(spec.index(k))] = m.broadcast->solve;
  } else {
    for (int k = -spec.K; k <= spec.K; ++k)
      m.per_type[static_cast<std::size_t>(spec.index(k))] = solve_signal(spec, tech, a, k, opt);
  }
  return m;
}

// Consistency of a full joint distribution against the solved marginals at
// one policy.
inline double consistency_residual(const NewsConfiguration& chi, const ModelSpec& spec,
                                   Technology tech, double a, const SolverOptions& opt = {}) {
  return consistency_residual(chi, solve_marginals(spec, tech, a, opt).probs(spec));
}

inline bool check_consistency(const NewsConfiguration& chi, const ModelSpec& spec,
                              Technology tech, double a, const SolverOptions& opt = {},
                              double tol = 1e-10) {
  return consistency_residual(chi, spec, tech, a, opt) <= tol;
}

// phi^S(-a, a', k): the margin by which a' wins type k even under an
// unfavorable recommendation.
inline double susceptibility(const ModelSpec& spec, const Marginals& marg, double a_prime,
                             int k) {
  return policy_value_diff(spec, -marg.a, a_prime, k) + marg.mu_L(spec, k);
}

inline double susceptibility(const ModelSpec& spec, const Marginals& marg, double a_prime,
                             std::uint32_t coalition) {
  double phi = std::numeric_limits<double>::infinity();
  for (int k : coalition_types(coalition, spec.K))
    phi = std::min(phi, susceptibility(spec, marg, a_prime, k));
  return phi;
}

inline bool attracts(const ModelSpec& spec, const Marginals& marg, double a_prime,
                     std::uint32_t coalition) {
  return susceptibility(spec, marg, a_prime, coalition) > 0.0;
}

// Companion flag: a' repels type k when it loses them even under favorable news.
inline bool repels(const ModelSpec& spec, const Marginals& marg, double a_prime, int k) {
  return policy_value_diff(spec, -marg.a, a_prime, k) + marg.mu_R(spec, k) < 0.0;
}

struct LatitudeReport {
  std::uint32_t coalition_mask = 0;
  std::vector<int> coalition;
  double xi = 0.0;
  bool saturated = false;        // a_bar binds before any deviation attracts
  double binding_deviation = 0.0;
  std::vector<std::pair<int, double>> belief_at_latitude;  // (k, mu_L^S(xi, k))
  bool has_components = false;   // singleton decomposition xi = -t(k) + |v_L|
  double component_neg_bliss = 0.0;
  double component_belief_magnitude = 0.0;
};

namespace detail {

// The susceptibility envelope is increasing in the policy for broadcast
// signals, for personalized signals under distance utility or quadratic cost,
// and for competitive signals under quadratic cost; everything else gets a
// numeric grid check before the latitude bisection may rely on it.
inline bool envelope_monotone_analytic(const ModelSpec& spec, Technology tech) {
  if (tech == Technology::Broadcast) return true;
  if (spec.cost == CostKind::QuadraticCost) return true;
  if (tech == Technology::Personalized && spec.utility == UtilityKind::Distance) return true;
  return false;
}

}  // namespace detail

// Largest symmetric policy a such that no deviation attracts the coalition:
// the inner maximization over deviations is a concave 1-D problem restricted
// to the coalition's bliss range; the outer search is a bisection justified
// by the monotonicity of the susceptibility envelope in a.
inline LatitudeReport policy_latitude(const ModelSpec& spec, Technology tech,
                                      const std::vector<int>& coalition,
                                      const SolverOptions& opt = {}) {
  if (coalition.empty()) throw ValidationError("policy_latitude: empty coalition");
  const std::uint32_t mask = coalition_mask(coalition, spec.K);
  const std::vector<int> members = coalition_types(mask, spec.K);
  const double t_lo = spec.t(members.front());
  const double t_hi = spec.t(members.back());
  const double a_start = std::max(std::fabs(t_lo), std::fabs(t_hi));

  struct Inner {
    double max_phi;
    double argmax;
  };
  auto inner = [&](double a) -> Inner {
    const Marginals marg = solve_marginals(spec, tech, a, opt);
    if (members.size() == 1) {
      const double ap = spec.t(members.front());
      return {susceptibility(spec, marg, ap, mask), ap};
    }
    auto [ap, phi] = golden_section_max(
        [&](double x) { return susceptibility(spec, marg, x, mask); }, t_lo, t_hi, 1e-10);
    return {phi, ap};
  };

  if (!detail::envelope_monotone_analytic(spec, tech)) {
    const auto grid = linspace(a_start, spec.a_bar, 8);
    double prev = -std::numeric_limits<double>::infinity();
    double prev_a = a_start;
    for (double a : grid) {
      const Inner e = inner(a);
      if (e.max_phi < prev - 1e-9) {
        throw AssumptionError("susceptibility envelope not increasing: decreases from a=" +
                              format_double(prev_a) + " to a=" + format_double(a) +
                              " near a'=" + format_double(e.argmax));
      }
      prev = e.max_phi;
      prev_a = a;
    }
  }

  LatitudeReport rep;
  rep.coalition_mask = mask;
  rep.coalition = members;

  const Inner at_start = inner(a_start);
  if (!(at_start.max_phi < 1e-12)) {
    throw NumericError("policy_latitude: coalition already attracted at a=" +
                       format_double(a_start) + " (phi=" + format_double(at_start.max_phi) +
                       "); uniform strict obedience likely fails");
  }
  const Inner at_bar = inner(spec.a_bar);
  if (at_bar.max_phi <= 0.0) {
    rep.xi = spec.a_bar;
    rep.saturated = true;
    rep.binding_deviation = at_bar.argmax;
  } else {
    rep.xi = bisect_root([&](double a) { return inner(a).max_phi; }, a_start, spec.a_bar,
                         1e-11, 200);
    rep.binding_deviation = inner(rep.xi).argmax;
  }

  const Marginals at_xi = solve_marginals(spec, tech, rep.xi, opt);
  for (int k : members) rep.belief_at_latitude.emplace_back(k, at_xi.mu_L(spec, k));
  if (members.size() == 1) {
    const int k = members.front();
    const Marginals at_bliss = solve_marginals(spec, tech, std::fabs(spec.t(k)), opt);
    rep.has_components = true;
    rep.component_neg_bliss = -spec.t(k);
    rep.component_belief_magnitude = std::fabs(at_bliss.mu_L(spec, k));
  }
  return rep;
}

struct EquilibriumSet {
  int K = 0;
  double a_star = 0.0;
  std::pair<double, double> interval{0.0, 0.0};
  std::uint32_t disciplining_mask = 0;
  std::vector<int> disciplining;
  std::vector<std::pair<std::uint32_t, double>> latitudes;  // minimal coalitions only
  bool any_saturated = false;
};

namespace detail {

struct LatitudeCache {
  const ModelSpec& spec;
  Technology tech;
  const SolverOptions& opt;
  std::map<std::uint32_t, LatitudeReport> memo;

  const LatitudeReport& get(std::uint32_t mask) {
    auto it = memo.find(mask);
    if (it != memo.end()) return it->second;
    LatitudeReport rep = policy_latitude(spec, tech, coalition_types(mask, spec.K), opt);
    return memo.emplace(mask, std::move(rep)).first->second;
  }
};

// The induction over bliss windows from the equilibrium characterization:
// stop at the first window whose binding latitude lies inside it.
inline double induction_a_star(const ModelSpec& spec,
                               const std::vector<std::uint32_t>& minimal, LatitudeCache& cache) {
  for (int m = 0; m <= spec.K; ++m) {
    std::uint32_t window = 0;
    for (int k = -m; k <= m; ++k) window |= 1u << spec.index(k);
    double x = std::numeric_limits<double>::infinity();
    for (std::uint32_t c : minimal) {
      if ((c & ~window) == 0) x = std::min(x, cache.get(c).xi);
    }
    if (m == spec.K) return std::min(x, spec.a_bar);
    if (x < spec.t(m + 1)) return x;
  }
  return spec.a_bar;
}

}  // namespace detail

// Verifies that the bare configuration matrix admits strictly positive
// probability vectors reproducing the marginals across the policy range
// (checked on a grid of policies).
inline void require_consistent_over_range(const ModelSpec& spec, Technology tech,
                                          const std::vector<std::uint32_t>& columns,
                                          const SolverOptions& opt = {}, int grid_n = 5) {
  for (double a : linspace(0.0, spec.a_bar, grid_n)) {
    const Marginals marg = solve_marginals(spec, tech, a, opt);
    const ConsistentB b =
        solve_consistent_b(columns, spec.n_types(), marg.probs(spec), 1e-8, true);
    if (!b.feasible) {
      throw ValidationError("configuration is not consistent at a=" + format_double(a) +
                            " (residual " + format_double(b.residual) + ")");
    }
    if (!(b.min_entry > 1e-11)) {
      throw ValidationError("configuration forces a zero-probability column at a=" +
                            format_double(a));
    }
  }
}

// E^{S,chi,q} = [0, a*], a* = min latitude over influential coalitions.
inline EquilibriumSet equilibrium_set(const ModelSpec& spec, Technology tech,
                                      const std::vector<std::uint32_t>& chi_columns,
                                      const std::vector<double>& q,
                                      const SolverOptions& opt = {},
                                      bool check_assumptions = true) {
  if (check_assumptions) {
    const Assumption2Report a2 = assumption2_check(spec, tech, 9, opt);
    if (!a2.pass) throw AssumptionError("uniform strict obedience fails: " + a2.diagnostic);
    require_consistent_over_range(spec, tech, chi_columns, opt);
  }
  const std::vector<std::uint32_t> minimal =
      enumerate_influential(chi_columns, spec.n_types(), q);
  if (minimal.empty()) throw NumericError("equilibrium_set: no influential coalition");

  detail::LatitudeCache cache{spec, tech, opt, {}};
  EquilibriumSet out;
  out.K = spec.K;
  out.a_star = std::numeric_limits<double>::infinity();
  for (std::uint32_t c : minimal) {
    const LatitudeReport& rep = cache.get(c);
    out.latitudes.emplace_back(c, rep.xi);
    out.any_saturated = out.any_saturated || rep.saturated;
    if (rep.xi < out.a_star || (rep.xi == out.a_star && c < out.disciplining_mask)) {
      out.a_star = rep.xi;
      out.disciplining_mask = c;
    }
  }
  const double induction = detail::induction_a_star(spec, minimal, cache);
  if (induction != out.a_star) {
    throw NumericError("equilibrium_set: window induction (" + format_double(induction) +
                       ") disagrees with the direct minimum (" + format_double(out.a_star) +
                       ")");
  }
  out.interval = {0.0, out.a_star};
  out.disciplining = coalition_types(out.disciplining_mask, spec.K);
  return out;
}

inline EquilibriumSet equilibrium_set(const ModelSpec& spec, Technology tech,
                                      const NewsConfiguration& chi,
                                      const SolverOptions& opt = {},
                                      bool check_assumptions = true) {
  return equilibrium_set(spec, tech, chi.columns, spec.populations, opt, check_assumptions);
}

struct BruteForceResult {
  double a_max = 0.0;
  double step = 0.0;
  int checked = 0;
};

// Definition-level oracle: scans the policy lattice and flags the first a at
// which some deviation a' in [-a, a) attracts an influential coalition whose
// members' bliss points lie inside [-a, a].
inline BruteForceResult brute_force_equilibrium(const ModelSpec& spec, Technology tech,
                                                const std::vector<std::uint32_t>& chi_columns,
                                                const std::vector<double>& q, double step,
                                                const SolverOptions& opt = {}) {
  if (!(step > 0.0)) throw ValidationError("brute_force_equilibrium: step must be positive");
  const int n = spec.n_types();
  if (n > 15) throw ValidationError("brute_force_equilibrium: more than 15 types");
  const std::uint32_t total = 1u << n;
  std::vector<char> influential(total, 0);
  for (std::uint32_t c = 1; c < total; ++c)
    influential[c] = is_influential(chi_columns, n, q, c) ? 1 : 0;

  BruteForceResult out;
  out.step = step;
  const int imax = static_cast<int>(std::floor(spec.a_bar / step + 1e-9));
  double last_good = 0.0;
  for (int i = 0; i <= imax; ++i) {
    const double a = i * step;
    const Marginals marg = solve_marginals(spec, tech, a, opt);
    std::vector<double> mu(static_cast<std::size_t>(n));
    std::uint32_t bliss_inside = 0;
    for (int k = -spec.K; k <= spec.K; ++k) {
      mu[static_cast<std::size_t>(spec.index(k))] = marg.mu_L(spec, k);
      if (std::fabs(spec.t(k)) <= a) bliss_inside |= 1u << spec.index(k);
    }
    bool broken = false;
    for (int j = -i; j < i && !broken; ++j) {
      const double ap = j * step;
      std::uint32_t attracted = 0;
      for (int k = -spec.K; k <= spec.K; ++k) {
        const std::uint32_t bit = 1u << spec.index(k);
        if (!(bliss_inside & bit)) continue;
        if (policy_value_diff(spec, -a, ap, k) + mu[static_cast<std::size_t>(spec.index(k))] >
            0.0)
          attracted |= bit;
      }
      if (attracted != 0 && influential[attracted]) broken = true;
    }
    ++out.checked;
    if (broken) break;
    last_good = a;
  }
  out.a_max = last_good;
  return out;
}

}  // namespace nari
