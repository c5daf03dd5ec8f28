#pragma once

// Economic environment: voter types, utilities, the attention technology and
// the policy space, plus the standing-assumption checks on them.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nari/numerics.hpp"

namespace nari {

enum class UtilityKind { Distance, Quadratic };
enum class CostKind { QuadraticCost, EntropyCost };
enum class Technology { Broadcast, Personalized, Competitive };

inline std::string to_string(UtilityKind u) {
  return u == UtilityKind::Distance ? "distance" : "quadratic";
}
inline std::string to_string(CostKind c) {
  return c == CostKind::QuadraticCost ? "quadratic" : "entropy";
}
inline std::string to_string(Technology t) {
  switch (t) {
    case Technology::Broadcast: return "broadcast";
    case Technology::Personalized: return "personalized";
    default: return "competitive";
  }
}

// Binary valence state with a uniform prior; the prior mean is exactly zero.
struct StateModel {
  static constexpr double support[2] = {-1.0, 1.0};
  static constexpr double prior[2] = {0.5, 0.5};
  static constexpr double prior_mean = support[0] * prior[0] + support[1] * prior[1];
};
static_assert(StateModel::prior_mean == 0.0);

// Binary entropy in bits; H2(0) = H2(1) = 0.
inline double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
}

// Posterior-separable attention kernel h on [-1, 1]: h(0) = 0, even, strictly
// convex. QuadraticCost is the variance reduction h(mu) = mu^2; EntropyCost is
// the Shannon-entropy reduction h(mu) = 1 - H2((1+mu)/2), so h(+-1) = 1 for
// both and attention lives on a common [0, 1] scale.
struct AttentionSpec {
  CostKind kind = CostKind::QuadraticCost;

  double h(double mu) const {
    if (kind == CostKind::QuadraticCost) return mu * mu;
    if (mu <= -1.0 || mu >= 1.0) return 1.0;
    return 1.0 - binary_entropy(0.5 * (1.0 + mu));
  }

  double h_prime(double mu) const {
    if (kind == CostKind::QuadraticCost) return 2.0 * mu;
    if (mu <= -1.0) return -HUGE_VAL;
    if (mu >= 1.0) return HUGE_VAL;
    return 0.5 * std::log2((1.0 + mu) / (1.0 - mu));
  }

  double h_second(double mu) const {
    if (kind == CostKind::QuadraticCost) return 2.0;
    return 1.0 / (std::log(2.0) * (1.0 - mu * mu));
  }

  // Inverse of h' (h is strictly convex, so h' is invertible).
  double h_prime_inv(double y) const {
    if (kind == CostKind::QuadraticCost) return 0.5 * y;
    return std::tanh(y * std::log(2.0));
  }
};

// Utility as a function of the policy and the voter's own bliss point.
// Custom hooks must satisfy the same regularity clauses as the built-ins;
// validate_model audits them but construction does not.
using UtilityHook = double (*)(double a, double bliss);

// Immutable after construction via make()/from_json; all symmetry premises
// are enforced exactly, not within tolerance.
struct ModelSpec {
  int K = 1;
  std::vector<double> populations;  // ordered k = -K..K
  std::vector<double> bliss;        // ordered k = -K..K
  UtilityKind utility = UtilityKind::Distance;
  double a_bar = 10.0;
  CostKind cost = CostKind::QuadraticCost;
  double lambda = 0.6;
  UtilityHook custom_utility = nullptr;  // overrides `utility`; not serialized

  int n_types() const { return 2 * K + 1; }
  int index(int k) const { return k + K; }
  double q(int k) const { return populations[static_cast<std::size_t>(index(k))]; }
  double t(int k) const { return bliss[static_cast<std::size_t>(index(k))]; }
  AttentionSpec attention() const { return AttentionSpec{cost}; }

  double u(double a, int k) const {
    if (custom_utility) return custom_utility(a, t(k));
    const double d = t(k) - a;
    return utility == UtilityKind::Distance ? -std::fabs(d) : -d * d;
  }

  static ModelSpec make(int K, std::vector<double> populations, std::vector<double> bliss,
                        UtilityKind utility, double a_bar, CostKind cost, double lambda) {
    ModelSpec s;
    s.K = K;
    s.populations = std::move(populations);
    s.bliss = std::move(bliss);
    s.utility = utility;
    s.a_bar = a_bar;
    s.cost = cost;
    s.lambda = lambda;
    s.validate_structure();
    return s;
  }

  void validate_structure() const {
    if (K < 1) throw ValidationError("model: K must be a positive integer");
    const std::size_t n = static_cast<std::size_t>(n_types());
    if (populations.size() != n || bliss.size() != n)
      throw ValidationError("model: expected " + std::to_string(n) + " entries for q and t");
    if (!(a_bar > 0.0)) throw ValidationError("model: a_bar must be positive");
    if (!(lambda > 0.0)) throw ValidationError("model: lambda must be positive");
    double sum = 0.0;
    for (double qi : populations) {
      if (!(qi > 0.0)) throw ValidationError("model: populations must be strictly positive");
      sum += qi;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
      throw ValidationError("model: populations must sum to 1 (got " + format_double(sum) + ")");
    for (int k = 1; k <= K; ++k) {
      if (q(k) != q(-k))
        throw ValidationError("model: populations not symmetric at k=" + std::to_string(k));
    }
    for (int k = 0; k <= K; ++k) {
      if (t(-k) != -t(k))
        throw ValidationError("model: bliss not odd-symmetric at k=" + std::to_string(k));
    }
    for (int k = -K; k < K; ++k) {
      if (!(t(k) < t(k + 1)))
        throw ValidationError("model: bliss not strictly increasing at k=" + std::to_string(k));
    }
    for (int k = -K; k <= K; ++k) {
      if (!(std::fabs(t(k)) < a_bar))
        throw ValidationError("model: bliss point outside the open policy space");
    }
  }
};

// Differential valuation v(<aL,aR>, k) = u(aR,k) - u(aL,k).
inline double policy_value_diff(const ModelSpec& spec, double a_left, double a_right, int k) {
  if (std::fabs(a_left) > spec.a_bar || std::fabs(a_right) > spec.a_bar)
    throw ValidationError("policy_value_diff: policy outside [-a_bar, a_bar]");
  return spec.u(a_right, k) - spec.u(a_left, k);
}

struct ValidationClause {
  std::string name;
  bool pass = true;
  std::string witness;  // empty when the clause passes
};

struct ValidationReport {
  std::vector<ValidationClause> clauses;
  std::vector<std::string> warnings;
  bool all_pass() const {
    for (const auto& c : clauses)
      if (!c.pass) return false;
    return true;
  }
};

// Checks each utility-regularity clause on a grid and the convexity of h on
// random triples. Passes by construction for the two built-in utilities; the
// report exists so custom hooks can be audited with the same tooling.
inline ValidationReport validate_model(const ModelSpec& spec, int grid_n = 41,
                                       unsigned long long seed = 20240517ULL) {
  ValidationReport rep;
  const auto as = linspace(-spec.a_bar, spec.a_bar, grid_n);

  ValidationClause concavity{"continuity_and_concavity", true, ""};
  ValidationClause symmetry{"symmetry", true, ""};
  ValidationClause vshape{"inverted_v_shape", true, ""};
  ValidationClause incdiff{"increasing_differences", true, ""};
  ValidationClause sign{"sign_of_v_at_symmetric_profiles", true, ""};

  auto witness = [](double a, double ap, int k) {
    return "(a=" + format_double(a) + ", a'=" + format_double(ap) + ", k=" + std::to_string(k) +
           ")";
  };

  for (int k = -spec.K; k <= spec.K; ++k) {
    for (std::size_t i = 0; i + 2 < as.size(); ++i) {
      const double a1 = as[i], a2 = as[i + 1], a3 = as[i + 2];
      if (spec.u(a2, k) + 1e-12 < 0.5 * (spec.u(a1, k) + spec.u(a3, k))) {
        concavity.pass = false;
        concavity.witness = witness(a1, a3, k);
      }
    }
    for (double a : as) {
      if (std::fabs(spec.u(a, k) - spec.u(-a, -k)) > 1e-12) {
        symmetry.pass = false;
        symmetry.witness = witness(a, -a, k);
      }
    }
    for (std::size_t i = 0; i + 1 < as.size(); ++i) {
      const double a1 = as[i], a2 = as[i + 1];
      if (a2 <= spec.t(k) && !(spec.u(a2, k) > spec.u(a1, k))) {
        vshape.pass = false;
        vshape.witness = witness(a1, a2, k);
      }
      if (a1 >= spec.t(k) && !(spec.u(a1, k) > spec.u(a2, k))) {
        vshape.pass = false;
        vshape.witness = witness(a1, a2, k);
      }
    }
  }
  for (std::size_t i = 0; i < as.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double hi = as[i], lo = as[j];
      for (int k = -spec.K; k < spec.K; ++k) {
        const double d1 = spec.u(hi, k) - spec.u(lo, k);
        const double d2 = spec.u(hi, k + 1) - spec.u(lo, k + 1);
        if (d2 + 1e-12 < d1) {
          incdiff.pass = false;
          incdiff.witness = witness(hi, lo, k);
        }
      }
    }
  }
  for (double a : as) {
    if (a <= 0.0) continue;
    for (int k = -spec.K; k <= spec.K; ++k) {
      const double v = spec.u(a, k) - spec.u(-a, k);
      const bool ok = (k > 0 && v > 0.0) || (k == 0 && v == 0.0) || (k < 0 && v < 0.0);
      if (!ok) {
        sign.pass = false;
        sign.witness = witness(a, -a, k);
      }
    }
  }

  ValidationClause hconv{"h_strictly_convex", true, ""};
  {
    const AttentionSpec att = spec.attention();
    unsigned long long state = seed;
    auto rnd = [&state]() {
      state = state * 6364136223846793005ULL + 1442695040888963407ULL;
      return static_cast<double>(state >> 11) / 9007199254740992.0;
    };
    for (int trial = 0; trial < 1000; ++trial) {
      double m1 = 2.0 * rnd() - 1.0, m2 = 2.0 * rnd() - 1.0, m3 = 2.0 * rnd() - 1.0;
      if (m1 > m2) std::swap(m1, m2);
      if (m2 > m3) std::swap(m2, m3);
      if (m1 > m2) std::swap(m1, m2);
      if (m3 - m1 < 1e-6 || m2 - m1 < 1e-9 || m3 - m2 < 1e-9) continue;
      const double w = (m3 - m2) / (m3 - m1);
      if (!(att.h(m2) < w * att.h(m1) + (1.0 - w) * att.h(m3))) {
        hconv.pass = false;
        hconv.witness = "(mu=" + format_double(m1) + "," + format_double(m2) + "," +
                        format_double(m3) + ")";
      }
    }
    if (std::fabs(att.h(0.0)) > 0.0) hconv.pass = false;
  }

  rep.clauses = {concavity, symmetry, vshape, incdiff, sign, hconv};

  const double v_extreme = policy_value_diff(spec, -spec.a_bar, spec.a_bar, spec.K);
  if (std::fabs(v_extreme) >= 1.0) {
    rep.warnings.push_back("policy preferences may be too extreme: |v(-a_bar,a_bar,K)| = " +
                           format_double(std::fabs(v_extreme)) + " >= 1");
  }
  return rep;
}

inline void to_json(nlohmann::json& j, const ModelSpec& s) {
  j = nlohmann::json{{"K", s.K},       {"q", s.populations}, {"t", s.bliss},
                     {"utility", to_string(s.utility)},      {"a_bar", s.a_bar},
                     {"cost", to_string(s.cost)},            {"lambda", s.lambda}};
}

inline UtilityKind utility_from_string(const std::string& s) {
  if (s == "distance") return UtilityKind::Distance;
  if (s == "quadratic") return UtilityKind::Quadratic;
  throw ValidationError("unknown utility kind: " + s);
}

inline CostKind cost_from_string(const std::string& s) {
  if (s == "quadratic") return CostKind::QuadraticCost;
  if (s == "entropy") return CostKind::EntropyCost;
  throw ValidationError("unknown cost kind: " + s);
}

inline Technology technology_from_string(const std::string& s) {
  if (s == "broadcast") return Technology::Broadcast;
  if (s == "personalized") return Technology::Personalized;
  if (s == "competitive") return Technology::Competitive;
  throw ValidationError("unknown technology: " + s);
}

inline void from_json(const nlohmann::json& j, ModelSpec& s) {
  s = ModelSpec::make(j.at("K").get<int>(), j.at("q").get<std::vector<double>>(),
                      j.at("t").get<std::vector<double>>(),
                      utility_from_string(j.at("utility").get<std::string>()),
                      j.at("a_bar").get<double>(),
                      cost_from_string(j.at("cost").get<std::string>()),
                      j.at("lambda").get<double>());
}

}  // namespace nari
