#pragma once

// Binary signals identified by their posterior means <mu_L, mu_R>, with the
// realization probabilities pinned down by Bayes' plausibility. The null
// (uninformative) signal is a distinct empty value, never mu_L = mu_R = 0.

#include <cmath>
#include <optional>

#include "json.hpp"
#include "nari/model.hpp"
#include "nari/numerics.hpp"

namespace nari {

class BinarySignal {
 public:
  static BinarySignal make(double mu_L, double mu_R) {
    if (!(mu_L >= -1.0 && mu_L < 0.0))
      throw ValidationError("signal: mu_L must lie in [-1, 0), got " + format_double(mu_L));
    if (!(mu_R > 0.0 && mu_R <= 1.0))
      throw ValidationError("signal: mu_R must lie in (0, 1], got " + format_double(mu_R));
    return BinarySignal(mu_L, mu_R);
  }

  double mu_L() const { return mu_L_; }
  double mu_R() const { return mu_R_; }
  double pi_L() const { return mu_R_ / (mu_R_ - mu_L_); }
  double pi_R() const { return -mu_L_ / (mu_R_ - mu_L_); }

 private:
  BinarySignal(double l, double r) : mu_L_(l), mu_R_(r) {}
  double mu_L_;
  double mu_R_;
};

using Signal = std::optional<BinarySignal>;

inline BinarySignal full_disclosure_signal() { return BinarySignal::make(-1.0, 1.0); }

// Swap-and-negate: the optimal signal of type -k in the mirrored environment.
inline BinarySignal mirror(const BinarySignal& s) {
  return BinarySignal::make(-s.mu_R(), -s.mu_L());
}

struct ConditionalProbs {
  double r_given_plus;   // Pi(z = R | w = +1)
  double r_given_minus;  // Pi(z = R | w = -1)
};

inline ConditionalProbs conditionals(const BinarySignal& s) {
  const double d = s.mu_R() - s.mu_L();
  return {-s.mu_L() * (1.0 + s.mu_R()) / d, -s.mu_L() * (1.0 - s.mu_R()) / d};
}

inline double attention_cost(const BinarySignal& s, const AttentionSpec& att) {
  return s.pi_L() * att.h(s.mu_L()) + s.pi_R() * att.h(s.mu_R());
}

inline double attention_cost(const Signal& s, const AttentionSpec& att) {
  return s ? attention_cost(*s, att) : 0.0;
}

// Expected utility gain from consuming the signal under profile <-a, a>.
// Left-leaning and median voters gain only when convinced to vote R;
// right-leaning voters only when convinced to vote L.
inline double gain_of_consumption(const BinarySignal& s, const ModelSpec& spec, double a,
                                  int k) {
  const double v = policy_value_diff(spec, -a, a, k);
  if (k <= 0) return s.pi_R() * std::max(v + s.mu_R(), 0.0);
  return s.pi_L() * std::max(-(v + s.mu_L()), 0.0);
}

inline double gain_of_consumption(const Signal& s, const ModelSpec& spec, double a, int k) {
  return s ? gain_of_consumption(*s, spec, a, k) : 0.0;
}

inline bool check_strict_obedience(const BinarySignal& s, const ModelSpec& spec, double a,
                                   int k) {
  const double v = policy_value_diff(spec, -a, a, k);
  return v + s.mu_L() < 0.0 && 0.0 < v + s.mu_R();
}

inline void to_json(nlohmann::json& j, const Signal& s) {
  if (s)
    j = nlohmann::json{{"mu_L", s->mu_L()}, {"mu_R", s->mu_R()}};
  else
    j = nlohmann::json{{"null", true}};
}

inline void from_json(const nlohmann::json& j, Signal& s) {
  if (j.contains("null") && j.at("null").get<bool>()) {
    s = std::nullopt;
    return;
  }
  s = BinarySignal::make(j.at("mu_L").get<double>(), j.at("mu_R").get<double>());
}

}  // namespace nari
