#pragma once

// JSON views of the solver artifacts. nlohmann::json keeps object keys sorted
// and prints doubles in shortest round-trip form, so dumps are byte-stable
// for identical inputs.

#include "json.hpp"
#include "nari/equilibrium.hpp"
#include "nari/statics.hpp"

namespace nari {

inline void to_json(nlohmann::json& j, const SignalSolveResult& r) {
  nlohmann::json sig;
  to_json(sig, r.signal);
  j = nlohmann::json{{"signal", sig},
                     {"regime", to_string(r.regime)},
                     {"effective_cost", r.effective_cost},
                     {"attention", r.attention},
                     {"value", r.value},
                     {"slack", r.slack},
                     {"boundary", r.boundary}};
}

inline void to_json(nlohmann::json& j, const ParticipationEntry& p) {
  const char* status = p.status == ParticipationStatus::Binding
                           ? "binding"
                           : (p.status == ParticipationStatus::Slack ? "slack" : "excluded");
  j = nlohmann::json{{"k", p.k},
                     {"value", p.value},
                     {"cost", p.cost},
                     {"status", status},
                     {"obedient", p.obedient}};
}

inline void to_json(nlohmann::json& j, const BroadcastSolveResult& b) {
  j = nlohmann::json{{"solve", b.solve},
                     {"window", {b.window_lo, b.window_hi}},
                     {"demand", b.demand},
                     {"profit", b.profit},
                     {"window_tie", b.window_tie},
                     {"excludes_voter", b.excludes_voter},
                     {"participation", b.participation}};
}

inline void to_json(nlohmann::json& j, const SkewnessTypeRow& r) {
  j = nlohmann::json{{"k", r.k},         {"mu_L", r.mu_L},           {"mu_R", r.mu_R},
                     {"pi_R", r.pi_R},   {"attention", r.attention}, {"obedient", r.obedient}};
}

inline void to_json(nlohmann::json& j, const SkewnessReport& r) {
  j = nlohmann::json{{"pass", r.pass},
                     {"broadcast",
                      {{"mu_L", r.broadcast_mu_L},
                       {"mu_R", r.broadcast_mu_R},
                       {"pi_R", r.broadcast_pi_R},
                       {"attention", r.broadcast_attention},
                       {"symmetric", r.broadcast_symmetric}}},
                     {"personalized", r.personalized},
                     {"median_symmetric", r.median_symmetric},
                     {"extreme_skew_signs", r.extreme_skew_signs},
                     {"cross_type_mirror", r.cross_type_mirror},
                     {"strict_obedience", r.strict_obedience},
                     {"bayes_plausible", r.bayes_plausible},
                     {"broadcast_less_attentive", r.broadcast_less_attentive}};
}

inline void to_json(nlohmann::json& j, const Assumption2Entry& e) {
  j = nlohmann::json{{"a", e.a}, {"k", e.k}, {"diagnostic", e.diagnostic}};
}

inline void to_json(nlohmann::json& j, const Assumption2Report& r) {
  j = nlohmann::json{{"pass", r.pass}, {"diagnostic", r.diagnostic}, {"failures", r.failures}};
}

inline void to_json(nlohmann::json& j, const LatitudeReport& r) {
  nlohmann::json beliefs = nlohmann::json::array();
  for (const auto& [k, mu] : r.belief_at_latitude)
    beliefs.push_back({{"k", k}, {"mu_L", mu}});
  j = nlohmann::json{{"coalition", r.coalition},
                     {"xi", r.xi},
                     {"saturated", r.saturated},
                     {"binding_deviation", r.binding_deviation},
                     {"belief_at_latitude", beliefs}};
  if (r.has_components) {
    j["components"] = {{"neg_bliss", r.component_neg_bliss},
                       {"belief_magnitude", r.component_belief_magnitude}};
  }
}

inline void to_json(nlohmann::json& j, const EquilibriumSet& e) {
  nlohmann::json lats = nlohmann::json::array();
  for (const auto& [mask, xi] : e.latitudes) {
    lats.push_back({{"coalition", coalition_types(mask, e.K)}, {"xi", xi}});
  }
  j = nlohmann::json{{"a_star", e.a_star},
                     {"interval", {e.interval.first, e.interval.second}},
                     {"disciplining", e.disciplining},
                     {"latitudes", lats},
                     {"any_saturated", e.any_saturated}};
}

inline void to_json(nlohmann::json& j, const NewsConfiguration& c) {
  std::vector<std::vector<int>> rows(static_cast<std::size_t>(c.n_rows));
  for (int i = 0; i < c.n_rows; ++i) {
    for (std::size_t col = 0; col < c.n_columns(); ++col)
      rows[static_cast<std::size_t>(i)].push_back(c.entry(i, col) ? 1 : 0);
  }
  j = nlohmann::json{{"chi", rows}, {"b_plus", c.b_plus}, {"b_minus", c.b_minus}};
}

inline void from_json(const nlohmann::json& j, NewsConfiguration& c) {
  const auto rows = j.at("chi").get<std::vector<std::vector<int>>>();
  if (rows.empty()) throw ValidationError("configuration: empty chi");
  const int n = static_cast<int>(rows.size());
  const std::size_t m = rows.front().size();
  std::vector<std::uint32_t> cols(m, 0u);
  for (int i = 0; i < n; ++i) {
    if (rows[static_cast<std::size_t>(i)].size() != m)
      throw ValidationError("configuration: ragged chi");
    for (std::size_t col = 0; col < m; ++col) {
      const int e = rows[static_cast<std::size_t>(i)][col];
      if (e != 0 && e != 1) throw ValidationError("configuration: chi entries must be 0/1");
      if (e == 1) cols[col] |= 1u << i;
    }
  }
  c = NewsConfiguration::make(n, cols, j.at("b_plus").get<std::vector<double>>(),
                              j.at("b_minus").get<std::vector<double>>());
}

inline void to_json(nlohmann::json& j, const ConditionEvaluation& c) {
  j = nlohmann::json{{"evaluable", c.evaluable}, {"assumption2", c.assumption2}};
  if (!c.diagnostic.empty()) j["diagnostic"] = c.diagnostic;
  if (c.evaluable) {
    j["star"] = {{"holds", c.star}, {"lhs", c.star_lhs}, {"rhs", c.star_rhs}};
    j["doublestar"] = {{"holds", c.doublestar},
                       {"branch", c.doublestar_branch},
                       {"lhs", c.ds_lhs},
                       {"rhs", c.ds_rhs}};
    j["latitudes"] = {{"xi_b0", c.xi_b0},
                      {"xi_p0", c.xi_p0},
                      {"xi_p1", c.xi_p1},
                      {"xi_pm1", c.xi_pm1}};
    j["beliefs"] = {{"v_L_p1", c.v_L_p1},
                    {"v_R_p1", c.v_R_p1},
                    {"v_L_pm1", c.v_L_pm1},
                    {"v_L_b", c.v_L_b}};
  }
}

inline void to_json(nlohmann::json& j, const Axis& a) {
  j = nlohmann::json{{"name", a.name}, {"lo", a.lo}, {"hi", a.hi}, {"n", a.n}};
}

inline void from_json(const nlohmann::json& j, Axis& a) {
  a.name = j.at("name").get<std::string>();
  a.lo = j.at("lo").get<double>();
  a.hi = j.at("hi").get<double>();
  a.n = j.value("n", 100);
}

inline void to_json(nlohmann::json& j, const RegionGrid& g) {
  j = nlohmann::json{{"x_axis", g.x}, {"y_axis", g.y}, {"checks", g.checks},
                     {"cells", g.cells}};
}

inline void to_json(nlohmann::json& j, const PersonalizationReport& r) {
  j = nlohmann::json{{"a_broadcast", r.a_broadcast},
                     {"a_personalized", r.a_personalized},
                     {"direction", r.direction},
                     {"conditions", r.conditions},
                     {"broadcast_set", r.broadcast_set},
                     {"personalized_set", r.personalized_set}};
}

inline void to_json(nlohmann::json& j, const SweepRow& r) {
  j = nlohmann::json{{"lambda", r.lambda}};
  if (r.evaluable_broadcast) j["a_broadcast"] = r.a_broadcast;
  if (r.evaluable_personalized) j["a_personalized"] = r.a_personalized;
  if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
}

inline void to_json(nlohmann::json& j, const SweepReport& r) {
  j = nlohmann::json{{"rows", r.rows},
                     {"monotone_broadcast", r.monotone_broadcast},
                     {"monotone_personalized", r.monotone_personalized}};
}

inline void to_json(nlohmann::json& j, const ValidationClause& c) {
  j = nlohmann::json{{"name", c.name}, {"pass", c.pass}};
  if (!c.witness.empty()) j["witness"] = c.witness;
}

inline void to_json(nlohmann::json& j, const ValidationReport& r) {
  j = nlohmann::json{{"clauses", r.clauses}, {"warnings", r.warnings},
                     {"all_pass", r.all_pass()}};
}

}  // namespace nari
