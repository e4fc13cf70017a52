#pragma once

// JSON forms of the domain types: policies, instances, datasets, regions,
// estimator reports, design problems/results and experiment configs.
// Unknown keys are rejected so typos do not pass silently.

#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "sepec/core.hpp"
#include "sepec/designers.hpp"
#include "sepec/estimators.hpp"
#include "sepec/error.hpp"
#include "sepec/linalg.hpp"
#include "sepec/problem.hpp"
#include "sepec/regions.hpp"
#include "sepec/sim.hpp"

namespace sepec::io {

using Json = nlohmann::json;

// Parses JSON text; syntax errors become InvalidArgument carrying line and column.
inline Json parse_json(const std::string& text, const std::string& source = "input") {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    if (const auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    throw InvalidArgument("malformed JSON in " + source + " at line " + std::to_string(line) + ", column " +
                          std::to_string(col) + ": " + msg);
  }
}

namespace detail {

inline void require_keys(const Json& j, const std::set<std::string>& allowed, const std::string& what) {
  if (!j.is_object()) throw InvalidArgument(what + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw InvalidArgument(what + ": unknown key '" + it.key() + "'");
}

inline const Json& need(const Json& j, const std::string& key, const std::string& what) {
  if (!j.contains(key)) throw InvalidArgument(what + ": missing key '" + key + "'");
  return j.at(key);
}

inline double real(const Json& j, const std::string& what) {
  if (!j.is_number()) throw InvalidArgument(what + ": expected a number");
  return j.get<double>();
}

inline std::size_t count(const Json& j, const std::string& what) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw InvalidArgument(what + ": expected a non-negative integer");
  return j.get<std::size_t>();
}

inline Vec vec(const Json& j, const std::string& what) {
  if (!j.is_array()) throw InvalidArgument(what + ": expected an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = real(j[i], what);
  return v;
}

inline Mat mat(const Json& j, const std::string& what) {
  if (!j.is_array()) throw InvalidArgument(what + ": expected an array of rows");
  if (j.empty()) return Mat(0, 0);
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Mat m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Vec row = vec(j[r], what);
    if (static_cast<std::size_t>(row.size()) != cols) throw InvalidArgument(what + ": ragged rows");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

// A policy is either a vector (one row) or an array of vectors (one per context).
inline std::vector<Vec> policy_rows(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw InvalidArgument(what + ": expected a non-empty array");
  if (j[0].is_array()) {
    std::vector<Vec> rows;
    for (const auto& r : j) rows.push_back(vec(r, what));
    return rows;
  }
  return {vec(j, what)};
}

inline Json to_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Json to_json(const Mat& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(to_json(Vec(m.row(r).transpose())));
  return a;
}

// JSON has no NaN or infinity; such values are written as null.
inline Json real_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace detail

// --- policies, instances and datasets

inline Json policy_to_json(const PolicyVector& p) { return Json{{"weights", detail::to_json(p.weights())}}; }

inline PolicyVector policy_from_json(const Json& j) {
  detail::require_keys(j, {"weights"}, "policy");
  return PolicyVector(detail::vec(detail::need(j, "weights", "policy"), "policy.weights"));
}

inline Json contextual_policy_to_json(const ContextualPolicy& p) {
  Json rows = Json::array();
  for (const auto& r : p.per_context()) rows.push_back(detail::to_json(r.weights()));
  return Json{{"per_context", rows}, {"context_probs", detail::to_json(p.context_probs())}};
}

inline ContextualPolicy contextual_policy_from_json(const Json& j) {
  const std::string what = "contextual policy";
  detail::require_keys(j, {"per_context", "context_probs"}, what);
  std::vector<PolicyVector> rows;
  for (const auto& r : detail::need(j, "per_context", what)) rows.emplace_back(detail::vec(r, "per_context"));
  return ContextualPolicy(std::move(rows), detail::vec(detail::need(j, "context_probs", what), "context_probs"));
}

inline Json mab_instance_to_json(const MabInstance& m) {
  return Json{{"means", detail::to_json(m.means())},
              {"noise_sds", detail::to_json(m.noise_sds())},
              {"noise_cap", m.noise_cap()},
              {"noise_kind", m.noise_kind() == NoiseKind::Bernoulli ? "bernoulli" : "gaussian"}};
}

inline MabInstance mab_instance_from_json(const Json& j) {
  const std::string what = "MAB instance";
  detail::require_keys(j, {"means", "noise_sds", "noise_cap", "noise_kind"}, what);
  NoiseKind kind = NoiseKind::Gaussian;
  if (j.contains("noise_kind")) {
    const auto k = j["noise_kind"].get<std::string>();
    if (k == "bernoulli") kind = NoiseKind::Bernoulli;
    else if (k != "gaussian") throw InvalidArgument(what + ": noise_kind must be 'gaussian' or 'bernoulli'");
  }
  return MabInstance(detail::vec(detail::need(j, "means", what), "means"),
                     detail::vec(detail::need(j, "noise_sds", what), "noise_sds"),
                     detail::real(detail::need(j, "noise_cap", what), "noise_cap"), kind);
}

inline Json cmab_instance_to_json(const CmabInstance& c) {
  Json rows = Json::array();
  for (const auto& m : c.per_context()) rows.push_back(mab_instance_to_json(m));
  return Json{{"per_context", rows}, {"context_probs", detail::to_json(c.context_probs())}};
}

inline CmabInstance cmab_instance_from_json(const Json& j) {
  const std::string what = "CMAB instance";
  detail::require_keys(j, {"per_context", "context_probs"}, what);
  std::vector<MabInstance> rows;
  for (const auto& r : detail::need(j, "per_context", what)) rows.push_back(mab_instance_from_json(r));
  return CmabInstance(std::move(rows), detail::vec(detail::need(j, "context_probs", what), "context_probs"));
}

inline Json linear_instance_to_json(const LinearInstance& l) {
  return Json{{"theta_star", detail::to_json(l.theta_star())},
              {"arm_features", detail::to_json(l.arm_features())},
              {"noise_sd", l.noise_sd()}};
}

inline LinearInstance linear_instance_from_json(const Json& j) {
  const std::string what = "linear instance";
  detail::require_keys(j, {"theta_star", "arm_features", "noise_sd"}, what);
  return LinearInstance(detail::vec(detail::need(j, "theta_star", what), "theta_star"),
                        detail::mat(detail::need(j, "arm_features", what), "arm_features"),
                        detail::real(detail::need(j, "noise_sd", what), "noise_sd"));
}

inline Json dataset_to_json(const BanditDataset& ds) {
  Json recs = Json::array();
  for (const auto& r : ds.records) {
    Json rec{{"action", r.action}, {"reward", r.reward}};
    rec["context"] = r.context ? Json(*r.context) : Json(nullptr);
    recs.push_back(rec);
  }
  Json logger = std::visit(
      [](const auto& p) -> Json {
        if constexpr (std::is_same_v<std::decay_t<decltype(p)>, PolicyVector>)
          return policy_to_json(p);
        else
          return contextual_policy_to_json(p);
      },
      ds.logging_policy);
  return Json{{"records", recs}, {"logging_policy", logger}, {"horizon", ds.horizon}};
}

inline BanditDataset dataset_from_json(const Json& j) {
  const std::string what = "dataset";
  detail::require_keys(j, {"records", "logging_policy", "horizon"}, what);
  const Json& lj = detail::need(j, "logging_policy", what);
  LoggingPolicy logger = lj.contains("per_context") ? LoggingPolicy(contextual_policy_from_json(lj))
                                                    : LoggingPolicy(policy_from_json(lj));
  std::vector<Record> recs;
  for (const auto& r : detail::need(j, "records", what)) {
    detail::require_keys(r, {"context", "action", "reward"}, "record");
    Record rec;
    if (r.contains("context") && !r["context"].is_null()) rec.context = detail::count(r["context"], "context");
    rec.action = detail::count(detail::need(r, "action", "record"), "action");
    rec.reward = detail::real(detail::need(r, "reward", "record"), "reward");
    recs.push_back(rec);
  }
  const std::size_t horizon = j.contains("horizon") ? detail::count(j["horizon"], "horizon") : recs.size();
  BanditDataset ds(std::move(recs), std::move(logger), horizon);
  ds.validate();
  return ds;
}

// --- estimator outputs

inline Json estimate_to_json(const EstimateReport& r) {
  Json j{{"value", detail::real_or_null(r.value)}, {"n", r.n}, {"singular", r.singular}};
  j["plug_in_sd"] = r.plug_in_sd ? detail::real_or_null(*r.plug_in_sd) : Json(nullptr);
  return j;
}

inline EstimateReport estimate_from_json(const Json& j) {
  detail::require_keys(j, {"value", "plug_in_sd", "n", "singular"}, "estimate");
  EstimateReport r;
  r.value = detail::real(detail::need(j, "value", "estimate"), "value");
  if (j.contains("plug_in_sd") && !j["plug_in_sd"].is_null()) r.plug_in_sd = detail::real(j["plug_in_sd"], "plug_in_sd");
  if (j.contains("n")) r.n = detail::count(j["n"], "n");
  if (j.contains("singular")) r.singular = j["singular"].get<bool>();
  return r;
}

inline Json test_outcome_to_json(const TestOutcome& t) {
  return Json{{"z_stat", detail::real_or_null(t.z_stat)}, {"reject", t.reject}, {"alpha", t.alpha}};
}

inline TestOutcome test_outcome_from_json(const Json& j) {
  detail::require_keys(j, {"z_stat", "reject", "alpha"}, "test outcome");
  return TestOutcome{detail::real(detail::need(j, "z_stat", "test outcome"), "z_stat"),
                     detail::need(j, "reject", "test outcome").get<bool>(),
                     detail::real(detail::need(j, "alpha", "test outcome"), "alpha")};
}

// --- regions

inline Json region_to_json(const Region& r) {
  if (const auto* b = std::get_if<BoxRegion>(&r))
    return Json{{"type", "box"}, {"lower", detail::to_json(b->lower())}, {"upper", detail::to_json(b->upper())}};
  if (const auto* e = std::get_if<EllipsoidRegion>(&r))
    return Json{{"type", "ellipsoid"},
                {"center", detail::to_json(e->center())},
                {"shape", detail::to_json(e->shape())},
                {"radius", e->radius()}};
  return Json(nullptr);
}

inline Region region_from_json(const Json& j) {
  if (j.is_null()) return std::monostate{};
  const std::string what = "region";
  const std::string type = detail::need(j, "type", what).get<std::string>();
  if (type == "none") return std::monostate{};
  if (type == "box") {
    detail::require_keys(j, {"type", "lower", "upper"}, what);
    return BoxRegion(detail::vec(detail::need(j, "lower", what), "region.lower"),
                     detail::vec(detail::need(j, "upper", what), "region.upper"));
  }
  if (type == "ellipsoid") {
    detail::require_keys(j, {"type", "center", "shape", "radius"}, what);
    return EllipsoidRegion(detail::vec(detail::need(j, "center", what), "region.center"),
                           detail::mat(detail::need(j, "shape", what), "region.shape"),
                           detail::real(detail::need(j, "radius", what), "region.radius"));
  }
  throw InvalidArgument("region: unknown type '" + type + "' (expected none, box or ellipsoid)");
}

// --- solver configuration

inline Json design_config_to_json(const DesignConfig& c) {
  Json j{{"max_cuts", c.cutting_plane.max_cuts},
         {"feas_tol", c.cutting_plane.feas_tol},
         {"repair_tol", c.cutting_plane.repair_tol},
         {"max_iter", c.frank_wolfe.max_iter},
         {"away_steps", c.frank_wolfe.away_steps},
         {"pairwise", c.frank_wolfe.pairwise},
         {"seed_support_cut", c.seed_support_cut}};
  j["gap_tol"] = c.frank_wolfe.gap_tol ? Json(*c.frank_wolfe.gap_tol) : Json(nullptr);
  return j;
}

inline DesignConfig design_config_from_json(const Json& j) {
  DesignConfig c;
  if (j.is_null()) return c;
  const std::string what = "solver config";
  detail::require_keys(
      j, {"max_cuts", "feas_tol", "repair_tol", "max_iter", "gap_tol", "away_steps", "pairwise", "seed_support_cut"},
      what);
  if (j.contains("max_cuts")) c.cutting_plane.max_cuts = detail::count(j["max_cuts"], "max_cuts");
  if (j.contains("feas_tol")) c.cutting_plane.feas_tol = detail::real(j["feas_tol"], "feas_tol");
  if (j.contains("repair_tol")) c.cutting_plane.repair_tol = detail::real(j["repair_tol"], "repair_tol");
  if (j.contains("max_iter")) c.frank_wolfe.max_iter = detail::count(j["max_iter"], "max_iter");
  if (j.contains("gap_tol") && !j["gap_tol"].is_null()) c.frank_wolfe.gap_tol = detail::real(j["gap_tol"], "gap_tol");
  if (j.contains("away_steps")) c.frank_wolfe.away_steps = j["away_steps"].get<bool>();
  if (j.contains("pairwise")) c.frank_wolfe.pairwise = j["pairwise"].get<bool>();
  if (j.contains("seed_support_cut")) c.seed_support_cut = j["seed_support_cut"].get<bool>();
  return c;
}

// --- design problems and results

inline DesignProblem design_problem_from_json(const Json& j) {
  const std::string what = "design problem";
  detail::require_keys(j,
                       {"setup", "pi0", "pi1", "context_probs", "eps", "region", "weights", "moments",
                        "arm_features", "gram0", "horizon", "estimator", "solver"},
                       what);
  DesignProblem p;
  p.setup = parse_setup(detail::need(j, "setup", what).get<std::string>());
  p.pi0 = detail::policy_rows(detail::need(j, "pi0", what), "pi0");
  p.pi1 = detail::policy_rows(detail::need(j, "pi1", what), "pi1");
  p.eps = detail::real(detail::need(j, "eps", what), "eps");
  if (j.contains("context_probs")) p.context_probs = detail::vec(j["context_probs"], "context_probs");
  if (j.contains("region")) p.region = region_from_json(j["region"]);
  if (j.contains("weights")) p.weights = parse_weight_mode(j["weights"].get<std::string>());
  if (j.contains("moments") && !j["moments"].is_null()) p.moments = detail::vec(j["moments"], "moments");
  if (j.contains("arm_features")) p.arm_features = detail::mat(j["arm_features"], "arm_features");
  if (j.contains("gram0")) p.gram0 = detail::mat(j["gram0"], "gram0");
  if (j.contains("horizon")) p.horizon = detail::real(j["horizon"], "horizon");
  if (j.contains("estimator")) {
    const std::string e = j["estimator"].get<std::string>();
    if (e != "dm" && e != "pi") throw InvalidArgument("design problem: estimator must be 'dm' or 'pi'");
    p.pseudo_inverse = e == "pi";
  }
  if (j.contains("solver")) p.config = design_config_from_json(j["solver"]);
  if (p.setup != Setup::Cmab && (p.pi0.size() != 1 || p.pi1.size() != 1))
    throw InvalidArgument("design problem: " + to_string(p.setup) + " policies must be single vectors");
  return p;
}

inline Json design_problem_to_json(const DesignProblem& p) {
  auto rows = [](const std::vector<Vec>& r) {
    if (r.size() == 1) return detail::to_json(r.front());
    Json a = Json::array();
    for (const auto& v : r) a.push_back(detail::to_json(v));
    return a;
  };
  Json j{{"setup", to_string(p.setup)}, {"pi0", rows(p.pi0)}, {"pi1", rows(p.pi1)}, {"eps", p.eps},
         {"weights", to_string(p.weights)}};
  if (p.setup == Setup::Cmab && p.context_probs.size()) j["context_probs"] = detail::to_json(p.context_probs);
  if (!std::holds_alternative<std::monostate>(p.region)) j["region"] = region_to_json(p.region);
  if (p.moments) j["moments"] = detail::to_json(*p.moments);
  if (p.setup == Setup::Lb) {
    j["arm_features"] = detail::to_json(p.arm_features);
    if (p.gram0.size()) j["gram0"] = detail::to_json(p.gram0);
    j["horizon"] = p.horizon;
    j["estimator"] = p.pseudo_inverse ? "pi" : "dm";
  }
  j["solver"] = design_config_to_json(p.config);
  return j;
}

inline Json diagnostics_to_json(const SolveDiagnostics& d) {
  return Json{{"iterations", d.iterations},
              {"objective", detail::real_or_null(d.objective)},
              {"gap", detail::real_or_null(d.gap)},
              {"residual", detail::real_or_null(d.residual)},
              {"cuts", d.cuts},
              {"wall_seconds", d.wall_seconds},
              {"repaired", d.repaired}};
}

inline SolveDiagnostics diagnostics_from_json(const Json& j) {
  SolveDiagnostics d;
  auto num = [&](const char* k) {
    return j.contains(k) && !j[k].is_null() ? j[k].get<double>() : std::numeric_limits<double>::quiet_NaN();
  };
  if (j.contains("iterations")) d.iterations = j["iterations"].get<std::size_t>();
  d.objective = num("objective");
  d.gap = num("gap");
  d.residual = num("residual");
  if (j.contains("cuts")) d.cuts = j["cuts"].get<std::size_t>();
  if (j.contains("wall_seconds")) d.wall_seconds = j["wall_seconds"].get<double>();
  if (j.contains("repaired")) d.repaired = j["repaired"].get<bool>();
  return d;
}

// Contextual results are written as one row per context.
inline Json design_result_to_json(const DesignResult& r, bool include_diagnostics = true) {
  Json policy;
  if (r.contexts > 0) {
    policy = Json::array();
    const auto k = r.policy.size() / static_cast<Eigen::Index>(r.contexts);
    for (std::size_t x = 0; x < r.contexts; ++x)
      policy.push_back(detail::to_json(Vec(r.policy.segment(static_cast<Eigen::Index>(x) * k, k))));
  } else {
    policy = detail::to_json(r.policy);
  }
  Json j{{"policy", policy},
         {"objective", detail::real_or_null(r.objective)},
         {"certificate", detail::real_or_null(r.certificate)},
         {"partial", r.partial}};
  if (!r.note.empty()) j["note"] = r.note;
  if (include_diagnostics) j["diagnostics"] = diagnostics_to_json(r.diagnostics);
  return j;
}

inline DesignResult design_result_from_json(const Json& j) {
  DesignResult r;
  const auto rows = detail::policy_rows(detail::need(j, "policy", "design result"), "policy");
  if (j["policy"][0].is_array()) {
    r.contexts = rows.size();
    Eigen::Index n = 0;
    for (const auto& v : rows) n += v.size();
    r.policy.resize(n);
    Eigen::Index off = 0;
    for (const auto& v : rows) {
      r.policy.segment(off, v.size()) = v;
      off += v.size();
    }
  } else {
    r.policy = rows.front();
  }
  auto num = [&](const char* k) {
    return j.contains(k) && !j[k].is_null() ? j[k].get<double>() : std::numeric_limits<double>::quiet_NaN();
  };
  r.objective = num("objective");
  r.certificate = num("certificate");
  if (j.contains("partial")) r.partial = j["partial"].get<bool>();
  if (j.contains("note")) r.note = j["note"].get<std::string>();
  if (j.contains("diagnostics")) r.diagnostics = diagnostics_from_json(j["diagnostics"]);
  return r;
}

// --- experiment configuration

inline Json experiment_config_to_json(const sim::ExperimentConfig& c) {
  return Json{{"setup", to_string(c.setup)},
              {"K", c.K},
              {"T", c.T},
              {"d", c.d},
              {"contexts", c.contexts},
              {"logged_size", c.logged_size},
              {"logging_policy", c.logging_policy},
              {"eps_grid", c.eps_grid},
              {"delta", c.delta},
              {"alpha", c.alpha},
              {"sigma", c.sigma},
              {"prior_sd", c.prior_sd},
              {"prior_offset", c.prior_offset},
              {"num_runs", c.num_runs},
              {"seed", c.seed},
              {"methods", c.methods},
              {"output", c.output},
              {"weights", to_string(c.weights)},
              {"solver", design_config_to_json(c.design)}};
}

inline sim::ExperimentConfig experiment_config_from_json(const Json& j) {
  const std::string what = "experiment config";
  detail::require_keys(j,
                       {"setup", "K", "T", "d", "contexts", "logged_size", "logging_policy", "eps_grid", "delta",
                        "alpha", "sigma", "prior_sd", "prior_offset", "num_runs", "seed", "methods", "output",
                        "weights", "solver"},
                       what);
  sim::ExperimentConfig c;
  c.setup = parse_setup(detail::need(j, "setup", what).get<std::string>());
  if (c.setup == Setup::Lb) {
    // Linear-bandit defaults.
    c.K = 100;
    c.T = 200;
  }
  if (j.contains("K")) c.K = detail::count(j["K"], "K");
  if (j.contains("T")) c.T = detail::count(j["T"], "T");
  if (j.contains("d")) c.d = detail::count(j["d"], "d");
  if (j.contains("contexts")) c.contexts = detail::count(j["contexts"], "contexts");
  if (j.contains("logged_size")) c.logged_size = detail::count(j["logged_size"], "logged_size");
  if (j.contains("logging_policy")) c.logging_policy = j["logging_policy"].get<std::string>();
  if (j.contains("eps_grid")) {
    c.eps_grid.clear();
    for (const auto& e : j["eps_grid"]) c.eps_grid.push_back(detail::real(e, "eps_grid"));
  }
  if (j.contains("delta")) c.delta = detail::real(j["delta"], "delta");
  if (j.contains("alpha")) c.alpha = detail::real(j["alpha"], "alpha");
  if (j.contains("sigma")) c.sigma = detail::real(j["sigma"], "sigma");
  if (j.contains("prior_sd")) c.prior_sd = detail::real(j["prior_sd"], "prior_sd");
  if (j.contains("prior_offset")) c.prior_offset = detail::real(j["prior_offset"], "prior_offset");
  if (j.contains("num_runs")) c.num_runs = detail::count(j["num_runs"], "num_runs");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0))
      throw InvalidArgument("seed: expected a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("methods")) c.methods = j["methods"].get<std::vector<std::string>>();
  if (j.contains("output")) c.output = j["output"].get<std::string>();
  if (j.contains("weights")) c.weights = parse_weight_mode(j["weights"].get<std::string>());
  if (j.contains("solver")) c.design = design_config_from_json(j["solver"]);
  c.validate();
  return c;
}

}  // namespace sepec::io
