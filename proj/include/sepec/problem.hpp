#pragma once

// A self-contained design problem (the CLI's `design` payload) and a
// dispatcher onto the designers.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sepec/core.hpp"
#include "sepec/designers.hpp"
#include "sepec/error.hpp"
#include "sepec/linalg.hpp"
#include "sepec/regions.hpp"

namespace sepec {

enum class Setup { Mab, Cmab, Lb };

inline std::string to_string(Setup s) {
  switch (s) {
    case Setup::Mab: return "mab";
    case Setup::Cmab: return "cmab";
    case Setup::Lb: return "lb";
  }
  return "mab";
}

inline Setup parse_setup(const std::string& s) {
  if (s == "mab") return Setup::Mab;
  if (s == "cmab") return Setup::Cmab;
  if (s == "lb") return Setup::Lb;
  throw InvalidArgument("unknown setup '" + s + "' (expected mab, cmab or lb)");
}

inline std::string to_string(WeightMode m) {
  switch (m) {
    case WeightMode::Unit: return "unit";
    case WeightMode::Posterior: return "posterior";
    case WeightMode::DoublyRobust: return "dr";
  }
  return "unit";
}

inline WeightMode parse_weight_mode(const std::string& s) {
  if (s == "unit") return WeightMode::Unit;
  if (s == "posterior") return WeightMode::Posterior;
  if (s == "dr") return WeightMode::DoublyRobust;
  throw InvalidArgument("unknown weights mode '" + s + "' (expected unit, posterior or dr)");
}

using Region = std::variant<std::monostate, BoxRegion, EllipsoidRegion>;

struct DesignProblem {
  Setup setup = Setup::Mab;
  // MAB and LB: one row. CMAB: one row per context.
  std::vector<Vec> pi0;
  std::vector<Vec> pi1;
  Vec context_probs;  // CMAB only; defaults to uniform
  double eps = 0.1;
  Region region;
  WeightMode weights = WeightMode::Unit;
  std::optional<Vec> moments;  // E sigma^2 + E r^2 per (stacked) arm, posterior mode
  // LB only.
  Mat arm_features;
  Mat gram0;
  double horizon = 0.0;
  bool pseudo_inverse = false;  // design for the PI estimator instead of DM
  DesignConfig config;
};

namespace detail {

inline ContextualPolicy contextual_from(const std::vector<Vec>& rows, const Vec& probs) {
  std::vector<PolicyVector> out;
  for (const auto& r : rows) out.emplace_back(r);
  return ContextualPolicy(std::move(out), probs);
}

inline const Vec& single_row(const std::vector<Vec>& rows, const char* what) {
  if (rows.size() != 1) throw InvalidArgument(std::string(what) + ": expected a single policy vector");
  return rows.front();
}

}  // namespace detail

// Worst-case designs when no region is given; region designs otherwise.
inline DesignResult solve(const DesignProblem& p) {
  if (p.pi0.empty() || p.pi1.empty()) throw InvalidArgument("design problem: pi0 and pi1 are required");
  switch (p.setup) {
    case Setup::Mab: {
      const PolicyVector pi0(detail::single_row(p.pi0, "pi0")), pi1(detail::single_row(p.pi1, "pi1"));
      if (std::holds_alternative<EllipsoidRegion>(p.region))
        throw InvalidArgument("design problem: MAB takes a box region");
      if (const auto* box = std::get_if<BoxRegion>(&p.region))
        return design_mab_with_region(pi0, pi1, p.eps, *box, p.weights, p.moments, p.config);
      return design_mab_worstcase(pi0, pi1, p.eps, p.weights, p.moments);
    }
    case Setup::Cmab: {
      if (p.pi0.size() != p.pi1.size()) throw DimensionError("design problem contexts", p.pi0.size(), p.pi1.size());
      const Vec probs = p.context_probs.size() ? p.context_probs
                                               : Vec::Constant(static_cast<Eigen::Index>(p.pi0.size()),
                                                               1.0 / static_cast<double>(p.pi0.size()));
      const auto pi0 = detail::contextual_from(p.pi0, probs), pi1 = detail::contextual_from(p.pi1, probs);
      if (std::holds_alternative<EllipsoidRegion>(p.region))
        throw InvalidArgument("design problem: CMAB takes a box region");
      if (const auto* box = std::get_if<BoxRegion>(&p.region))
        return design_cmab_with_region(pi0, pi1, p.eps, *box, p.weights, p.moments, p.config);
      return design_cmab_worstcase(pi0, pi1, p.eps, p.weights, p.moments);
    }
    case Setup::Lb: {
      const PolicyVector pi0(detail::single_row(p.pi0, "pi0")), pi1(detail::single_row(p.pi1, "pi1"));
      const auto* ellipsoid = std::get_if<EllipsoidRegion>(&p.region);
      if (!ellipsoid) throw InvalidArgument("design problem: LB requires an ellipsoid region");
      if (p.pseudo_inverse) return design_lb_pi(pi1, p.eps, p.arm_features, *ellipsoid, pi0, p.config);
      const auto d = p.arm_features.cols();
      const Mat g0 = p.gram0.size() ? p.gram0 : Mat::Zero(d, d);
      return design_lb(pi0, pi1, p.eps, p.arm_features, g0, p.horizon, *ellipsoid, p.config);
    }
  }
  throw InvalidArgument("design problem: unknown setup");
}

}  // namespace sepec
