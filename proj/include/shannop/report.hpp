#pragma once

#include <cstdio>
#include <string>

#include <json.hpp>

#include "shannop/solver.hpp"

namespace shannop {

inline nlohmann::json report_json(const SolveReport& r) {
  nlohmann::json j;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["fitted_rate"] = r.fitted_rate;
  j["theoretical_rate"] = r.theoretical_rate;
  j["residuals"] = r.residual_history;
  if (!r.divergence_history.empty()) j["divergence_residuals"] = r.divergence_history;
  return j;
}

inline SolveReport report_from_json(const nlohmann::json& j) {
  SolveReport r;
  r.iterations = j.at("iterations").get<int>();
  r.converged = j.at("converged").get<bool>();
  r.fitted_rate = j.at("fitted_rate").get<double>();
  r.theoretical_rate = j.at("theoretical_rate").get<double>();
  r.residual_history = j.at("residuals").get<std::vector<double>>();
  if (j.contains("divergence_residuals"))
    r.divergence_history = j.at("divergence_residuals").get<std::vector<double>>();
  return r;
}

/// `iter,residual,ratio`; the ratio column is empty on the first row.
inline std::string report_csv(const SolveReport& r) {
  std::string out = "iter,residual,ratio\n";
  char buf[128];
  for (std::size_t i = 0; i < r.residual_history.size(); ++i) {
    if (i == 0) {
      std::snprintf(buf, sizeof buf, "0,%.17g,\n", r.residual_history[0]);
    } else {
      const double prev = r.residual_history[i - 1];
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, r.residual_history[i],
                    prev > 0.0 ? r.residual_history[i] / prev : 0.0);
    }
    out += buf;
  }
  return out;
}

}  // namespace shannop
