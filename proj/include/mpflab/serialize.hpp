// Copyright 2026 The mpflab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mpflab/bch.hpp"
#include "mpflab/commutator_metrics.hpp"
#include "mpflab/error.hpp"
#include "mpflab/experiments.hpp"
#include "mpflab/hamiltonian.hpp"
#include "mpflab/mpf.hpp"

namespace mpflab {

using Json = nlohmann::ordered_json;

namespace detail {

inline void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed,
                                const std::string& what) {
  require(j.is_object(), ErrorKind::InvalidArgument, what + " must be a JSON object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    require(keys.count(key) != 0, ErrorKind::InvalidArgument,
            "unknown key '" + key + "' in " + what);
  }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument,
                std::string("bad value for '") + key + "': " + e.what());
  }
}

/// NaN and infinities become null.
inline Json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

inline double number_from(const Json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

}  // namespace detail

inline std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::heisenberg1d: return "heisenberg1d";
    case ModelKind::power_law: return "power_law";
    case ModelKind::custom: return "custom";
  }
  return "";
}

inline ModelKind model_kind_from(const std::string& s) {
  if (s == "heisenberg1d") return ModelKind::heisenberg1d;
  if (s == "power_law") return ModelKind::power_law;
  if (s == "custom") return ModelKind::custom;
  throw Error(ErrorKind::InvalidArgument, "unknown model '" + s + "'");
}

inline Json to_json(const ModelDescriptor& d) {
  Json j;
  j["model"] = to_string(d.model);
  j["n"] = d.n;
  j["periodic"] = d.periodic;
  j["d"] = d.d;
  j["alpha"] = d.alpha;
  j["seed"] = d.seed;
  Json terms = Json::array();
  for (const auto& t : d.terms) {
    Json paulis = Json::object();
    for (const auto& [site, letter] : t.paulis) {
      paulis[std::to_string(site)] = std::string(1, letter);
    }
    terms.push_back({{"coefficient", t.coefficient}, {"paulis", paulis}, {"group", t.group}});
  }
  j["terms"] = terms;
  return j;
}

inline ModelDescriptor model_from_json(const Json& j) {
  detail::reject_unknown_keys(j, {"model", "n", "periodic", "d", "alpha", "seed", "terms"},
                              "model");
  ModelDescriptor d;
  d.model = model_kind_from(detail::get_or<std::string>(j, "model", "heisenberg1d"));
  d.n = detail::get_or(j, "n", d.n);
  d.periodic = detail::get_or(j, "periodic", d.periodic);
  d.d = detail::get_or(j, "d", d.d);
  d.alpha = detail::get_or(j, "alpha", d.alpha);
  d.seed = detail::get_or<std::uint64_t>(j, "seed", d.seed);
  if (j.contains("terms")) {
    require(j["terms"].is_array(), ErrorKind::InvalidArgument, "terms must be an array");
    for (const auto& t : j["terms"]) {
      detail::reject_unknown_keys(t, {"coefficient", "paulis", "group"}, "term");
      PauliTermSpec spec;
      spec.coefficient = detail::get_or(t, "coefficient", 1.0);
      if (t.contains("paulis")) {
        require(t["paulis"].is_object(), ErrorKind::InvalidArgument,
                "paulis must map site to letter");
        for (const auto& [site, letter] : t["paulis"].items()) {
          const auto s = letter.get<std::string>();
          require(s.size() == 1, ErrorKind::InvalidArgument, "Pauli letter must be X, Y or Z");
          int index = 0;
          try {
            index = std::stoi(site);
          } catch (...) {
            throw Error(ErrorKind::InvalidArgument, "bad site '" + site + "'");
          }
          spec.paulis[index] = s[0];
        }
      }
      spec.group = detail::get_or(t, "group", std::vector<int>{});
      d.terms.push_back(std::move(spec));
    }
  }
  return d;
}

inline Json to_json(const MpfScheme& s) {
  return {{"base_order", s.base_order},  {"m", s.m},
          {"powers", s.powers},          {"coefficients", s.coefficients},
          {"a_norm", s.a_norm},          {"k_norm", s.k_norm}};
}

inline MpfScheme scheme_from_json(const Json& j) {
  detail::reject_unknown_keys(
      j, {"base_order", "m", "powers", "coefficients", "a_norm", "k_norm", "residual"},
      "scheme");
  MpfScheme s;
  s.base_order = detail::get_or(j, "base_order", 2);
  s.m = detail::get_or(j, "m", 1);
  s.powers = detail::get_or(j, "powers", std::vector<std::int64_t>{});
  s.coefficients = detail::get_or(j, "coefficients", std::vector<double>{});
  s.a_norm = detail::get_or(j, "a_norm", 0.0);
  s.k_norm = detail::get_or(j, "k_norm", 0.0);
  require(s.powers.size() == s.coefficients.size(), ErrorKind::SizeMismatch,
          "powers and coefficients differ in length");
  return s;
}

inline Json to_json(const CommutatorTable& t) {
  Json alpha = Json::object();
  std::vector<std::string> modes;
  for (int j = 1; j <= t.j_cap(); ++j) {
    alpha[std::to_string(j)] = detail::number(t.alpha(j));
  }
  Json out;
  out["gamma"] = t.gamma();
  out["mode"] = std::string(to_string(t.mode()));
  out["j_cap"] = t.j_cap();
  out["alpha"] = alpha;
  Json capped = Json::array();
  for (int j = 1; j <= t.j_cap(); ++j) {
    if (t.entry(j).mode == AlphaMode::capped) capped.push_back(j);
  }
  if (!capped.empty()) out["capped_depths"] = capped;
  return out;
}

inline AlphaMode alpha_mode_from(const std::string& s) {
  if (s == "exact") return AlphaMode::exact;
  if (s == "capped") return AlphaMode::capped;
  if (s == "analytic") return AlphaMode::analytic;
  throw Error(ErrorKind::InvalidArgument, "unknown alpha mode '" + s + "'");
}

inline CommutatorTable table_from_json(const Json& j) {
  detail::reject_unknown_keys(j, {"gamma", "mode", "j_cap", "alpha", "capped_depths"},
                              "commutator table");
  const auto gamma = detail::get_or<std::size_t>(j, "gamma", 0);
  const auto mode = alpha_mode_from(detail::get_or<std::string>(j, "mode", "exact"));
  require(j.contains("alpha") && j["alpha"].is_object(), ErrorKind::InvalidArgument,
          "alpha must map depth to value");
  std::map<int, double> by_depth;
  for (const auto& [key, value] : j["alpha"].items()) {
    by_depth[std::stoi(key)] = value.get<double>();
  }
  const int j_cap = detail::get_or(j, "j_cap", static_cast<int>(by_depth.size()));
  std::set<int> capped;
  for (int d : detail::get_or(j, "capped_depths", std::vector<int>{})) capped.insert(d);
  std::vector<AlphaValue> values;
  for (int d = 1; d <= j_cap; ++d) {
    require(by_depth.count(d) != 0, ErrorKind::MissingAlpha,
            "alpha missing at depth " + std::to_string(d));
    const double a = by_depth[d];
    require(a >= 0.0, ErrorKind::InvalidArgument, "alpha must be >= 0");
    AlphaMode m = mode == AlphaMode::capped && !capped.empty()
                      ? (capped.count(d) ? AlphaMode::capped : AlphaMode::exact)
                      : mode;
    values.push_back({a > 0.0 ? std::log(a) : kNegInf, m});
  }
  return CommutatorTable(gamma, std::move(values));
}

inline Json to_json(const MuReport& r) {
  return {{"m", r.m},
          {"variant", r.variant.name()},
          {"j_cap", r.j_cap},
          {"mu_m", detail::number(r.mu_m)},
          {"argmax_j", r.argmax_j},
          {"argmax_l", r.argmax_l},
          {"argmax_partition", r.argmax_partition},
          {"mu_upper", detail::number(r.mu_upper)},
          {"tail_flag", r.tail_flag}};
}

inline Json to_json(const BchTermReport& r) {
  return {{"k", r.k},
          {"norm", r.norm},
          {"bound", detail::number(r.bound)},
          {"structural_zero", r.structural_zero},
          {"converged_premise", r.converged_premise},
          {"bound_holds", r.norm <= r.bound * (1 + 1e-12) + 1e-9}};
}

inline Json to_json(const ConvergenceStudy& s) {
  return {{"evolver", s.evolver},
          {"dt_grid", s.dt_grid},
          {"errors", s.errors},
          {"fitted_slope", detail::number(s.fitted_slope)},
          {"r_squared", detail::number(s.r_squared)},
          {"points_used", s.points_used},
          {"exact", s.exact}};
}

inline Json to_json(const ScalingResult& s) {
  return {{"m", s.m},
          {"n_values", s.n_values},
          {"query_counts", s.query_counts},
          {"fitted_exponent", detail::number(s.fitted_exponent)},
          {"theory_exponent", s.theory_exponent}};
}

inline ScalingResult scaling_from_json(const Json& j) {
  detail::reject_unknown_keys(
      j, {"m", "n_values", "query_counts", "fitted_exponent", "theory_exponent"},
      "scaling result");
  ScalingResult s;
  s.m = detail::get_or(j, "m", 0);
  s.n_values = detail::get_or(j, "n_values", std::vector<int>{});
  s.query_counts = detail::get_or(j, "query_counts", std::vector<double>{});
  s.fitted_exponent =
      j.contains("fitted_exponent") ? detail::number_from(j["fitted_exponent"]) : s.fitted_exponent;
  s.theory_exponent = detail::get_or(j, "theory_exponent", 0.0);
  return s;
}

inline Json to_json(const BenchmarkCell& c) {
  return {{"n", c.n},
          {"m", c.m},
          {"r", c.r},
          {"queries", c.queries},
          {"queries_amplified", c.queries_amplified},
          {"error", c.error},
          {"monotone", c.monotone}};
}

inline Json to_json(const BenchmarkResult& r) {
  Json cells = Json::array();
  for (const auto& c : r.cells) cells.push_back(to_json(c));
  Json scaling = Json::array();
  for (const auto& s : r.scaling) scaling.push_back(to_json(s));
  return {{"cells", cells}, {"scaling", scaling}};
}

inline Json to_json(const ErrorBudget& b) {
  Json e = Json::object();
  for (const auto& [j, v] : b.e_tilde_bounds) e[std::to_string(j)] = detail::number(v);
  return {{"e_tilde_bounds", e},
          {"f_tilde_bound", detail::number(b.f_tilde_bound)},
          {"thm_bound", detail::number(b.thm_bound)},
          {"truncation_depth", b.truncation_depth},
          {"truncated", b.truncated},
          {"tail_flag", b.tail_flag}};
}

inline Json to_json(const BoundCheck& c) {
  return {{"delta", c.delta},
          {"measured", c.measured},
          {"premise_radius", detail::number(c.premise_radius)},
          {"dominated", c.dominated},
          {"budget", to_json(c.budget)}};
}

inline Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::InvalidArgument, what + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::IoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::IoError, "cannot write " + path);
  out << content;
  require(out.good(), ErrorKind::IoError, "write failed for " + path);
}

/// Benchmark report as CSV or JSON text.
inline std::string report_emit(const BenchmarkResult& r, const std::string& format,
                               const std::vector<int>& theory_ms = {}) {
  if (format == "csv") return benchmark_csv(r, theory_ms);
  if (format == "json") return to_json(r).dump(2) + "\n";
  throw Error(ErrorKind::InvalidArgument, "format must be csv or json");
}

}  // namespace mpflab
