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

// mpflab_cli: multi-product formula schemes, commutator metrics, convergence
// studies, the Heisenberg benchmark and BCH checks from the command line.
//
// Exit codes: 0 success, 2 usage, 3 resource or budget, 4 numeric premise.

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mpflab/mpflab.hpp"

namespace {

using mpflab::ErrorKind;
using mpflab::Json;

constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;
constexpr int kExitPremise = 4;

/// JSON config file: a flat object whose keys are long flag names. Arrays give
/// repeated values; objects (the model descriptor) are passed through as JSON
/// text. Keys other than the global ones belong to `section`, the subcommand
/// named on the command line.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(std::string section) : section_(std::move(section)) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return "{}\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    Json j;
    try {
      j = Json::parse(input);
    } catch (const nlohmann::json::parse_error& e) {
      throw CLI::ConversionError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : j.items()) {
      CLI::ConfigItem item;
      item.name = key;
      if (key != "threads" && key != "output" && !section_.empty()) {
        item.parents = {section_};
      }
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
    return items;
  }

 private:
  static std::string scalar(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  std::string section_;
};

struct ModelFlags {
  std::string kind = "heisenberg1d";
  int n = 4;
  bool open = false;
  int d = 1;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  std::string model_json;
  std::string model_file;

  void attach(CLI::App* app) {
    app->add_option("--model", kind, "heisenberg1d, power_law or custom")
        ->check(CLI::IsMember({"heisenberg1d", "power_law", "custom"}));
    app->add_option("--n", n, "number of qubits")->check(CLI::Range(2, 12));
    app->add_flag("--open", open, "open boundary (Heisenberg)");
    app->add_option("--d", d, "lattice dimension (power_law)")->check(CLI::Range(1, 6));
    app->add_option("--alpha", alpha, "decay exponent (power_law)")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--seed", seed, "Pauli letter seed (power_law)");
    app->add_option("--model-json", model_json, "model descriptor as JSON text");
    app->add_option("--model-file", model_file, "model descriptor JSON file");
  }

  mpflab::ModelDescriptor descriptor() const {
    if (!model_json.empty()) {
      return mpflab::model_from_json(mpflab::parse_json(model_json, "model"));
    }
    if (!model_file.empty()) {
      return mpflab::model_from_json(
          mpflab::parse_json(mpflab::read_file(model_file), model_file));
    }
    mpflab::ModelDescriptor d;
    d.model = mpflab::model_kind_from(kind);
    mpflab::require(d.model != mpflab::ModelKind::custom, ErrorKind::InvalidArgument,
                    "custom models need --model-json or --model-file");
    d.n = n;
    d.periodic = !open;
    d.d = this->d;
    d.alpha = alpha;
    d.seed = seed;
    return d;
  }
};

struct Globals {
  int threads = 1;
  std::string output;
};

void emit(const Globals& g, const std::string& text) {
  if (g.output.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fflush(stdout);
  } else {
    mpflab::write_file(g.output, text);
  }
}

mpflab::PowerStrategy strategy_from(const std::string& s) {
  return s == "min_a_norm" ? mpflab::PowerStrategy::min_a_norm
                           : mpflab::PowerStrategy::natural;
}

CLI::App* with_config(CLI::App* sub) {
  sub->allow_config_extras(CLI::config_extras_mode::error);
  return sub;
}

/// First argument naming a subcommand, used to place config keys.
std::string find_subcommand(int argc, char** argv, const CLI::App& app) {
  for (int i = 1; i < argc; ++i) {
    for (const auto* sub : app.get_subcommands({})) {
      if (sub->get_name() == argv[i]) return argv[i];
    }
  }
  return "";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BudgetExceeded:
    case ErrorKind::Infeasible:
    case ErrorKind::DepthCap:
    case ErrorKind::PartitionBlowup:
      return kExitBudget;
    case ErrorKind::ConvergenceRisk:
    case ErrorKind::PremiseViolated:
      return kExitPremise;
    default:
      return kExitUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-product formula toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--threads", g.threads, "worker threads, 0 = all cores")
      ->check(CLI::NonNegativeNumber);
  app.add_option("-o,--output", g.output, "write output here instead of stdout");

  // scheme
  int scheme_m = 0;
  int scheme_base = 2;
  std::string scheme_strategy = "natural";
  auto* scheme = with_config(app.add_subcommand("scheme", "MPF powers and coefficients"));
  scheme->add_option("--m", scheme_m, "target order parameter")->required()
      ->check(CLI::Range(1, 30));
  scheme->add_option("--base", scheme_base, "base formula order: 1 or an even number")
      ->check(CLI::Range(1, 12));
  scheme->add_option("--strategy", scheme_strategy)
      ->check(CLI::IsMember({"natural", "min_a_norm"}));

  // commutators
  ModelFlags comm_model;
  int comm_m = 1;
  int comm_base = 2;
  std::optional<int> comm_j_cap;
  double comm_budget = static_cast<double>(mpflab::defaults::kAlphaBudget);
  bool comm_allow_capped = false;
  auto* comm = with_config(app.add_subcommand("commutators", "alpha table and mu_m"));
  comm_model.attach(comm);
  comm->add_option("--m", comm_m)->check(CLI::Range(1, 12));
  comm->add_option("--base", comm_base, "variant: base formula order")->check(CLI::Range(1, 12));
  comm->add_option("--j-cap", comm_j_cap, "truncation depth (default 2m + 8)")
      ->check(CLI::Range(1, 24));
  comm->add_option("--budget", comm_budget, "enumeration work budget")
      ->check(CLI::PositiveNumber);
  comm->add_flag("--allow-capped", comm_allow_capped,
                 "replace entries over budget by the capped fallback");

  // convergence
  ModelFlags conv_model;
  std::vector<std::string> conv_evolvers{"u2"};
  int conv_m = 2;
  std::vector<double> conv_grid;
  double conv_top = 0.2;
  int conv_points = mpflab::defaults::kGridPoints;
  double conv_ratio = mpflab::defaults::kGridRatio;
  std::string conv_format = "csv";
  auto* conv = with_config(app.add_subcommand("convergence", "one-step error versus dt"));
  conv_model.attach(conv);
  conv->add_option("--evolver", conv_evolvers, "u1, u2, u4, u6, u8 or mpf")
      ->check(CLI::IsMember({"u1", "u2", "u4", "u6", "u8", "mpf"}));
  conv->add_option("--m", conv_m, "MPF order parameter")->check(CLI::Range(1, 8));
  conv->add_option("--grid", conv_grid, "explicit decreasing dt values");
  conv->add_option("--top", conv_top, "largest dt before auto-shrinking")
      ->check(CLI::PositiveNumber);
  conv->add_option("--points", conv_points)->check(CLI::Range(4, 40));
  conv->add_option("--ratio", conv_ratio)->check(CLI::Range(1.01, 100.0));
  conv->add_option("--format", conv_format)->check(CLI::IsMember({"csv", "json"}));

  // benchmark
  std::vector<int> bench_n;
  std::vector<int> bench_m{1, 2};
  double bench_eps = 1e-3;
  std::string bench_strategy = "natural";
  std::string bench_format = "csv";
  bool bench_theory_only = false;
  bool bench_open = false;
  auto* bench = with_config(app.add_subcommand("benchmark", "Heisenberg scaling with T = n"));
  bench->add_option("--n", bench_n, "chain lengths")->check(CLI::Range(2, 10));
  bench->add_option("--m", bench_m, "MPF order parameters")->check(CLI::Range(1, 12));
  bench->add_option("--eps", bench_eps)->check(CLI::Range(1e-12, 0.5));
  bench->add_option("--strategy", bench_strategy)
      ->check(CLI::IsMember({"natural", "min_a_norm"}));
  bench->add_option("--format", bench_format)->check(CLI::IsMember({"csv", "json"}));
  bench->add_flag("--theory-only", bench_theory_only,
                  "print the theory exponent table without simulating");
  bench->add_flag("--open", bench_open, "open boundary");

  // bch-verify
  ModelFlags bch_model;
  int bch_k = 5;
  double bch_s = 0.1;
  auto* bch = with_config(app.add_subcommand("bch-verify", "symmetric BCH terms and bounds"));
  bch_model.attach(bch);
  bch->add_option("--K", bch_k, "largest depth")->check(CLI::Range(1, 7));
  bch->add_option("--s", bch_s, "step size")->check(CLI::PositiveNumber);

  app.config_formatter(std::make_shared<JsonConfig>(find_subcommand(argc, argv, app)));
  app.set_config("--config", "", "JSON file with flag values");
  app.allow_config_extras(CLI::config_extras_mode::error);
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    const int threads = mpflab::resolve_threads(g.threads);

    if (*scheme) {
      const auto powers =
          mpflab::power_schedule(scheme_m, strategy_from(scheme_strategy), scheme_base);
      const auto s = mpflab::solve_order_condition(powers, scheme_m, scheme_base);
      Json j = mpflab::to_json(s);
      j["residual"] = s.residual();
      emit(g, j.dump(2) + "\n");
      return 0;
    }

    if (*comm) {
      const auto desc = comm_model.descriptor();
      const auto h = desc.build();
      const auto variant = mpflab::Variant::for_base_order(comm_base);
      const int j_cap = comm_j_cap.value_or(
          std::min(variant.j_min(comm_m) + mpflab::defaults::kDefaultJCapSlack,
                   mpflab::defaults::kMaxCompositionDepth));
      mpflab::AlphaOptions opt;
      opt.budget = static_cast<std::uint64_t>(comm_budget);
      opt.allow_capped = comm_allow_capped;
      opt.threads = threads;
      const auto table = mpflab::commutator_table(h, j_cap + 1, opt);
      Json j;
      j["model"] = mpflab::to_json(desc);
      j["one_norm"] = mpflab::one_norm(h);
      if (h.has_grouping()) j["induced_one_norm"] = mpflab::induced_one_norm(h);
      j["table"] = mpflab::to_json(table);
      j["mu"] = mpflab::to_json(mpflab::mu_m(table, comm_m, j_cap, variant));
      j["convergence_radius"] = mpflab::detail::number(mpflab::convergence_radius(table));
      emit(g, j.dump(2) + "\n");
      return 0;
    }

    if (*conv) {
      const auto h = conv_model.descriptor().build();
      std::vector<mpflab::ConvergenceStudy> studies;
      for (const auto& name : conv_evolvers) {
        mpflab::Evolver ev;
        if (name == "u1") {
          ev = mpflab::Evolver::u1();
        } else if (name == "u2") {
          ev = mpflab::Evolver::u2();
        } else if (name == "mpf") {
          ev = mpflab::Evolver::mpf(mpflab::solve_order_condition(
              mpflab::power_schedule(conv_m, mpflab::PowerStrategy::natural), conv_m, 2));
        } else {
          ev = mpflab::Evolver::u2p((name[1] - '0') / 2);
        }
        const auto grid = conv_grid.empty()
                              ? mpflab::default_grid(h, ev, conv_top, conv_points, conv_ratio)
                              : conv_grid;
        studies.push_back(mpflab::convergence_study(h, ev, grid, threads));
      }
      if (conv_format == "csv") {
        emit(g, mpflab::convergence_csv(studies));
      } else {
        Json arr = Json::array();
        for (const auto& s : studies) arr.push_back(mpflab::to_json(s));
        emit(g, arr.dump(2) + "\n");
      }
      return 0;
    }

    if (*bench) {
      const std::vector<int> theory_ms = {1, 2, 3, 4, 5};
      mpflab::BenchmarkResult result;
      if (!bench_theory_only) {
        mpflab::require(!bench_n.empty(), ErrorKind::InvalidArgument,
                        "benchmark needs at least one --n");
        mpflab::BenchmarkOptions opt;
        opt.eps = bench_eps;
        opt.strategy = strategy_from(bench_strategy);
        opt.periodic = !bench_open;
        opt.threads = threads;
        result = mpflab::heisenberg_benchmark(bench_n, bench_m, opt);
      }
      emit(g, mpflab::report_emit(result, bench_format, theory_ms));
      return 0;
    }

    if (*bch) {
      const auto desc = bch_model.descriptor();
      const auto h = desc.build();
      mpflab::BchOptions opt;
      opt.alpha.threads = threads;
      Json rows = Json::array();
      for (int k = 1; k <= bch_k; ++k) {
        rows.push_back(mpflab::to_json(mpflab::symmetric_bch_term(h, k, bch_s, opt)));
      }
      Json j;
      j["model"] = mpflab::to_json(desc);
      j["s"] = bch_s;
      j["terms"] = rows;
      const int odd_k = bch_k % 2 == 1 ? bch_k : bch_k - 1;
      const auto z = mpflab::effective_generator(h, bch_s, odd_k, opt);
      j["effective_generator_K"] = odd_k;
      j["effective_generator_residual"] = mpflab::spectral_norm(
          mpflab::matrix_exponential(z).matrix() - mpflab::trotter_u2(h, bch_s).matrix());
      emit(g, j.dump(2) + "\n");
      return 0;
    }
  } catch (const mpflab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  }
  return kExitUsage;
}
