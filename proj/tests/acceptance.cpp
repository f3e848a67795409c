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

// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures. Usage: acceptance <path to mpflab_cli>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mpflab/mpflab.hpp"

namespace {

using namespace mpflab;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct RunResult {
  int status = -1;
  std::string out;
};

RunResult run(const std::string& cmd) {
  RunResult r;
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

// Criterion 1: MPF coefficients from the CLI.
Outcome criterion1(const std::string& cli) {
  Outcome o;
  const std::vector<std::pair<int, std::vector<double>>> cases = {
      {2, {-1.0 / 3.0, 4.0 / 3.0}}, {3, {1.0 / 24.0, -16.0 / 15.0, 81.0 / 40.0}}};
  for (const auto& [m, expected] : cases) {
    const auto t0 = Clock::now();
    const auto r = run(cli + " scheme --m " + std::to_string(m));
    const double dt = seconds_since(t0);
    o.check(r.status == 0, "m=" + std::to_string(m) + " exit " + std::to_string(r.status));
    if (r.status != 0) continue;
    const auto j = parse_json(r.out, "scheme output");
    const auto coeff = j.at("coefficients").get<std::vector<double>>();
    o.check(coeff.size() == expected.size(), "m=" + std::to_string(m) + " size");
    for (std::size_t i = 0; i < std::min(coeff.size(), expected.size()); ++i) {
      o.check(std::abs(coeff[i] - expected[i]) <= 1e-12,
              "m=" + std::to_string(m) + " a" + std::to_string(i) + "=" + fmt(coeff[i]));
    }
    const double residual = j.at("residual").get<double>();
    o.check(residual <= 1e-8, "residual " + fmt(residual));
    o.check(dt < 1.0, "runtime " + fmt(dt) + " s");
    o.detail += (o.detail.empty() ? "" : ", ") + std::string("m=") + std::to_string(m) +
                " residual " + fmt(residual) + " in " + fmt(dt) + " s";
  }
  return o;
}

// Criterion 2: local convergence orders on Heisenberg n = 3.
Outcome criterion2() {
  Outcome o;
  const auto h = heisenberg_1d(3, true);
  struct Case {
    std::string name;
    Evolver ev;
    double target, tol;
  };
  auto scheme = [](int m) {
    return solve_order_condition(power_schedule(m, PowerStrategy::natural), m, 2);
  };
  const std::vector<Case> cases = {
      {"U2", Evolver::u2(), 3, 0.2},           {"U4", Evolver::u2p(2), 5, 0.2},
      {"MPF m=1", Evolver::mpf(scheme(1)), 3, 0.3},
      {"MPF m=2", Evolver::mpf(scheme(2)), 5, 0.3},
      {"MPF m=3", Evolver::mpf(scheme(3)), 7, 0.4}};
  std::string info;
  for (const auto& c : cases) {
    const auto t0 = Clock::now();
    const auto grid = default_grid(h, c.ev);
    const auto s = convergence_study(h, c.ev, grid);
    const double dt = seconds_since(t0);
    o.check(std::abs(s.fitted_slope - c.target) <= c.tol,
            c.name + " slope " + fmt(s.fitted_slope));
    o.check(dt < 30.0, c.name + " took " + fmt(dt) + " s");
    info += (info.empty() ? "" : ", ") + c.name + " " + fmt(s.fitted_slope);
  }
  if (o.pass) o.detail = info;
  return o;
}

HamiltonianSum xz_model() {
  return from_pauli_specs(1, {{1.0, {{0, 'X'}}, {}}, {1.0, {{0, 'Z'}}, {}}});
}

// Criterion 3: symmetric BCH terms.
Outcome criterion3() {
  Outcome o;
  const auto t0 = Clock::now();
  const std::vector<std::pair<std::string, HamiltonianSum>> models = {
      {"{X,Z}", xz_model()}, {"Heisenberg n=2", heisenberg_1d(2, true)}};
  for (const auto& [name, h] : models) {
    for (int k : {2, 4, 6}) {
      const auto r = symmetric_bch_term(h, k, 0.5);
      o.check(r.structural_zero && r.norm == 0.0, name + " k=" + std::to_string(k) + " not zero");
    }
    for (int k : {3, 5}) {
      for (double s : {1.0, 0.5, 0.1}) {
        const auto r = symmetric_bch_term(h, k, s);
        // At s = 1 the bound is alpha_comm,k / k^2 of H itself.
        o.check(r.norm <= r.bound + 1e-9, name + " k=" + std::to_string(k) + " s=" + fmt(s) +
                                              " norm " + fmt(r.norm) + " > " + fmt(r.bound));
      }
    }
  }
  std::string slopes;
  const std::vector<double> grid = {0.08, 0.04, 0.02, 0.01};
  for (const auto& [name, h] :
       std::vector<std::pair<std::string, HamiltonianSum>>{{"{X,Z}", xz_model()},
                                                           {"Heisenberg n=3", heisenberg_1d(3, true)}}) {
    for (int K : {1, 3, 5}) {
      std::vector<double> err;
      for (double s : grid) {
        const auto z = effective_generator(h, s, K);
        err.push_back(spectral_norm(matrix_exponential(z).matrix() - trotter_u2(h, s).matrix()));
      }
      const double slope = loglog_fit(grid, err).slope;
      o.check(slope >= K + 2 - 0.4, name + " K=" + std::to_string(K) + " slope " + fmt(slope));
      slopes += (slopes.empty() ? "" : " ") + fmt(slope);
    }
  }
  const double dt = seconds_since(t0);
  o.check(dt < 60.0, "took " + fmt(dt) + " s");
  if (o.pass) o.detail = "generator slopes " + slopes + " in " + fmt(dt) + " s";
  return o;
}

Matrix random_anti_hermitian(std::mt19937_64& rng, Eigen::Index dim, double norm) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = Complex(g(rng), g(rng));
  }
  Matrix h = 0.5 * (m + m.adjoint());
  h /= spectral_norm(h);
  return Complex(0.0, norm) * h;
}

// Criterion 4: variation-of-parameters remainder.
Outcome criterion4() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> bnorm(0.01, 0.2);
  std::uniform_real_distribution<double> anorm(0.1, 3.0);
  double worst_margin = -1.0;
  for (int pair = 0; pair < 20; ++pair) {
    const Eigen::Index dim = 2 + pair % 3;
    const Matrix a = random_anti_hermitian(rng, dim, anorm(rng));
    const Matrix b = random_anti_hermitian(rng, dim, bnorm(rng));
    const Matrix exact = matrix_exponential(DenseOperator(Matrix(a + b))).matrix();
    for (int p = 2; p <= 4; ++p) {
      const auto r = dyson_expansion(DenseOperator(a), DenseOperator(b), p);
      const double defect = spectral_norm(exact - r.approx.matrix());
      o.check(defect <= r.remainder_bound + 1e-8,
              "pair " + std::to_string(pair) + " p=" + std::to_string(p) + " defect " +
                  fmt(defect) + " > " + fmt(r.remainder_bound));
      worst_margin = std::max(worst_margin, defect / (r.remainder_bound + 1e-8));
    }
  }
  const double dt = seconds_since(t0);
  o.check(dt < 30.0, "took " + fmt(dt) + " s");
  if (o.pass) o.detail = "largest defect/bound " + fmt(worst_margin) + " in " + fmt(dt) + " s";
  return o;
}

// Criterion 5: measured one-step MPF error against the truncated bound.
Outcome criterion5() {
  Outcome o;
  const auto t0 = Clock::now();
  const int j_cap = 30;
  std::string info;
  for (int n : {2, 3}) {
    const auto h = heisenberg_1d(n, true);
    const auto table = commutator_table(h, j_cap + 1);
    for (int m : {1, 2}) {
      const auto scheme =
          solve_order_condition(power_schedule(m, PowerStrategy::natural), m, 2);
      for (double delta : {0.1, 0.05, 0.025}) {
        const std::string tag = "n=" + std::to_string(n) + " m=" + std::to_string(m) +
                                " D=" + fmt(delta);
        try {
          const auto c = error_bound_evaluate(h, delta, scheme, table, j_cap);
          o.check(!c.budget.tail_flag, tag + " tail flag set");
          o.check(c.dominated, tag + " measured " + fmt(c.measured) + " > bound " +
                                   fmt(c.budget.thm_bound));
        } catch (const Error& e) {
          o.check(false, tag + " " + std::string(to_string(e.kind())) + " (radius " +
                             fmt(convergence_radius(table)) + ")");
        }
      }
    }
  }
  const double dt = seconds_since(t0);
  o.check(dt < 60.0, "took " + fmt(dt) + " s");
  if (o.pass) o.detail = "12 cases dominated in " + fmt(dt) + " s";
  return o;
}

// Criterion 6: Heisenberg scaling exponents.
Outcome criterion6() {
  Outcome o;
  const auto t0 = Clock::now();
  const char* expected[] = {"2.000", "1.667", "1.556", "1.500", "1.467"};
  for (int m = 1; m <= 5; ++m) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.3f", heisenberg_theory_exponent(m));
    o.check(std::string(buf) == expected[m - 1], "theory m=" + std::to_string(m) + " " + buf);
  }
  char limit[16];
  std::snprintf(limit, sizeof limit, "%.3f", 4.0 / 3.0);
  o.check(std::string(limit) == "1.333", "limit row");

  BenchmarkOptions opt;
  opt.eps = 1e-3;
  const auto r = heisenberg_benchmark({4, 6, 8}, {1, 2}, opt);
  std::vector<double> fitted;
  std::string info;
  for (const auto& s : r.scaling) {
    o.check(std::isfinite(s.fitted_exponent), "m=" + std::to_string(s.m) + " not finite");
    o.check(std::abs(s.fitted_exponent - s.theory_exponent) <= 0.5,
            "m=" + std::to_string(s.m) + " fitted " + fmt(s.fitted_exponent) + " vs " +
                fmt(s.theory_exponent));
    fitted.push_back(s.fitted_exponent);
    info += (info.empty() ? "" : ", ") + std::string("m=") + std::to_string(s.m) + " fitted " +
            fmt(s.fitted_exponent) + " theory " + fmt(s.theory_exponent);
  }
  o.check(fitted.size() == 2 && fitted[1] < fitted[0], "exponents do not decrease with m");
  for (const auto& c : r.cells) {
    o.check(c.monotone, "non-monotone search at n=" + std::to_string(c.n));
  }
  const double dt = seconds_since(t0);
  o.check(dt < 900.0, "took " + fmt(dt) + " s");
  if (o.pass) o.detail = info + " in " + fmt(dt) + " s";
  return o;
}

double brute_alpha(const HamiltonianSum& h, int j) {
  const auto terms = h.dense_terms();
  const std::size_t gamma = terms.size();
  std::vector<std::size_t> idx(static_cast<std::size_t>(j), 0);
  double total = 0.0;
  while (true) {
    Matrix acc = terms[idx[0]].matrix();
    for (int i = 1; i < j; ++i) {
      const Matrix& a = terms[idx[static_cast<std::size_t>(i)]].matrix();
      acc = (a * acc - acc * a).eval();
    }
    total += spectral_norm(acc);
    int pos = j - 1;
    while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == gamma) {
      idx[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return total;
}

double brute_mu(const CommutatorTable& t, int m, int j_cap) {
  std::function<double(int, int)> rec = [&](int rest, int left) -> double {
    if (left == 0) return rest == 0 ? 1.0 : 0.0;
    double s = 0.0;
    for (int part = 2; part <= rest; part += 2) s += t.alpha(part + 1) * rec(rest - part, left - 1);
    return s;
  };
  double best = 0.0;
  for (int j = 2 * m; j <= j_cap; j += 2) {
    for (int l = 1; l <= m; ++l) best = std::max(best, std::pow(rec(j, l), 1.0 / (j + l)));
  }
  return best;
}

HamiltonianSum random_pauli_model(std::mt19937_64& rng, int gamma, int qubits) {
  std::vector<PauliTermSpec> specs;
  std::uniform_real_distribution<double> coeff(-1.5, 1.5);
  for (int g = 0; g < gamma; ++g) {
    std::map<int, char> sites;
    for (int q = 0; q < qubits; ++q) {
      const char c = "IXYZ"[rng() % 4];
      if (c != 'I') sites[q] = c;
    }
    if (sites.empty()) sites[0] = "XYZ"[rng() % 3];
    specs.push_back({coeff(rng), sites, {}});
  }
  return from_pauli_specs(qubits, specs);
}

// Criterion 7: commutator oracle equivalence.
Outcome criterion7() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(7);
  int compared = 0;
  std::vector<CommutatorTable> tables;
  for (int gamma = 1; gamma <= 3; ++gamma) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto h = random_pauli_model(rng, gamma, 3);
      const auto t = commutator_table(h, 4);
      for (int j = 1; j <= 4; ++j) {
        const double oracle = brute_alpha(h, j);
        o.check(std::abs(t.alpha(j) - oracle) <= 1e-9 * std::max(1.0, oracle),
                "gamma=" + std::to_string(gamma) + " j=" + std::to_string(j) + " " +
                    fmt(t.alpha(j)) + " vs " + fmt(oracle));
        ++compared;
      }
      tables.push_back(t);
    }
  }
  tables.push_back(commutator_table(heisenberg_1d(4, true), 9));
  int mus = 0;
  for (const auto& t : tables) {
    const int j_cap = t.j_cap() - 1;
    for (int m = 1; 2 * m <= j_cap; ++m) {
      const double got = mu_m(t, m, j_cap).mu_m;
      const double oracle = brute_mu(t, m, j_cap);
      o.check(std::abs(got - oracle) <= 1e-9 * std::max(1.0, oracle),
              "mu m=" + std::to_string(m) + " " + fmt(got) + " vs " + fmt(oracle));
      ++mus;
    }
  }
  const double dt = seconds_since(t0);
  o.check(dt < 60.0, "took " + fmt(dt) + " s");
  if (o.pass) {
    o.detail = std::to_string(compared) + " alpha values, " + std::to_string(mus) +
               " mu values in " + fmt(dt) + " s";
  }
  return o;
}

// Criterion 8: variant nesting and the k-local argmax.
Outcome criterion8() {
  Outcome o;
  std::mt19937_64 rng(8);
  std::vector<CommutatorTable> tables = {commutator_table(heisenberg_1d(4, true), 13),
                                         commutator_table(heisenberg_1d(5, false), 13)};
  for (int rep = 0; rep < 4; ++rep) tables.push_back(commutator_table(random_pauli_model(rng, 4, 3), 13));
  for (const auto& t : tables) {
    for (int m = 2; m <= 4; ++m) {
      const double mu1 = mu_m(t, m, 12, Variant::first_order()).mu_m;
      const double mu2 = mu_m(t, m, 12, Variant::second_order()).mu_m;
      const double mu4 = mu_m(t, m, 12, Variant::order_2p(2)).mu_m;
      o.check(mu4 <= mu2 + 1e-9 && mu2 <= mu1 + 1e-9,
              "m=" + std::to_string(m) + " " + fmt(mu4) + " " + fmt(mu2) + " " + fmt(mu1));
    }
  }
  for (const auto& [beta, big_l] : std::vector<std::pair<double, double>>{{1.0, 10.0}, {0.5, 20.0}}) {
    std::vector<double> alpha;
    for (int j = 1; j <= 24; ++j) alpha.push_back(std::pow(beta, j - 1) * big_l);
    const auto t = CommutatorTable::from_values(10, alpha, AlphaMode::analytic);
    for (int m = 1; m <= 4; ++m) {
      const auto r = mu_m(t, m, 2 * m + 8);
      o.check(r.argmax_j == 2 * m && r.argmax_l == m,
              "beta=" + fmt(beta) + " L=" + fmt(big_l) + " m=" + std::to_string(m) +
                  " argmax (" + std::to_string(r.argmax_j) + "," + std::to_string(r.argmax_l) + ")");
    }
  }
  if (o.pass) o.detail = std::to_string(tables.size()) + " tables nested; argmax at (2m, m)";
  return o;
}

// Criterion 9: every CLI command twice, byte-identical output.
Outcome criterion9(const std::string& cli) {
  Outcome o;
  const char* cfg_path = "acceptance_config.json";
  write_file(cfg_path, R"({"n": [3, 4], "m": [1, 2], "eps": 0.01})");
  const std::vector<std::string> commands = {
      "scheme --m 3",
      "scheme --m 4 --strategy min_a_norm",
      "commutators --n 4 --m 2",
      "commutators --model power_law --n 4 --alpha 2 --m 1",
      "convergence --n 3 --evolver u2 u4 mpf --m 2",
      "benchmark --config " + std::string(cfg_path),
      "benchmark --theory-only",
      "bch-verify --n 3 --K 5 --s 0.05",
  };
  for (const auto& c : commands) {
    const auto a = run(cli + " " + c);
    const auto b = run(cli + " " + c);
    o.check(a.status == 0 && b.status == 0, "'" + c + "' exit " + std::to_string(a.status));
    o.check(!a.out.empty() && a.out == b.out, "'" + c + "' output differs");
  }
  if (o.pass) o.detail = std::to_string(commands.size()) + " commands reproduced";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <mpflab_cli>\n");
    return 2;
  }
  const std::string cli = argv[1];
  const std::vector<std::function<Outcome()>> criteria = {
      [&] { return criterion1(cli); }, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, [&] { return criterion9(cli); }};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s criterion %zu: %s\n", o.pass ? "PASS" : "FAIL", i + 1, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
