#include "run_cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nepbe/bench.hpp"
#include "nepbe/config.hpp"
#include "nepbe/gallery.hpp"
#include "nepbe/matrix_market.hpp"
#include "nepbe/newton.hpp"
#include "nepbe/structured_linear.hpp"
#include "nepbe/symmetric.hpp"
#include "nepbe/trust_region.hpp"
#include "nepbe/unstructured.hpp"

namespace nepbe::cli {
namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

/// Input the user can fix: bad flags, bad config, unsupported structure.
class UsageFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The computation ran but could not deliver a trustworthy answer.
class ComputationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const char* kSynopsis =
    "usage: nepbe <command> [options]\n"
    "  exact | bounds | eigvals-only | structured | symmetric | riemannian | solve\n"
    "        --config FILE [--json] [--save DIR] [--p N] [--seed S]\n"
    "        [--perturb MAG [--law equal_share|entrywise] [--perturb-seed S]]\n"
    "  riemannian also takes --rho --eps --mu0 --max-iter --gtol --hessian exact|gauss_newton\n"
    "  bench <suite> [--out DIR] [--count N] [--seed S] [--n N] [--sizes N,..] [--slow]\n"
    "        [--law equal_share|entrywise] [--magnitude M] [--json]\n"
    "run 'nepbe <command> --help' for details\n";

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json complex_list(const Vector& z) {
  json a = json::array();
  for (Index i = 0; i < z.size(); ++i) a.push_back({z(i).real(), z(i).imag()});
  return a;
}

json real_list(const RealVector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
  return a;
}

struct CommonOptions {
  std::string config;
  bool json = false;
  std::string save;
  Index p = 0;
  std::optional<std::uint64_t> seed;
  double perturb = 0.0;
  std::string law = "equal_share";
  std::uint64_t perturb_seed = 0;
};

PerturbationLaw parse_law(const std::string& s) {
  if (s == "equal_share") return PerturbationLaw::equal_share;
  if (s == "entrywise") return PerturbationLaw::entrywise;
  throw UsageFailure("unknown perturbation law '" + s + "' (use equal_share or entrywise)");
}

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("--config", o.config, "problem description (JSON)")->required();
  sub->add_flag("--json", o.json, "print machine-readable JSON instead of a table");
  sub->add_option("--save", o.save, "directory for result matrices");
  sub->add_option("--p", o.p, "number of eigenpairs when the config solves for them")
      ->check(CLI::PositiveNumber);
  sub->add_option("--seed", o.seed, "Newton start seed when the config solves for eigenpairs");
  sub->add_option("--perturb", o.perturb,
                  "gallery configs: evaluate against a random structured perturbation "
                  "of this Frobenius norm")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--law", o.law, "perturbation law: equal_share or entrywise");
  sub->add_option("--perturb-seed", o.perturb_seed, "seed of the perturbation");
}

struct Loaded {
  ProblemConfig cfg;
  /// The problem the backward errors are measured against.
  SplitNEP nep;
  EigenpairSet pairs;
  double solve_seconds = 0.0;
  std::optional<double> perturbation_norm;
};

Loaded load(const CommonOptions& o) {
  Loaded l;
  l.cfg = load_problem(o.config);
  l.nep = l.cfg.nep;
  if (l.cfg.pairs) {
    l.pairs = *l.cfg.pairs;
  } else {
    CollectOptions co = *l.cfg.solve;
    if (o.p > 0) co.p = o.p;
    if (o.seed) co.seed = *o.seed;
    co.starts = std::max<int>(co.starts, static_cast<int>(4 * co.p));
    const auto t0 = Clock::now();
    const CollectResult c = collect_pairs(l.nep, co);
    l.solve_seconds = seconds_since(t0);
    if (!c.complete) throw ComputationFailure("eigenpair solve: " + c.warning);
    l.pairs = c.pairs;
  }
  if (o.perturb > 0.0) {
    if (!l.cfg.gallery) throw UsageFailure("--perturb needs a gallery config");
    std::mt19937_64 rng(o.perturb_seed);
    const Perturbation pert = perturb(*l.cfg.gallery, o.perturb, rng, parse_law(o.law));
    l.nep = pert.nep;
    l.perturbation_norm = pert.norm;
  }
  return l;
}

json problem_json(const Loaded& l) {
  return {{"n", l.nep.n()}, {"k", l.nep.k()}, {"p", l.pairs.size()}};
}

json base_report(const std::string& command, const Loaded& l) {
  json j;
  j["command"] = command;
  j["problem"] = problem_json(l);
  j["eigenvalues"] = complex_list(l.pairs.lambdas);
  if (l.perturbation_norm) j["perturbation_norm"] = *l.perturbation_norm;
  return j;
}

double input_residual(const Loaded& l) {
  return residual_bundle(l.nep, l.pairs.normalized_copy()).residual_norm;
}

std::string scalar_text(const json& v) {
  char buf[64];
  if (v.is_null()) return "inf";
  if (v.is_number_float()) {
    std::snprintf(buf, sizeof buf, "%.6e", v.get<double>());
    return buf;
  }
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

bool is_complex_list(const json& v) {
  return v.is_array() && !v.empty() && v[0].is_array() && v[0].size() == 2 && v[0][0].is_number();
}

void print_value(std::ostream& out, const std::string& key, const json& v) {
  out << key;
  for (std::size_t pad = key.size(); pad < 28; ++pad) out << ' ';
  if (is_complex_list(v)) {
    char buf[64];
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s%.10g%+.10gi", i ? ", " : "", v[i][0].get<double>(),
                    v[i][1].get<double>());
      out << buf;
    }
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << scalar_text(v[i]);
  } else {
    out << scalar_text(v);
  }
  out << '\n';
}

void print_table(std::ostream& out, const json& j, const std::string& prefix = "") {
  for (const auto& [key, v] : j.items()) {
    if (key == "command" && prefix.empty()) continue;
    if (v.is_object()) {
      print_table(out, v, prefix + key + ".");
    } else if (v.is_array() && !v.empty() && v[0].is_object()) {
      out << prefix << key << ":\n";
      for (const auto& row : v) {
        out << "  ";
        bool first = true;
        for (const auto& [rk, rv] : row.items()) {
          out << (first ? "" : "  ") << rk << "=" << scalar_text(rv);
          first = false;
        }
        out << '\n';
      }
    } else {
      print_value(out, prefix + key, v);
    }
  }
}

void emit(std::ostream& out, const json& j, bool as_json) {
  if (as_json) {
    out << j.dump(2) << '\n';
  } else {
    print_table(out, j);
  }
}

fs::path save_dir(const std::string& dir) {
  fs::create_directories(dir);
  return fs::path(dir);
}

void save_perturbation(const std::string& dir, const PerturbationSet& d) {
  if (dir.empty()) return;
  const fs::path p = save_dir(dir);
  if (d.factored()) {
    write_matrix_market((p / "left.mtx").string(), *d.shared_left);
    for (std::size_t j = 0; j < d.right.size(); ++j) {
      write_matrix_market((p / ("right_" + std::to_string(j + 1) + ".mtx")).string(), d.right[j]);
    }
    return;
  }
  for (std::size_t j = 0; j < d.deltas.size(); ++j) {
    const Coefficient& c = d.deltas[j];
    const std::string f = (p / ("delta_" + std::to_string(j + 1) + ".mtx")).string();
    if (c.is_sparse()) {
      write_matrix_market(f, c.as_sparse());
    } else if (c.is_low_rank()) {
      write_matrix_market((p / ("delta_" + std::to_string(j + 1) + "_left.mtx")).string(),
                          c.as_low_rank().left);
      write_matrix_market((p / ("delta_" + std::to_string(j + 1) + "_right.mtx")).string(),
                          c.as_low_rank().right);
    } else {
      write_matrix_market(f, c.dense());
    }
  }
}

json term_norms(const PerturbationSet& d) {
  json a = json::array();
  for (const auto& c : d.deltas) a.push_back(c.frobenius_norm());
  return a;
}

int cmd_exact(const CommonOptions& o, std::ostream& out) {
  const Loaded l = load(o);
  const auto t0 = Clock::now();
  const PerturbationSet d = backward_error_exact(l.nep, l.pairs);
  const double secs = seconds_since(t0);
  json j = base_report("exact", l);
  j["eta"] = d.eta;
  j["residual_norm"] = input_residual(l);
  j["bounds"] = json::object();
  j["perturbation"] = {{"factored", d.factored()}, {"term_norms", term_norms(d)}};
  j["timings"] = {{"solve", l.solve_seconds}, {"compute", secs}};
  save_perturbation(o.save, d);
  emit(out, j, o.json);
  return kSuccess;
}

int cmd_bounds(const CommonOptions& o, std::ostream& out) {
  const Loaded l = load(o);
  const auto t0 = Clock::now();
  const BoundsReport b = bounds_with_eigenvectors(l.nep, l.pairs);
  const double secs = seconds_since(t0);
  json j = base_report("bounds", l);
  j["eta"] = number(b.eta_exact.value_or(std::nan("")));
  j["residual_norm"] = b.residual_norm;
  json bounds;
  bounds["upper_krt"] = number(b.upper_krt);
  if (b.upper_G_kappa) bounds["upper_G_kappa"] = number(*b.upper_G_kappa);
  if (b.upper_G) bounds["upper_G"] = number(*b.upper_G);
  j["bounds"] = bounds;
  j["sigma_phat"] = b.sigma_phat;
  j["sigma_p_G"] = b.sigma_p_G;
  j["kappa_V"] = number(b.kappa_V);
  j["effective_rank"] = b.effective_rank;
  j["timings"] = {{"solve", l.solve_seconds}, {"compute", secs}};
  emit(out, j, o.json);
  return kSuccess;
}

int cmd_eigvals_only(const CommonOptions& o, std::ostream& out) {
  const Loaded l = load(o);
  const auto t0 = Clock::now();
  const BoundsReport b = bounds_eigenvalues_only(l.nep, l.pairs.lambdas);
  const double secs = seconds_since(t0);
  json j = base_report("eigvals-only", l);
  j["eta"] = number(b.eta_exact.value_or(std::nan("")));
  j["residual_norm"] = b.residual_norm;
  j["bounds"] = {{"lower", number(b.lower_sv.value_or(0.0))}, {"upper", number(b.upper_krt)}};
  j["sigma_hats"] = real_list(b.sigma_hats);
  j["timings"] = {{"solve", l.solve_seconds}, {"compute", secs}};
  if (!o.save.empty()) {
    write_matrix_market((save_dir(o.save) / "V.mtx").string(), b.singular_vectors);
  }
  emit(out, j, o.json);
  return kSuccess;
}

int cmd_structured(const CommonOptions& o, std::ostream& out, std::ostream& err) {
  const Loaded l = load(o);
  const auto t0 = Clock::now();
  const StructuredResult s = structured_backward_error(l.nep, l.pairs);
  const double secs = seconds_since(t0);
  json j = base_report("structured", l);
  j["eta"] = s.eta();
  j["residual_norm"] = input_residual(l);
  j["bounds"] = {{"upper", number(s.upper_bound)}};
  j["consistent"] = s.consistent;
  j["inconsistency"] = s.inconsistency;
  j["dimension"] = s.dimension;
  j["effective_rank"] = s.effective_rank;
  j["perturbation"] = {{"term_norms", term_norms(s.perturbation)}};
  j["timings"] = {{"solve", l.solve_seconds}, {"compute", secs}};
  save_perturbation(o.save, s.perturbation);
  emit(out, j, o.json);
  if (!s.consistent) {
    err << "nepbe: structured constraints cannot be met exactly (relative inconsistency "
        << s.inconsistency << ")\n";
    return kComputationFailed;
  }
  return kSuccess;
}

int cmd_symmetric(const CommonOptions& o, std::ostream& out) {
  const Loaded l = load(o);
  const auto t0 = Clock::now();
  const SymmetricResult s = symmetric_backward_error(l.nep, l.pairs);
  const SymmetricBound b = symmetric_bound(s.workspace);
  const double secs = seconds_since(t0);
  json j = base_report("symmetric", l);
  j["eta"] = s.eta();
  j["residual_norm"] = input_residual(l);
  j["bounds"] = {{"upper", number(b.headline())},
                 {"with_pinv", number(b.with_pinv)},
                 {"with_ttilde", number(b.with_ttilde)}};
  j["block11_inconsistency"] = s.block11_inconsistency;
  j["block21_inconsistency"] = s.block21_inconsistency;
  j["perturbation"] = {{"term_norms", term_norms(s.perturbation)}};
  j["timings"] = {{"solve", l.solve_seconds}, {"compute", secs}};
  save_perturbation(o.save, s.perturbation);
  emit(out, j, o.json);
  return kSuccess;
}

struct RiemannFlags {
  double rho = 0.1;
  double eps = 1e-8;
  double mu0 = 1.0;
  int max_iter = 1000;
  double gtol = 1e-8;
  std::string hessian = "exact";
};

int cmd_riemannian(const CommonOptions& o, const RiemannFlags& f, std::ostream& out,
                   std::ostream& err) {
  riemann::ContinuationOptions opts;
  opts.rho = f.rho;
  opts.eps = f.eps;
  opts.mu0 = f.mu0;
  opts.inner.max_iter = f.max_iter;
  opts.inner.gtol_rel = f.gtol;
  if (f.hessian == "exact") {
    opts.inner.hessian = riemann::HessianMode::exact;
  } else if (f.hessian == "gauss_newton") {
    opts.inner.hessian = riemann::HessianMode::gauss_newton;
  } else {
    throw UsageFailure("unknown --hessian '" + f.hessian + "' (use exact or gauss_newton)");
  }
  if (!(f.rho > 0.0 && f.rho < 1.0)) throw UsageFailure("--rho must lie in (0, 1)");
  if (!(f.eps > 0.0)) throw UsageFailure("--eps must be positive");
  const Loaded l = load(o);
  const auto t0 = Clock::now();
  const riemann::ContinuationResult r = riemann::penalty_continuation(l.nep, l.pairs, {}, opts);
  const double secs = seconds_since(t0);
  json j = base_report("riemannian", l);
  j["eta"] = r.eta();
  j["residual_norm"] = input_residual(l);
  j["bounds"] = json::object();
  j["final_residual"] = r.residual_norm;
  j["residual_scale"] = r.residual_scale;
  j["converged"] = r.converged;
  j["perturbation"] = {{"term_norms", term_norms(r.perturbation)}};
  json hist = json::array();
  for (const auto& h : r.history) {
    hist.push_back({{"mu", h.mu},
                    {"residual", h.residual_norm},
                    {"eta", h.eta},
                    {"iterations", h.iterations},
                    {"grad_norm", h.grad_norm}});
  }
  j["history"] = hist;
  j["timings"] = {{"solve", l.solve_seconds}, {"compute", secs}};
  save_perturbation(o.save, r.perturbation);
  emit(out, j, o.json);
  if (!r.converged) {
    err << "nepbe: penalty continuation did not converge\n";
    return kComputationFailed;
  }
  return kSuccess;
}

int cmd_solve(const CommonOptions& o, std::ostream& out) {
  const Loaded l = load(o);
  json j = base_report("solve", l);
  j["residual_norm"] = input_residual(l);
  RealVector rel(l.pairs.size());
  for (Index i = 0; i < l.pairs.size(); ++i) {
    rel(i) = relative_residual(l.nep, l.pairs.lambdas(i), l.pairs.V.col(i).normalized());
  }
  j["relative_residuals"] = real_list(rel);
  j["timings"] = {{"solve", l.solve_seconds}};
  if (!o.save.empty()) {
    const fs::path p = save_dir(o.save);
    write_eigenpairs((p / "lambdas.txt").string(), (p / "V.mtx").string(), l.pairs);
  }
  emit(out, j, o.json);
  return kSuccess;
}

struct BenchFlags {
  std::string suite;
  std::string out = "results";
  int count = 1000;
  std::uint64_t seed = 0;
  Index n = 0;
  std::vector<Index> sizes;
  bool slow = false;
  std::string law = "equal_share";
  std::optional<double> magnitude;
  bool json = false;
};

int cmd_bench(const BenchFlags& f, std::ostream& out, std::ostream& err) {
  if (!bench_suite_exists(f.suite)) {
    std::string known;
    for (const auto& s : bench_suites()) known += "  " + s + "\n";
    throw UsageFailure("unknown suite '" + f.suite + "'; available suites:\n" + known);
  }
  BenchOptions o;
  o.out_dir = f.out;
  o.count = f.count;
  o.seed = f.seed;
  o.n = f.n;
  o.sizes = f.sizes;
  o.slow = f.slow;
  o.law = parse_law(f.law);
  if (f.magnitude) o.riemann_magnitude = *f.magnitude;
  o.progress = [&err](const std::string& msg) { err << msg << '\n'; };
  const BenchSuiteResult r = run_benchmark(f.suite, o);
  json j;
  j["command"] = "bench";
  j["suite"] = r.suite;
  j["files"] = r.files;
  j["eigenvalues"] = complex_list(r.lambdas);
  j["timings"] = {{"total", r.seconds}};
  emit(out, j, f.json);
  return kSuccess;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Backward errors of approximate eigenpairs of split-form nonlinear eigenvalue "
               "problems",
               "nepbe"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every command");

  CommonOptions common;
  RiemannFlags rf;
  BenchFlags bf;

  struct Command {
    const char* name;
    const char* help;
  };
  const Command analysis[] = {
      {"exact", "unstructured backward error and its minimal perturbation"},
      {"bounds", "unstructured backward error with its upper bounds"},
      {"eigvals-only", "bounds from approximate eigenvalues alone"},
      {"structured", "backward error under linear structure (sparsity, scaled identity, ...)"},
      {"symmetric", "backward error under real symmetric structure, with its bound"},
      {"riemannian", "structured backward error by Riemannian penalty continuation"},
      {"solve", "compute eigenpairs with Newton's method"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& c : analysis) {
    CLI::App* s = app.add_subcommand(c.name, c.help);
    add_common(s, common);
    subs.push_back(s);
  }
  CLI::App* riem = app.get_subcommand("riemannian");
  riem->add_option("--rho", rf.rho, "penalty decrease factor per outer step");
  riem->add_option("--eps", rf.eps, "stop once sqrt(mu) <= eps");
  riem->add_option("--mu0", rf.mu0, "initial penalty weight")->check(CLI::PositiveNumber);
  riem->add_option("--max-iter", rf.max_iter, "trust-region iterations per penalty step")
      ->check(CLI::PositiveNumber);
  riem->add_option("--gtol", rf.gtol, "relative gradient tolerance of the inner solves");
  riem->add_option("--hessian", rf.hessian, "exact or gauss_newton");

  CLI::App* bench = app.add_subcommand("bench", "run a benchmark suite and write its data files");
  bench->add_option("suite", bf.suite, "suite name")->required();
  bench->add_option("--out", bf.out, "output directory (default results)");
  bench->add_option("--count", bf.count, "ensemble size")->check(CLI::PositiveNumber);
  bench->add_option("--seed", bf.seed, "ensemble seed");
  bench->add_option("--n", bf.n, "problem size override")->check(CLI::PositiveNumber);
  bench->add_option("--sizes", bf.sizes, "sizes for riemannian-beam-scaling")->delimiter(',');
  bench->add_flag("--slow", bf.slow, "use the full-size defaults");
  bench->add_option("--law", bf.law, "perturbation law: equal_share or entrywise");
  bench->add_option("--magnitude", bf.magnitude,
                    "perturbation size of riemannian-beam-scaling at n = 1000")
      ->check(CLI::PositiveNumber);
  bench->add_flag("--json", bf.json, "print machine-readable JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "nepbe: " << e.what() << "\n" << kSynopsis;
    return kUsageError;
  }

  try {
    CLI::App* chosen = app.get_subcommands().front();
    const std::string name = chosen->get_name();
    if (name == "exact") return cmd_exact(common, out);
    if (name == "bounds") return cmd_bounds(common, out);
    if (name == "eigvals-only") return cmd_eigvals_only(common, out);
    if (name == "structured") return cmd_structured(common, out, err);
    if (name == "symmetric") return cmd_symmetric(common, out);
    if (name == "riemannian") return cmd_riemannian(common, rf, out, err);
    if (name == "solve") return cmd_solve(common, out);
    return cmd_bench(bf, out, err);
  } catch (const UsageFailure& e) {
    err << "nepbe: " << e.what() << "\n" << kSynopsis;
    return kUsageError;
  } catch (const ConfigError& e) {
    err << "nepbe: " << e.what() << "\n";
    return kUsageError;
  } catch (const MatrixMarketError& e) {
    err << "nepbe: " << e.what() << "\n";
    return kUsageError;
  } catch (const ComputationFailure& e) {
    err << "nepbe: " << e.what() << "\n";
    return kComputationFailed;
  } catch (const NumericalError& e) {
    err << "nepbe: " << e.what() << "\n";
    return kComputationFailed;
  } catch (const std::invalid_argument& e) {
    err << "nepbe: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "nepbe: " << e.what() << "\n";
    return kComputationFailed;
  }
}

}  // namespace nepbe::cli
