#include "nepbe/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nepbe/newton.hpp"
#include "nepbe/parallel.hpp"
#include "nepbe/structured_linear.hpp"
#include "nepbe/symmetric.hpp"
#include "nepbe/unstructured.hpp"

namespace nepbe {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "unstructured-random", "beam-p3",         "beam-p10",
      "sparse-structured",   "symmetric-64",    "symmetric-128",
      "symmetric-2048",      "riemannian-beam-scaling", "riemannian-quadratic"};
  return names;
}

void say(const BenchOptions& o, const std::string& msg) {
  if (o.progress) o.progress(msg);
}

EigenpairSet eigenpairs_of(const GalleryProblem& g, Index p, std::uint64_t seed) {
  CollectOptions c = g.solve;
  c.p = p;
  c.seed = seed;
  c.starts = std::max<int>(c.starts, static_cast<int>(8 * p));
  const CollectResult r = collect_pairs(g.nep, c);
  if (!r.complete) throw NumericalError(g.name + ": " + r.warning);
  return r.pairs;
}

// err <= bound up to rounding; anything else aborts the suite.
void check_bound(const std::string& suite, std::size_t member, const char* what, double err,
                 double bound, double abs_slack) {
  if (err <= bound * (1.0 + 1e-8) + abs_slack) return;
  std::ostringstream os;
  os.precision(17);
  os << suite << ": bound violation in member " << member << ": " << what << " (" << err
     << " > " << bound << ")";
  throw BoundViolation(os.str());
}

BenchTable make_table(std::string name, std::vector<std::string> cols, std::size_t rows,
                      bool csv = false) {
  BenchTable t;
  t.name = std::move(name);
  t.columns = std::move(cols);
  t.rows.resize(rows);
  t.csv = csv;
  return t;
}

BenchTable eigenvalue_table(const Vector& lambdas, const std::string& name) {
  BenchTable t = make_table(name, {"index", "re", "im"}, static_cast<std::size_t>(lambdas.size()),
                            true);
  for (Index i = 0; i < lambdas.size(); ++i) {
    t.rows[static_cast<std::size_t>(i)] = {static_cast<double>(i), lambdas(i).real(),
                                           lambdas(i).imag()};
  }
  return t;
}

double slack_of(const SplitNEP& nep) { return 1e-13 * std::max(1.0, nep.coefficient_norm()); }

// Unstructured sweep: eta against the three bounds for fixed eigenpairs of
// the unperturbed problem.
BenchTable unstructured_sweep(const std::string& suite, const std::string& name,
                              const GalleryProblem& g, const EigenpairSet& pairs,
                              const EnsembleOptions& e) {
  const bool with_G = pairs.size() <= g.nep.k();
  std::vector<std::string> cols{"residual_norm", "eta"};
  if (with_G) cols.push_back("upper_G");
  cols.push_back("upper_G_kappa");
  cols.push_back("upper_krt");
  BenchTable t = make_table(name, cols, static_cast<std::size_t>(e.count));
  parallel_for(t.rows.size(), [&](std::size_t i) {
    const Perturbation pert = ensemble_member(g, e, static_cast<int>(i));
    const BoundsReport b = bounds_with_eigenvectors(pert.nep, pairs);
    const double eta = *b.eta_exact;
    const double slack = slack_of(pert.nep);
    const double kappa = b.upper_G_kappa.value_or(std::numeric_limits<double>::infinity());
    check_bound(suite, i, "eta <= upper_krt", eta, b.upper_krt, slack);
    check_bound(suite, i, "upper_krt <= upper_G_kappa", b.upper_krt, kappa, slack);
    std::vector<double> row{b.residual_norm, eta};
    if (with_G) {
      check_bound(suite, i, "eta <= upper_G", eta, *b.upper_G, slack);
      row.push_back(*b.upper_G);
    }
    row.push_back(kappa);
    row.push_back(b.upper_krt);
    t.rows[i] = std::move(row);
  });
  return t;
}

BenchTable eigvals_only_sweep(const std::string& suite, const std::string& name,
                              const GalleryProblem& g, const EigenpairSet& pairs,
                              const EnsembleOptions& e) {
  BenchTable t = make_table(name, {"residual_norm", "eta", "lower", "upper"},
                            static_cast<std::size_t>(e.count));
  parallel_for(t.rows.size(), [&](std::size_t i) {
    const Perturbation pert = ensemble_member(g, e, static_cast<int>(i));
    const BoundsReport b = bounds_eigenvalues_only(pert.nep, pairs.lambdas);
    const double slack = slack_of(pert.nep);
    check_bound(suite, i, "lower <= eta", *b.lower_sv, *b.eta_exact, slack);
    check_bound(suite, i, "eta <= upper", *b.eta_exact, b.upper_krt, slack);
    t.rows[i] = {b.residual_norm, *b.eta_exact, *b.lower_sv, b.upper_krt};
  });
  return t;
}

EnsembleOptions ensemble(const BenchOptions& o, bool structured) {
  EnsembleOptions e;
  e.count = o.count;
  e.seed = o.seed;
  e.law = o.law;
  e.structured = structured;
  return e;
}

void run_unstructured_random(const BenchOptions& o, BenchSuiteResult& out) {
  const Index n = o.n > 0 ? o.n : 128;
  const GalleryProblem g = build_random_split(n, o.seed, false);
  const EnsembleOptions e = ensemble(o, false);
  for (Index p : {Index{3}, Index{10}}) {
    say(o, "unstructured-random: collecting " + std::to_string(p) + " eigenpairs");
    const EigenpairSet pairs = eigenpairs_of(g, p, o.seed);
    const std::string tag = "p" + std::to_string(p);
    out.tables.push_back(unstructured_sweep(out.suite, tag, g, pairs, e));
    out.tables.push_back(eigenvalue_table(pairs.lambdas, "eigenvalues-" + tag));
    if (p == 3) {
      out.tables.push_back(eigvals_only_sweep(out.suite, "eigvals-only-" + tag, g, pairs, e));
      out.lambdas = pairs.lambdas;
    }
  }
}

void run_beam(const BenchOptions& o, Index p, BenchSuiteResult& out) {
  const Index n = o.n > 0 ? o.n : 1000;
  const GalleryProblem g = build_beam(n);
  say(o, out.suite + ": collecting " + std::to_string(p) + " eigenpairs");
  const EigenpairSet pairs = eigenpairs_of(g, p, o.seed);
  out.lambdas = pairs.lambdas;
  out.tables.push_back(unstructured_sweep(out.suite, "bounds", g, pairs, ensemble(o, true)));
  out.tables.push_back(eigenvalue_table(pairs.lambdas, "eigenvalues"));
}

void run_sparse_structured(const BenchOptions& o, BenchSuiteResult& out) {
  const Index n = o.n > 0 ? o.n : 64;
  const GalleryProblem g = build_random_sparse(n, o.seed);
  const EigenpairSet pairs = eigenpairs_of(g, 3, o.seed);
  out.lambdas = pairs.lambdas;
  const ResidualBundle base = residual_bundle(g.nep, pairs);
  const StructuredSolver solver(structure_bases(g.specs(), n), base.W);
  const EnsembleOptions e = ensemble(o, true);

  BenchTable t = make_table("bounds", {"residual_norm", "eta_S", "upper_krt", "upper_structured",
                                       "eta"},
                            static_cast<std::size_t>(e.count));
  parallel_for(t.rows.size(), [&](std::size_t i) {
    const Perturbation pert = ensemble_member(g, e, static_cast<int>(i));
    const ResidualBundle b = residual_bundle(pert.nep, pairs);
    const StructuredResult s = solver.solve(b.R);
    if (!s.consistent) {
      throw NumericalError(out.suite + ": structured system inconsistent in member " +
                           std::to_string(i));
    }
    const BoundsReport u = bounds_with_eigenvectors(pert.nep, pairs);
    const double slack = slack_of(pert.nep);
    check_bound(out.suite, i, "eta_S <= upper_structured", s.eta(), s.upper_bound, slack);
    check_bound(out.suite, i, "eta <= eta_S", *u.eta_exact, s.eta(), slack);
    t.rows[i] = {b.residual_norm, s.eta(), u.upper_krt, s.upper_bound, *u.eta_exact};
  });
  out.tables.push_back(std::move(t));
  out.tables.push_back(eigenvalue_table(pairs.lambdas, "eigenvalues"));
}

void run_symmetric(const BenchOptions& o, Index default_n, BenchSuiteResult& out) {
  const Index n = o.n > 0 ? o.n : default_n;
  const GalleryProblem g = build_random_split(n, o.seed, true);
  say(o, out.suite + ": collecting eigenpairs");
  const EigenpairSet pairs = eigenpairs_of(g, 3, o.seed);
  out.lambdas = pairs.lambdas;
  const bool general = n <= 64;
  std::optional<StructuredSolver> solver;
  if (general) {
    say(o, out.suite + ": factoring the general structured system");
    const ResidualBundle base = residual_bundle(g.nep, pairs);
    solver.emplace(structure_bases(g.specs(), n), base.W);
  }
  const EnsembleOptions e = ensemble(o, true);

  std::vector<std::string> cols{"residual_norm", "eta_S", "upper_krt"};
  if (general) cols.push_back("upper_structured");
  cols.insert(cols.end(), {"upper_symmetric", "bound_pinv", "bound_ttilde", "eta"});
  BenchTable t = make_table("bounds", cols, static_cast<std::size_t>(e.count));
  BenchTable ratio = make_table("ratio", {"member", "eta_S", "upper_symmetric", "ratio"},
                                static_cast<std::size_t>(e.count), true);
  parallel_for(t.rows.size(), [&](std::size_t i) {
    const Perturbation pert = ensemble_member(g, e, static_cast<int>(i));
    const SymmetricResult s = symmetric_backward_error(pert.nep, pairs);
    const SymmetricBound sb = symmetric_bound(s.workspace);
    const BoundsReport u = bounds_with_eigenvectors(pert.nep, pairs);
    const double slack = slack_of(pert.nep);
    check_bound(out.suite, i, "eta_S <= upper_symmetric", s.eta(), sb.headline(), slack);
    check_bound(out.suite, i, "eta <= eta_S", *u.eta_exact, s.eta(), slack);
    std::vector<double> row{u.residual_norm, s.eta(), u.upper_krt};
    if (general) {
      const StructuredResult st = solver->solve(s.workspace.R);
      check_bound(out.suite, i, "eta_S <= upper_structured", s.eta(), st.upper_bound, slack);
      row.push_back(st.upper_bound);
    }
    row.insert(row.end(), {sb.headline(), sb.with_pinv, sb.with_ttilde, *u.eta_exact});
    t.rows[i] = std::move(row);
    ratio.rows[i] = {static_cast<double>(i), s.eta(), sb.headline(),
                     s.eta() > 0.0 ? sb.headline() / s.eta()
                                   : std::numeric_limits<double>::infinity()};
  });
  out.tables.push_back(std::move(t));
  out.tables.push_back(std::move(ratio));
  out.tables.push_back(eigenvalue_table(pairs.lambdas, "eigenvalues"));
}

struct RiemannRow {
  double seconds;
  double eta;
  double residual;
  double delta;
};

RiemannRow riemann_run(const std::string& suite, const GalleryProblem& g, Index p,
                       double magnitude, PerturbationLaw law, const BenchOptions& o,
                       EigenpairSet* used) {
  const EigenpairSet pairs = eigenpairs_of(g, p, o.seed);
  std::mt19937_64 rng(o.seed * 7919ULL + static_cast<std::uint64_t>(g.nep.n()));
  const Perturbation pert = perturb(g, magnitude, rng, law, true);
  const auto t0 = Clock::now();
  const riemann::ContinuationResult r =
      riemann::penalty_continuation(pert.nep, pairs, {}, o.continuation);
  RiemannRow row{seconds_since(t0), r.eta(), r.residual_norm, pert.norm};
  // -dF is feasible, so the computed minimum may not exceed its norm.
  check_bound(suite, 0, "eta_S <= ||dD||_F", row.eta, row.delta * (1.0 + 1e-6), 0.0);
  if (used != nullptr) *used = pairs;
  return row;
}

void run_riemannian_beam(const BenchOptions& o, BenchSuiteResult& out) {
  std::vector<Index> sizes = o.sizes;
  if (sizes.empty()) {
    sizes = o.slow ? std::vector<Index>{1000, 2000, 5000, 10000, 20000, 50000, 100000}
                   : std::vector<Index>{1000, 2000};
  }
  BenchTable t = make_table("table", {"n", "time", "eta_S", "residual_norm", "delta_norm"},
                            sizes.size(), true);
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    const Index n = sizes[s];
    say(o, out.suite + ": n = " + std::to_string(n));
    const GalleryProblem g = build_beam(n);
    // Entrywise perturbations grow like sqrt(n) at a fixed entry scale.
    const double mag = o.riemann_magnitude * std::sqrt(static_cast<double>(n) / 1000.0);
    EigenpairSet pairs;
    const RiemannRow r = riemann_run(out.suite, g, 3, mag, PerturbationLaw::entrywise, o, &pairs);
    t.rows[s] = {static_cast<double>(n), r.seconds, r.eta, r.residual, r.delta};
    if (s == 0) out.lambdas = pairs.lambdas;
  }
  out.tables.push_back(std::move(t));
}

void run_riemannian_quadratic(const BenchOptions& o, BenchSuiteResult& out) {
  const Index n = o.n > 0 ? o.n : (o.slow ? 10000 : 500);
  const GalleryProblem g = build_quadratic_lowrank(n, o.seed);
  // The reference run perturbs with norm ~2 (relative to ||F||_F ~ sqrt(6 n)).
  const double mag = 2.0;
  EigenpairSet pairs;
  say(o, out.suite + ": n = " + std::to_string(n));
  const RiemannRow r = riemann_run(out.suite, g, 2, mag, o.law, o, &pairs);
  BenchTable t = make_table("table", {"n", "time", "eta_S", "residual_norm", "delta_norm"}, 1,
                            true);
  t.rows[0] = {static_cast<double>(n), r.seconds, r.eta, r.residual, r.delta};
  out.tables.push_back(std::move(t));
  out.tables.push_back(eigenvalue_table(pairs.lambdas, "eigenvalues"));
  out.lambdas = pairs.lambdas;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

}  // namespace

std::vector<std::string> bench_suites() { return suite_names(); }

bool bench_suite_exists(const std::string& suite) {
  const auto& s = suite_names();
  return std::find(s.begin(), s.end(), suite) != s.end();
}

BenchSuiteResult run_benchmark(const std::string& suite, const BenchOptions& opts) {
  if (!bench_suite_exists(suite)) {
    std::string known;
    for (const auto& s : suite_names()) known += (known.empty() ? "" : ", ") + s;
    throw std::invalid_argument("unknown bench suite '" + suite + "' (known: " + known + ")");
  }
  if (opts.count < 1) throw std::invalid_argument("bench count must be positive");
  BenchSuiteResult out;
  out.suite = suite;
  const auto t0 = Clock::now();
  if (suite == "unstructured-random") {
    run_unstructured_random(opts, out);
  } else if (suite == "beam-p3") {
    run_beam(opts, 3, out);
  } else if (suite == "beam-p10") {
    run_beam(opts, 10, out);
  } else if (suite == "sparse-structured") {
    run_sparse_structured(opts, out);
  } else if (suite == "symmetric-64") {
    run_symmetric(opts, 64, out);
  } else if (suite == "symmetric-128") {
    run_symmetric(opts, 128, out);
  } else if (suite == "symmetric-2048") {
    run_symmetric(opts, 2048, out);
  } else if (suite == "riemannian-beam-scaling") {
    run_riemannian_beam(opts, out);
  } else {
    run_riemannian_quadratic(opts, out);
  }
  out.seconds = seconds_since(t0);

  if (opts.write) {
    const fs::path dir = fs::path(opts.out_dir) / suite;
    fs::create_directories(dir);
    for (const auto& t : out.tables) {
      const std::string path = (dir / (t.name + (t.csv ? ".csv" : ".dat"))).string();
      if (t.csv) {
        write_csv(path, t);
      } else {
        write_dat(path, t);
      }
      out.files.push_back(path);
    }
  }
  return out;
}

void write_dat(const std::string& path, const BenchTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << '#';
  for (const auto& c : table.columns) out << ' ' << c;
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? " " : "") << number(row[c]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_csv(const std::string& path, const BenchTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c ? "," : "") << csv_field(table.columns[c]);
  }
  out << "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << number(row[c]);
    out << "\r\n";
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace nepbe
