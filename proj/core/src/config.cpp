#include "nepbe/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nepbe/matrix_market.hpp"

namespace nepbe {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string term_prefix(std::size_t j) { return "term " + std::to_string(j + 1) + ": "; }

void position_of(const std::string& text, std::size_t byte, int& line, int& column) {
  line = 1;
  column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
}

void only_keys(const json& obj, std::initializer_list<const char*> allowed,
               const std::string& where) {
  if (!obj.is_object()) return;
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (known) continue;
    std::string list;
    for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
    throw ConfigError(where + "unknown key \"" + key + "\" (expected one of: " + list + ")");
  }
}

Scalar scalar_of(const json& v, const std::string& what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw ConfigError(what + ": expected a number or [re, im]");
}

std::string resolve(const std::string& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? p : (fs::path(base) / path).string();
}

ScalarFunction function_of(const json& f, const std::string& ctx) {
  if (f.is_string()) {
    try {
      return functions::by_name(f.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(ctx + e.what());
    }
  }
  if (f.is_object() && f.contains("polynomial")) {
    const json& c = f["polynomial"];
    if (!c.is_array() || c.empty()) throw ConfigError(ctx + "polynomial needs a coefficient list");
    std::vector<Scalar> coeffs;
    for (const auto& x : c) coeffs.push_back(scalar_of(x, ctx + "polynomial coefficient"));
    return functions::polynomial(std::move(coeffs));
  }
  if (f.is_object() && f.contains("scaled_exp")) {
    return functions::scaled_exp(scalar_of(f["scaled_exp"], ctx + "scaled_exp rate"));
  }
  throw ConfigError(ctx +
                    "function must be a registered name (one, lambda, lambda2, exp_neg, "
                    "exp_neg2) or {\"polynomial\": [...]} or {\"scaled_exp\": rate}");
}

Coefficient builtin_of(const json& b, Index n, const std::string& ctx) {
  const std::string name =
      b.is_string() ? b.get<std::string>() : b.value("name", std::string());
  const json params = b.is_object() ? b : json::object();
  if (n < 1) throw ConfigError(ctx + "builtin coefficients need a positive \"n\"");
  if (name == "identity") {
    return Coefficient::identity(n, scalar_of(params.value("scale", json(1.0)), ctx + "scale"));
  }
  if (name == "zero") return Coefficient::zero(n);
  if (name == "beam_a0") return Coefficient(beam_a0(n));
  if (name == "unit_corner") {
    SparseMatrix s(n, n);
    s.insert(n - 1, n - 1) = 1.0;
    s.makeCompressed();
    return Coefficient(s);
  }
  if (name == "tridiagonal") {
    const Scalar lo = scalar_of(params.value("sub", json(1.0)), ctx + "sub");
    const Scalar di = scalar_of(params.value("diag", json(-2.0)), ctx + "diag");
    const Scalar up = scalar_of(params.value("super", json(1.0)), ctx + "super");
    std::vector<Eigen::Triplet<Scalar>> t;
    for (Index i = 0; i < n; ++i) {
      t.emplace_back(i, i, di);
      if (i + 1 < n) {
        t.emplace_back(i + 1, i, lo);
        t.emplace_back(i, i + 1, up);
      }
    }
    SparseMatrix s(n, n);
    s.setFromTriplets(t.begin(), t.end());
    return Coefficient(s);
  }
  if (name == "gallery") {
    const std::string g = params.value("problem", std::string());
    const auto term = params.value("term", -1);
    GalleryProblem gp;
    try {
      gp = build_gallery(g, n, params.value("seed", std::uint64_t{0}));
    } catch (const std::exception& e) {
      throw ConfigError(ctx + e.what());
    }
    if (term < 0 || term >= gp.nep.k()) {
      throw ConfigError(ctx + "gallery term index out of range for '" + g + "'");
    }
    return gp.nep.coefficient(term);
  }
  throw ConfigError(ctx + "unknown builtin '" + name +
                    "' (known: identity, zero, beam_a0, unit_corner, tridiagonal, gallery)");
}

SparsityPattern pattern_from_json(const json& p, const std::string& ctx) {
  SparsityPattern out;
  if (!p.is_array()) throw ConfigError(ctx + "pattern must be a list of [row, col] pairs");
  for (const auto& e : p) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
      throw ConfigError(ctx + "pattern entries must be [row, col] integer pairs");
    }
    const auto r = e[0].get<long long>();
    const auto c = e[1].get<long long>();
    if (r < 1 || c < 1) throw ConfigError(ctx + "pattern indices are 1-based");
    out.emplace_back(r - 1, c - 1);
  }
  return out;
}

StructureSpec structure_of(const json& s, const Coefficient& coeff, Index n,
                           const std::string& base, const std::string& ctx) {
  const std::string kind = s.is_string() ? s.get<std::string>() : s.value("kind", std::string());
  if (kind == "unstructured") return StructureSpec::unstructured();
  if (kind == "symmetric") return StructureSpec::symmetric();
  if (kind == "scaled_identity") return StructureSpec::scaled_identity();
  if (kind == "tridiagonal") return StructureSpec::sparsity(tridiagonal_pattern(n));
  if (kind == "sparsity") {
    if (s.is_object() && s.contains("pattern")) {
      return StructureSpec::sparsity(pattern_from_json(s["pattern"], ctx));
    }
    return StructureSpec::sparsity(pattern_of(coeff));
  }
  if (kind == "fixed_rank") {
    if (!s.is_object() || !s.contains("rank") || !s["rank"].is_number_integer()) {
      throw ConfigError(ctx + "fixed_rank structure needs an integer \"rank\"");
    }
    return StructureSpec::fixed_rank(s["rank"].get<Index>());
  }
  if (kind == "subspace") {
    if (!s.is_object() || !s.contains("basis") || !s["basis"].is_array()) {
      throw ConfigError(ctx + "subspace structure needs a \"basis\" list of matrix files");
    }
    std::vector<Matrix> basis;
    for (const auto& f : s["basis"]) {
      const std::string path = resolve(base, f.get<std::string>());
      if (!fs::exists(path)) throw ConfigError(ctx + "basis file '" + path + "' not found");
      basis.push_back(read_matrix_market(path).to_dense());
    }
    return StructureSpec::subspace(std::move(basis));
  }
  throw ConfigError(ctx + "unknown structure '" + kind +
                    "' (known: unstructured, symmetric, scaled_identity, tridiagonal, sparsity, "
                    "fixed_rank, subspace)");
}

CollectOptions solve_options(const json& s, CollectOptions o) {
  if (!s.is_object()) throw ConfigError("eigenpairs.solve must be an object");
  only_keys(s, {"p", "starts", "seed", "center", "radius", "real_starts", "dedup_tol", "tol",
                "max_iter", "starts_at"},
            "eigenpairs.solve: ");
  o.p = s.value("p", o.p);
  o.starts = s.value("starts", o.starts);
  o.seed = s.value("seed", o.seed);
  if (s.contains("center")) o.center = scalar_of(s["center"], "eigenpairs.solve.center");
  o.radius = s.value("radius", o.radius);
  o.real_starts = s.value("real_starts", o.real_starts);
  o.dedup_tol = s.value("dedup_tol", o.dedup_tol);
  o.newton.tol = s.value("tol", o.newton.tol);
  o.newton.max_iter = s.value("max_iter", o.newton.max_iter);
  if (s.contains("starts_at")) {
    for (const auto& z : s["starts_at"]) {
      NewtonStart st;
      st.lambda = scalar_of(z, "eigenpairs.solve.starts_at");
      o.explicit_starts.push_back(st);
    }
  }
  if (o.p < 1) throw ConfigError("eigenpairs.solve.p must be at least 1");
  return o;
}

void load_eigenpairs(const json& e, const std::string& base, ProblemConfig& cfg) {
  const CollectOptions defaults = cfg.gallery ? cfg.gallery->solve : CollectOptions{};
  if (e.is_null()) {
    cfg.solve = defaults;
    return;
  }
  only_keys(e, {"solve", "lambdas", "V"}, "eigenpairs: ");
  if (e.contains("solve")) {
    cfg.solve = solve_options(e["solve"], defaults);
    return;
  }
  if (!e.contains("lambdas") || !e.contains("V")) {
    throw ConfigError("eigenpairs needs either \"solve\" or both \"lambdas\" and \"V\"");
  }
  EigenpairSet pairs;
  const json& l = e["lambdas"];
  if (l.is_string()) {
    const std::string path = resolve(base, l.get<std::string>());
    if (!fs::exists(path)) throw ConfigError("eigenvalue file '" + path + "' not found");
    pairs.lambdas = read_eigenvalues(path);
  } else if (l.is_array()) {
    pairs.lambdas.resize(static_cast<Index>(l.size()));
    for (std::size_t i = 0; i < l.size(); ++i) {
      pairs.lambdas(static_cast<Index>(i)) = scalar_of(l[i], "eigenpairs.lambdas");
    }
  } else {
    throw ConfigError("eigenpairs.lambdas must be a file name or a list");
  }
  const std::string vpath = resolve(base, e["V"].get<std::string>());
  if (!fs::exists(vpath)) throw ConfigError("eigenvector file '" + vpath + "' not found");
  pairs.V = read_matrix_market(vpath).to_dense();
  try {
    pairs.validate(cfg.nep.n());
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("eigenpairs: ") + ex.what());
  }
  cfg.pairs = std::move(pairs);
}

}  // namespace

ProblemConfig parse_problem(const std::string& text, const std::string& base_dir,
                            const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 0;
    int column = 0;
    position_of(text, e.byte > 0 ? e.byte - 1 : 0, line, column);
    throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                          ": JSON syntax error",
                      line, column);
  }
  if (!root.is_object()) throw ConfigError(source + ": top level must be an object");

  ProblemConfig cfg;
  cfg.source = source;
  try {
    only_keys(root, {"gallery", "n", "terms", "weights", "eigenpairs"}, "");
    if (root.contains("gallery")) {
      const json& g = root["gallery"];
      only_keys(g, {"name", "n", "seed"}, "gallery: ");
      const std::string name = g.is_string() ? g.get<std::string>() : g.value("name", "");
      const Index n = g.is_object() ? g.value("n", root.value("n", Index{0}))
                                    : root.value("n", Index{0});
      const auto seed = g.is_object() ? g.value("seed", std::uint64_t{0}) : std::uint64_t{0};
      if (n < 2) throw ConfigError("gallery problems need n >= 2");
      try {
        cfg.gallery = build_gallery(name, n, seed);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("gallery: ") + e.what());
      }
      cfg.nep = cfg.gallery->nep;
    } else {
      if (!root.contains("terms") || !root["terms"].is_array() || root["terms"].empty()) {
        throw ConfigError("\"terms\" must be a non-empty list");
      }
      Index n = root.value("n", Index{0});
      const json& terms = root["terms"];
      std::vector<Coefficient> coeffs;
      std::vector<ScalarFunction> funcs;
      std::vector<const json*> structs;
      for (std::size_t j = 0; j < terms.size(); ++j) {
        const json& t = terms[j];
        const std::string ctx = term_prefix(j);
        if (!t.is_object()) throw ConfigError(ctx + "must be an object");
        only_keys(t, {"matrix", "builtin", "function", "structure"}, ctx);
        Coefficient c;
        if (t.contains("matrix")) {
          const std::string path = resolve(base_dir, t["matrix"].get<std::string>());
          if (!fs::exists(path)) throw ConfigError(ctx + "matrix file '" + path + "' not found");
          try {
            c = read_matrix_market(path).coefficient();
          } catch (const MatrixMarketError& e) {
            throw ConfigError(ctx + e.what(), e.line(), e.column());
          }
          if (c.rows() != c.cols()) throw ConfigError(ctx + "coefficient is not square");
          if (n == 0) n = c.rows();
          if (c.rows() != n) {
            throw ConfigError(ctx + "coefficient is " + std::to_string(c.rows()) + "x" +
                              std::to_string(c.cols()) + ", expected n = " + std::to_string(n));
          }
        } else if (t.contains("builtin")) {
          c = builtin_of(t["builtin"], n, ctx);
        } else {
          throw ConfigError(ctx + "needs \"matrix\" or \"builtin\"");
        }
        if (!t.contains("function")) throw ConfigError(ctx + "needs \"function\"");
        funcs.push_back(function_of(t["function"], ctx));
        coeffs.push_back(std::move(c));
        structs.push_back(t.contains("structure") ? &t["structure"] : nullptr);
      }
      std::vector<StructureSpec> specs;
      for (std::size_t j = 0; j < coeffs.size(); ++j) {
        specs.push_back(structs[j] ? structure_of(*structs[j], coeffs[j], n, base_dir,
                                                  term_prefix(j))
                                   : StructureSpec::unstructured());
        try {
          specs.back().validate(n);
        } catch (const std::exception& e) {
          throw ConfigError(term_prefix(j) + e.what());
        }
      }
      std::vector<double> weights;
      if (root.contains("weights")) {
        weights = root["weights"].get<std::vector<double>>();
        if (weights.size() != coeffs.size()) {
          throw ConfigError("weights: expected " + std::to_string(coeffs.size()) + " values");
        }
      }
      cfg.nep = SplitNEP(std::move(coeffs), std::move(funcs), std::move(weights),
                         std::move(specs));
    }
    load_eigenpairs(root.contains("eigenpairs") ? root["eigenpairs"] : json(), base_dir, cfg);
  } catch (const json::exception& e) {
    throw ConfigError(source + ": " + e.what());
  } catch (const ConfigError& e) {
    if (e.line() > 0) throw;
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

ProblemConfig load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const fs::path dir = fs::path(path).parent_path();
  return parse_problem(ss.str(), dir.empty() ? "." : dir.string(), path);
}

Vector read_eigenvalues(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open eigenvalue file '" + path + "'");
  std::vector<Scalar> vals;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::istringstream ls(line);
    double re = 0.0;
    double im = 0.0;
    if (!(ls >> re)) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 're [im]'");
    }
    if (!(ls >> im)) im = 0.0;
    vals.emplace_back(re, im);
  }
  Vector out(static_cast<Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) out(static_cast<Index>(i)) = vals[i];
  return out;
}

void write_eigenvalues(const std::string& path, const Vector& lambdas) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  char buf[80];
  for (Index i = 0; i < lambdas.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", lambdas(i).real(), lambdas(i).imag());
    out << buf;
  }
}

EigenpairSet read_eigenpairs(const std::string& lambdas_path, const std::string& v_path) {
  EigenpairSet p;
  p.lambdas = read_eigenvalues(lambdas_path);
  p.V = read_matrix_market(v_path).to_dense();
  if (p.V.cols() != p.lambdas.size()) {
    throw DimensionError("eigenvector file has " + std::to_string(p.V.cols()) +
                         " columns for " + std::to_string(p.lambdas.size()) + " eigenvalues");
  }
  return p;
}

void write_eigenpairs(const std::string& lambdas_path, const std::string& v_path,
                      const EigenpairSet& pairs) {
  write_eigenvalues(lambdas_path, pairs.lambdas);
  write_matrix_market(v_path, pairs.V);
}

}  // namespace nepbe
