#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "nepbe/config.hpp"
#include "nepbe/structured_linear.hpp"
#include "nepbe/unstructured.hpp"
#include "run_cli.hpp"
#include "support.hpp"

using namespace nepbe;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string data(const std::string& name) { return std::string(NEPBE_TEST_DATA_DIR) + "/" + name; }

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun nepbe_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "nepbe");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

json run_json(const std::vector<std::string>& args) {
  CliRun r = nepbe_cli(args);
  EXPECT_EQ(r.code, 0) << r.err;
  return json::parse(r.out);
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  return json::parse(in);
}

// Numbers agree to a relative tolerance, everything else exactly; timings are skipped.
void expect_same(const json& got, const json& want, const std::string& where = "") {
  if (want.is_object()) {
    ASSERT_TRUE(got.is_object()) << where;
    EXPECT_EQ(got.size(), want.size()) << where;
    for (const auto& [key, w] : want.items()) {
      if (key == "timings") continue;
      ASSERT_TRUE(got.contains(key)) << where << "." << key;
      expect_same(got[key], w, where + "." + key);
    }
  } else if (want.is_array()) {
    ASSERT_TRUE(got.is_array()) << where;
    ASSERT_EQ(got.size(), want.size()) << where;
    for (std::size_t i = 0; i < want.size(); ++i) {
      expect_same(got[i], want[i], where + "[" + std::to_string(i) + "]");
    }
  } else if (want.is_number_float()) {
    const double g = got.get<double>();
    const double w = want.get<double>();
    EXPECT_LE(std::abs(g - w), 1e-9 * std::max(1.0, std::abs(w))) << where;
  } else {
    EXPECT_EQ(got, want) << where;
  }
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nepbe_cli_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Cli, UsageErrorsExitWithTwo) {
  CliRun r = nepbe_cli({});
  EXPECT_EQ(r.code, cli::kUsageError);
  EXPECT_NE(r.err.find("usage: nepbe"), std::string::npos);
  EXPECT_EQ(nepbe_cli({"frobnicate"}).code, cli::kUsageError);
  EXPECT_EQ(nepbe_cli({"exact"}).code, cli::kUsageError);
  EXPECT_EQ(nepbe_cli({"exact", "--config", data("small.json"), "--bogus"}).code,
            cli::kUsageError);
  EXPECT_EQ(nepbe_cli({"riemannian", "--config", data("small.json"), "--hessian", "lbfgs"}).code,
            cli::kUsageError);
  EXPECT_EQ(nepbe_cli({"bench", "beam-p4"}).code, cli::kUsageError);
  EXPECT_EQ(nepbe_cli({"exact", "--config", data("small.json"), "--perturb", "1"}).code,
            cli::kUsageError);
}

TEST(Cli, HelpExitsWithZero) {
  CliRun r = nepbe_cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("riemannian"), std::string::npos);
  r = nepbe_cli({"riemannian", "--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("--rho"), std::string::npos);
}

TEST(Cli, InputErrorsExitWithTwoAndSayWhere) {
  CliRun r = nepbe_cli({"exact", "--config", data("bad_syntax.json")});
  EXPECT_EQ(r.code, cli::kUsageError);
  EXPECT_NE(r.err.find("bad_syntax.json:3:"), std::string::npos) << r.err;
  r = nepbe_cli({"bounds", "--config", data("missing_matrix.json")});
  EXPECT_EQ(r.code, cli::kUsageError);
  EXPECT_NE(r.err.find("term 2"), std::string::npos) << r.err;
  r = nepbe_cli({"exact", "--config", data("no_such_file.json")});
  EXPECT_EQ(r.code, cli::kUsageError);
  // Nonsymmetric coefficients cannot be treated with the symmetric solver.
  EXPECT_EQ(nepbe_cli({"symmetric", "--config", data("small.json")}).code, cli::kUsageError);
}

TEST(Cli, ComputationalFailuresExitWithOne) {
  CliRun r = nepbe_cli({"structured", "--config", data("inconsistent.json")});
  EXPECT_EQ(r.code, cli::kComputationFailed) << r.err;
  EXPECT_NE(r.err.find("cannot be met"), std::string::npos) << r.err;
  r = nepbe_cli({"solve", "--config", data("small_solve.json"), "--p", "4"});
  EXPECT_EQ(r.code, cli::kComputationFailed);
  EXPECT_NE(r.err.find("4 requested"), std::string::npos) << r.err;
}

TEST(Cli, GoldenOutputsMatchOracle) {
  const ProblemConfig cfg = load_problem(data("small.json"));
  const EigenpairSet pairs = cfg.pairs->normalized_copy();
  const double eta = testing_support::unstructured_oracle(cfg.nep, pairs).eta;
  const double eta_s =
      testing_support::structured_oracle(cfg.nep, pairs, cfg.nep.structures()).eta;
  const json exact = read_json(data("golden/small_exact.json"));
  const json structured = read_json(data("golden/small_structured.json"));
  EXPECT_LT(testing_support::rel_diff(exact["eta"].get<double>(), eta), 1e-12);
  EXPECT_LT(testing_support::rel_diff(structured["eta"].get<double>(), eta_s), 1e-12);
  EXPECT_GE(structured["eta"].get<double>(), exact["eta"].get<double>());
}

TEST(Cli, JsonMatchesGoldenFiles) {
  for (const char* cmd : {"exact", "bounds", "structured", "eigvals-only"}) {
    const json got = run_json({cmd, "--config", data("small.json"), "--json"});
    expect_same(got, read_json(data(std::string("golden/small_") + cmd + ".json")), cmd);
    EXPECT_TRUE(got["timings"].contains("compute")) << cmd;
  }
}

TEST(Cli, IsAThinWrapperOverTheLibrary) {
  const ProblemConfig cfg = load_problem(data("small.json"));
  const json exact = run_json({"exact", "--config", data("small.json"), "--json"});
  EXPECT_EQ(exact["eta"].get<double>(), backward_error_exact(cfg.nep, *cfg.pairs).eta);
  const json bounds = run_json({"bounds", "--config", data("small.json"), "--json"});
  const BoundsReport b = bounds_with_eigenvectors(cfg.nep, *cfg.pairs);
  EXPECT_EQ(bounds["bounds"]["upper_krt"].get<double>(), b.upper_krt);
  EXPECT_EQ(bounds["bounds"]["upper_G"].get<double>(), *b.upper_G);
  const json s = run_json({"structured", "--config", data("small.json"), "--json"});
  EXPECT_EQ(s["eta"].get<double>(), structured_backward_error(cfg.nep, *cfg.pairs).eta());
}

TEST(Cli, RiemannianAgreesWithStructuredOnFlatStructures) {
  const json r = run_json({"riemannian", "--config", data("small.json"), "--json", "--rho",
                           "0.1", "--eps", "1e-8"});
  const json s = run_json({"structured", "--config", data("small.json"), "--json"});
  EXPECT_TRUE(r["converged"].get<bool>());
  EXPECT_LT(testing_support::rel_diff(r["eta"].get<double>(), s["eta"].get<double>()), 1e-8);
  EXPECT_LE(r["final_residual"].get<double>(), 1e-8 * r["residual_scale"].get<double>());
  EXPECT_FALSE(r["history"].empty());
  const json gn = run_json({"riemannian", "--config", data("small.json"), "--json", "--hessian",
                            "gauss_newton"});
  EXPECT_LT(testing_support::rel_diff(gn["eta"].get<double>(), s["eta"].get<double>()), 1e-6);
}

TEST(Cli, SymmetricReportsBoundAboveEta) {
  const json j = run_json({"symmetric", "--config", data("symmetric.json"), "--json"});
  EXPECT_EQ(j["problem"]["p"], 2);
  const double eta = j["eta"].get<double>();
  EXPECT_LE(eta, j["bounds"]["with_pinv"].get<double>() * (1 + 1e-8));
  EXPECT_GE(j["bounds"]["upper"].get<double>(), j["bounds"]["with_pinv"].get<double>());
}

TEST(Cli, NonFiniteBoundsBecomeNull) {
  // k = 3 < p = 4, so sigma_p(G) = 0.
  const json j = run_json({"bounds", "--config", data("beam20.json"), "--json"});
  EXPECT_EQ(j["problem"]["p"], 4);
  EXPECT_TRUE(j["bounds"]["upper_G_kappa"].is_null());
  EXPECT_FALSE(j["bounds"].contains("upper_G"));
  CliRun r = nepbe_cli({"bounds", "--config", data("beam20.json")});
  EXPECT_NE(r.out.find("bounds.upper_G_kappa"), std::string::npos);
  EXPECT_NE(r.out.find("inf"), std::string::npos);
}

TEST(Cli, HumanTableListsHeadlineNumbers) {
  CliRun r = nepbe_cli({"exact", "--config", data("small.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("eta "), std::string::npos);
  EXPECT_NE(r.out.find("residual_norm "), std::string::npos);
  EXPECT_EQ(r.out.find('{'), std::string::npos);
}

TEST(Cli, SaveWritesMatrices) {
  const fs::path dir = scratch("save");
  CliRun r = nepbe_cli({"exact", "--config", data("small.json"), "--save", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "left.mtx"));
  EXPECT_TRUE(fs::exists(dir / "right_3.mtx"));

  const fs::path sd = scratch("solve");
  r = nepbe_cli({"solve", "--config", data("small_solve.json"), "--save", sd.string(), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const EigenpairSet back =
      read_eigenpairs((sd / "lambdas.txt").string(), (sd / "V.mtx").string());
  const json j = json::parse(r.out);
  ASSERT_EQ(back.size(), 2);
  for (Index i = 0; i < 2; ++i) {
    EXPECT_EQ(back.lambdas(i).real(), j["eigenvalues"][static_cast<std::size_t>(i)][0].get<double>());
    EXPECT_LT(j["relative_residuals"][static_cast<std::size_t>(i)].get<double>(), 1e-10);
  }
}

TEST(Cli, PerturbedGalleryProblem) {
  const json j = run_json({"exact", "--config", data("beam20.json"), "--json", "--perturb",
                           "1e-3", "--perturb-seed", "3"});
  EXPECT_NEAR(j["perturbation_norm"].get<double>(), 1e-3, 1e-12);
  EXPECT_GT(j["eta"].get<double>(), 0.0);
  EXPECT_LE(j["eta"].get<double>(), 1e-3 * (1 + 1e-8));
}

TEST(Cli, BenchWritesDatFiles) {
  const fs::path dir = scratch("bench");
  CliRun r = nepbe_cli({"bench", "beam-p3", "--out", dir.string(), "--count", "5", "--n", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "beam-p3" / "bounds.dat"));
  EXPECT_TRUE(fs::exists(dir / "beam-p3" / "eigenvalues.csv"));
  std::ifstream in(dir / "beam-p3" / "bounds.dat");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, 6);
}
