#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fracseg/cli.hpp"
#include "fracseg/errors.hpp"
#include "fracseg/montecarlo.hpp"
#include "fracseg/pipeline.hpp"

using namespace fracseg;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fracseg");
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "fracseg_unit";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

std::size_t data_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#' && line != "t,x") ++rows;
  }
  return rows;
}

}  // namespace

TEST_CASE("simulate writes N+1 rows and is deterministic") {
  const auto a = scratch("sim_a.csv");
  const auto b = scratch("sim_b.csv");
  const std::vector<std::string> common{"simulate", "--family", "fgn", "--n", "300",
                                        "--tau", "0.5", "--exponents", "0.2,0.8", "--seed", "9"};
  auto args = common;
  args.insert(args.end(), {"--out", a.string()});
  REQUIRE(cli(args).code == kExitOk);
  args = common;
  args.insert(args.end(), {"--out", b.string()});
  REQUIRE(cli(args).code == kExitOk);
  const std::string sa = slurp(a);
  CHECK(sa == slurp(b));
  CHECK(data_rows(sa) == 301);
  const auto side = nlohmann::json::parse(slurp(a.string() + ".json"));
  CHECK(side["schema"] == kSimulateSchema);
  CHECK(side["rows"] == 301);
  CHECK(side["seed"] == 9);
  args = common;
  args[10] = "10";
  args.insert(args.end(), {"--out", b.string()});
  REQUIRE(cli(args).code == kExitOk);
  CHECK(sa != slurp(b));
}

TEST_CASE("simulate then detect round trip") {
  const auto csv = scratch("rt.csv");
  const auto res = scratch("rt.json");
  const auto plot = scratch("rt_plot.csv");
  REQUIRE(cli({"simulate", "--family", "fgn", "--n", "20000", "--tau", "0.5", "--exponents",
               "0.2,0.8", "--seed", "3", "--out", csv.string()})
              .code == kExitOk);
  const auto r = cli({"detect", "--family", "fgn", "--m", "1", "--input", csv.string(), "--out",
                      res.string(), "--plot", plot.string(), "--seed", "3"});
  REQUIRE_MESSAGE(r.code == kExitOk, r.err);
  const auto j = nlohmann::json::parse(slurp(res));
  CHECK(j["schema"] == kResultSchema);
  CHECK(j["input"]["N"] == 20000);
  CHECK(j["input"]["content_hash"] == fnv1a_hex(slurp(csv)));
  REQUIRE(j["tau_hat"].size() == 1);
  const double tau = j["tau_hat"][0];
  CHECK(tau > 0.0);
  CHECK(tau < 1.0);
  REQUIRE(j["segments"].size() == 2);
  for (const auto& s : j["segments"]) {
    CHECK(s["gof"]["df"] == static_cast<int>(s["log_variance"].size()) - 2);
    const double lo = s["fgls"]["ci_alpha"][0];
    const double hi = s["fgls"]["ci_alpha"][1];
    const double e = s["fgls"]["alpha"];
    CHECK(lo < e);
    CHECK(e < hi);
  }
  CHECK(slurp(plot).find("segment,scale_index,log_scale,log_variance,fitted") != std::string::npos);

  const auto again = scratch("rt2.json");
  REQUIRE(cli({"detect", "--family", "fgn", "--m", "1", "--input", csv.string(), "--out",
               again.string(), "--seed", "3"})
              .code == kExitOk);
  CHECK(slurp(again) == slurp(res));
}

TEST_CASE("detect with m = 0 returns one segment") {
  const auto csv = scratch("m0.csv");
  REQUIRE(cli({"simulate", "--family", "fgn", "--n", "4000", "--exponents", "0.5", "--out",
               csv.string()})
              .code == kExitOk);
  const auto r = cli({"detect", "--m", "0", "--input", csv.string()});
  REQUIRE_MESSAGE(r.code == kExitOk, r.err);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["tau_hat"].empty());
  CHECK(j["segments"].size() == 1);
}

TEST_CASE("exit codes") {
  CHECK(cli({"--help"}).code == kExitOk);
  CHECK(cli({"bogus"}).code == kExitValidation);
  CHECK(cli({"simulate", "--n", "100", "--exponents", "1.5", "--out", scratch("x.csv").string()})
            .code == kExitValidation);
  CHECK(cli({"simulate", "--n", "100", "--exponents", "0.5"}).code == kExitValidation);
  CHECK(cli({"detect", "--m", "1", "--input", scratch("missing.csv").string()}).code == kExitIo);

  const auto bad = scratch("bad.csv");
  spit(bad, "x\n1.0\n2.0\nabc\n3.0\n");
  const auto r = cli({"detect", "--m", "0", "--input", bad.string()});
  CHECK(r.code == kExitIo);
  CHECK(r.err.find("row 4") != std::string::npos);
  CHECK(r.err.find("column 1") != std::string::npos);
}

TEST_CASE("read_series_csv") {
  std::istringstream two("# comment\nt,x\n0,1\n0.5,2\n\n1.0,3\n1.5,4\n");
  const auto p = read_series_csv(two);
  CHECK(p.values == std::vector<double>{1, 2, 3, 4});
  CHECK(p.delta == doctest::Approx(0.5));
  std::istringstream uneven("0,1\n0.5,2\n1.7,3\n");
  CHECK_THROWS_AS(read_series_csv(uneven), IoError);
  std::istringstream one("1\n2\n3\n");
  CHECK(read_series_csv(one, 0.25).delta == 0.25);
  std::istringstream mismatch("0,1\n0.5,2\n1.0,3\n");
  CHECK_THROWS_AS(read_series_csv(mismatch, 0.3), DomainError);
  std::istringstream nan("1\nnan\n3\n");
  CHECK_THROWS_AS(read_series_csv(nan), IoError);
  std::istringstream shortin("1\n2\n");
  CHECK_THROWS(read_series_csv(shortin));
}

TEST_CASE("config file values are overridden by flags") {
  const auto cfg = scratch("cfg.json");
  const auto a = scratch("cfg_a.csv");
  const auto b = scratch("cfg_b.csv");
  spit(cfg, R"({"family": "fgn", "n": 200, "exponents": [0.3], "seed": 4})");
  REQUIRE(cli({"--config", cfg.string(), "simulate", "--out", a.string()}).code == kExitOk);
  REQUIRE(cli({"simulate", "--family", "fgn", "--n", "200", "--exponents", "0.3", "--seed", "4",
               "--out", b.string()})
              .code == kExitOk);
  CHECK(slurp(a) == slurp(b));
  REQUIRE(cli({"--config", cfg.string(), "simulate", "--n", "100", "--out", a.string()}).code ==
          kExitOk);
  CHECK(data_rows(slurp(a)) == 101);
  spit(cfg, R"({"n": 200, "exponents": [0.3], "bogus": 1})");
  CHECK(cli({"--config", cfg.string(), "simulate", "--out", a.string()}).code == kExitValidation);
}

TEST_CASE("montecarlo is deterministic and independent of the thread count") {
  MonteCarloConfig mc;
  mc.spec.tau_stars = {0.5};
  mc.spec.exponents = {0.2, 0.8};
  mc.spec.sigmas = {1.0, 1.0};
  mc.N = 4000;
  mc.reps = 2;
  mc.seed = 11;
  mc.options.m = 1;
  const auto one = run_montecarlo(mc);
  mc.threads = 2;
  const auto two = run_montecarlo(mc);
  REQUIRE(one.replicates.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(one.replicates[i].ok);
    CHECK(one.replicates[i].seed == 11 + i);
    CHECK(one.replicates[i].tau_hat == two.replicates[i].tau_hat);
    CHECK(one.replicates[i].exponent_fgls == two.replicates[i].exponent_fgls);
  }
  std::ostringstream s1;
  std::ostringstream s2;
  write_summary_csv(s1, one);
  write_summary_csv(s2, two);
  CHECK(s1.str() == s2.str());
  CHECK(s1.str().rfind("quantity,truth,mean,sigma_hat,sqrt_mse,count", 0) == 0);
}

TEST_CASE("default schedules") {
  const auto lrd = default_schedule(Family::FGN, 20000, 0.05);
  CHECK(lrd.a_N == doctest::Approx(std::pow(20000.0, 0.25)));
  CHECK(lrd.v_N == doctest::Approx(std::pow(20000.0, 0.25)));
  CHECK(lrd.warnings.empty());
  const auto fbm = default_schedule(Family::FBM, 20000, 0.05, 0.1);
  CHECK(fbm.a_N == doctest::Approx(std::pow(20000.0, 1.0 / 3 + 0.05)));
  const double A = 0.1;
  CHECK(fbm.v_N ==
        doctest::Approx(std::pow(20000.0, 2.0 / 3 * (1 - 2 * A) - 0.05 * (2 + 4 * A))));
  const auto lf = default_schedule(Family::LocallyFractional, 10000, 0.1);
  CHECK(lf.delta == doctest::Approx(std::pow(10000.0, -0.6)));
  CHECK(lf.v_N == doctest::Approx(std::pow(10000.0, 0.4)));
  CHECK_THROWS_AS(default_schedule(Family::FGN, 20000, 0.2), DomainError);
  CHECK(default_ell(1000) == 3);
  CHECK(default_ell(20000) == 30);
  CHECK(WaveletChoice::parse("band:1,4").to_string() == "band:1,4");
  CHECK(WaveletChoice::parse("poly:3").q == 3);
  CHECK_THROWS_AS(WaveletChoice::parse("haar"), DomainError);
}

TEST_CASE("fnv1a") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}
