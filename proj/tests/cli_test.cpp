#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "scrooge/cli.hpp"
#include "scrooge/dicechannel.hpp"
#include "scrooge/infotheory.hpp"
#include "scrooge/json.hpp"
#include "scrooge/sampling.hpp"

using namespace scrooge;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("scrooge_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("density example") {
  const auto r = run({"density", "scrooge", "--field", "complex", "--lambda", "0.7,0.3", "--at", "0.5,0.5"});
  CHECK(r.code == 0);
  CHECK(r.out == "0.70560\n");
  // Closed form 2 / (l1 l2 L^3) with L = x1/l1 + x2/l2.
  CHECK(run({"density", "scrooge", "--lambda", "0.6,0.4", "--at", "0.5,0.5"}).out == "0.92160\n");
}

TEST_CASE("density variants") {
  CHECK(run({"density", "uniform", "--field", "real", "--at", "0.5,0.5"}).out == "0.63662\n");  // 2/pi
  CHECK(run({"density", "uniform", "--at", "0.2,0.3,0.5"}).out == "2.00000\n");                 // (n-1)!
  const auto real = run({"density", "scrooge-real", "--lambda", "0.5,0.5", "--at", "0.5,0.5"});
  CHECK(real.out == "0.63662\n");
  CHECK(run({"density", "scrooge", "--field", "real", "--lambda", "0.5,0.5", "--at", "0.5,0.5"}).out == real.out);
}

TEST_CASE("info matches the library") {
  const auto q = run({"info", "subentropy", "--lambda", "0.5,0.5"});
  CHECK(q.code == 0);
  CHECK(std::stod(q.out) == doctest::Approx(std::log(2.0) - 0.5).epsilon(1e-11));
  CHECK(std::stod(run({"info", "entropy", "--lambda", "0.5,0.5"}).out) == doctest::Approx(std::log(2.0)));

  const auto mi = run({"info", "mi", "--lambda", "0.7,0.3", "--samples", "2000", "--seed", "7"});
  REQUIRE(mi.code == 0);
  const Json j = Json::parse(mi.out);
  const SeedSpec seed{7, 0};
  const auto batch = sample_scrooge(Spectrum({0.7, 0.3}), Field::Complex, 2000, SamplingMode::Rejection, seed.derive(0));
  const auto meas = random_complete_measurement(2, Field::Complex, seed.derive(1));
  const auto est = mutual_information(batch, meas, seed.derive(2));
  CHECK(j["mutual_information"]["value"].get<double>() == est.value);
  CHECK(j["mutual_information"]["std_error"].get<double>() == est.std_error);
}

TEST_CASE("sample output is the library batch") {
  const auto r = run({"sample", "scrooge", "--lambda", "0.5,0.3,0.2", "--count", "300", "--seed", "3"});
  REQUIRE(r.code == 0);
  std::ostringstream direct;
  write_batch_csv(direct, sample_scrooge(Spectrum({0.5, 0.3, 0.2}), Field::Complex, 300, SamplingMode::Rejection,
                                         SeedSpec{3, 0}));
  CHECK(r.out == direct.str());
  CHECK(run({"sample", "scrooge", "--lambda", "0.5,0.3,0.2", "--count", "300", "--seed", "3", "--threads", "3"}).out ==
        r.out);
}

TEST_CASE("simulate writes rolls, histogram, fit and manifest") {
  const fs::path dir = scratch("dice");
  const std::vector<std::string> args{"simulate", "dice", "--n", "2", "--bounds", "8,2", "--dmin", "0.2",
                                      "--rounds", "5000", "--out", dir.string()};
  const auto r = run(args);
  REQUIRE(r.code == 0);
  for (const char* f : {"rolls.csv", "histogram.json", "fit.json", "manifest.json"}) CHECK(fs::exists(dir / f));

  // Rolls equal a direct library run with the same derived streams.
  ChannelConfig config;
  config.bounds = {8, 2};
  config.d_min = 0.2;
  const SeedSpec seed{42, 0};
  const auto signals = place_signal_set(config, seed.derive(0));
  std::ostringstream rolls;
  write_rolls_csv(rolls, roll_dice(signals, 5000, seed.derive(1)));
  CHECK(slurp(dir / "rolls.csv") == rolls.str());

  const Json m = Json::parse(slurp(dir / "manifest.json"));
  CHECK(m["command"] == "simulate dice");
  CHECK(m["seed"]["seed"] == 42);
  for (const auto& o : m["outputs"]) CHECK(o["fnv1a"] == fnv1a_hex(slurp(dir / o["path"].get<std::string>())));
  // The output location is not part of the recorded arguments.
  for (const auto& a : m["argv"]) CHECK(a.get<std::string>().find(dir.string()) == std::string::npos);

  // Rerunning elsewhere with more threads reproduces every byte.
  const fs::path again = scratch("dice_again");
  const auto rr = run({"rerun", (dir / "manifest.json").string(), "--out", again.string(), "--threads", "3"});
  CHECK(rr.code == 0);
  CHECK(slurp(again / "manifest.json") == slurp(dir / "manifest.json"));
  CHECK(slurp(again / "histogram.json") == slurp(dir / "histogram.json"));

  // A manifest whose digests do not match is a verification failure.
  Json bad = m;
  bad["outputs"][0]["fnv1a"] = "0000000000000000";
  const fs::path bad_path = dir / "tampered.json";
  std::ofstream(bad_path) << bad.dump();
  CHECK(run({"rerun", bad_path.string(), "--out", scratch("dice_bad").string()}).code == cli::kVerification);
}

TEST_CASE("config file supplies flags and the command line overrides it") {
  const fs::path dir = scratch("config");
  fs::create_directories(dir);
  const fs::path cfg = dir / "cfg.json";
  std::ofstream(cfg) << R"({"lambda": [0.7, 0.3], "at": "0.5,0.5", "field": "complex"})";
  CHECK(run({"density", "scrooge", "--config", cfg.string()}).out == "0.70560\n");
  CHECK(run({"density", "scrooge", "--config", cfg.string(), "--lambda", "0.6,0.4"}).out == "0.92160\n");

  const auto merged = cli::expand_config({"density", "scrooge", "--config", cfg.string(), "--at=0.2,0.8"});
  CHECK(std::count(merged.begin(), merged.end(), "--lambda") == 1);
  CHECK(std::count(merged.begin(), merged.end(), "--at") == 0);
  CHECK(std::find(merged.begin(), merged.end(), "0.7,0.3") != merged.end());
  CHECK(run({"density", "scrooge", "--config", (dir / "missing.json").string()}).code == cli::kUsage);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"nonsense"}).code == cli::kUsage);
  CHECK(run({"density", "scrooge", "--at", "0.5,0.5"}).code == cli::kUsage);            // no --lambda
  CHECK(run({"density", "scrooge", "--lambda", "0.7,0.3", "--at", "0.5,0.2,0.3"}).code == cli::kUsage);
  CHECK(run({"coin", "solve", "--N", "1", "--NH", "1.5"}).code == cli::kNumerical);   // no root
  CHECK(run({"simulate", "paired-dice", "--bounds", "1", "--dmin", "50", "--rounds", "10"}).code == cli::kNumerical);
  CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("verify runs a single criterion") {
  const auto r = run({"verify", "4"});
  CHECK(r.code == 0);
  CHECK(r.out.find("criterion  4 PASS") != std::string::npos);
  CHECK(run({"verify", "nothing"}).code == cli::kUsage);
}
