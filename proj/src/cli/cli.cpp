#include "scrooge/cli.hpp"

#include <CLI11.hpp>
#include <boost/version.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "scrooge/coinchannel.hpp"
#include "scrooge/densities.hpp"
#include "scrooge/dicechannel.hpp"
#include "scrooge/infotheory.hpp"
#include "scrooge/json.hpp"
#include "scrooge/sampling.hpp"
#include "scrooge/verify.hpp"

namespace scrooge::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

std::string versions() {
  std::ostringstream s;
  s << "scrooge " << kVersion << "; eigen " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.'
    << EIGEN_MINOR_VERSION << "; boost " << BOOST_VERSION / 100000 << '.' << BOOST_VERSION / 100 % 1000 << "; cli11 "
    << CLI11_VERSION << "; nlohmann_json " << NLOHMANN_JSON_VERSION_MAJOR << '.' << NLOHMANN_JSON_VERSION_MINOR << '.'
    << NLOHMANN_JSON_VERSION_PATCH;
  return s.str();
}

// Flags that steer where and how fast a run happens but never what it
// computes; they are left out of the manifest's argument list.
bool placement_flag(const std::string& a) {
  for (const char* f : {"--out", "--threads", "--config"}) {
    const std::string flag(f);
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

std::vector<std::string> reproducible_args(const std::vector<std::string>& args) {
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (placement_flag(args[i])) {
      if (args[i].find('=') == std::string::npos) ++i;
      continue;
    }
    kept.push_back(args[i]);
  }
  return kept;
}

struct Options {
  // Global
  std::uint64_t seed = 42;
  unsigned threads = 0;
  std::string out_dir;
  std::string config;

  // Shared physics inputs
  std::vector<double> lambda;
  std::vector<double> at;
  std::string field = "complex";
  std::string mode = "rejection";
  std::size_t n = 0;
  std::size_t count = 100000;

  // info
  std::string measurement = "random";
  std::string batch_file;
  std::size_t measurements = 20;

  // simulate
  std::vector<double> bounds;
  double dmin = 0.0;
  std::size_t signals = 0;
  std::string placement = "lattice";
  std::size_t rounds = 1000000;
  std::string weighting = "realized";
  std::size_t bins = 100;

  // coin
  double script_n = 1.0;
  double script_nh = 0.0;
  double coin_lambda = 0.0;
  std::size_t perturbations = 100;
  std::size_t table_points = 199;

  // verify / rerun
  std::string target = "all";
  std::string manifest;
};

/// Collects output files so the manifest can list them with digests.
class Outputs {
 public:
  Outputs(std::string dir, std::ostream& out) : dir_(std::move(dir)), out_(out) {}

  bool to_files() const { return !dir_.empty(); }

  /// Written to DIR/name with --out, otherwise to standard output.
  void emit(const std::string& name, const std::string& content) {
    if (!to_files()) {
      out_ << content;
      return;
    }
    write(name, content);
    files_.push_back(Json{{"path", name}, {"fnv1a", fnv1a_hex(content)}});
  }

  void manifest(const std::string& command, const std::vector<std::string>& args, const SeedSpec& seed) {
    if (!to_files()) return;
    const auto kept = reproducible_args(args);
    std::string joined;
    for (const auto& a : kept) joined += a + '\n';
    Json m{{"command", command},
           {"argv", kept},
           {"config_digest", fnv1a_hex(joined)},
           {"seed", seed},
           {"versions", versions()},
           {"outputs", files_}};
    write("manifest.json", m.dump(2) + "\n");
  }

 private:
  void write(const std::string& name, const std::string& content) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    const fs::path path = fs::path(dir_) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << content)) fail(Errc::IoError, "cannot write " + path.string());
  }

  std::string dir_;
  std::ostream& out_;
  Json files_ = Json::array();
};

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

SamplingMode parse_mode(const std::string& s) {
  if (s == "rejection") return SamplingMode::Rejection;
  if (s == "importance") return SamplingMode::Importance;
  fail(Errc::InvalidArgument, "mode must be rejection or importance");
}

Spectrum spectrum_of(const Options& o) {
  if (o.lambda.empty()) fail(Errc::InvalidArgument, "--lambda is required");
  return Spectrum(o.lambda);
}

SimplexPoint point_of(const Options& o) {
  if (o.at.empty()) fail(Errc::InvalidArgument, "--at is required");
  return make_simplex_point(o.at);
}

std::string fixed5(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.5f\n", v);
  return buf;
}

std::string precise(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g\n", v);
  return buf;
}

SampleBatch load_batch(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(Errc::IoError, "cannot read " + path);
  return read_batch_csv(f);
}

Measurement measurement_of(const Options& o, std::size_t n, Field field, const SeedSpec& seed) {
  if (o.measurement == "eigen") return Measurement::eigenbasis(n, field);
  if (o.measurement == "trivial") return Measurement::trivial(n, field);
  if (o.measurement == "random") return random_complete_measurement(n, field, seed);
  fail(Errc::InvalidArgument, "--measurement must be eigen, random or trivial");
}

ChannelConfig channel_of(const Options& o, DieMode mode) {
  ChannelConfig c;
  c.bounds = o.bounds;
  c.mode = mode;
  if (o.n != 0 && o.n != c.outcomes() && o.n != c.bounds.size())
    fail(Errc::InvalidArgument, "--n does not match the number of bounds");
  if (o.placement == "lattice") {
    c.placement = Placement::Lattice;
  } else if (o.placement == "uniform") {
    c.placement = Placement::UniformRandom;
  } else {
    fail(Errc::InvalidArgument, "--placement must be lattice or uniform");
  }
  if (o.dmin > 0.0 && o.signals > 0) fail(Errc::InvalidArgument, "give --dmin or --signals, not both");
  if (o.dmin > 0.0) {
    c.d_min = o.dmin;
  } else if (o.signals > 0) {
    c.d_min = dmin_for_signal_count(c, o.signals);
  } else {
    fail(Errc::InvalidArgument, "--dmin or --signals is required");
  }
  c.validate();
  return c;
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::InvalidArgument:
    case Errc::IoError:
    case Errc::DimensionTooSmall:
    case Errc::DimensionMismatch:
    case Errc::NotNormalized:
    case Errc::NegativeCoordinate:
    case Errc::FieldMismatch:
    case Errc::OddDimension:
      return kUsage;
    default:
      return kNumerical;
  }
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
  for (const auto& a : args)
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  return false;
}

}  // namespace

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream f(path);
  if (!f) fail(Errc::IoError, "cannot read config " + path);
  Json config;
  try {
    config = Json::parse(f);
  } catch (const Json::exception& e) {
    fail(Errc::IoError, "config " + path + ": " + e.what());
  }
  if (!config.is_object()) fail(Errc::IoError, "config must be a JSON object");
  std::vector<std::string> merged = args;
  for (const auto& [key, value] : config.items()) {
    const std::string flag = "--" + key;
    if (has_flag(args, flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) merged.push_back(flag);
      continue;
    }
    std::string text;
    if (value.is_array()) {
      for (const auto& v : value) text += (text.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
    } else {
      text = value.is_string() ? value.get<std::string>() : value.dump();
    }
    merged.push_back(flag);
    merged.push_back(text);
  }
  return merged;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  try {
    args = expand_config(raw_args);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  Options o;
  CLI::App app{"Scrooge distribution toolkit"};
  app.name("scrooge");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", o.seed, "Master seed");
  app.add_option("--threads", o.threads, "Worker threads (default: SCROOGE_THREADS or 1)");
  app.add_option("--out", o.out_dir, "Directory for output files and manifest.json");
  app.add_option("--config", o.config, "JSON file supplying any flag");

  using Handler = std::function<int(Outputs&, const SeedSpec&, Parallelism)>;
  std::vector<std::pair<CLI::App*, Handler>> leaves;
  auto leaf = [&](CLI::App* group, const std::string& name, const std::string& help, Handler h) {
    CLI::App* sub = group->add_subcommand(name, help);
    sub->fallthrough();
    leaves.emplace_back(sub, std::move(h));
    return sub;
  };
  auto lambda_opt = [&](CLI::App* s) { s->add_option("--lambda", o.lambda, "Spectrum, comma separated")->delimiter(','); };
  auto field_opt = [&](CLI::App* s) { s->add_option("--field", o.field, "complex or real"); };

  // density
  CLI::App* density = app.add_subcommand("density", "Evaluate a density at a simplex point");
  density->require_subcommand(1);
  density->fallthrough();
  auto density_leaf = [&](const std::string& name, const std::string& help, std::function<double()> eval) {
    CLI::App* s = leaf(density, name, help, [eval](Outputs& io, const SeedSpec&, Parallelism) {
      io.emit("density.txt", fixed5(eval()));
      return kOk;
    });
    s->add_option("--at", o.at, "Simplex point, comma separated")->delimiter(',')->required();
    return s;
  };
  {
    auto* s = density_leaf("scrooge", "Scrooge density (complex, or real with --field real)", [&] {
      const auto kind = parse_field(o.field) == Field::Complex ? DensityKind::ScroogeComplex : DensityKind::ScroogeReal;
      return make_density(kind, spectrum_of(o))(point_of(o));
    });
    lambda_opt(s);
    field_opt(s);
  }
  {
    auto* s = density_leaf("scrooge-real", "Real-amplitude Scrooge density",
                           [&] { return scrooge_real_density(point_of(o), spectrum_of(o)); });
    lambda_opt(s);
  }
  {
    auto* s = density_leaf("uniform", "Density induced by the uniform sphere", [&] {
      const SimplexPoint x = point_of(o);
      return parse_field(o.field) == Field::Complex ? uniform_complex_density(x.size()) : uniform_real_density(x);
    });
    field_opt(s);
  }
  {
    auto* s = density_leaf("paired", "Paired (a,b) density for a real die of 2n outcomes",
                           [&] { return paired_ab_density(point_of(o), spectrum_of(o)); });
    lambda_opt(s);
  }

  // info
  CLI::App* info = app.add_subcommand("info", "Information quantities");
  info->require_subcommand(1);
  info->fallthrough();
  {
    auto* s = leaf(info, "mi", "Mutual information of a measurement on a Scrooge batch",
                   [&](Outputs& io, const SeedSpec& seed, Parallelism par) {
                     const SampleBatch batch =
                         o.batch_file.empty()
                             ? sample_scrooge(spectrum_of(o), parse_field(o.field), o.count, parse_mode(o.mode),
                                              seed.derive(0), par)
                             : load_batch(o.batch_file);
                     const auto meas = measurement_of(o, batch.dimension, batch.field, seed.derive(1));
                     const auto est = mutual_information(batch, meas, seed.derive(2), kBootstrapResamples, par);
                     Json j{{"mutual_information", est}};
                     if (!o.lambda.empty()) {
                       const Spectrum spec = spectrum_of(o);
                       j["subentropy"] = subentropy(spec);
                       j["entropy"] = von_neumann_entropy(spec);
                     }
                     io.emit("mi.json", dump(j));
                     return kOk;
                   });
    lambda_opt(s);
    field_opt(s);
    s->add_option("--mode", o.mode, "rejection or importance");
    s->add_option("--samples", o.count, "Batch size when sampling");
    s->add_option("--batch", o.batch_file, "Read the batch from a sample CSV instead");
    s->add_option("--measurement", o.measurement, "eigen, random or trivial");
  }
  {
    auto* s = leaf(info, "independence", "Mutual information across random measurements",
                   [&](Outputs& io, const SeedSpec& seed, Parallelism par) {
                     const auto rep = measurement_independence_report(spectrum_of(o), parse_field(o.field),
                                                                      o.measurements, o.count, seed, par);
                     io.emit("independence.json", dump(Json(rep)));
                     return kOk;
                   });
    lambda_opt(s);
    field_opt(s);
    s->add_option("--measurements", o.measurements, "Number of Haar-random bases");
    s->add_option("--samples", o.count, "Batch size");
  }
  {
    auto* s = leaf(info, "average", "Mean mutual information over random bases of the eigenstate ensemble",
                   [&](Outputs& io, const SeedSpec& seed, Parallelism par) {
                     const Spectrum spec = spectrum_of(o);
                     const AverageSource source = o.batch_file.empty()
                                                      ? AverageSource(DiscreteEnsemble::eigenstates(spec, parse_field(o.field)))
                                                      : AverageSource(load_batch(o.batch_file));
                     io.emit("average.json", dump(Json(average_mi_report(source, spec, o.measurements, seed, par))));
                     return kOk;
                   });
    lambda_opt(s);
    field_opt(s);
    s->add_option("--measurements", o.measurements, "Number of bases");
    s->add_option("--batch", o.batch_file, "Average over a sample CSV instead");
  }
  {
    auto* s = leaf(info, "subentropy", "Subentropy Q(lambda) in nats", [&](Outputs& io, const SeedSpec&, Parallelism) {
      io.emit("subentropy.txt", precise(subentropy(spectrum_of(o))));
      return kOk;
    });
    lambda_opt(s);
  }
  {
    auto* s = leaf(info, "entropy", "von Neumann entropy in nats", [&](Outputs& io, const SeedSpec&, Parallelism) {
      io.emit("entropy.txt", precise(von_neumann_entropy(spectrum_of(o))));
      return kOk;
    });
    lambda_opt(s);
  }

  // sample
  CLI::App* sample = app.add_subcommand("sample", "Draw pure-state samples as CSV");
  sample->require_subcommand(1);
  sample->fallthrough();
  {
    auto* s = leaf(sample, "sphere", "Uniform sphere", [&](Outputs& io, const SeedSpec& seed, Parallelism par) {
      std::ostringstream csv;
      write_batch_csv(csv, sample_uniform_sphere(o.n, parse_field(o.field), o.count, seed, par));
      io.emit("samples.csv", csv.str());
      return kOk;
    });
    s->add_option("--n", o.n, "Dimension")->required();
    field_opt(s);
    s->add_option("--count", o.count, "Number of samples");
  }
  {
    auto* s = leaf(sample, "scrooge", "Scrooge ensemble", [&](Outputs& io, const SeedSpec& seed, Parallelism par) {
      std::ostringstream csv;
      write_batch_csv(csv, sample_scrooge(spectrum_of(o), parse_field(o.field), o.count, parse_mode(o.mode), seed, par));
      io.emit("samples.csv", csv.str());
      return kOk;
    });
    lambda_opt(s);
    field_opt(s);
    s->add_option("--mode", o.mode, "rejection or importance");
    s->add_option("--count", o.count, "Number of samples");
  }

  // simulate
  CLI::App* simulate = app.add_subcommand("simulate", "Classical dice channels");
  simulate->require_subcommand(1);
  simulate->fallthrough();
  auto dice_leaf = [&](const std::string& name, const std::string& help, DieMode mode) {
    auto* s = leaf(simulate, name, help, [&o, mode](Outputs& io, const SeedSpec& seed, Parallelism par) {
      const ChannelConfig config = channel_of(o, mode);
      const auto signals = place_signal_set(config, seed.derive(0));
      const auto rolls = roll_dice(signals, o.rounds, seed.derive(1), par);
      if (o.weighting != "realized" && o.weighting != "expected")
        fail(Errc::InvalidArgument, "--weighting must be realized or expected");
      const auto weighting = o.weighting == "realized" ? RollWeighting::Realized : RollWeighting::Expected;
      InducedDensity induced = induced_density(signals, rolls, weighting);
      DensityKind target = DensityKind::ScroogeReal;
      if (mode == DieMode::PairedDie) {
        induced = ab_blind_marginalize(induced);
        target = DensityKind::ScroogeComplex;
      }
      const Binning bins{o.bins};
      const Spectrum spec = config.spectrum();
      const FitReport fit = induced.fit(make_density(target, spec), bins);
      Json fit_json{{"target", to_string(target)},
                    {"spectrum", std::vector<double>(spec.values().begin(), spec.values().end())},
                    {"d_min", config.d_min},
                    {"signals", signals.size()},
                    {"rounds", rolls.rounds()},
                    {"fit", fit}};
      if (io.to_files()) {
        std::ostringstream csv;
        write_rolls_csv(csv, rolls);
        io.emit("rolls.csv", csv.str());
        io.emit("histogram.json", dump(histogram_json(induced, bins, &fit)));
      }
      io.emit("fit.json", dump(fit_json));
      return kOk;
    });
    s->add_option("--bounds", o.bounds, "Mean bounds M_j (per pair for paired dice)")->delimiter(',')->required();
    s->add_option("--n", o.n, "Number of outcomes (checked against --bounds)");
    s->add_option("--dmin", o.dmin, "Fisher spacing of the signal lattice");
    s->add_option("--signals", o.signals, "Choose d_min for about this many signals");
    s->add_option("--placement", o.placement, "lattice or uniform");
    s->add_option("--rounds", o.rounds, "Number of rolls");
    s->add_option("--weighting", o.weighting, "realized or expected");
    s->add_option("--bins", o.bins, "Histogram cells");
  };
  dice_leaf("dice", "Real die reproducing the real Scrooge density", DieMode::RealDie);
  dice_leaf("paired-dice", "Paired die reproducing the complex Scrooge density", DieMode::PairedDie);

  // coin
  CLI::App* coin = app.add_subcommand("coin", "Two-outcome coin channel");
  coin->require_subcommand(1);
  coin->fallthrough();
  auto coin_solution = [&o]() {
    if (o.coin_lambda > 0.0) return solve_coin_for_lambda(o.coin_lambda, o.script_n);
    return solve_coin(o.script_n, o.script_nh);
  };
  auto coin_opts = [&](CLI::App* s) {
    s->add_option("--lambda", o.coin_lambda, "Solve for this lambda (with --N)");
    s->add_option("--N", o.script_n, "Expected total rolls");
    s->add_option("--NH", o.script_nh, "Expected heads");
  };
  {
    auto* s = leaf(coin, "solve", "Constants of the optimal roll profile", [&](Outputs& io, const SeedSpec&, Parallelism) {
      const auto sol = coin_solution();
      io.emit("solution.json", dump(Json(sol)));
      if (io.to_files()) {
        std::ostringstream csv;
        write_coin_table_csv(csv, sol, o.table_points);
        io.emit("coin_table.csv", csv.str());
      }
      return kOk;
    });
    coin_opts(s);
    s->add_option("--table-points", o.table_points, "Rows of coin_table.csv");
  }
  {
    auto* s = leaf(coin, "mismatch", "Coin density against real Scrooge", [&](Outputs& io, const SeedSpec&, Parallelism) {
      const auto sol = coin_solution();
      io.emit("mismatch.json", dump(Json{{"solution", sol}, {"mismatch", scrooge_mismatch_report(sol)}}));
      return kOk;
    });
    coin_opts(s);
  }
  {
    auto* s = leaf(coin, "optimality", "Stationarity under constrained perturbations",
                   [&](Outputs& io, const SeedSpec& seed, Parallelism par) {
                     const auto sol = coin_solution();
                     const auto rep = variational_optimality_check(sol, o.perturbations, seed, par);
                     io.emit("optimality.json", dump(Json{{"solution", sol}, {"optimality", rep}}));
                     return rep.passed ? kOk : kVerification;
                   });
    coin_opts(s);
    s->add_option("--perturbations", o.perturbations, "Number of perturbations");
  }

  // verify
  {
    auto* s = leaf(&app, "verify", "Run the acceptance suite (all or one module)",
                   [&](Outputs& io, const SeedSpec&, Parallelism par) {
                     const VerifyOptions vo{o.seed, par};
                     const auto ids = criteria_for(o.target);
                     std::vector<CriterionResult> results;
                     bool ok = true;
                     for (int id : ids) {
                       results.push_back(run_criterion(id, vo));
                       out << format_result_line(results.back()) << std::endl;
                       ok = ok && results.back().passed();
                     }
                     if (io.to_files()) io.emit("verify.json", dump(verification_json(results, vo)));
                     out << (ok ? "verification passed" : "verification FAILED") << std::endl;
                     return ok ? kOk : kVerification;
                   });
    s->add_option("target", o.target, "all, densities, sampling, infotheory, dicechannel, coinchannel, core or 1..12");
  }

  // rerun
  std::vector<std::string> rerun_args;
  CLI::App* rerun = app.add_subcommand("rerun", "Re-execute a manifest and compare output digests");
  rerun->fallthrough();
  rerun->add_option("manifest", o.manifest, "manifest.json of an earlier run")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    const Parallelism par{o.threads};
    if (rerun->parsed()) {
      std::ifstream f(o.manifest);
      if (!f) fail(Errc::IoError, "cannot read " + o.manifest);
      const Json m = Json::parse(f);
      auto inner = m.at("argv").get<std::vector<std::string>>();
      if (!o.out_dir.empty()) inner.insert(inner.end(), {"--out", o.out_dir});
      if (o.threads != 0) inner.insert(inner.end(), {"--threads", std::to_string(o.threads)});
      const int code = run(inner, out, err);
      if (code != kOk || o.out_dir.empty()) return code;
      std::ifstream g(fs::path(o.out_dir) / "manifest.json");
      const Json again = Json::parse(g);
      if (again.at("outputs") != m.at("outputs")) {
        err << "rerun: output digests differ from the manifest\n";
        return kVerification;
      }
      out << "rerun: " << m.at("outputs").size() << " outputs reproduced\n";
      return kOk;
    }
    for (auto& [sub, handler] : leaves) {
      if (!sub->parsed()) continue;
      std::string command;
      for (const CLI::App* a = sub; a && a != &app; a = a->get_parent()) command = a->get_name() + (command.empty() ? "" : " " + command);
      Outputs io(o.out_dir, out);
      const SeedSpec seed{o.seed, 0};
      const int code = handler(io, seed, par);
      io.manifest(command, args, seed);
      return code;
    }
    err << "error: no command\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error [" << errc_name(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace scrooge::cli
