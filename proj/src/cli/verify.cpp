#include "scrooge/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>

#include "scrooge/coinchannel.hpp"
#include "scrooge/densities.hpp"
#include "scrooge/dicechannel.hpp"
#include "scrooge/distortion.hpp"
#include "scrooge/fit.hpp"
#include "scrooge/infotheory.hpp"
#include "scrooge/quadrature.hpp"
#include "scrooge/sampling.hpp"

namespace scrooge {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> values(const Spectrum& s) { return {s.values().begin(), s.values().end()}; }

SimplexDensity density_of(DensityKind kind, const Spectrum& spec) { return make_density(kind, spec); }

/// Random point of the open simplex with every coordinate at least `floor`.
std::vector<double> random_simplex(Rng& rng, std::size_t n, double floor) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> x(n);
  double s = 0.0;
  for (double& v : x) s += (v = e(rng));
  for (double& v : x) v = floor + (1.0 - n * floor) * v / s;
  return x;
}

// 1. Normalization of the Scrooge densities.
void normalization(CriterionResult& r, const SeedSpec& seed) {
  r.title = "density normalization";
  r.time_limit = 120.0;
  const std::vector<Spectrum> specs{Spectrum({0.7, 0.3}), Spectrum({0.5, 0.3, 0.2}), Spectrum({0.4, 0.3, 0.2, 0.1})};
  double worst = 0.0;
  r.checks_passed = true;
  std::uint64_t k = 0;
  for (auto kind : {DensityKind::ScroogeComplex, DensityKind::ScroogeReal}) {
    for (const auto& spec : specs) {
      const std::size_t n = spec.size();
      // The simplex point rebuilds its last coordinate as 1 - sum, which
      // rounds a tiny chart coordinate to zero. The densities are invariant
      // under permuting x and lambda together, so the largest coordinate is
      // moved last first.
      std::vector<SimplexDensity> swapped;
      for (std::size_t j = 0; j < n; ++j) {
        auto l = values(spec);
        std::swap(l[j], l[n - 1]);
        swapped.push_back(density_of(kind, Spectrum(l)));
      }
      const SimplexIntegrand f = [&](std::span<const double> x) {
        std::vector<double> v(x.begin(), x.end());
        const std::size_t j = std::max_element(v.begin(), v.end()) - v.begin();
        std::swap(v[j], v[n - 1]);
        return swapped[j](make_simplex_point(std::move(v)));
      };
      const bool qmc = n == 4;
      const double mass = qmc ? integrate_simplex_qmc(f, n, 10'000'000, make_rng(seed.derive(k++))())
                              : integrate_simplex(f, n, 1e-8);
      const double err = std::abs(mass - 1.0);
      worst = std::max(worst, err);
      if (!(err < 1e-3)) r.checks_passed = false;
      r.details["cases"].push_back(Json{{"density", to_string(kind)},
                                        {"spectrum", values(spec)},
                                        {"method", qmc ? "shifted sobol, 1e7 points" : "gauss-legendre"},
                                        {"mass", mass}});
    }
  }
  r.details["max_error"] = worst;
  r.summary = "max |mass - 1| = " + fmt("%.2e", worst) + " (tol 1e-3; n=4 by QMC at 1e7)";
}

// 2. sigma = n tau <y|rho|y> J pointwise.
void assembly(CriterionResult& r, const SeedSpec& seed) {
  r.title = "assembly identity";
  r.time_limit = 60.0;
  Rng rng = make_rng(seed);
  std::uniform_int_distribution<std::size_t> pick_n(2, 4);
  double worst = 0.0;
  constexpr int kPoints = 10000;
  for (Field field : {Field::Complex, Field::Real}) {
    double field_worst = 0.0;
    for (int i = 0; i < kPoints; ++i) {
      const std::size_t n = pick_n(rng);
      const Spectrum spec(random_simplex(rng, n, 0.01));
      const SimplexPoint x = make_simplex_point(random_simplex(rng, n, 1e-4));
      const SimplexPoint y = distort_coords_inverse(x, spec);
      const double tau = field == Field::Complex ? uniform_complex_density(n) : uniform_real_density(y);
      const double lhs = static_cast<double>(n) * tau * expectation_factor(y, spec) * distort_jacobian(x, spec);
      const double sigma = field == Field::Complex ? scrooge_complex_density(x, spec) : scrooge_real_density(x, spec);
      field_worst = std::max(field_worst, std::abs(lhs - sigma) / sigma);
    }
    r.details[std::string(to_string(field))] = Json{{"points", kPoints}, {"max_relative_error", field_worst}};
    worst = std::max(worst, field_worst);
  }
  r.checks_passed = worst < 1e-10;
  r.summary = "max relative error " + fmt("%.2e", worst) + " over 2 x 1e4 points (tol 1e-10)";
}

// 3. Rejection sampler against the closed form.
void sampler(CriterionResult& r, const SeedSpec& seed, Parallelism par) {
  r.title = "sampler correctness";
  r.time_limit = 120.0;
  const Spectrum spec({0.7, 0.3});
  r.checks_passed = true;
  double worst_ks = 0.0, worst_rate = 0.0;
  std::uint64_t k = 0;
  for (Field field : {Field::Complex, Field::Real}) {
    const auto batch = sample_scrooge(spec, field, 100000, SamplingMode::Rejection, seed.derive(k++), par);
    const auto d = density_of(field == Field::Complex ? DensityKind::ScroogeComplex : DensityKind::ScroogeReal, spec);
    const TabulatedCdf cdf([&](double x) { return d(make_simplex_point({x, 1.0 - x})); });
    std::vector<double> x1(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) x1[i] = batch.points[i][0];
    const auto ks = ks_test(x1, {}, [&](double x) { return cdf(x); });
    const double expected_rate = 1.0 / (2.0 * spec.max());
    const double rate_err = std::abs(batch.acceptance_rate() - expected_rate);
    worst_ks = std::max(worst_ks, ks.statistic);
    worst_rate = std::max(worst_rate, rate_err);
    if (!(ks.statistic < 0.01) || !(rate_err < 0.01)) r.checks_passed = false;
    r.details[std::string(to_string(field))] = Json{{"samples", batch.size()},
                                                    {"ks_distance", ks.statistic},
                                                    {"ks_pvalue", ks.pvalue},
                                                    {"acceptance_rate", batch.acceptance_rate()},
                                                    {"expected_rate", expected_rate}};
  }
  r.summary = "KS " + fmt("%.4f", worst_ks) + " (< 0.01), |rate - 1/(n lmax)| " + fmt("%.4f", worst_rate) + " (< 0.01)";
}

// 4. Subentropy values and continuity across the degeneracy threshold.
void subentropy_values(CriterionResult& r) {
  r.title = "subentropy values";
  r.time_limit = 60.0;
  const double half = subentropy(Spectrum({0.5, 0.5}));
  const double e_half = std::abs(half - (std::log(2.0) - 0.5));
  const double q73 = subentropy(Spectrum({0.7, 0.3}));
  const double e73 = std::abs(q73 - 0.166033);
  // Straddle the 1e-9 cluster gap in n = 2 and n = 3.
  double jump = 0.0;
  for (double g : {5e-10, 1e-9}) {
    const double below = 0.999 * g, above = 1.001 * g;
    jump = std::max(jump, std::abs(subentropy(Spectrum({0.5 + below / 2, 0.5 - below / 2})) -
                                   subentropy(Spectrum({0.5 + above / 2, 0.5 - above / 2}))));
    jump = std::max(jump, std::abs(subentropy(Spectrum({0.4 + below, 0.4, 0.2 - below})) -
                                   subentropy(Spectrum({0.4 + above, 0.4, 0.2 - above}))));
    jump = std::max(jump, std::abs(subentropy(Spectrum({0.3 + below, 0.3, 0.3 - below, 0.1})) -
                                   subentropy(Spectrum({0.3 + above, 0.3, 0.3 - above, 0.1}))));
  }
  r.checks_passed = e_half < 1e-9 && e73 < 1e-6 && jump < 1e-5;
  r.details = Json{{"Q_half", half}, {"error_half", e_half}, {"Q_0.7_0.3", q73}, {"error_0.7_0.3", e73},
                   {"max_jump", jump}};
  r.summary = "|Q(1/2,1/2) - (ln2 - 1/2)| " + fmt("%.1e", e_half) + ", |Q(0.7,0.3) - 0.166033| " + fmt("%.1e", e73) +
              ", jump " + fmt("%.1e", jump);
}

// 5. Measurement independence on Scrooge batches.
void independence(CriterionResult& r, const SeedSpec& seed, Parallelism par) {
  r.title = "measurement independence";
  r.time_limit = 300.0;
  r.checks_passed = true;
  double worst = 0.0;
  std::uint64_t k = 0;
  for (const auto& spec : {Spectrum({0.7, 0.3}), Spectrum({0.5, 0.3, 0.2})}) {
    const auto rep = measurement_independence_report(spec, Field::Complex, 20, 100000, seed.derive(k++), par);
    worst = std::max(worst, rep.max_deviation_se);
    if (!rep.within_3se_of_q) r.checks_passed = false;
    r.details["reports"].push_back(rep);
  }
  r.summary = "20 Haar measurements per spectrum, max |I - Q| / se = " + fmt("%.2f", worst) + " (< 3)";
}

// 6. Average over random bases of the eigenstate ensemble.
void averaging(CriterionResult& r, const SeedSpec& seed, Parallelism par) {
  r.title = "averaging theorem";
  r.time_limit = 300.0;
  r.checks_passed = true;
  double worst = 0.0;
  std::uint64_t k = 0;
  for (const auto& spec : {Spectrum({0.7, 0.3}), Spectrum({0.9, 0.1})}) {
    const auto ens = DiscreteEnsemble::eigenstates(spec, Field::Complex);
    const auto rep = average_mi_report(ens, spec, 500, seed.derive(k++), par);
    worst = std::max(worst, std::abs(rep.deviation));
    if (!(std::abs(rep.deviation) < 0.005)) r.checks_passed = false;
    r.details["reports"].push_back(rep);
  }
  r.summary = "500 random bases, max |mean I - Q| = " + fmt("%.2e", worst) + " nats (< 0.005)";
}

// 7. No estimate above the von Neumann entropy.
void holevo(CriterionResult& r, const SeedSpec& seed, Parallelism par) {
  r.title = "Holevo ceiling";
  r.time_limit = 300.0;
  const std::vector<Spectrum> specs{Spectrum({0.7, 0.3}), Spectrum({0.5, 0.3, 0.2}), Spectrum({0.4, 0.3, 0.2, 0.1})};
  double worst_z = -std::numeric_limits<double>::infinity();
  double worst_exact = -std::numeric_limits<double>::infinity();
  std::size_t pairs = 0;
  std::uint64_t stream = 0;
  for (const auto& spec : specs) {
    const double S = von_neumann_entropy(spec);
    for (Field field : {Field::Complex, Field::Real}) {
      for (auto mode : {SamplingMode::Rejection, SamplingMode::Importance}) {
        const SeedSpec s = seed.derive(stream++);
        const auto batch = sample_scrooge(spec, field, 20000, mode, s.derive(0), par);
        std::vector<Measurement> meas{Measurement::eigenbasis(spec.size(), field)};
        for (std::uint64_t m = 0; m < 10; ++m) meas.push_back(random_complete_measurement(spec.size(), field, s.derive(1).derive(m)));
        std::vector<MIEstimate> est(meas.size());
        parallel_for(meas.size(), par, [&](std::size_t m) {
          est[m] = mutual_information(batch, meas[m], s.derive(2).derive(m), kBootstrapResamples, Parallelism{1});
        });
        for (const auto& e : est) {
          worst_z = std::max(worst_z, (e.value - S) / e.std_error);
          ++pairs;
        }
      }
      const auto ens = DiscreteEnsemble::eigenstates(spec, field);
      worst_exact = std::max(worst_exact, mutual_information_discrete(ens, Measurement::eigenbasis(spec.size(), field)) - S);
      for (std::uint64_t m = 0; m < 20; ++m) {
        const auto meas = random_complete_measurement(spec.size(), field, seed.derive(1000 + stream).derive(m));
        worst_exact = std::max(worst_exact, mutual_information_discrete(ens, meas) - S);
        ++pairs;
      }
    }
  }
  r.checks_passed = worst_z <= 5.0 && worst_exact <= 1e-12;
  r.details = Json{{"pairs", pairs}, {"max_z_above_entropy", worst_z}, {"max_exact_excess", worst_exact}};
  r.summary = std::to_string(pairs) + " ensemble/measurement pairs, max (I - S)/se = " + fmt("%.2f", worst_z) +
              " (<= 5), exact excess " + fmt("%.1e", worst_exact);
}

struct DiceCase {
  std::vector<double> bounds;
  std::size_t signals;
};

// 8. Real die reproduces the real Scrooge density.
void dice(CriterionResult& r, const SeedSpec& seed, Parallelism par) {
  r.title = "dice-channel reproduction";
  r.time_limit = 600.0;
  r.checks_passed = true;
  // The lattice's own discreteness adds about K * rolls / signals to the
  // chi-square, so the constellation must be much larger than the roll count.
  const std::vector<DiceCase> cases{{{8, 2}, 2'000'000}, {{5, 3, 2}, 20'000'000}};
  std::string summary;
  std::uint64_t k = 0;
  for (const auto& c : cases) {
    ChannelConfig config;
    config.bounds = c.bounds;
    config.d_min = dmin_for_signal_count(config, c.signals);
    const auto signals = place_signal_set(config);
    const auto rolls = roll_dice(signals, 1'000'000, seed.derive(k++), par);
    const auto induced = induced_density(signals, rolls);
    const auto fit = induced.fit(make_density(DensityKind::ScroogeReal, config.spectrum()), Binning{});
    if (!(signals.size() >= 200 && fit.pvalue > 0.01)) r.checks_passed = false;
    r.details["cases"].push_back(Json{{"bounds", c.bounds},
                                      {"d_min", config.d_min},
                                      {"signals", signals.size()},
                                      {"rounds", rolls.rounds()},
                                      {"fit", fit}});
    summary += (summary.empty() ? "" : ", ") + std::string("n=") + std::to_string(c.bounds.size()) + " p=" +
               fmt("%.3f", fit.pvalue);
  }
  r.summary = summary + " (> 0.01; 1e6 rolls)";
}

// 9. Paired die, ab-blind marginal, and the density-level oracle.
void paired(CriterionResult& r, const SeedSpec& seed, Parallelism par) {
  r.title = "paired-dice reproduction";
  r.time_limit = 600.0;
  r.checks_passed = true;
  struct PairCase {
    std::vector<double> bounds;
    std::size_t signals;
    Placement placement;
  };
  // A 6-dimensional lattice has too few points per axis at any size that fits
  // in memory, so three pairs use volume-uniform placement.
  const std::vector<PairCase> cases{{{8, 2}, 16'000'000, Placement::Lattice},
                                    {{5, 3, 2}, 10'000'000, Placement::UniformRandom}};
  std::string summary;
  std::uint64_t k = 0;
  for (const auto& c : cases) {
    ChannelConfig config;
    config.bounds = c.bounds;
    config.mode = DieMode::PairedDie;
    config.placement = c.placement;
    config.d_min = dmin_for_signal_count(config, c.signals);
    const SeedSpec s = seed.derive(k++);
    const auto signals = place_signal_set(config, s.derive(0));
    const auto rolls = roll_dice(signals, 1'000'000, s.derive(1), par);
    const auto induced = ab_blind_marginalize(induced_density(signals, rolls));
    const auto fit = induced.fit(make_density(DensityKind::ScroogeComplex, config.spectrum()), Binning{});
    if (!(fit.pvalue > 0.01)) r.checks_passed = false;
    r.details["cases"].push_back(Json{{"pair_bounds", c.bounds},
                                      {"placement", c.placement == Placement::Lattice ? "lattice" : "uniform-random"},
                                      {"d_min", config.d_min},
                                      {"signals", signals.size()},
                                      {"rounds", rolls.rounds()},
                                      {"fit", fit}});
    summary += (summary.empty() ? "" : ", ") + std::to_string(c.bounds.size()) + " pairs p=" + fmt("%.3f", fit.pvalue);
  }
  // Sampling the 4-outcome real Scrooge law with halved pair weights samples
  // paired_ab_density; its marginal must be complex Scrooge.
  const Spectrum pair_spec({0.7, 0.3});
  const Spectrum split({0.35, 0.35, 0.15, 0.15});
  const auto batch = sample_scrooge(split, Field::Real, 100000, SamplingMode::Rejection, seed.derive(k++), par);
  const auto marg = ab_blind_marginalize(std::span<const SimplexPoint>(batch.points));
  const auto d = make_density(DensityKind::ScroogeComplex, pair_spec);
  const TabulatedCdf cdf([&](double x) { return d(make_simplex_point({x, 1.0 - x})); });
  std::vector<double> x1(marg.size());
  for (std::size_t i = 0; i < marg.size(); ++i) x1[i] = marg[i][0];
  const auto ks = ks_test(x1, {}, [&](double x) { return cdf(x); });
  // The paired density itself, checked against the sampled 4-outcome points.
  const auto paired_fit = goodness_of_fit(batch.points, {}, make_density(DensityKind::PairedAB, pair_spec), Binning{});
  if (!(ks.statistic < 0.01)) r.checks_passed = false;
  r.details["oracle"] = Json{{"samples", batch.size()}, {"ks_distance", ks.statistic}, {"ks_pvalue", ks.pvalue},
                             {"paired_density_fit", paired_fit}};
  r.summary = summary + " (> 0.01); oracle KS " + fmt("%.4f", ks.statistic) + " (< 0.01)";
}

// 10. Region moments for random configurations.
void moments(CriterionResult& r, const SeedSpec& seed) {
  r.title = "region moments";
  r.time_limit = 300.0;
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> bound(0.5, 10.0);
  std::uniform_int_distribution<std::size_t> pick_n(2, 3);
  r.checks_passed = true;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    ChannelConfig c;
    c.mode = i % 2 == 0 ? DieMode::RealDie : DieMode::PairedDie;
    const std::size_t n = pick_n(rng);
    for (std::size_t j = 0; j < n; ++j) c.bounds.push_back(bound(rng));
    const auto m = region_moment_check(c, 100000, seed.derive(i));
    worst = std::max(worst, m.max_z);
    if (!m.passed) r.checks_passed = false;
    Json item = m;
    item["mode"] = c.mode == DieMode::RealDie ? "real" : "paired";
    item["bounds"] = c.bounds;
    r.details["configs"].push_back(item);
  }
  r.summary = "20 configs (real and paired), max z = " + fmt("%.2f", worst) + " (< 3)";
}

// 11. Coin protocol does not give the real Scrooge law.
void coin(CriterionResult& r, const SeedSpec& seed, Parallelism par) {
  r.title = "coin-channel mismatch";
  r.time_limit = 120.0;
  bool ok = true;
  double worst_res = 0.0;
  std::string parts;
  for (double l : {0.3, 0.7}) {
    const auto target = solve_coin_for_lambda(l, 10.0);
    // Solve from the physical request and check we land on the same lambda.
    const auto sol = solve_coin(target.script_N, target.script_NH);
    const auto mm = scrooge_mismatch_report(sol);
    const auto opt = variational_optimality_check(sol, 100, seed.derive(static_cast<std::uint64_t>(l * 10)), par);
    worst_res = std::max({worst_res, sol.residual_total, sol.residual_heads});
    ok = ok && std::abs(mm.coin_exponent - 1.5) <= 0.02 && std::abs(mm.scrooge_exponent - 2.0) <= 0.02 &&
         mm.kl_nats > 1e-3 && sol.residual_total < 1e-8 && sol.residual_heads < 1e-8 && opt.passed &&
         std::abs(sol.lambda - l) < 1e-9;
    r.details["cases"].push_back(Json{{"solution", sol}, {"mismatch", mm}, {"optimality", opt}});
    parts += (parts.empty() ? "" : "; ") + fmt("l=%.1f", l) + " exps " + fmt("%.4f", mm.coin_exponent) + "/" +
             fmt("%.4f", mm.scrooge_exponent) + " KL " + fmt("%.2e", mm.kl_nats);
  }
  const auto half = solve_coin_for_lambda(0.5);
  const Spectrum even({0.5, 0.5});
  double coincide = 0.0;
  for (int i = 1; i < 99; ++i) {
    const double x = i / 100.0;
    const double s = scrooge_real_density(make_simplex_point({x, 1.0 - x}), even);
    coincide = std::max(coincide, std::abs(coin_density(x, half) - s) / s);
  }
  ok = ok && coincide < 1e-10;
  r.checks_passed = ok;
  r.details["half_max_relative_difference"] = coincide;
  r.details["max_residual"] = worst_res;
  r.summary = parts + "; l=1/2 diff " + fmt("%.1e", coincide) + ", residual " + fmt("%.1e", worst_res);
}

// 12. Thread count does not change results.
void reproducibility(CriterionResult& r, const SeedSpec& seed) {
  r.title = "reproducibility";
  r.time_limit = 300.0;
  const Parallelism one{1}, many{4};
  double worst = 0.0;
  bool streams_equal = true;

  const Spectrum spec({0.5, 0.3, 0.2});
  const auto a = sample_scrooge(spec, Field::Complex, 20000, SamplingMode::Importance, seed.derive(0), one);
  const auto b = sample_scrooge(spec, Field::Complex, 20000, SamplingMode::Importance, seed.derive(0), many);
  streams_equal = streams_equal && a.points == b.points && a.weights == b.weights;

  const auto meas = random_complete_measurement(3, Field::Complex, seed.derive(1));
  const auto ma = mutual_information(a, meas, seed.derive(2), kBootstrapResamples, one);
  const auto mb = mutual_information(a, meas, seed.derive(2), kBootstrapResamples, many);
  worst = std::max({worst, std::abs(ma.value - mb.value), std::abs(ma.std_error - mb.std_error)});

  const auto avg_a = average_mi_report(DiscreteEnsemble::eigenstates(spec, Field::Complex), spec, 50, seed.derive(3), one);
  const auto avg_b = average_mi_report(DiscreteEnsemble::eigenstates(spec, Field::Complex), spec, 50, seed.derive(3), many);
  worst = std::max({worst, std::abs(avg_a.mean - avg_b.mean), std::abs(avg_a.std_error - avg_b.std_error)});

  ChannelConfig config;
  config.bounds = {5, 3, 2};
  config.d_min = dmin_for_signal_count(config, 10000);
  const auto signals = place_signal_set(config);
  const auto ra = roll_dice(signals, 50000, seed.derive(4), one);
  const auto rb = roll_dice(signals, 50000, seed.derive(4), many);
  streams_equal = streams_equal && ra.signal == rb.signal && ra.counts == rb.counts;

  const auto sol = solve_coin_for_lambda(0.7);
  const auto oa = variational_optimality_check(sol, 20, seed.derive(5), one);
  const auto ob = variational_optimality_check(sol, 20, seed.derive(5), many);
  worst = std::max(worst, std::abs(oa.max_relative_increase - ob.max_relative_increase));

  r.checks_passed = streams_equal && worst <= 1e-12;
  r.details = Json{{"threads", {1, 4}}, {"streams_identical", streams_equal}, {"max_difference", worst}};
  r.summary = std::string("1 vs 4 threads: streams ") + (streams_equal ? "identical" : "DIFFER") +
              ", max difference " + fmt("%.1e", worst) + " (<= 1e-12)";
}

}  // namespace

std::vector<int> criteria_for(std::string_view target) {
  static const std::map<std::string, std::vector<int>, std::less<>> modules{
      {"all", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}},
      {"densities", {1, 2, 4}},
      {"sampling", {3}},
      {"infotheory", {5, 6, 7}},
      {"dicechannel", {8, 9, 10}},
      {"coinchannel", {11}},
      {"core", {12}},
  };
  const auto it = modules.find(target);
  if (it != modules.end()) return it->second;
  // A single criterion number is accepted too.
  try {
    std::size_t used = 0;
    const int id = std::stoi(std::string(target), &used);
    if (used == target.size() && id >= 1 && id <= 12) return {id};
  } catch (const std::exception&) {
  }
  fail(Errc::InvalidArgument, "unknown verification target: " + std::string(target));
}

CriterionResult run_criterion(int id, const VerifyOptions& options) {
  CriterionResult r;
  r.id = id;
  const SeedSpec seed{options.seed, 100 + static_cast<std::uint64_t>(id)};
  const auto start = Clock::now();
  try {
    switch (id) {
      case 1: normalization(r, seed); break;
      case 2: assembly(r, seed); break;
      case 3: sampler(r, seed, options.par); break;
      case 4: subentropy_values(r); break;
      case 5: independence(r, seed, options.par); break;
      case 6: averaging(r, seed, options.par); break;
      case 7: holevo(r, seed, options.par); break;
      case 8: dice(r, seed, options.par); break;
      case 9: paired(r, seed, options.par); break;
      case 10: moments(r, seed); break;
      case 11: coin(r, seed, options.par); break;
      case 12: reproducibility(r, seed); break;
      default: fail(Errc::InvalidArgument, "criteria are numbered 1 to 12");
    }
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidArgument && r.title.empty()) throw;
    r.checks_passed = false;
    r.summary = std::string("error: ") + e.what();
    r.details["error"] = e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

std::vector<CriterionResult> run_verification(std::string_view target, const VerifyOptions& options) {
  std::vector<CriterionResult> out;
  for (int id : criteria_for(target)) out.push_back(run_criterion(id, options));
  return out;
}

Json verification_json(const std::vector<CriterionResult>& results, const VerifyOptions& options) {
  Json j;
  j["seed"] = options.seed;
  bool all = true;
  for (const auto& r : results) {
    all = all && r.checks_passed;
    j["criteria"].push_back(Json{{"id", r.id},
                                 {"title", r.title},
                                 {"passed", r.checks_passed},
                                 {"summary", r.summary},
                                 {"details", r.details}});
  }
  j["all_passed"] = all;
  return j;
}

std::string format_result_line(const CriterionResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "criterion %2d %s  ", r.id, r.passed() ? "PASS" : "FAIL");
  std::string line = head + r.title + " | " + r.summary;
  char tail[64];
  if (r.time_limit > 0.0) {
    std::snprintf(tail, sizeof tail, " [%.1f s, limit %.0f s%s]", r.seconds, r.time_limit,
                  r.within_time() ? "" : ", EXCEEDED");
  } else {
    std::snprintf(tail, sizeof tail, " [%.1f s]", r.seconds);
  }
  return line + tail;
}

}  // namespace scrooge
