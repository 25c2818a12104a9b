#include "scrooge/json.hpp"

#include <cstdio>

namespace scrooge {

void to_json(Json& j, const SeedSpec& s) { j = Json{{"seed", s.seed}, {"stream", s.stream_id}}; }

void to_json(Json& j, const KsResult& r) {
  j = Json{{"statistic", r.statistic}, {"pvalue", r.pvalue}, {"effective_samples", r.effective_samples}};
}

void to_json(Json& j, const FitReport& r) {
  j = Json{{"statistic", r.statistic},       {"pvalue", r.pvalue},
           {"dof", r.dof},                   {"categories", r.categories},
           {"effective_samples", r.effective_samples}, {"density_mass", r.density_mass}};
  if (r.ks) j["ks"] = *r.ks;
}

void to_json(Json& j, const MIEstimate& r) {
  j = Json{{"value", r.value}, {"std_error", r.std_error}, {"samples_used", r.samples_used}};
}

void to_json(Json& j, const MeasurementResult& r) { j = Json{{"value", r.value}, {"std_error", r.std_error}}; }

void to_json(Json& j, const IndependenceReport& r) {
  j = Json{{"spectrum", r.spectrum},
           {"field", to_string(r.field)},
           {"samples", r.samples},
           {"subentropy", r.subentropy},
           {"entropy", r.entropy},
           {"spread", r.spread},
           {"max_deviation_se", r.max_deviation_se},
           {"within_3se_of_q", r.within_3se_of_q},
           {"spread_within_3se", r.spread_within_3se},
           {"measurements", r.measurements}};
}

void to_json(Json& j, const AverageReport& r) {
  j = Json{{"spectrum", r.spectrum},     {"field", to_string(r.field)}, {"measurements", r.measurements},
           {"replicates", r.replicates}, {"mean", r.mean},              {"std_error", r.std_error},
           {"subentropy", r.subentropy}, {"deviation", r.deviation}};
}

void to_json(Json& j, const MomentCheck& r) {
  j = Json{{"mean", r.mean}, {"std_error", r.std_error}, {"target", r.target}, {"max_z", r.max_z},
           {"passed", r.passed}};
}

void to_json(Json& j, const CoinSolution& r) {
  j = Json{{"lambda", r.lambda},
           {"c", r.c},
           {"A", r.A},
           {"script_N", r.script_N},
           {"script_NH", r.script_NH},
           {"residual_total", r.residual_total},
           {"residual_heads", r.residual_heads}};
}

void to_json(Json& j, const MismatchReport& r) {
  j = Json{{"lambda", r.lambda},
           {"sup_norm", r.sup_norm},
           {"kl_nats", r.kl_nats},
           {"coin_exponent", r.coin_exponent},
           {"scrooge_exponent", r.scrooge_exponent}};
}

void to_json(Json& j, const OptimalityReport& r) {
  j = Json{{"perturbations", r.perturbations},
           {"relative_size", r.relative_size},
           {"max_relative_increase", r.max_relative_increase},
           {"max_first_order", r.max_first_order},
           {"max_residual", r.max_residual},
           {"control_change", r.control_change},
           {"scaling_ratio", r.scaling_ratio},
           {"passed", r.passed}};
}

Json histogram_json(const InducedDensity& induced, Binning bins, const FitReport* fit) {
  const std::size_t n = induced.points.empty() ? 0 : induced.points.front().size();
  Json j;
  const SimplexBins b(n, bins);
  j["bins"] = Json{{"dimension", n},
                   {"requested", bins.bins},
                   {"cells", b.count()},
                   {"layout", n == 2 ? "x1-intervals" : "angle-grid"},
                   {"cell_nodes", bins.cell_nodes}};
  j["weighting"] = induced.weighting == RollWeighting::Realized ? "realized" : "expected";
  j["rounds"] = induced.rounds;
  j["masses"] = induced.histogram(b);
  if (fit) j["fit"] = *fit;
  return j;
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace scrooge
