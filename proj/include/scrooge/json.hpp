#pragma once

// JSON views of the library's reports, for the CLI and the verification
// suite. Doubles are written with round-trip precision.

#include <json.hpp>

#include "scrooge/coinchannel.hpp"
#include "scrooge/dicechannel.hpp"
#include "scrooge/fit.hpp"
#include "scrooge/infotheory.hpp"

namespace scrooge {

using Json = nlohmann::ordered_json;

void to_json(Json& j, const SeedSpec& s);
void to_json(Json& j, const KsResult& r);
void to_json(Json& j, const FitReport& r);
void to_json(Json& j, const MIEstimate& r);
void to_json(Json& j, const MeasurementResult& r);
void to_json(Json& j, const IndependenceReport& r);
void to_json(Json& j, const AverageReport& r);
void to_json(Json& j, const MomentCheck& r);
void to_json(Json& j, const CoinSolution& r);
void to_json(Json& j, const MismatchReport& r);
void to_json(Json& j, const OptimalityReport& r);

/// Bin layout, normalized masses and (optionally) the fit report.
Json histogram_json(const InducedDensity& induced, Binning bins, const FitReport* fit = nullptr);

/// 64-bit FNV-1a, as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

}  // namespace scrooge
