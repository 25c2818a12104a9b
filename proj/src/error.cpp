#include "scrooge/error.hpp"

namespace scrooge {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::DimensionTooSmall: return "DimensionTooSmall";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NotNormalized: return "NotNormalized";
    case Errc::NegativeCoordinate: return "NegativeCoordinate";
    case Errc::FieldMismatch: return "FieldMismatch";
    case Errc::Overflow: return "Overflow";
    case Errc::BoundaryDivergence: return "BoundaryDivergence";
    case Errc::DegenerateSpectrum: return "DegenerateSpectrum";
    case Errc::OddDimension: return "OddDimension";
    case Errc::NotCompletelyMixed: return "NotCompletelyMixed";
    case Errc::NotComplete: return "NotComplete";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::DensityMismatch: return "DensityMismatch";
    case Errc::EmptyRegion: return "EmptyRegion";
    case Errc::NonpositiveMean: return "NonpositiveMean";
    case Errc::DomainError: return "DomainError";
    case Errc::NoRoot: return "NoRoot";
    case Errc::QuadratureFailure: return "QuadratureFailure";
    case Errc::SymmetricCase: return "SymmetricCase";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace scrooge
