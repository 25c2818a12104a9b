#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scrooge {

enum class Errc {
  DimensionTooSmall,
  DimensionMismatch,
  NotNormalized,
  NegativeCoordinate,
  FieldMismatch,
  Overflow,
  BoundaryDivergence,
  DegenerateSpectrum,
  OddDimension,
  NotCompletelyMixed,
  NotComplete,
  TooFewSamples,
  DensityMismatch,
  EmptyRegion,
  NonpositiveMean,
  DomainError,
  NoRoot,
  QuadratureFailure,
  SymmetricCase,
  InvalidArgument,
  IoError,
};

std::string_view errc_name(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map them to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

}  // namespace scrooge
