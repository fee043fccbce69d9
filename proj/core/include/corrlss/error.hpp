#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace corrlss {

enum class Errc {
  DimensionTooSmall,
  ConstantRow,
  RealShift,
  OnSupport,
  BranchAmbiguous,
  UndefinedAtAtom,
  NonConvergent,
  SingularityNearContour,
  ContoursIntersect,
  DegenerateVariance,
  LogOfNonpositiveEigenvalue,
  InvalidSpec,
  InvalidArgument,
  FileNotFound,
  RaggedRows,
  NonNumericCell,
};

std::string_view to_string(Errc code);

// True for failures of the numerical machinery (as opposed to bad input).
bool is_numerical(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace corrlss
