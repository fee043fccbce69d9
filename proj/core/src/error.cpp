#include "corrlss/error.hpp"

namespace corrlss {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::DimensionTooSmall: return "DimensionTooSmall";
    case Errc::ConstantRow: return "ConstantRow";
    case Errc::RealShift: return "RealShift";
    case Errc::OnSupport: return "OnSupport";
    case Errc::BranchAmbiguous: return "BranchAmbiguous";
    case Errc::UndefinedAtAtom: return "UndefinedAtAtom";
    case Errc::NonConvergent: return "NonConvergent";
    case Errc::SingularityNearContour: return "SingularityNearContour";
    case Errc::ContoursIntersect: return "ContoursIntersect";
    case Errc::DegenerateVariance: return "DegenerateVariance";
    case Errc::LogOfNonpositiveEigenvalue: return "LogOfNonpositiveEigenvalue";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::FileNotFound: return "FileNotFound";
    case Errc::RaggedRows: return "RaggedRows";
    case Errc::NonNumericCell: return "NonNumericCell";
  }
  return "Unknown";
}

bool is_numerical(Errc code) {
  switch (code) {
    case Errc::NonConvergent:
    case Errc::SingularityNearContour:
    case Errc::ContoursIntersect:
    case Errc::DegenerateVariance:
      return true;
    default:
      return false;
  }
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace corrlss
