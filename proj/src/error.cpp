#include "qidforge/error.hpp"

namespace qidforge {

const char* errc_name(Errc c) {
    switch (c) {
    case Errc::ZeroSeries: return "ZeroSeries";
    case Errc::NonUnitLeadingCoefficient: return "NonUnitLeadingCoefficient";
    case Errc::NotDivisible: return "NotDivisible";
    case Errc::VanishingFactor: return "VanishingFactor";
    case Errc::NonconvergentBase: return "NonconvergentBase";
    case Errc::SumDivergence: return "SumDivergence";
    case Errc::UnboundedBelow: return "UnboundedBelow";
    case Errc::WrongParameter: return "WrongParameter";
    case Errc::DivisionByZero: return "DivisionByZero";
    case Errc::ParseError: return "ParseError";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::UnresolvedReference: return "UnresolvedReference";
    case Errc::InvariantViolation: return "InvariantViolation";
    case Errc::IoError: return "IoError";
    case Errc::UsageError: return "UsageError";
    }
    return "UnknownError";
}

} // namespace qidforge
