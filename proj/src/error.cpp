#include "tdyn/error.hpp"

namespace tdyn {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DiscriminantNegative: return "DiscriminantNegative";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::BlowUp: return "BlowUp";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::NoReturn: return "NoReturn";
    case ErrorKind::Tangency: return "Tangency";
    case ErrorKind::NoRealEigenvector: return "NoRealEigenvector";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::NotType0: return "NotType0";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::ItineraryEscape: return "ItineraryEscape";
    case ErrorKind::MultiComponent: return "MultiComponent";
    case ErrorKind::InconsistentPath: return "InconsistentPath";
    case ErrorKind::SliceOnNode: return "SliceOnNode";
    case ErrorKind::MalformedDiagram: return "MalformedDiagram";
    case ErrorKind::BracketInvalid: return "BracketInvalid";
    case ErrorKind::LostSign: return "LostSign";
    case ErrorKind::NoCrossing: return "NoCrossing";
    case ErrorKind::ChainBroken: return "ChainBroken";
    case ErrorKind::DegenerateProjection: return "DegenerateProjection";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Schema: return "Schema";
  }
  return "Unknown";
}

}  // namespace tdyn
