#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tdyn {

enum class ErrorKind {
  InvalidArgument,
  DiscriminantNegative,
  DegenerateSpectrum,
  BlowUp,
  StepUnderflow,
  NoReturn,
  Tangency,
  NoRealEigenvector,
  NoConvergence,
  IllConditioned,
  NotType0,
  NonConvergent,
  ItineraryEscape,
  MultiComponent,
  InconsistentPath,
  SliceOnNode,
  MalformedDiagram,
  BracketInvalid,
  LostSign,
  NoCrossing,
  ChainBroken,
  DegenerateProjection,
  Io,
  Schema,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // I/O and schema problems map to CLI exit code 2, everything else to 1.
  bool is_input_error() const noexcept {
    return kind_ == ErrorKind::Io || kind_ == ErrorKind::Schema;
  }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace tdyn
