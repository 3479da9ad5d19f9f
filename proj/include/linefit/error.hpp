#pragma once

#include <stdexcept>
#include <string>

namespace linefit {

enum class Errc {
  DegenerateSegment,
  BadMagic,
  BadDimensions,
  ValueOutOfRange,
  TruncatedStream,
  IoFailure,
  ChannelOutOfRange,
  TooFewPoints,
  DegeneratePoints,
  EmptySet,
  EmptyDataset,
  BadAnnotation,
};

const char* errc_name(Errc code);

/// Library-wide exception; `code()` identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

  /// true for failures caused by bad input data or I/O, false for
  /// failures of the numeric pipeline itself.
  bool is_input_error() const noexcept {
    switch (code_) {
      case Errc::TooFewPoints:
      case Errc::DegeneratePoints:
        return false;
      default:
        return true;
    }
  }

 private:
  Errc code_;
};

[[noreturn]] inline void throw_error(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace linefit
