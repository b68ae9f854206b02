#pragma once

#include <stdexcept>
#include <string>

namespace implausify {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
struct IoError : Error {
  using Error::Error;
};

/// Malformed input data; messages name the offending line where possible.
struct ParseError : Error {
  using Error::Error;
};

/// Invalid invocation: bad option value, unknown strategy or format name.
struct UsageError : Error {
  using Error::Error;
};

/// The external generator violated the stdin/stdout JSONL protocol.
struct GeneratorProtocolError : Error {
  using Error::Error;
};

/// Fewer than two manipulation techniques were applicable to a plot.
struct CompositionInfeasible : Error {
  using Error::Error;
};

}  // namespace implausify
