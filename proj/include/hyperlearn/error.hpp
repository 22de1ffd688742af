#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hyperlearn {

enum class ErrorKind {
  Syntax,
  UnboundTraceVar,
  DuplicateQuantifier,
  NotClosed,
  MissingWitness,
  WitnessConflict,
  LengthMismatch,
  EmptyInput,
  DuplicateIndex,
  WindowOutOfRange,
  UnknownValuation,
  EpisodeExhausted,
  InvalidAction,
  NonRectangular,
  UnknownGlyph,
  MissingStart,
  ArityMismatch,
  InvalidDomino,
  BoundTooLarge,
  KindMismatch,
  Config,
  ArtifactMissing,
};

std::string_view to_string(ErrorKind kind);

/// Base exception for every recoverable failure in the library. The kind is
/// what callers switch on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(int line, int column, const std::string& message);

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace hyperlearn
