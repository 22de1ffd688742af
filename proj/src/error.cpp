#include "hyperlearn/error.hpp"

namespace hyperlearn {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::UnboundTraceVar: return "UnboundTraceVar";
    case ErrorKind::DuplicateQuantifier: return "DuplicateQuantifier";
    case ErrorKind::NotClosed: return "NotClosed";
    case ErrorKind::MissingWitness: return "MissingWitness";
    case ErrorKind::WitnessConflict: return "WitnessConflict";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::DuplicateIndex: return "DuplicateIndex";
    case ErrorKind::WindowOutOfRange: return "WindowOutOfRange";
    case ErrorKind::UnknownValuation: return "UnknownValuation";
    case ErrorKind::EpisodeExhausted: return "EpisodeExhausted";
    case ErrorKind::InvalidAction: return "InvalidAction";
    case ErrorKind::NonRectangular: return "NonRectangular";
    case ErrorKind::UnknownGlyph: return "UnknownGlyph";
    case ErrorKind::MissingStart: return "MissingStart";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::InvalidDomino: return "InvalidDomino";
    case ErrorKind::BoundTooLarge: return "BoundTooLarge";
    case ErrorKind::KindMismatch: return "KindMismatch";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::ArtifactMissing: return "ArtifactMissing";
  }
  return "Error";
}

SyntaxError::SyntaxError(int line, int column, const std::string& message)
    : Error(ErrorKind::Syntax, std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

}  // namespace hyperlearn
