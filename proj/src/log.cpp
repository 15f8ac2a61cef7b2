#include "gmaxent/log.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <iostream>

#include "gmaxent/error.hpp"

namespace gmaxent {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ModelMismatch: return "ModelMismatch";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::InvalidEffect: return "InvalidEffect";
    case ErrorCode::NoValues: return "NoValues";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::NotAProjection: return "NotAProjection";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::InvalidTarget: return "InvalidTarget";
    case ErrorCode::ZeroFunctional: return "ZeroFunctional";
    case ErrorCode::UnsupportedRepresentation: return "UnsupportedRepresentation";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::IncompatibleObjective: return "IncompatibleObjective";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace log {
namespace {

Level level_from_env() {
  const char* value = std::getenv("GMAXENT_LOG");
  if (value == nullptr) return Level::Info;
  if (std::strcmp(value, "quiet") == 0) return Level::Quiet;
  if (std::strcmp(value, "debug") == 0) return Level::Debug;
  return Level::Info;
}

std::atomic<Level>& current() {
  static std::atomic<Level> instance{level_from_env()};
  return instance;
}

}  // namespace

Level level() { return current().load(std::memory_order_relaxed); }

void set_level(Level level) { current().store(level, std::memory_order_relaxed); }

void write(Level, std::string_view tag, std::string_view message) {
  std::cerr << "[gmaxent " << tag << "] " << message << '\n';
}

}  // namespace log
}  // namespace gmaxent
