#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace rirsynth {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidParameterError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

// The requested reverberation time cannot be met by any physical wall
// absorption for the given room.
class InfeasibleRoomError : public Error {
 public:
  using Error::Error;
};

// No non-negative tail scale (or direct-path scale) reaches the requested
// direct-to-reverberant ratio. Carries the request and the attainable bounds.
class InfeasibleDrrError : public Error {
 public:
  InfeasibleDrrError(double requested, double attainable_at_zero, double attainable_limit)
      : Error(format(requested, attainable_at_zero, attainable_limit)),
        requested_(requested),
        attainable_at_zero_(attainable_at_zero),
        attainable_limit_(attainable_limit) {}

  double requested() const { return requested_; }
  // DRR of the geometric part alone (scale 0).
  double attainable_at_zero() const { return attainable_at_zero_; }
  // DRR in the limit of an all-dominating scaled part.
  double attainable_limit() const { return attainable_limit_; }

 private:
  static std::string format(double requested, double at_zero, double limit) {
    std::ostringstream os;
    os << "DRR target " << requested << " is not attainable (DRR at zero scale: " << at_zero
       << ", limiting DRR: " << limit << ")";
    return os.str();
  }

  double requested_;
  double attainable_at_zero_;
  double attainable_limit_;
};

class AnalysisError : public Error {
 public:
  using Error::Error;
};

// Energy decay curve never reaches the requested fit range.
class InsufficientRangeError : public AnalysisError {
 public:
  InsufficientRangeError(double attained_db, double required_db)
      : AnalysisError(format(attained_db, required_db)), attained_db_(attained_db) {}

  double attained_db() const { return attained_db_; }

 private:
  static std::string format(double attained, double required) {
    std::ostringstream os;
    os << "decay curve reaches only " << attained << " dB, need " << required << " dB";
    return os.str();
  }

  double attained_db_;
};

class AudioError : public Error {
 public:
  using Error::Error;
};

class SamplerError : public Error {
 public:
  using Error::Error;
};

// Configuration file problem, annotated with the offending field path.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& msg)
      : Error("config error at '" + field + "': " + msg), field_(field) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace rirsynth
