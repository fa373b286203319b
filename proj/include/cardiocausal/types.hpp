#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cardiocausal {

/// Body position of a recording. Positions are always analyzed separately.
enum class Position { Supine, Standing };

/// The closed set of per-recording cardiorespiratory parameters, in canonical
/// column order.
enum class Parameter : std::size_t {
  HR = 0,
  RMSSD,
  lnRMSSD,
  RR,
  ciRR,
  cInsT,
  cExpT,
  cInsV,
  cExpV,
  BR,
};

inline constexpr std::size_t kParameterCount = 10;

inline constexpr std::array<Parameter, kParameterCount> kAllParameters = {
    Parameter::HR,    Parameter::RMSSD, Parameter::lnRMSSD, Parameter::RR,    Parameter::ciRR,
    Parameter::cInsT, Parameter::cExpT, Parameter::cInsV,   Parameter::cExpV, Parameter::BR,
};

inline constexpr std::array<std::string_view, kParameterCount> kParameterNames = {
    "HR", "RMSSD", "lnRMSSD", "RR", "ciRR", "cInsT", "cExpT", "cInsV", "cExpV", "BR",
};

constexpr std::size_t index_of(Parameter p) { return static_cast<std::size_t>(p); }

constexpr std::string_view name_of(Parameter p) { return kParameterNames[index_of(p)]; }

std::optional<Parameter> parse_parameter(std::string_view name);

constexpr std::string_view name_of(Position p) {
  return p == Position::Supine ? "supine" : "standing";
}

/// Case-insensitive: "supine" / "Supine" / "SUPINE" all parse.
std::optional<Position> parse_position(std::string_view name);

/// Values of all ten parameters, indexed by `index_of(Parameter)`.
using ParamValues = std::array<double, kParameterCount>;

/// Base class for every domain error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (lengths, sizes, ranges).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent file content.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace cardiocausal
