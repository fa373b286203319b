#include "cardiocausal/types.hpp"

#include <algorithm>
#include <cctype>

namespace cardiocausal {

std::optional<Parameter> parse_parameter(std::string_view name) {
  for (auto p : kAllParameters) {
    if (name_of(p) == name) return p;
  }
  return std::nullopt;
}

std::optional<Position> parse_position(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "supine") return Position::Supine;
  if (lower == "standing") return Position::Standing;
  return std::nullopt;
}

}  // namespace cardiocausal
