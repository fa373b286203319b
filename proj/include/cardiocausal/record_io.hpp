#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cardiocausal/types.hpp"

namespace cardiocausal {

/// One subject's two-channel recording in one body position.
///
/// Invariants (enforced by `validate`): equal channel lengths of at least
/// 30 s, a positive sample rate, and finite samples.
struct SignalRecord {
  std::string subject_id;
  Position position = Position::Supine;
  double sample_rate_hz = 250.0;
  std::vector<double> ecg;
  std::vector<double> ip;

  double duration_s() const { return static_cast<double>(ecg.size()) / sample_rate_hz; }
  void validate() const;
};

struct ParameterRow {
  std::string subject_id;
  Position position = Position::Supine;
  ParamValues values{};

  double operator[](Parameter p) const { return values[index_of(p)]; }
  bool operator==(const ParameterRow&) const = default;
};

/// Subjects x positions x ten parameters. Each (subject, position) key is
/// unique and every value satisfies its physiological range.
class ParameterTable {
 public:
  ParameterTable() = default;

  /// Throws InvalidInput on a duplicate key or an out-of-range value.
  void add(ParameterRow row);

  const std::vector<ParameterRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  /// Rows recorded in `position`, in insertion order.
  std::vector<ParameterRow> rows_for(Position position) const;

  /// Column of `p` for `position`, in insertion order.
  std::vector<double> column(Parameter p, Position position) const;

  bool operator==(const ParameterTable&) const = default;

 private:
  std::vector<ParameterRow> rows_;
};

/// Throws InvalidInput when a value is outside its admissible range.
void check_parameter_ranges(const ParamValues& values);

/// Reads a `t,ecg,ip` CSV. The sample rate is inferred from the median time
/// step; every step must lie within 1% of that median. Subject id and
/// position come from a `<subject>_<position>.csv` file name.
SignalRecord load_signal_record(const std::filesystem::path& path);

/// Same as above but with explicit identity, for files that do not follow the
/// naming convention.
SignalRecord load_signal_record(const std::filesystem::path& path, std::string subject_id,
                                Position position);

void write_signal_record(const std::filesystem::path& path, const SignalRecord& record);

/// Maps foreign column names onto canonical ones, e.g. {"mean_hr", "HR"}.
using ColumnAliases = std::map<std::string, std::string>;

ParameterTable load_parameter_table(const std::filesystem::path& path,
                                    const ColumnAliases& aliases = {});
ParameterTable read_parameter_table(std::istream& in, const ColumnAliases& aliases = {});

/// Writes values in shortest round-trip decimal form, so reloading yields an
/// identical table.
void write_parameter_table(std::ostream& out, const ParameterTable& table);
void write_parameter_table(const std::filesystem::path& path, const ParameterTable& table);

/// Strict decimal parser: optional sign, '.' separator, optional exponent.
/// Rejects locale commas, trailing garbage and empty fields.
double parse_decimal(std::string_view text);

/// Shortest decimal representation that parses back to exactly `value`.
std::string format_decimal(double value);

}  // namespace cardiocausal
