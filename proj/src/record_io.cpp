#include "cardiocausal/record_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace cardiocausal {

namespace {

constexpr double kMinRecordSeconds = 30.0;
constexpr double kSampleJitterTolerance = 0.01;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

// Reads all lines, dropping a UTF-8 BOM, CR of CRLF endings and blank lines.
std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    first = false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    lines.push_back(std::move(line));
  }
  return lines;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path.string());
  return in;
}

double median_of(std::vector<double> v) {
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double hi = *mid;
  if (v.size() % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

}  // namespace

double parse_decimal(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw FormatError("empty numeric field");
  std::string_view body = text;
  if (body.front() == '+') body.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
  if (ec == std::errc::result_out_of_range) throw FormatError("numeric field out of range: " + std::string(text));
  if (ec != std::errc() || ptr != body.data() + body.size()) {
    throw FormatError("malformed numeric field: '" + std::string(text) + "'");
  }
  return value;
}

std::string format_decimal(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error("cannot format value");
  return std::string(buf, ptr);
}

void SignalRecord::validate() const {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    throw InvalidInput("sample rate must be positive");
  }
  if (ecg.size() != ip.size()) throw InvalidInput("channel length mismatch: ecg and ip differ");
  if (static_cast<double>(ecg.size()) < kMinRecordSeconds * sample_rate_hz) {
    throw InvalidInput("recording shorter than 30 s");
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(ecg.begin(), ecg.end(), finite) || !std::all_of(ip.begin(), ip.end(), finite)) {
    throw InvalidInput("non-finite sample in recording");
  }
}

SignalRecord load_signal_record(const std::filesystem::path& path) {
  auto stem = path.stem().string();
  auto cut = stem.rfind('_');
  if (cut == std::string::npos || cut == 0) {
    throw FormatError("signal file name must be <subject>_<position>.csv: " + path.string());
  }
  auto position = parse_position(std::string_view(stem).substr(cut + 1));
  if (!position) throw FormatError("unknown position in file name: " + path.string());
  return load_signal_record(path, stem.substr(0, cut), *position);
}

SignalRecord load_signal_record(const std::filesystem::path& path, std::string subject_id,
                                Position position) {
  auto in = open_or_throw(path);
  auto lines = read_lines(in);
  if (lines.empty()) throw FormatError("empty signal file: " + path.string());

  auto header = split_fields(lines.front());
  if (header.size() != 3 || header[0] != "t" || header[1] != "ecg" || header[2] != "ip") {
    throw FormatError("signal header must be 't,ecg,ip': " + path.string());
  }

  SignalRecord rec;
  rec.subject_id = std::move(subject_id);
  rec.position = position;
  std::vector<double> t;
  t.reserve(lines.size());
  rec.ecg.reserve(lines.size());
  rec.ip.reserve(lines.size());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto fields = split_fields(lines[i]);
    if (fields.size() > 3) throw FormatError("too many fields on line " + std::to_string(i + 1));
    if (fields.size() < 3 || fields[1].empty() || fields[2].empty()) {
      throw InvalidInput("channel length mismatch at line " + std::to_string(i + 1));
    }
    t.push_back(parse_decimal(fields[0]));
    rec.ecg.push_back(parse_decimal(fields[1]));
    rec.ip.push_back(parse_decimal(fields[2]));
    if (!std::isfinite(t.back()) || !std::isfinite(rec.ecg.back()) || !std::isfinite(rec.ip.back())) {
      throw InvalidInput("non-finite sample at line " + std::to_string(i + 1));
    }
  }
  if (t.size() < 2) throw InvalidInput("signal file holds fewer than two samples");

  std::vector<double> dt(t.size() - 1);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) dt[i] = t[i + 1] - t[i];
  double step = median_of(dt);
  if (!(step > 0.0)) throw FormatError("time column is not increasing");
  for (double d : dt) {
    if (std::abs(d - step) > kSampleJitterTolerance * step) {
      throw FormatError("irregular sampling: step deviates more than 1% from median");
    }
  }
  double rate = 1.0 / step;
  // Strip floating-point noise from decimal time stamps, e.g. 249.99999999 -> 250.
  if (std::abs(rate - std::round(rate)) <= 1e-6 * rate) rate = std::round(rate);
  rec.sample_rate_hz = rate;
  rec.validate();
  return rec;
}

void write_signal_record(const std::filesystem::path& path, const SignalRecord& record) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path.string());
  out << "t,ecg,ip\n";
  for (std::size_t i = 0; i < record.ecg.size(); ++i) {
    out << format_decimal(static_cast<double>(i) / record.sample_rate_hz) << ','
        << format_decimal(record.ecg[i]) << ',' << format_decimal(record.ip[i]) << '\n';
  }
}

void check_parameter_ranges(const ParamValues& values) {
  for (auto p : kAllParameters) {
    double v = values[index_of(p)];
    std::string name(name_of(p));
    if (!std::isfinite(v)) throw InvalidInput(name + " is not finite");
    switch (p) {
      case Parameter::HR:
      case Parameter::RMSSD:
      case Parameter::RR:
        if (v <= 0.0) throw InvalidInput(name + " must be positive");
        break;
      case Parameter::ciRR:
      case Parameter::cInsT:
      case Parameter::cExpT:
      case Parameter::cInsV:
      case Parameter::cExpV:
        if (v < 0.0) throw InvalidInput(name + " must be nonnegative");
        break;
      case Parameter::BR:
        if (v < 0.0 || v > 100.0) throw InvalidInput("BR must lie in [0, 100]");
        break;
      case Parameter::lnRMSSD:
        break;
    }
  }
}

void ParameterTable::add(ParameterRow row) {
  check_parameter_ranges(row.values);
  for (const auto& r : rows_) {
    if (r.subject_id == row.subject_id && r.position == row.position) {
      throw InvalidInput("duplicate row for (" + row.subject_id + ", " +
                         std::string(name_of(row.position)) + ")");
    }
  }
  rows_.push_back(std::move(row));
}

std::vector<ParameterRow> ParameterTable::rows_for(Position position) const {
  std::vector<ParameterRow> out;
  for (const auto& r : rows_) {
    if (r.position == position) out.push_back(r);
  }
  return out;
}

std::vector<double> ParameterTable::column(Parameter p, Position position) const {
  std::vector<double> out;
  for (const auto& r : rows_) {
    if (r.position == position) out.push_back(r[p]);
  }
  return out;
}

ParameterTable read_parameter_table(std::istream& in, const ColumnAliases& aliases) {
  auto lines = read_lines(in);
  if (lines.empty()) throw FormatError("empty parameter file");

  auto header = split_fields(lines.front());
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::size_t subject_col = kNone;
  std::size_t position_col = kNone;
  std::array<std::size_t, kParameterCount> param_col;
  param_col.fill(kNone);

  for (std::size_t c = 0; c < header.size(); ++c) {
    std::string name(header[c]);
    if (auto it = aliases.find(name); it != aliases.end()) name = it->second;
    auto claim = [&](std::size_t& slot) {
      if (slot != kNone) throw FormatError("duplicate column: " + name);
      slot = c;
    };
    if (name == "subject_id") {
      claim(subject_col);
    } else if (name == "position") {
      claim(position_col);
    } else if (auto p = parse_parameter(name)) {
      claim(param_col[index_of(*p)]);
    } else {
      throw FormatError("unknown column: " + name);
    }
  }
  if (subject_col == kNone || position_col == kNone) {
    throw FormatError("parameter file needs subject_id and position columns");
  }
  for (auto p : kAllParameters) {
    if (param_col[index_of(p)] == kNone) {
      throw FormatError("missing parameter column: " + std::string(name_of(p)));
    }
  }

  ParameterTable table;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto fields = split_fields(lines[i]);
    auto where = " on line " + std::to_string(i + 1);
    if (fields.size() != header.size()) throw FormatError("wrong field count" + where);
    ParameterRow row;
    row.subject_id = std::string(fields[subject_col]);
    if (row.subject_id.empty()) throw FormatError("empty subject_id" + where);
    auto pos = parse_position(fields[position_col]);
    if (!pos) throw FormatError("unknown position '" + std::string(fields[position_col]) + "'" + where);
    row.position = *pos;
    for (auto p : kAllParameters) {
      auto field = fields[param_col[index_of(p)]];
      if (field.empty()) throw FormatError("missing value for " + std::string(name_of(p)) + where);
      row.values[index_of(p)] = parse_decimal(field);
    }
    try {
      table.add(std::move(row));
    } catch (const InvalidInput& e) {
      throw InvalidInput(e.what() + where);
    }
  }
  return table;
}

ParameterTable load_parameter_table(const std::filesystem::path& path, const ColumnAliases& aliases) {
  auto in = open_or_throw(path);
  return read_parameter_table(in, aliases);
}

void write_parameter_table(std::ostream& out, const ParameterTable& table) {
  out << "subject_id,position";
  for (auto p : kAllParameters) out << ',' << name_of(p);
  out << '\n';
  for (const auto& row : table.rows()) {
    out << row.subject_id << ',' << name_of(row.position);
    for (double v : row.values) out << ',' << format_decimal(v);
    out << '\n';
  }
}

void write_parameter_table(const std::filesystem::path& path, const ParameterTable& table) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path.string());
  write_parameter_table(out, table);
}

}  // namespace cardiocausal
