#include "core/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace wealthlab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_u64(std::uint64_t v) { return std::to_string(v); }

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

void JsonWriter::separate() {
  if (after_key_) {
    after_key_ = false;
    return;
  }
  if (!needs_comma_.empty()) {
    if (needs_comma_.back()) out_ += ',';
    needs_comma_.back() = true;
  }
}

JsonWriter& JsonWriter::begin_object() {
  separate();
  out_ += '{';
  needs_comma_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  out_ += '}';
  needs_comma_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  separate();
  out_ += '[';
  needs_comma_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  out_ += ']';
  needs_comma_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::key(const std::string& k) {
  separate();
  out_ += '"';
  out_ += json_escape(k);
  out_ += "\":";
  after_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double v) {
  separate();
  if (std::isfinite(v)) {
    out_ += format_double(v);
  } else {
    out_ += "null";  // JSON has no inf/nan
  }
  return *this;
}

JsonWriter& JsonWriter::value(std::uint64_t v) {
  separate();
  out_ += format_u64(v);
  return *this;
}

JsonWriter& JsonWriter::value(std::int64_t v) {
  separate();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  separate();
  out_ += v ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(const std::string& s) {
  separate();
  out_ += '"';
  out_ += json_escape(s);
  out_ += '"';
  return *this;
}

JsonWriter& JsonWriter::null_value() {
  separate();
  out_ += "null";
  return *this;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create directory: " + path);
}

void write_density_csv(const std::string& path, const GridDensity& f) {
  std::string out = "log_x,value\n";
  for (std::size_t i = 0; i < f.grid.n; ++i) {
    out += format_double(f.grid.log_x(i));
    out += ',';
    out += format_double(f.values[i]);
    out += '\n';
  }
  write_text_file(path, out);
}

GridDensity read_density_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || line != "log_x,value") {
    throw Error(ErrorCode::Io, "density csv: missing 'log_x,value' header in " + path);
  }
  std::vector<double> log_x, values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorCode::Io, "density csv: malformed row in " + path);
    }
    try {
      log_x.push_back(std::stod(line.substr(0, comma)));
      values.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw Error(ErrorCode::Io, "density csv: unparsable number in " + path);
    }
  }
  if (log_x.size() < 16) {
    throw Error(ErrorCode::Io, "density csv: needs at least 16 rows");
  }
  GridSpec spec;
  spec.log_x_min = log_x.front();
  spec.log_x_max = log_x.back();
  spec.n = log_x.size();
  const double delta = spec.delta();
  for (std::size_t i = 0; i < log_x.size(); ++i) {
    const double expect = spec.log_x(i);
    if (std::abs(log_x[i] - expect) > 1e-9 * std::max(1.0, std::abs(expect))) {
      throw Error(ErrorCode::Io, "density csv: grid is not uniform in log x");
    }
  }
  (void)delta;
  GridDensity d = make_density(spec);
  d.values = std::move(values);
  return d;
}

void write_mass_trace_csv(const std::string& path,
                          const std::vector<MassTraceRow>& trace) {
  std::string out = "step,mass,truncation_mass\n";
  for (const auto& row : trace) {
    out += format_u64(row.step);
    out += ',';
    out += format_double(row.mass);
    out += ',';
    out += format_double(row.truncation_mass);
    out += '\n';
  }
  write_text_file(path, out);
}

}  // namespace wealthlab
