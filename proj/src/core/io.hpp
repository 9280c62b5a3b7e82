#ifndef WEALTHLAB_CORE_IO_HPP
#define WEALTHLAB_CORE_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "core/density.hpp"

namespace wealthlab {

// Locale-independent numeric formatting shared by every emitted file:
// '.' decimal separator, '\n' newlines, doubles with 17 significant digits
// so parsed values round-trip bit-exactly.
std::string format_double(double v);
std::string format_u64(std::uint64_t v);

// Minimal deterministic JSON emitter. Keys appear in insertion order and the
// output carries no environment-dependent content, which keeps reports
// byte-comparable across runs and worker counts.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& k);
  JsonWriter& value(double v);
  JsonWriter& value(std::uint64_t v);
  JsonWriter& value(std::int64_t v);
  JsonWriter& value(int v) { return value(static_cast<std::int64_t>(v)); }
  JsonWriter& value(bool v);
  JsonWriter& value(const char* s) { return value(std::string(s)); }
  JsonWriter& value(const std::string& s);
  JsonWriter& null_value();

  const std::string& str() const { return out_; }

 private:
  void separate();
  std::string out_;
  std::vector<bool> needs_comma_;
  bool after_key_ = false;
};

std::string json_escape(const std::string& s);

// File helpers; throw Error(Io) on failure.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
void ensure_directory(const std::string& path);

// Density CSV: header "log_x,value", one node per row.
void write_density_csv(const std::string& path, const GridDensity& f);
GridDensity read_density_csv(const std::string& path);

// Mass trace CSV: header "step,mass,truncation_mass".
void write_mass_trace_csv(const std::string& path,
                          const std::vector<MassTraceRow>& trace);

}  // namespace wealthlab

#endif
