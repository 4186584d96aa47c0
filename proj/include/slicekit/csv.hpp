#pragma once
// CSV output and one-column input: shortest round-trip numeric cells,
// "nan"/"inf" for non-finite values, minimal quoting, and strict parsing
// with line numbers.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace slicekit {

inline std::string csv_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::string best;
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) != v) continue;
    if (best.empty()) best = buf;
    // Prefer plain notation over an equally short exponent form (20 not 2e+01).
    if (!std::strchr(buf, 'e')) {
      if (std::strlen(buf) <= best.size()) best = buf;
      break;
    }
  }
  return best;
}

inline std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

inline std::string csv_row(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += csv_quote(cells[i]);
  }
  line += '\n';
  return line;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

// Strict one-column numeric reader: every nonempty line must be a single
// real; errors carry the 1-based line number.
inline std::vector<double> read_column(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t a = line.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    const std::size_t b = line.find_last_not_of(" \t");
    const std::string tok = line.substr(a, b - a + 1);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": not a number: '" + tok + "'");
    values.push_back(v);
  }
  if (values.empty()) throw std::runtime_error(path + ": no data");
  return values;
}

}  // namespace slicekit
