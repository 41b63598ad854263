#include "ddlab/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ddlab/errors.hpp"

namespace ddlab {

std::string fmt_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string fmt_int(long long x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw Error("parse_double: cannot parse '" + s + "'");
  return v;
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header.size())
    throw DimensionError("CsvTable: row width " + std::to_string(cells.size()) +
                         " does not match header width " + std::to_string(header.size()));
  rows.push_back(std::move(cells));
}

std::string CsvTable::serialize() const {
  std::ostringstream out;
  for (size_t j = 0; j < header.size(); ++j) {
    if (j) out << ',';
    out << header[j];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << row[j];
    }
    out << '\n';
  }
  for (const auto& line : footer) out << line << '\n';
  return out.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("write_file: cannot open '" + path + "' for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("write_file: short write to '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("read_file: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace ddlab
