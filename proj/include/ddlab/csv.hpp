#pragma once

#include <string>
#include <vector>

// CSV emission with locale-independent, shortest-round-trip number formatting
// ('.' decimal, ',' separator, '\n' endings, UTF-8), so outputs are
// byte-stable across reruns and platforms.

namespace ddlab {

// Shortest decimal string that parses back to exactly x (std::to_chars).
std::string fmt_double(double x);
std::string fmt_int(long long x);

// Exact inverse of fmt_double (std::from_chars).
double parse_double(const std::string& s);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> footer;  // emitted verbatim after the table, one line each

  void add_row(std::vector<std::string> cells);  // enforces rectangularity
  std::string serialize() const;
};

void write_file(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);

}  // namespace ddlab
