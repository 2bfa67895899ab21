// CSV emission and parsing. Values are written with 15 significant digits
// and a fixed format so identical runs produce byte-identical files.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qsdsim::csv {

std::string format_double(double v);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const; // -1 if absent
};

void write(std::ostream& os, const Table& t);
void write_file(const std::string& path, const Table& t);
Table read(std::istream& is);
Table read_file(const std::string& path);

} // namespace qsdsim::csv
