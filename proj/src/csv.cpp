#include "traffic/csv.hpp"

#include <cstdio>
#include <sstream>

namespace traffic::csv {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Writer::Writer(const std::string& path, const std::string& header) : path_(path), out_(path) {
  if (!out_) throw ValidationError("csv: cannot open '" + path + "' for writing");
  out_ << header << '\n';
}

void Writer::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

void Writer::row(const std::vector<double>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << fmt(cells[i]);
  }
  out_ << '\n';
}

Table read_numeric(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("csv: cannot open '" + path + "'");
  Table table;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("csv: '" + path + "' is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        throw ValidationError("csv: '" + path + "' line " + std::to_string(lineno) +
                              ": cell '" + cell + "' is not numeric");
      }
    }
    if (row.size() != table.header.size())
      throw ValidationError("csv: '" + path + "' line " + std::to_string(lineno) +
                            ": expected " + std::to_string(table.header.size()) + " cells");
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace traffic::csv
