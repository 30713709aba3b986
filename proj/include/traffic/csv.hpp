// Small CSV helpers. All floating-point values are serialized with 17
// significant digits so round-trips are lossless.
#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "traffic/types.hpp"

namespace traffic::csv {

std::string fmt(double v);

class Writer {
public:
  Writer(const std::string& path, const std::string& header);
  void row(const std::vector<std::string>& cells);
  void row(const std::vector<double>& cells);
  const std::string& path() const { return path_; }

private:
  std::string path_;
  std::ofstream out_;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Reads a numeric CSV with a single header line. Cells that fail to parse
// raise ValidationError naming the offending line.
Table read_numeric(const std::string& path);

}  // namespace traffic::csv
