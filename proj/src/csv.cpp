#include "kmedyn/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace kmedyn::csv {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Writer::Writer(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path), columns_(header.size()) {
  require(out_.good(), "csv: cannot open " + path.string() + " for writing");
  row(header);
}

void Writer::row(const std::vector<std::string>& cells) {
  require(cells.size() == columns_, "csv: row has " + std::to_string(cells.size()) +
                                        " cells, expected " + std::to_string(columns_));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

MatrixXd read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), "csv: cannot open " + path.string());

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      require(end != cell.c_str() && *end == '\0',
              path.string() + ":" + std::to_string(lineno) + ": not a number: '" + cell + "'");
      cells.push_back(v);
    }
    if (!rows.empty())
      require(cells.size() == rows.front().size(),
              path.string() + ":" + std::to_string(lineno) + ": expected " +
                  std::to_string(rows.front().size()) + " columns, got " +
                  std::to_string(cells.size()));
    rows.push_back(std::move(cells));
  }
  require(!rows.empty(), path.string() + ": empty file");

  MatrixXd m(Eigen::Index(rows.size()), Eigen::Index(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(Eigen::Index(i), Eigen::Index(j)) = rows[i][j];
  return m;
}

}  // namespace kmedyn::csv
