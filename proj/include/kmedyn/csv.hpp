#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "kmedyn/common.hpp"

namespace kmedyn::csv {

/// Full-precision, locale-independent formatting so reruns are byte-identical.
std::string fmt(double v);

class Writer {
public:
  Writer(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);

private:
  std::ofstream out_;
  std::size_t columns_;
};

/// Reads a plain numeric CSV matrix (no header). Ragged rows or non-numeric
/// cells are reported with their line number.
MatrixXd read_matrix(const std::filesystem::path& path);

}  // namespace kmedyn::csv
