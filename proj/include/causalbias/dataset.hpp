#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace causalbias {

/// Column-major table of named numeric columns. Rows are aligned across columns.
struct Dataset {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  std::size_t row_count() const { return columns.empty() ? 0 : columns.front().size(); }
  std::size_t column_count() const { return columns.size(); }

  bool has(const std::string& name) const;
  /// Index of a column; throws std::invalid_argument for unknown names.
  std::size_t index_of(const std::string& name) const;
  const std::vector<double>& column(const std::string& name) const;

  void add_column(std::string name, std::vector<double> values);

  /// True if every cell of the column is exactly 0.0 or 1.0.
  bool is_binary(const std::string& name) const;
};

}  // namespace causalbias
