#include "causalbias/dataset.hpp"

#include <algorithm>
#include <stdexcept>

namespace causalbias {

bool Dataset::has(const std::string& name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::size_t Dataset::index_of(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw std::invalid_argument("unknown column: " + name);
  return static_cast<std::size_t>(it - names.begin());
}

const std::vector<double>& Dataset::column(const std::string& name) const {
  return columns[index_of(name)];
}

void Dataset::add_column(std::string name, std::vector<double> values) {
  if (!columns.empty() && values.size() != row_count())
    throw std::invalid_argument("column length mismatch for " + name);
  if (has(name)) throw std::invalid_argument("duplicate column: " + name);
  names.push_back(std::move(name));
  columns.push_back(std::move(values));
}

bool Dataset::is_binary(const std::string& name) const {
  for (double v : column(name))
    if (v != 0.0 && v != 1.0) return false;
  return true;
}

}  // namespace causalbias
