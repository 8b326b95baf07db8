// JSON input formats and tabular output (CSV or JSON).

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "fhs/measures.hpp"
#include "fhs/model.hpp"
#include "json.hpp"

namespace fhs {

using Json = nlohmann::json;

// {"u": 4, "users": [{"v": 1}, {"pmf": [...]}], "gains": [[...]], "P": 100, "sigma2": 1}
struct ScenarioSpec {
  NetworkScenario scenario;
  std::vector<HoppingProfile> profiles;
};

ScenarioSpec scenario_from_json(const Json& j);
Json to_json(const ScenarioSpec& spec);

// {"type": "finite", "q": [...]} or {"type": "poisson", "lambda": 3}
UserCountPmf pmf_from_json(const Json& j);
Json to_json(const UserCountPmf& pmf);

Json read_json_file(const std::filesystem::path& path);

enum class Format { csv, json };
Format parse_format(const std::string& name);

// Cell values: empty, text, real, integer or boolean.
using Cell = std::variant<std::monostate, std::string, double, std::int64_t, bool>;

class Table {
 public:
  explicit Table(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }
  void add_row(std::vector<Cell> row);

  // Header line then one line per row; reals as %.12g, empty cells blank.
  void write_csv(std::ostream& out) const;
  // Array of objects keyed by column; non-finite reals become null.
  void write_json(std::ostream& out) const;
  void write(std::ostream& out, Format f) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

std::string format_real(double x);

}  // namespace fhs
