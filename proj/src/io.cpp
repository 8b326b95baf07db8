#include "fhs/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace fhs {

namespace {

template <class T>
T required(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw std::invalid_argument(std::string("missing field \"") + key + "\"");
  return j.at(key).get<T>();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

ScenarioSpec scenario_from_json(const Json& j) {
  const int u = required<int>(j, "u");
  const auto gains = required<std::vector<std::vector<double>>>(j, "gains");
  NetworkScenario scenario(u, gains, required<double>(j, "P"), required<double>(j, "sigma2"));

  const Json& users = j.at("users");
  if (!users.is_array()) throw std::invalid_argument("\"users\" must be an array");
  std::vector<HoppingProfile> profiles;
  for (const auto& user : users) {
    const bool has_v = user.contains("v");
    const bool has_pmf = user.contains("pmf");
    if (has_v == has_pmf)
      throw std::invalid_argument("each user needs exactly one of \"v\" or \"pmf\"");
    profiles.push_back(has_v ? HoppingProfile::fixed(user.at("v").get<int>())
                             : HoppingProfile::pmf(user.at("pmf").get<std::vector<double>>()));
  }
  ScenarioSpec spec{std::move(scenario), std::move(profiles)};
  validate_profiles(spec.scenario, spec.profiles);
  return spec;
}

Json to_json(const ScenarioSpec& spec) {
  Json users = Json::array();
  for (const auto& p : spec.profiles)
    users.push_back(p.is_fixed() ? Json{{"v", p.fixed_v()}} : Json{{"pmf", p.weights()}});
  return Json{{"u", spec.scenario.n_subbands()},
              {"users", users},
              {"gains", spec.scenario.gains()},
              {"P", spec.scenario.total_power()},
              {"sigma2", spec.scenario.noise_power()}};
}

UserCountPmf pmf_from_json(const Json& j) {
  const auto type = required<std::string>(j, "type");
  if (type == "finite") return UserCountPmf::finite(required<std::vector<double>>(j, "q"));
  if (type == "poisson") return UserCountPmf::poisson(required<double>(j, "lambda"));
  throw std::invalid_argument("unknown pmf type \"" + type + "\"");
}

Json to_json(const UserCountPmf& pmf) {
  if (pmf.is_poisson()) return Json{{"type", "poisson"}, {"lambda", pmf.lambda()}};
  return Json{{"type", "finite"}, {"q", pmf.q()}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw std::invalid_argument("unknown output format \"" + name + "\"");
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size())
    throw std::logic_error("table row has " + std::to_string(row.size()) + " cells, expected " +
                           std::to_string(columns_.size()));
  rows_.push_back(std::move(row));
}

void Table::write_csv(std::ostream& out) const {
  for (std::size_t c = 0; c < columns_.size(); ++c)
    out << (c ? "," : "") << csv_escape(columns_[c]);
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) out << csv_escape(v);
            else if constexpr (std::is_same_v<T, double>) out << format_real(v);
            else if constexpr (std::is_same_v<T, std::int64_t>) out << v;
            else if constexpr (std::is_same_v<T, bool>) out << (v ? "true" : "false");
          },
          row[c]);
    }
    out << '\n';
  }
}

void Table::write_json(std::ostream& out) const {
  using Ordered = nlohmann::ordered_json;
  Ordered arr = Ordered::array();
  for (const auto& row : rows_) {
    Ordered obj = Ordered::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      obj[columns_[c]] = std::visit(
          [](const auto& v) -> Ordered {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) return nullptr;
            else if constexpr (std::is_same_v<T, double>)
              return std::isfinite(v) ? Ordered(v) : Ordered(nullptr);
            else return Ordered(v);
          },
          row[c]);
    }
    arr.push_back(std::move(obj));
  }
  out << arr.dump(2) << '\n';
}

void Table::write(std::ostream& out, Format f) const {
  if (f == Format::csv)
    write_csv(out);
  else
    write_json(out);
}

}  // namespace fhs
