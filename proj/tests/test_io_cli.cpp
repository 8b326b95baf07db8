#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "fhs/cli.hpp"
#include "fhs/io.hpp"

using namespace fhs;

namespace {

const std::string kData = FHS_TEST_DATA;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fhs");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == name) return c;
  FAIL("missing column " << name);
  return 0;
}

}  // namespace

TEST_CASE("scenario json round trip") {
  const Json j = Json::parse(R"({"u": 4, "users": [{"v": 1}, {"pmf": [0, 0.5, 0.5, 0, 0]}],
                                 "gains": [[1.0, 0.3], [0.7, 1.25]], "P": 1000, "sigma2": 0.5})");
  const auto spec = scenario_from_json(j);
  CHECK(spec.scenario.n_subbands() == 4);
  CHECK(spec.scenario.gain(1, 0) == 0.7);
  CHECK(spec.profiles[0] == HoppingProfile::fixed(1));
  CHECK(spec.profiles[1] == HoppingProfile::pmf({0, 0.5, 0.5, 0, 0}));
  const auto again = scenario_from_json(to_json(spec));
  CHECK(again.scenario == spec.scenario);
  CHECK(again.profiles == spec.profiles);
  CHECK(to_json(again) == to_json(spec));

  const auto file = scenario_from_json(read_json_file(kData + "/three_users.json"));
  CHECK(to_json(scenario_from_json(to_json(file))) == to_json(file));
}

TEST_CASE("scenario json errors") {
  CHECK_THROWS_AS(scenario_from_json(Json::parse(R"({"users": [], "gains": [], "P": 1, "sigma2": 1})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(scenario_from_json(Json::parse(
                      R"({"u": 2, "users": [{"v": 1, "pmf": [1]}], "gains": [[1]], "P": 1, "sigma2": 1})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(scenario_from_json(Json::parse(
                      R"({"u": 2, "users": [{"v": 3}], "gains": [[1]], "P": 1, "sigma2": 1})")),
                  std::invalid_argument);
  CHECK_THROWS(scenario_from_json(Json::parse(
      R"({"u": 2, "users": [{"v": 1}, {"v": 1}], "gains": [[1]], "P": 1, "sigma2": 1})")));
  CHECK_THROWS_AS(read_json_file(kData + "/nope.json"), std::runtime_error);
}

TEST_CASE("pmf json round trip") {
  const auto f = pmf_from_json(Json::parse(R"({"type": "finite", "q": [0, 0.25, 0.75]})"));
  CHECK(f.q() == std::vector<double>{0, 0.25, 0.75});
  CHECK(pmf_from_json(to_json(f)).q() == f.q());
  const auto p = pmf_from_json(Json::parse(R"({"type": "poisson", "lambda": 2.5})"));
  CHECK(p.lambda() == 2.5);
  CHECK(pmf_from_json(to_json(p)).q() == p.q());
  CHECK_THROWS_AS(pmf_from_json(Json::parse(R"({"type": "geometric"})")), std::invalid_argument);
  CHECK_THROWS_AS(pmf_from_json(Json::parse(R"({"type": "finite", "q": [0.5]})")), std::invalid_argument);
}

TEST_CASE("table output") {
  Table t({"name", "x", "n", "flag", "empty"});
  t.add_row({std::string("a,b"), 0.1, std::int64_t{3}, true, std::monostate{}});
  t.add_row({std::string("say \"hi\""), 1.0 / 3.0, std::int64_t{-1}, false, std::nan("")});
  CHECK_THROWS_AS(t.add_row({std::string("short")}), std::logic_error);

  std::ostringstream csv;
  t.write_csv(csv);
  CHECK(csv.str() ==
        "name,x,n,flag,empty\n"
        "\"a,b\",0.1,3,true,\n"
        "\"say \"\"hi\"\"\",0.333333333333,-1,false,nan\n");

  std::ostringstream js;
  t.write(js, Format::json);
  const Json back = Json::parse(js.str());
  REQUIRE(back.size() == 2);
  CHECK(back[0]["name"] == "a,b");
  CHECK(back[0]["n"] == 3);
  CHECK(back[0]["flag"] == true);
  CHECK(back[0]["empty"].is_null());
  CHECK(back[1]["empty"].is_null());
  // Keys keep column order.
  CHECK(js.str().find("\"name\"") < js.str().find("\"x\""));

  CHECK(format_real(1e-20) == "1e-20");
  CHECK(format_real(INFINITY) == "inf");
  CHECK(parse_format("json") == Format::json);
  CHECK_THROWS_AS(parse_format("xml"), std::invalid_argument);
}

TEST_CASE("cli levels") {
  const auto r = cli({"levels", "--scenario", kData + "/two_users.json"});
  REQUIRE(r.code == 0);
  CHECK(r.out ==
        "receiver,level,a,c,sigma2\n"
        "0,0,0.5,0,1\n0,1,0.5,1,101\n"
        "1,0,0.5,0,1\n1,1,0.5,1,101\n");
  const auto one = cli({"levels", "--scenario", kData + "/two_users.json", "--receiver", "1"});
  CHECK(parse_csv(one.out).size() == 3);
  const auto bad = cli({"levels", "--scenario", kData + "/two_users.json", "--receiver", "5"});
  CHECK(bad.code == 1);
}

TEST_CASE("cli bounds") {
  const auto r = cli({"bounds", "--scenario", kData + "/two_users.json", "--user", "0", "--gamma",
                      "100,1e6", "--mc", "20000", "--seed", "4"});
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 3);
  const auto& h = rows[0];
  CHECK(h == std::vector<std::string>{"user", "gamma", "r_ub", "r_lb", "mi_mc", "mi_se", "slope"});
  CHECK(std::stod(rows[1][column(h, "r_ub")]) == doctest::Approx(1.912762922794732).epsilon(1e-11));
  CHECK(std::stod(rows[1][column(h, "r_lb")]) == doctest::Approx(0.901115839086086).epsilon(1e-11));
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double ub = std::stod(rows[k][column(h, "r_ub")]);
    const double lb = std::stod(rows[k][column(h, "r_lb")]);
    const double mi = std::stod(rows[k][column(h, "mi_mc")]);
    const double se = std::stod(rows[k][column(h, "mi_se")]);
    CHECK(lb <= ub);
    CHECK(mi >= lb - 4 * se);
    CHECK(mi <= ub + 4 * se);
    CHECK(rows[k][column(h, "slope")] == "0.25");
  }

  const auto no_seed = cli({"bounds", "--scenario", kData + "/two_users.json", "--mc", "1000"});
  CHECK(no_seed.code == 1);
  CHECK(Json::parse(no_seed.err)["error"]["message"].get<std::string>().find("seed") != std::string::npos);

  const auto slope = cli({"bounds", "--scenario", kData + "/two_users.json", "--slope-only"});
  REQUIRE(slope.code == 0);
  const auto srows = parse_csv(slope.out);
  CHECK(srows.size() == 1 + 2 * default_gamma_ladder().size());
  CHECK(srows[1][column(srows[0], "r_ub")].empty());
}

TEST_CASE("cli simulate") {
  const auto missing = cli({"simulate", "--scenario", kData + "/two_users.json", "--slots", "10"});
  CHECK(missing.code == 2);
  const Json err = Json::parse(missing.err);
  CHECK(err["error"]["type"] == "usage");

  const auto dump = (std::filesystem::temp_directory_path() / "fhs_cli_dump.bin").string();
  const std::vector<std::string> base{"simulate", "--scenario", kData + "/three_users.json", "--slots",
                                      "20000", "--seed", "5", "--dump", dump, "--dump-samples", "300"};
  auto with_threads = [&](const char* n) {
    auto args = base;
    args.insert(args.end(), {"--threads", n});
    return cli(args);
  };
  const auto a = with_threads("1");
  const auto b = with_threads("6");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(std::filesystem::file_size(dump) == 32 + 300 * 8 * 8);
  std::filesystem::remove(dump);

  const auto rows = parse_csv(a.out);
  const auto& h = rows[0];
  CHECK(h == std::vector<std::string>{"user", "record", "index", "c", "value", "std_error"});
  int free_rows = 0;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (rows[k][column(h, "record")] != "free") continue;
    ++free_rows;
    const double got = std::stod(rows[k][column(h, "value")]);
    const double se = std::stod(rows[k][column(h, "std_error")]);
    const double expected = std::stod(rows[k + 1][column(h, "value")]);
    CHECK(rows[k + 1][column(h, "record")] == "free_expected");
    CHECK(std::abs(got - expected) <= 4 * se);
  }
  CHECK(free_rows == 3);
}

TEST_CASE("cli measures") {
  const auto r = cli({"measures", "--poisson", "3", "--u", "5", "--format", "json"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  REQUIRE(j.size() == 12);
  auto find = [&](const std::string& scheme, const std::string& measure) {
    for (const auto& row : j)
      if (row["scheme"] == scheme && row["measure"] == measure) return row;
    FAIL("missing row");
    return Json{};
  };
  CHECK(find("FD", "eta4")["value"].get<double>() == doctest::Approx(0.980619694689).epsilon(1e-10));
  CHECK(find("FH", "eta4")["value"].get<double>() == 1.0);
  CHECK(find("FH", "eta1")["value_over_u"].get<double>() == doctest::Approx(1 / (2 * std::exp(1.0))));
  CHECK(find("FH", "eta1")["argmax_name"] == "v_star");
  CHECK(find("FD", "eta1")["argmax"] == 5);
  CHECK(find("FH", "eta4")["value_over_u"].is_null());

  const auto ex = cli({"measures", "--pmf", kData + "/example3_pmf.json", "--u", "10"});
  REQUIRE(ex.code == 0);
  CHECK(ex.out.find("FH,eta2,10,1.12093175672") != std::string::npos);

  CHECK(cli({"measures", "--poisson", "3", "--q", "0,1", "--u", "5"}).code == 1);
  CHECK(cli({"measures", "--poisson", "3"}).code == 2);
  CHECK(cli({"measures", "--poisson", "3", "--u", "5", "--n-des", "2"}).code == 1);
  CHECK(cli({"measures", "--q", "0,0.5,0.5", "--u", "4", "--n-des", "2"}).code == 0);
}

TEST_CASE("cli sweep") {
  const auto r = cli({"sweep", "--u", "7,20", "--lambdas", "1,2.5,4,8", "--threads", "3"});
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 9);
  const auto& h = rows[0];
  for (std::size_t k = 1; k <= 4; ++k) {
    const auto& small = rows[k];
    const auto& big = rows[k + 4];
    CHECK(small[column(h, "lambda")] == big[column(h, "lambda")]);
    CHECK(std::stod(small[column(h, "eta2_fd")]) < 0.5);
    CHECK(std::stod(big[column(h, "eta2_fd")]) < 0.5);
    CHECK(std::stod(big[column(h, "eta2_fh")]) ==
          doctest::Approx(20.0 / 7.0 * std::stod(small[column(h, "eta2_fh")])).epsilon(1e-9));
  }
  const double lambda = std::stod(rows[3][column(h, "lambda")]);
  CHECK(lambda == 4.0);
  CHECK(std::stod(rows[3][column(h, "eta1_fh_over_u")]) == doctest::Approx(1 / (2 * std::exp(1.0))).epsilon(1e-11));

  const auto same = cli({"sweep", "--u", "7,20", "--lambdas", "1,2.5,4,8", "--threads", "1"});
  CHECK(same.out == r.out);

  const auto files = cli({"sweep", "--u", "10", "--pmfs", kData + "/example3_pmf.json"});
  REQUIRE(files.code == 0);
  CHECK(parse_csv(files.out).size() == 2);
  CHECK(cli({"sweep", "--u", "10"}).code == 1);
}

TEST_CASE("cli compare") {
  const auto r = cli({"compare", "--q", "0,0.7,0.3", "--u", "10"});
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  const auto& h = rows[0];
  CHECK(h == std::vector<std::string>{"row", "fh_value", "fd_value", "winner", "condition",
                                      "condition_lhs", "condition_rhs"});
  REQUIRE(rows.size() == 9);
  CHECK(rows[1][0] == "eta1");
  CHECK(rows[1][column(h, "winner")] == "FH");
  CHECK(rows[5][0] == "backoff_eta1");
  CHECK(rows[5][column(h, "condition")] == "true");
  CHECK(rows[7][0] == "proposition_eta1");
  CHECK(rows[7][column(h, "condition")] == "false");
  CHECK(rows[7][column(h, "winner")] == "FH");

  const auto poisson = cli({"compare", "--poisson", "3", "--u", "5", "--format", "json"});
  REQUIRE(poisson.code == 0);
  CHECK(Json::parse(poisson.out).size() == 6);
}

TEST_CASE("cli usage and output file") {
  const auto help = cli({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("simulate") != std::string::npos);
  const auto sub_help = cli({"sweep", "--help"});
  CHECK(sub_help.code == 0);
  CHECK(sub_help.out.find("--lambdas") != std::string::npos);
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"levels", "--scenario", kData + "/two_users.json", "--format", "xml"}).code == 2);

  const auto path = (std::filesystem::temp_directory_path() / "fhs_cli_out.csv").string();
  const auto r = cli({"levels", "--scenario", kData + "/two_users.json", "-o", path});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  CHECK(first == "receiver,level,a,c,sigma2");
  std::filesystem::remove(path);

  const auto missing = cli({"levels", "--scenario", kData + "/does_not_exist.json"});
  CHECK(missing.code == 1);
  const Json err = Json::parse(missing.err);
  CHECK(err["error"]["command"] == "levels");
  CHECK(err["error"]["type"] == "runtime");
}
