#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "oracles.hpp"
#include "rsmkit/io.hpp"
#include "rsmkit/json_writer.hpp"
#include "rsmkit/normal.hpp"
#include "rsmkit/report.hpp"

using namespace rsm;

TEST_CASE("dataset CSV happy path") {
  const Dataset data = parse_dataset_csv(
      "x1,x2,y\n"
      "-1,-1,5.2\n"
      "1,-1,4.8\n"
      "-1,1,6.1\n"
      "1,1,5.9\n"
      "0,0,5.0\n"
      "0.5,-0.25,5.5\n");
  CHECK(data.factors() == 2);
  CHECK(data.runs() == 6);
  CHECK(data.points(0, 0) == -1.0);
  CHECK(data.points(5, 1) == -0.25);
  CHECK(data.response(4) == 5.0);
}

TEST_CASE("dataset CSV accepts CRLF and a missing final newline") {
  const Dataset data = parse_dataset_csv("x1,y\r\n1,2\r\n3,4");
  CHECK(data.runs() == 2);
  CHECK(data.points(1, 0) == 3.0);
  CHECK(data.response(1) == 4.0);
}

TEST_CASE("header must be x1..xn then y") {
  CHECK_THROWS_AS(parse_dataset_csv("y,x1\n1,2\n"), ParseError);
  CHECK_THROWS_AS(parse_dataset_csv("x1,x3,y\n1,2,3\n"), ParseError);
  CHECK_THROWS_AS(parse_dataset_csv("x1,x2\n1,2\n"), ParseError);
  CHECK_THROWS_AS(parse_dataset_csv(""), ParseError);
  try {
    parse_dataset_csv("y,x1\n1,2\n");
  } catch (const ParseError& err) {
    CHECK(err.kind() == ParseError::Kind::MissingHeader);
    CHECK(err.row() == 1);
  }
}

TEST_CASE("non-numeric cells report their location") {
  try {
    parse_dataset_csv("x1,x2,y\n1,2,3\n1,oops,3\n");
    FAIL("expected a parse error");
  } catch (const ParseError& err) {
    CHECK(err.kind() == ParseError::Kind::NonNumericCell);
    CHECK(err.row() == 3);
    CHECK(err.column() == 2);
  }
  // Lexically numeric but useless values are rejected the same way.
  CHECK_THROWS_AS(parse_dataset_csv("x1,y\nnan,1\n"), ParseError);
  CHECK_THROWS_AS(parse_dataset_csv("x1,y\ninf,1\n"), ParseError);
}

TEST_CASE("ragged rows report their location") {
  try {
    parse_dataset_csv("x1,x2,y\n1,2,3\n1,2\n");
    FAIL("expected a parse error");
  } catch (const ParseError& err) {
    CHECK(err.kind() == ParseError::Kind::RaggedRow);
    CHECK(err.row() == 3);
  }
}

TEST_CASE("dataset CSV round trip") {
  NoiseStream rng(113, 0);
  Dataset data;
  data.points = Matrix(7, 3);
  data.response = Vector(7);
  for (int r = 0; r < 7; ++r) {
    for (int c = 0; c < 3; ++c) data.points(r, c) = rng.gaussian();
    data.response(r) = rng.gaussian();
  }
  const Dataset parsed = parse_dataset_csv(dataset_csv(data));
  CHECK(parsed.points == data.points);
  CHECK(parsed.response == data.response);
}

TEST_CASE("surface JSON parsing") {
  const SecondOrderSurface surface =
      parse_surface_json(R"({"n": 2, "beta": [0, -2, 0, 1, 1, 0]})");
  CHECK(surface.factors() == 2);
  CHECK(surface.linear(0) == -2.0);
  CHECK(surface.quadratic(0, 0) == 1.0);

  CHECK_THROWS_AS(parse_surface_json("not json"), Error);
  CHECK_THROWS_AS(parse_surface_json(R"({"n": 2, "beta": [1, 2, 3]})"), Error);
  CHECK_THROWS_AS(parse_surface_json(R"({"beta": [1, 2, 3]})"), Error);
  CHECK_THROWS_AS(parse_surface_json(R"({"n": 0, "beta": []})"), Error);
}

TEST_CASE("json writer formats numbers round-trippably") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(-0.0) == "-0");
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "null");

  NoiseStream rng(127, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    const double value = std::exp(40.0 * (rng.uniform() - 0.5)) * (rng.gaussian());
    CHECK(std::stod(format_number(value)) == value);
  }
}

TEST_CASE("json writer structure") {
  JsonWriter json;
  json.begin_object();
  json.key("name");
  json.value("rsm\"kit\"");
  json.key("values");
  Vector numbers(3);
  numbers << 1, 0.5, -2;
  json.value(numbers);
  json.key("flag");
  json.value(true);
  json.key("missing");
  json.null();
  json.end_object();

  const std::string text = json.str();
  const nlohmann::json parsed = nlohmann::json::parse(text);
  CHECK(parsed["name"] == "rsm\"kit\"");
  CHECK(parsed["values"][1] == 0.5);
  CHECK(parsed["flag"] == true);
  CHECK(parsed["missing"].is_null());
}

TEST_CASE("reports parse as JSON and carry the pinned fields") {
  NoiseStream rng(131, 0);
  Dataset data;
  data.points = oracle::ccd_points();
  data.response = Vector(data.points.rows());
  const SecondOrderSurface truth = unpack(oracle::pack_coefficients(0, {-2, 0, 1, 1, 0}), 2);
  for (int r = 0; r < data.points.rows(); ++r) {
    data.response(r) = predict(truth, data.points.row(r).transpose()) + 0.05 * rng.gaussian();
  }

  SUBCASE("fit report") {
    const nlohmann::json parsed = nlohmann::json::parse(fit_report(data));
    CHECK(parsed["beta_hat"].size() == 6);
    CHECK(parsed.contains("sigma2_hat"));
    CHECK(parsed["dof"] == 7);
    CHECK(parsed["cov_beta"].size() == 6);
    CHECK(parsed["cov_beta"][0].size() == 6);
  }

  SUBCASE("optimize report") {
    const nlohmann::json parsed = nlohmann::json::parse(optimize_report(data, Region{0.5}));
    CHECK(parsed.contains("fit"));
    CHECK(parsed["critical_point"]["status"] == "Boundary");
    CHECK(parsed["critical_point"]["x_star"].size() == 2);
    CHECK(parsed["critical_point"]["residuals"].contains("stationarity"));
    CHECK(parsed["critical_point"]["residuals"].contains("complementarity"));
    CHECK(parsed["critical_point"]["extension"] == false);
  }

  SUBCASE("analyze report") {
    const nlohmann::json parsed =
        nlohmann::json::parse(analyze_report(data, Region{0.5}, 0.95, true, 1e-6));
    CHECK(parsed["sensitivity"]["dxdbeta"].size() == 2);
    CHECK(parsed["sensitivity"]["method"] == "BoundaryClosedForm");
    CHECK(parsed["asymptotics"]["xi"].size() == 2);
    CHECK(parsed["asymptotics"]["confidence_intervals"].size() == 2);
    CHECK(parsed["asymptotics"]["level"] == 0.95);
    CHECK(parsed["diagnostics"].contains("design_condition"));
    CHECK(parsed["diagnostics"].contains("strict_complementarity_margin"));
    const auto& sign_check = parsed["diagnostics"]["hessian_sign_check"];
    CHECK(sign_check["shipped_stationarity_residual"].get<double>() < 1e-9);
    const auto& fd = parsed["diagnostics"]["finite_difference_check"];
    CHECK(fd["max_abs_deviation_shipped"].get<double>() < 1e-5);
    CHECK(fd["dxdbeta"].size() == 2);
  }

  SUBCASE("interior analyze reports interior method and margin") {
    const nlohmann::json parsed =
        nlohmann::json::parse(analyze_report(data, Region{2.0}, 0.95, false, 1e-6));
    CHECK(parsed["critical_point"]["status"] == "Interior");
    CHECK(parsed["sensitivity"]["method"] == "InteriorClosedForm");
    CHECK(parsed["sensitivity"]["dlambdadbeta"].is_null());
    CHECK(parsed["diagnostics"]["kkt_jacobian_condition"].is_null());
    // The flipped interior closed form misses the sign and fails the
    // stationarity system by roughly twice the design gradient.
    const auto& sign_check = parsed["diagnostics"]["hessian_sign_check"];
    CHECK(sign_check["shipped_stationarity_residual"].get<double>() < 1e-9);
    CHECK(sign_check["flipped_stationarity_residual"].get<double>() > 1.0);
  }

  SUBCASE("analyze output is byte-stable") {
    const std::string first = analyze_report(data, Region{0.5}, 0.95, true, 1e-6);
    const std::string second = analyze_report(data, Region{0.5}, 0.95, true, 1e-6);
    CHECK(first == second);
  }
}

TEST_CASE("monte carlo JSON carries the study fields") {
  const SecondOrderSurface truth = unpack(oracle::pack_coefficients(0, {-2, 0, 1, 1, 0}), 2);
  const MonteCarloStudy study =
      monte_carlo_study(truth, Region{2.0}, oracle::ccd_points(), 0.05, 150, 9, 0.9);
  const nlohmann::json parsed = nlohmann::json::parse(monte_carlo_json(study));
  CHECK(parsed["replications"] == 150);
  CHECK(parsed["seed"] == 9);
  CHECK(parsed["empirical_cov"].size() == 2);
  CHECK(parsed["empirical_coverage"].size() == 2);
  CHECK(parsed["status_flip_count"] == 0);
  CHECK(parsed["used_replications"] == 150);

  const std::string csv = replication_csv(study);
  CHECK(csv.substr(0, csv.find('\n')) == "replication,status,x1,x2");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 151);
}

TEST_CASE("file io errors") {
  CHECK_THROWS_AS(read_file("/nonexistent/rsmkit-test"), Error);
  CHECK_THROWS_AS(read_dataset_csv("/nonexistent/rsmkit-test.csv"), Error);
}
