#include "rsmkit/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "rsmkit/json_writer.hpp"

namespace rsm {

namespace {

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

std::string_view trim(std::string_view cell) {
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) {
    cell.remove_suffix(1);
  }
  return cell;
}

double parse_cell(std::string_view cell, int row, int column) {
  cell = trim(cell);
  double parsed = 0.0;
  const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), parsed);
  if (ec != std::errc() || end != cell.data() + cell.size() || !std::isfinite(parsed)) {
    throw ParseError(ParseError::Kind::NonNumericCell, row, column,
                     "row " + std::to_string(row) + ", column " + std::to_string(column) +
                         ": cell '" + std::string(cell) + "' is not a finite number");
  }
  return parsed;
}

}  // namespace

Dataset parse_dataset_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();

  if (lines.empty()) {
    throw ParseError(ParseError::Kind::MissingHeader, 1, 1, "row 1, column 1: file is empty");
  }

  // Header must read x1,...,xn,y in that order.
  const std::vector<std::string_view> header = split_line(lines[0]);
  const int columns = static_cast<int>(header.size());
  for (int c = 0; c + 1 < columns; ++c) {
    if (trim(header[c]) != "x" + std::to_string(c + 1)) {
      throw ParseError(ParseError::Kind::MissingHeader, 1, c + 1,
                       "row 1, column " + std::to_string(c + 1) + ": expected header 'x" +
                           std::to_string(c + 1) + "', got '" + std::string(trim(header[c])) +
                           "'");
    }
  }
  if (columns < 2 || trim(header[columns - 1]) != "y") {
    throw ParseError(ParseError::Kind::MissingHeader, 1, columns,
                     "row 1, column " + std::to_string(columns) +
                         ": header must end with the response column 'y'");
  }
  const int factors = columns - 1;
  if (factors > kMaxFactors) {
    throw ParseError(ParseError::Kind::MissingHeader, 1, columns,
                     "row 1: at most " + std::to_string(kMaxFactors) + " factor columns");
  }

  const int runs = static_cast<int>(lines.size()) - 1;
  Dataset data;
  data.points = Matrix(runs, factors);
  data.response = Vector(runs);
  for (int r = 0; r < runs; ++r) {
    const int row = r + 2;  // 1-based file row
    const std::vector<std::string_view> cells = split_line(lines[r + 1]);
    if (static_cast<int>(cells.size()) != columns) {
      throw ParseError(ParseError::Kind::RaggedRow, row, static_cast<int>(cells.size()),
                       "row " + std::to_string(row) + ": expected " + std::to_string(columns) +
                           " cells, got " + std::to_string(cells.size()));
    }
    for (int c = 0; c < factors; ++c) data.points(r, c) = parse_cell(cells[c], row, c + 1);
    data.response(r) = parse_cell(cells[factors], row, columns);
  }
  return data;
}

Dataset read_dataset_csv(const std::string& path) { return parse_dataset_csv(read_file(path)); }

std::string dataset_csv(const Dataset& data) {
  std::string csv;
  for (int c = 0; c < data.factors(); ++c) csv += "x" + std::to_string(c + 1) + ",";
  csv += "y\n";
  for (int r = 0; r < data.runs(); ++r) {
    for (int c = 0; c < data.factors(); ++c) csv += format_number(data.points(r, c)) + ",";
    csv += format_number(data.response(r)) + "\n";
  }
  return csv;
}

SecondOrderSurface parse_surface_json(std::string_view text) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& err) {
    throw Error(ErrorCode::Parse, std::string("coefficient file is not valid JSON: ") +
                                      err.what());
  }
  if (!parsed.is_object() || !parsed.contains("n") || !parsed.contains("beta") ||
      !parsed["n"].is_number_integer() || !parsed["beta"].is_array()) {
    throw Error(ErrorCode::Parse,
                "coefficient file must be an object with integer 'n' and array 'beta'");
  }
  const int factors = parsed["n"].get<int>();
  if (factors < 1 || factors > kMaxFactors) {
    throw Error(ErrorCode::Parse, "coefficient file: 'n' out of range");
  }
  Vector coefficients(parsed["beta"].size());
  for (std::size_t i = 0; i < parsed["beta"].size(); ++i) {
    if (!parsed["beta"][i].is_number()) {
      throw Error(ErrorCode::Parse,
                  "coefficient file: beta[" + std::to_string(i) + "] is not a number");
    }
    coefficients(static_cast<Eigen::Index>(i)) = parsed["beta"][i].get<double>();
  }
  if (coefficients.size() != coefficient_count(factors)) {
    throw Error(ErrorCode::Parse,
                "coefficient file: expected " + std::to_string(coefficient_count(factors)) +
                    " coefficients for n=" + std::to_string(factors) + ", got " +
                    std::to_string(coefficients.size()));
  }
  return unpack(coefficients, factors);
}

SecondOrderSurface read_surface_json(const std::string& path) {
  return parse_surface_json(read_file(path));
}

std::string read_file(const std::string& path) {
  std::ifstream stream(path, std::ios::binary);
  if (!stream) {
    throw Error(ErrorCode::Io, "cannot open '" + path + "' for reading");
  }
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream stream(path, std::ios::binary);
  if (!stream) {
    throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  }
  stream.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!stream) {
    throw Error(ErrorCode::Io, "failed writing '" + path + "'");
  }
}

}  // namespace rsm
