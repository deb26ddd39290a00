#pragma once

// Matrix/vector interchange: CSV (one row per line, comma separated, no
// header) and JSON {"rows":..,"cols":..,"entries":[..]}. Doubles are written
// with 17 significant digits so that read(write(x)) == x exactly.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "l0lsq/errors.hpp"
#include "l0lsq/linalg.hpp"

namespace l0lsq {

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace detail {

inline double parse_double(const std::string& tok, const std::string& context) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(tok, &pos);
    while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
    if (pos != tok.size()) throw InvalidInput(context + ": trailing characters in '" + tok + "'");
    return x;
  } catch (const std::invalid_argument&) {
    throw InvalidInput(context + ": cannot parse number '" + tok + "'");
  } catch (const std::out_of_range&) {
    throw InvalidInput(context + ": number out of range '" + tok + "'");
  }
}

inline std::vector<std::vector<double>> parse_csv(std::istream& in, const std::string& context) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool blank = true;
    for (char c : line) blank &= std::isspace(static_cast<unsigned char>(c)) != 0;
    if (blank) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) row.push_back(parse_double(tok, context));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInput(context + ": no data rows");
  for (const auto& r : rows)
    if (r.size() != rows.front().size()) throw InvalidInput(context + ": ragged rows");
  return rows;
}

inline std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open file for reading: " + path.string());
  return in;
}

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open file for writing: " + path.string());
  return out;
}

}  // namespace detail

inline Matrix read_matrix_csv(std::istream& in, const std::string& context = "matrix csv") {
  auto rows = detail::parse_csv(in, context);
  std::vector<double> entries;
  for (const auto& r : rows) entries.insert(entries.end(), r.begin(), r.end());
  return Matrix(rows.size(), rows.front().size(), std::move(entries));
}

inline void write_matrix_csv(std::ostream& out, const Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
}

// Vectors are written one entry per line; either a single row or a single
// column is accepted on read.
inline Vector read_vector_csv(std::istream& in, const std::string& context = "vector csv") {
  auto rows = detail::parse_csv(in, context);
  std::vector<double> entries;
  if (rows.size() == 1) {
    entries = rows.front();
  } else if (rows.front().size() == 1) {
    for (const auto& r : rows) entries.push_back(r.front());
  } else {
    throw InvalidInput(context + ": expected a single row or a single column");
  }
  return Vector(std::move(entries));
}

inline void write_vector_csv(std::ostream& out, const Vector& v) {
  for (std::size_t i = 0; i < v.size(); ++i) out << format_double(v[i]) << '\n';
}

inline Matrix read_matrix_json(std::istream& in, const std::string& context = "matrix json") {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(context + ": " + e.what());
  }
  if (!j.contains("rows") || !j.contains("cols") || !j.contains("entries"))
    throw InvalidInput(context + ": expected keys rows, cols, entries");
  const auto rows = j["rows"].get<std::size_t>();
  const auto cols = j["cols"].get<std::size_t>();
  auto entries = j["entries"].get<std::vector<double>>();
  return Matrix(rows, cols, std::move(entries));
}

inline void write_matrix_json(std::ostream& out, const Matrix& m) {
  nlohmann::ordered_json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["entries"] = std::vector<double>(m.entries().begin(), m.entries().end());
  out << j.dump() << '\n';
}

inline Vector read_vector_json(std::istream& in, const std::string& context = "vector json") {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(context + ": " + e.what());
  }
  if (j.contains("len") && j.contains("entries")) {
    auto entries = j["entries"].get<std::vector<double>>();
    if (entries.size() != j["len"].get<std::size_t>())
      throw InvalidInput(context + ": len does not match entries");
    return Vector(std::move(entries));
  }
  if (j.contains("rows") && j.contains("cols") && j.contains("entries")) {
    const Matrix m = [&] {
      std::stringstream ss(j.dump());
      return read_matrix_json(ss, context);
    }();
    if (m.cols() == 1 || m.rows() == 1)
      return Vector(std::vector<double>(m.entries().begin(), m.entries().end()));
    throw InvalidInput(context + ": matrix-shaped vector must have one row or one column");
  }
  throw InvalidInput(context + ": expected keys len/entries");
}

inline void write_vector_json(std::ostream& out, const Vector& v) {
  nlohmann::ordered_json j;
  j["len"] = v.size();
  j["entries"] = std::vector<double>(v.entries().begin(), v.entries().end());
  out << j.dump() << '\n';
}

inline bool has_json_extension(const std::filesystem::path& path) {
  return path.extension() == ".json";
}

inline Matrix read_matrix_file(const std::filesystem::path& path) {
  auto in = detail::open_for_read(path);
  return has_json_extension(path) ? read_matrix_json(in, "matrix " + path.string())
                                  : read_matrix_csv(in, "matrix " + path.string());
}

inline Vector read_vector_file(const std::filesystem::path& path) {
  auto in = detail::open_for_read(path);
  return has_json_extension(path) ? read_vector_json(in, "vector " + path.string())
                                  : read_vector_csv(in, "vector " + path.string());
}

}  // namespace l0lsq
