// Copyright 2026 The covop Authors.
// SPDX-License-Identifier: Apache-2.0

#include "csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "errors.hpp"

namespace covop {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) {
    ++b;
  }
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) {
    --e;
  }
  return std::string(s.substr(b, e - b));
}

std::vector<double> parse_row(const std::string& line, const std::string& where) {
  std::vector<double> out;
  std::size_t start = 0;
  std::size_t column = 1;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::string field =
        trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos
                                                                             : comma - start));
    if (field.empty()) {
      throw InvalidInput(where + ", column " + std::to_string(column) + ": empty field");
    }
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    if (*first == '+') {
      ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec == std::errc::result_out_of_range) {
      throw InvalidInput(where + ", column " + std::to_string(column) + ": value '" + field +
                         "' is out of range");
    }
    if (ec != std::errc() || ptr != last) {
      throw InvalidInput(where + ", column " + std::to_string(column) + ": '" + field +
                         "' is not a number");
    }
    if (!std::isfinite(v)) {
      throw InvalidInput(where + ", column " + std::to_string(column) + ": non-finite value '" +
                         field + "'");
    }
    out.push_back(v);
    if (comma == std::string::npos) {
      break;
    }
    start = comma + 1;
    ++column;
  }
  return out;
}

} // namespace

CurveSample read_curves_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> grid;
  bool have_header = false;
  std::vector<double> values;
  std::size_t curves = 0;
  std::size_t blank_run_start = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) {
      line.erase(0, 3);
    }
    if (trim(line).empty()) {
      if (blank_run_start == 0) {
        blank_run_start = line_no;
      }
      continue;
    }
    if (blank_run_start != 0) {
      throw InvalidInput(source + ", line " + std::to_string(blank_run_start) +
                         ": blank line inside data");
    }
    const std::string where = source + ", line " + std::to_string(line_no);
    if (!have_header) {
      try {
        grid = parse_row(line, where);
      } catch (const InvalidInput& e) {
        throw InvalidInput(std::string("malformed header: ") + e.what());
      }
      if (grid.size() < 2) {
        throw InvalidInput(where + ": header needs at least 2 grid points");
      }
      for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
          throw InvalidInput(where + ": grid is not strictly increasing at column " +
                             std::to_string(i + 1));
        }
      }
      if (grid.front() != 0.0 || grid.back() != 1.0) {
        throw InvalidInput(where + ": grid must start at 0 and end at 1");
      }
      have_header = true;
      continue;
    }
    const auto row = parse_row(line, where);
    if (row.size() != grid.size()) {
      throw InvalidInput(where + ": ragged row with " + std::to_string(row.size()) +
                         " values, header has " + std::to_string(grid.size()));
    }
    values.insert(values.end(), row.begin(), row.end());
    ++curves;
  }
  if (in.bad()) {
    throw IoError("read failure on " + source);
  }
  if (!have_header) {
    throw InvalidInput(source + ": missing header row");
  }
  if (curves == 0) {
    throw InvalidInput(source + ": no curves after the header");
  }
  return CurveSample(Grid(std::move(grid)), std::move(values));
}

CurveSample read_curves_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path + "' for reading");
  }
  return read_curves_csv(in, path);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_curves_csv(std::ostream& out, const CurveSample& sample) {
  const std::size_t g = sample.grid_size();
  std::string line;
  for (std::size_t i = 0; i < g; ++i) {
    if (i) {
      line += ',';
    }
    line += format_double(sample.grid()[i]);
  }
  out << line << '\n';
  for (std::size_t j = 0; j < sample.count(); ++j) {
    line.clear();
    const auto c = sample.curve(j);
    for (std::size_t i = 0; i < g; ++i) {
      if (i) {
        line += ',';
      }
      line += format_double(c[i]);
    }
    out << line << '\n';
  }
}

void write_curves_csv_file(const std::string& path, const CurveSample& sample) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  write_curves_csv(out, sample);
  out.flush();
  if (!out) {
    throw IoError("write failure on '" + path + "'");
  }
}

} // namespace covop
