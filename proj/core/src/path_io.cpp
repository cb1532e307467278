#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "amle/errors.hpp"
#include "amle/simulator.hpp"

namespace amle {

namespace {

void put_number(std::ostream& out, double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  out.write(buf, len);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

double parse_number(std::string_view field, std::size_t line_no) {
  if (field.empty()) throw ParseError("empty field", line_no);
  if (field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw ParseError("not a number: '" + std::string(field) + "'", line_no);
  if (!std::isfinite(value)) throw ParseError("non-finite value", line_no);
  return value;
}

}  // namespace

void write_path(const Path& path, std::ostream& out) {
  path.validate();
  out << 't';
  for (std::size_t c = 0; c < path.dim(); ++c) out << ",x" << (c + 1);
  out << '\n';
  for (std::size_t i = 0; i <= path.n_steps(); ++i) {
    put_number(out, path.grid.time(i));
    for (double v : path.state(i)) {
      out << ',';
      put_number(out, v);
    }
    out << '\n';
  }
}

void write_path(const Path& path, const std::filesystem::path& destination) {
  std::ofstream out(destination, std::ios::binary);
  if (!out) throw InputError("cannot open '" + destination.string() + "' for writing");
  write_path(path, out);
  if (!out) throw InputError("write to '" + destination.string() + "' failed");
}

Path read_path(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_commas(line);
  if (header.size() < 2 || header.front() != "t")
    throw ParseError("header must read \"t,x1,...,xk\"", line_no);
  const std::size_t k = header.size() - 1;

  std::vector<double> times;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != k + 1)
      throw ParseError("expected " + std::to_string(k + 1) + " columns, found " +
                           std::to_string(fields.size()),
                       line_no);
    const double t = parse_number(fields[0], line_no);
    if (times.empty() && t != 0.0) throw ParseError("first time point must be 0", line_no);
    if (!times.empty() && !(t > times.back()))
      throw ParseError("time values are not increasing", line_no);
    times.push_back(t);
    for (std::size_t c = 1; c <= k; ++c) values.push_back(parse_number(fields[c], line_no));
  }
  if (times.size() < 2) throw ParseError("a path needs at least two rows", line_no);

  const std::size_t n = times.size() - 1;
  const TimeGrid grid(times.back(), n);
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(times[i] - grid.time(i)) > 1e-9 * grid.horizon())
      throw ParseError("time grid is not equidistant", i + 2);

  Path path{grid, Matrix(n + 1, k)};
  std::copy(values.begin(), values.end(), path.states.data().begin());
  return path;
}

Path read_path(const std::filesystem::path& source) {
  std::ifstream in(source, std::ios::binary);
  if (!in) throw InputError("cannot open '" + source.string() + "'");
  return read_path(in);
}

}  // namespace amle
