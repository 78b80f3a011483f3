#include "jgecert/tensor_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "jgecert/error.hpp"

namespace jgecert::io {

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

bool next_content_line(std::istream& is, std::string& line, long& lineno) {
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    line = line.substr(first, line.find_last_not_of(" \t") - first + 1);
    return true;
  }
  return false;
}

Index parse_positive(const std::string& s, const char* what) {
  Index v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v <= 0)
    throw ParseError(std::string("invalid ") + what + " '" + s + "' in header");
  return v;
}

double parse_value(const std::string& s, long lineno) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ParseError("");
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(lineno) + ": not a number: '" + s + "'");
  }
}

std::vector<std::string> read_header(std::istream& is, const std::string& tag, std::size_t fields, long& lineno) {
  std::string line;
  if (!next_content_line(is, line, lineno)) throw ParseError("empty input: expected '" + tag + "' header");
  auto parts = split_commas(line);
  if (parts.empty() || parts[0] != tag || parts.size() != fields)
    throw ParseError("line " + std::to_string(lineno) + ": expected header '" + tag + ",...' with " +
                     std::to_string(fields - 1) + " sizes, got '" + line + "'");
  return parts;
}

std::vector<double> read_values(std::istream& is, std::size_t count, long& lineno) {
  std::vector<double> values;
  values.reserve(count);
  std::string line;
  while (values.size() < count) {
    if (!next_content_line(is, line, lineno))
      throw ParseError("expected " + std::to_string(count) + " values, found " + std::to_string(values.size()));
    values.push_back(parse_value(line, lineno));
  }
  if (next_content_line(is, line, lineno))
    throw ParseError("line " + std::to_string(lineno) + ": trailing content after " + std::to_string(count) + " values");
  return values;
}

void write_block(std::ostream& os, const Matrix& m) {
  for (Index n = 0; n < m.size(); ++n) os << format_double(m.data()[n]) << '\n';
}

template <typename Fn>
auto with_input(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  try {
    return fn(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

template <typename Fn>
void with_output(const std::filesystem::path& path, Fn&& fn) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  fn(out);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_tensor(std::ostream& os, const Tensor3& t) {
  const auto [i1, i2, i3] = t.dims();
  os << "dims," << i1 << ',' << i2 << ',' << i3 << '\n';
  for (double v : t.values()) os << format_double(v) << '\n';
}

Tensor3 read_tensor(std::istream& is) {
  long lineno = 0;
  const auto h = read_header(is, "dims", 4, lineno);
  const Dims dims{parse_positive(h[1], "dimension"), parse_positive(h[2], "dimension"),
                  parse_positive(h[3], "dimension")};
  auto values = read_values(is, static_cast<std::size_t>(dims[0] * dims[1] * dims[2]), lineno);
  return Tensor3(dims, std::move(values));
}

void write_factors(std::ostream& os, const FactorTriple& f) {
  f.validate();
  os << "factors," << f.A.rows() << ',' << f.B.rows() << ',' << f.C.rows() << ',' << f.rank() << '\n';
  write_block(os, f.A);
  write_block(os, f.B);
  write_block(os, f.C);
}

FactorTriple read_factors(std::istream& is) {
  long lineno = 0;
  const auto h = read_header(is, "factors", 5, lineno);
  const Index i1 = parse_positive(h[1], "dimension"), i2 = parse_positive(h[2], "dimension"),
              i3 = parse_positive(h[3], "dimension"), r = parse_positive(h[4], "rank");
  const auto v = read_values(is, static_cast<std::size_t>((i1 + i2 + i3) * r), lineno);
  FactorTriple f{Eigen::Map<const Matrix>(v.data(), i1, r),
                 Eigen::Map<const Matrix>(v.data() + i1 * r, i2, r),
                 Eigen::Map<const Matrix>(v.data() + (i1 + i2) * r, i3, r)};
  return f;
}

void write_matrix(std::ostream& os, const Matrix& m) {
  os << "matrix," << m.rows() << ',' << m.cols() << '\n';
  write_block(os, m);
}

Matrix read_matrix(std::istream& is) {
  long lineno = 0;
  const auto h = read_header(is, "matrix", 3, lineno);
  const Index rows = parse_positive(h[1], "row count"), cols = parse_positive(h[2], "column count");
  const auto v = read_values(is, static_cast<std::size_t>(rows * cols), lineno);
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

void save_tensor(const std::filesystem::path& path, const Tensor3& t) {
  with_output(path, [&](std::ostream& os) { write_tensor(os, t); });
}
Tensor3 load_tensor(const std::filesystem::path& path) {
  return with_input(path, [](std::istream& is) { return read_tensor(is); });
}
void save_factors(const std::filesystem::path& path, const FactorTriple& f) {
  with_output(path, [&](std::ostream& os) { write_factors(os, f); });
}
FactorTriple load_factors(const std::filesystem::path& path) {
  return with_input(path, [](std::istream& is) { return read_factors(is); });
}
void save_matrix(const std::filesystem::path& path, const Matrix& m) {
  with_output(path, [&](std::ostream& os) { write_matrix(os, m); });
}
Matrix load_matrix(const std::filesystem::path& path) {
  return with_input(path, [](std::istream& is) { return read_matrix(is); });
}

}  // namespace jgecert::io
