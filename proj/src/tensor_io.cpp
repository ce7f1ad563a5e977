#include "ltr/tensor_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ltr/errors.hpp"

namespace ltr {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::size_t parse_extent(const std::string& token) {
  std::size_t v = 0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end || v == 0) {
    throw ParseError("dten: invalid extent '" + token + "'");
  }
  return v;
}

}  // namespace

double parse_double(std::string_view token) {
  // from_chars rejects a leading '+', which some writers emit.
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double v = 0.0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end || token.empty()) {
    throw ParseError("invalid number '" + std::string(token) + "'");
  }
  return v;
}

DenseTensor read_dten(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "dten 1") {
    throw ParseError("dten: missing 'dten 1' header");
  }
  if (!std::getline(in, line)) throw ParseError("dten: missing dimension line");
  std::vector<std::size_t> dims;
  {
    std::istringstream ds(line);
    std::string tok;
    while (ds >> tok) dims.push_back(parse_extent(tok));
  }
  if (dims.empty()) throw ParseError("dten: empty dimension line");
  if (dims.size() > kMaxOrder) {
    throw ParseError("dten: order " + std::to_string(dims.size()) +
                     " exceeds the maximum of " + std::to_string(kMaxOrder));
  }
  Shape shape(std::move(dims));

  std::vector<double> data;
  data.reserve(shape.num_elements());
  std::string tok;
  while (in >> tok) {
    if (data.size() == shape.num_elements()) {
      throw ParseError("dten: more values than the shape " + shape.to_string() + " holds");
    }
    try {
      data.push_back(parse_double(tok));
    } catch (const ParseError&) {
      throw ParseError("dten: invalid value '" + tok + "' at position " +
                       std::to_string(data.size() + 1));
    }
  }
  if (data.size() != shape.num_elements()) {
    throw ParseError("dten: expected " + std::to_string(shape.num_elements()) +
                     " values, found " + std::to_string(data.size()));
  }
  return DenseTensor(std::move(shape), std::move(data));
}

DenseTensor read_dten_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return read_dten(in);
}

std::string format_double(double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

void write_dten(std::ostream& out, const DenseTensor& t) {
  const auto& dims = t.shape().dims();
  out << "dten 1\n" << t.shape().to_string(' ') << '\n';
  const std::size_t row = dims.back();
  for (std::size_t i = 0; i < t.size(); ++i) {
    out << format_double(t[i]) << ((i + 1) % row == 0 ? '\n' : ' ');
  }
}

void write_dten_file(const std::filesystem::path& path, const DenseTensor& t) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  write_dten(out, t);
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace ltr
