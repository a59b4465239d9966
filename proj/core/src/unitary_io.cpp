#include "quditfuse/unitary_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace quditfuse {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string format_unitary(const CMatrix& u) {
  if (u.rows() != u.cols()) throw InvalidInput("format_unitary expects a square matrix");
  std::string out = std::to_string(u.rows()) + "\n";
  for (Eigen::Index r = 0; r < u.rows(); ++r) {
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
      if (c) out += "  ";
      out += format_double(u(r, c).real());
      out += ' ';
      out += format_double(u(r, c).imag());
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string_view> tokenize(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  auto is_sep = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '(' || c == ')' || c == ',';
  };
  while (i < text.size()) {
    while (i < text.size() && is_sep(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_sep(text[i])) ++i;
    if (i > start) tokens.push_back(text.substr(start, i - start));
  }
  return tokens;
}

double parse_number(std::string_view token) {
  double value = 0.0;
  const char* first = token.data();
  if (!token.empty() && token.front() == '+') ++first;
  const auto res = std::from_chars(first, token.data() + token.size(), value);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
    throw InvalidInput("malformed number '" + std::string(token) + "' in unitary text");
  }
  return value;
}

}  // namespace

CMatrix parse_unitary(std::string_view text) {
  const auto tokens = tokenize(text);
  if (tokens.empty()) throw InvalidInput("unitary text is empty");
  long long k = 0;
  const auto res = std::from_chars(tokens[0].data(), tokens[0].data() + tokens[0].size(), k);
  if (res.ec != std::errc{} || res.ptr != tokens[0].data() + tokens[0].size() || k < 1) {
    throw InvalidInput("unitary text must start with a positive integer K");
  }
  if (k > 4096) throw CapacityExceeded("unitary size K is unreasonably large");
  const auto expected = static_cast<std::size_t>(1 + 2 * k * k);
  if (tokens.size() != expected) {
    throw InvalidInput("unitary text has " + std::to_string(tokens.size() - 1) + " numbers, expected " +
                       std::to_string(2 * k * k));
  }
  CMatrix u(k, k);
  std::size_t t = 1;
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) {
      const double re = parse_number(tokens[t++]);
      const double im = parse_number(tokens[t++]);
      u(r, c) = Complex(re, im);
    }
  }
  return u;
}

CMatrix read_unitary_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open unitary file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_unitary(ss.str());
}

void write_unitary_file(const std::filesystem::path& path, const CMatrix& u) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write unitary file '" + path.string() + "'");
  out << format_unitary(u);
}

}  // namespace quditfuse
