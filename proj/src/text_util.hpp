#pragma once

// Line-oriented helpers shared by the text readers.

#include <charconv>
#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "actloc/io.hpp"

namespace actloc::detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

/// Comma-separated when the line has a comma, whitespace-separated otherwise.
inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  if (line.find(',') != std::string_view::npos) {
    std::size_t pos = 0;
    while (true) {
      const auto next = line.find(',', pos);
      out.push_back(trim(line.substr(pos, next == std::string_view::npos ? next : next - pos)));
      if (next == std::string_view::npos) break;
      pos = next + 1;
    }
    return out;
  }
  std::size_t pos = 0;
  while (pos < line.size()) {
    pos = line.find_first_not_of(" \t\r", pos);
    if (pos == std::string_view::npos) break;
    auto end = line.find_first_of(" \t\r", pos);
    if (end == std::string_view::npos) end = line.size();
    out.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view tok) {
  if (tok.empty()) return std::nullopt;
  if (tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) return std::nullopt;
  return v;
}

inline std::optional<long> parse_int(std::string_view tok) {
  if (tok.empty()) return std::nullopt;
  long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) return std::nullopt;
  return v;
}

/// Yields non-blank, non-comment lines with their 1-based line numbers.
class LineReader {
 public:
  LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  bool next(std::string_view& line) {
    while (std::getline(in_, buffer_)) {
      ++line_no_;
      const auto t = trim(buffer_);
      if (t.empty() || t.front() == '#') continue;
      line = t;
      return true;
    }
    return false;
  }

  std::size_t line_no() const { return line_no_; }
  const std::string& source() const { return source_; }

  [[noreturn]] void fail(ParseError::Kind kind, const std::string& msg) const {
    throw ParseError(kind, source_, line_no_, msg);
  }

  double number(std::string_view tok, const char* what) const {
    const auto v = parse_double(tok);
    if (!v) fail(ParseError::Kind::Malformed, std::string("expected a number for ") + what + ", got '" +
                                                  std::string(tok) + "'");
    return *v;
  }

  long integer(std::string_view tok, const char* what) const {
    const auto v = parse_int(tok);
    if (!v) fail(ParseError::Kind::Malformed, std::string("expected an integer for ") + what + ", got '" +
                                                  std::string(tok) + "'");
    return *v;
  }

 private:
  std::istream& in_;
  std::string source_;
  std::string buffer_;
  std::size_t line_no_ = 0;
};

}  // namespace actloc::detail
