#include "fuzzyalign/value.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "fuzzyalign/error.hpp"

namespace fuzzyalign {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "syntax";
    case ErrorKind::Semantic: return "semantic";
    case ErrorKind::TypeMismatch: return "type-mismatch";
    case ErrorKind::UndefinedVariable: return "undefined-variable";
    case ErrorKind::NotEnabled: return "not-enabled";
    case ErrorKind::WrongWriteSet: return "wrong-write-set";
    case ErrorKind::GuardViolated: return "guard-violated";
    case ErrorKind::UnreachableFinal: return "unreachable-final";
    case ErrorKind::IllegalMove: return "illegal-move";
    case ErrorKind::ActivityMismatch: return "activity-mismatch";
    case ErrorKind::NonFinite: return "non-finite";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::BudgetExceeded: return "search-budget-exceeded";
    case ErrorKind::EmptySample: return "empty-sample";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// sign? (digits ('.' digits?)? | '.' digits) ([eE] sign? digits)?
bool lexes_as_decimal(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  std::size_t int_digits = 0;
  while (i < s.size() && is_digit(s[i])) ++i, ++int_digits;
  std::size_t frac_digits = 0;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && is_digit(s[i])) ++i, ++frac_digits;
  }
  if (int_digits + frac_digits == 0) return false;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t exp_digits = 0;
    while (i < s.size() && is_digit(s[i])) ++i, ++exp_digits;
    if (exp_digits == 0) return false;
  }
  return i == s.size();
}

}  // namespace

std::optional<double> parse_decimal(std::string_view text) {
  if (!lexes_as_decimal(text)) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double round_sig9(double v) {
  if (!std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

std::string format_sig9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", round_sig9(v));
  return buf;
}

std::string format_value(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return format_number(*d);
  return std::get<std::string>(v);
}

Value infer_value(std::string_view text) {
  if (auto d = parse_decimal(text)) return *d;
  return std::string(text);
}

}  // namespace fuzzyalign
