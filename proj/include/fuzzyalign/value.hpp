#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace fuzzyalign {

/// A data value carried by events and model states: a binary64 number or a string.
using Value = std::variant<double, std::string>;

inline bool is_number(const Value& v) { return std::holds_alternative<double>(v); }

/// Parses a decimal literal (optional sign, digits, optional fraction and exponent).
/// Returns nullopt for anything else, including "inf" and "nan".
std::optional<double> parse_decimal(std::string_view text);

/// Shortest representation that parses back to the same double.
std::string format_number(double v);

/// Rounds to 9 significant digits, the precision of every emitted report.
double round_sig9(double v);

/// `%.9g` text used in CSV reports.
std::string format_sig9(double v);

/// Numbers in shortest form, strings verbatim.
std::string format_value(const Value& v);

/// Numbers if the text lexes as a decimal literal, strings otherwise.
Value infer_value(std::string_view text);

}  // namespace fuzzyalign
