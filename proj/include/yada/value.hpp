#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace yada {

/// Fixed-point decimal with six fractional digits, stored as an integer
/// count of millionths. Equality and ordering are exact.
class Decimal {
public:
    static constexpr std::int64_t kScale = 1'000'000;
    static constexpr int kMaxFractionDigits = 6;

    constexpr Decimal() = default;

    static constexpr Decimal from_micros(std::int64_t micros) {
        Decimal d;
        d.micros_ = micros;
        return d;
    }

    /// Strict parse: optional sign, digits, optional '.' and at most six
    /// fractional digits. No exponent, no surrounding whitespace.
    static std::optional<Decimal> parse(std::string_view text);

    /// Lenient parse used for dataset cells: accepts anything strtod does
    /// (exponents, surrounding blanks, long fractions) and rounds half away
    /// from zero to six digits. Rejects non-finite and out-of-range values.
    static std::optional<Decimal> parse_lenient(std::string_view text);

    static std::optional<Decimal> from_double(double v);

    constexpr std::int64_t micros() const { return micros_; }
    double to_double() const { return static_cast<double>(micros_) / kScale; }

    /// Shortest exact rendering: no trailing fractional zeros, no '.' for
    /// integral values, "-" only for negative values.
    std::string to_string() const;

    friend constexpr auto operator<=>(Decimal, Decimal) = default;

private:
    std::int64_t micros_ = 0;
};

enum class ValueKind { Num, Str, Bool };

std::string_view to_string(ValueKind kind);

inline constexpr std::size_t kMaxStringBytes = 4096;

/// A leaf value. Alternatives are ordered Num < Str < Bool for the purpose of
/// total ordering; list keys of one list always share a kind.
class Value {
public:
    Value() : data_(Decimal{}) {}
    Value(Decimal d) : data_(d) {}
    Value(std::string s) : data_(std::move(s)) {}
    Value(bool b) : data_(b) {}

    ValueKind kind() const { return static_cast<ValueKind>(data_.index()); }

    bool is_num() const { return kind() == ValueKind::Num; }
    bool is_str() const { return kind() == ValueKind::Str; }
    bool is_bool() const { return kind() == ValueKind::Bool; }

    Decimal as_num() const { return std::get<Decimal>(data_); }
    const std::string& as_str() const { return std::get<std::string>(data_); }
    bool as_bool() const { return std::get<bool>(data_); }

    /// Plain rendering used in paths, CSV and query output: decimals in
    /// shortest form, strings verbatim, booleans as true/false.
    std::string to_string() const;

    /// Parses `text` as a value of `kind` (strict decimal grammar for Num,
    /// "true"/"false" for Bool). Returns nullopt on mismatch.
    static std::optional<Value> parse_as(ValueKind kind, std::string_view text);

    friend bool operator==(const Value&, const Value&) = default;
    friend std::strong_ordering operator<=>(const Value& a, const Value& b);

private:
    std::variant<Decimal, std::string, bool> data_;
};

}  // namespace yada
