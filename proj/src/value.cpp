#include "yada/value.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace yada {

std::optional<Decimal> Decimal::parse(std::string_view text) {
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
        negative = text[i] == '-';
        ++i;
    }
    std::int64_t whole = 0;
    std::size_t int_digits = 0;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
        if (whole > (std::numeric_limits<std::int64_t>::max() / kScale) / 10) {
            return std::nullopt;
        }
        whole = whole * 10 + (text[i] - '0');
        ++int_digits;
        ++i;
    }
    if (whole >= std::numeric_limits<std::int64_t>::max() / kScale) {
        return std::nullopt;
    }
    std::int64_t frac = 0;
    int frac_digits = 0;
    if (i < text.size() && text[i] == '.') {
        ++i;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
            if (frac_digits == kMaxFractionDigits) {
                return std::nullopt;
            }
            frac = frac * 10 + (text[i] - '0');
            ++frac_digits;
            ++i;
        }
        if (frac_digits == 0) {
            return std::nullopt;
        }
    }
    if (i != text.size() || int_digits == 0) {
        return std::nullopt;
    }
    for (int k = frac_digits; k < kMaxFractionDigits; ++k) {
        frac *= 10;
    }
    std::int64_t micros = whole * kScale + frac;
    return from_micros(negative ? -micros : micros);
}

std::optional<Decimal> Decimal::from_double(double v) {
    if (!std::isfinite(v)) {
        return std::nullopt;
    }
    const double scaled = std::round(v * static_cast<double>(kScale));
    // 2^62 keeps a safe margin below the int64 limit.
    if (std::fabs(scaled) > 4.6e18) {
        return std::nullopt;
    }
    return from_micros(static_cast<std::int64_t>(scaled));
}

std::optional<Decimal> Decimal::parse_lenient(std::string_view text) {
    std::size_t b = 0;
    std::size_t e = text.size();
    while (b < e && (text[b] == ' ' || text[b] == '\t')) ++b;
    while (e > b && (text[e - 1] == ' ' || text[e - 1] == '\t' || text[e - 1] == '\r')) --e;
    if (b == e) {
        return std::nullopt;
    }
    const std::string_view trimmed = text.substr(b, e - b);
    if (auto exact = parse(trimmed)) {
        return exact;
    }
    std::string buf(trimmed);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size() || errno == ERANGE) {
        return std::nullopt;
    }
    return from_double(v);
}

std::string Decimal::to_string() const {
    const bool negative = micros_ < 0;
    // Magnitude as unsigned so INT64_MIN is representable.
    const std::uint64_t mag = negative ? 0 - static_cast<std::uint64_t>(micros_)
                                       : static_cast<std::uint64_t>(micros_);
    std::string out = negative ? "-" : "";
    out += std::to_string(mag / kScale);
    std::uint64_t frac = mag % kScale;
    if (frac != 0) {
        std::string digits = std::to_string(frac);
        digits.insert(0, kMaxFractionDigits - digits.size(), '0');
        while (!digits.empty() && digits.back() == '0') {
            digits.pop_back();
        }
        out += '.';
        out += digits;
    }
    return out;
}

std::string_view to_string(ValueKind kind) {
    switch (kind) {
        case ValueKind::Num: return "num";
        case ValueKind::Str: return "str";
        case ValueKind::Bool: return "bool";
    }
    return "?";
}

std::string Value::to_string() const {
    switch (kind()) {
        case ValueKind::Num: return as_num().to_string();
        case ValueKind::Str: return as_str();
        case ValueKind::Bool: return as_bool() ? "true" : "false";
    }
    return {};
}

std::optional<Value> Value::parse_as(ValueKind kind, std::string_view text) {
    switch (kind) {
        case ValueKind::Num:
            if (auto d = Decimal::parse(text)) return Value(*d);
            return std::nullopt;
        case ValueKind::Str:
            if (text.size() > kMaxStringBytes) return std::nullopt;
            return Value(std::string(text));
        case ValueKind::Bool:
            if (text == "true") return Value(true);
            if (text == "false") return Value(false);
            return std::nullopt;
    }
    return std::nullopt;
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
    if (a.data_.index() != b.data_.index()) {
        return a.data_.index() <=> b.data_.index();
    }
    switch (a.kind()) {
        case ValueKind::Num: return a.as_num() <=> b.as_num();
        case ValueKind::Str: return a.as_str().compare(b.as_str()) <=> 0;
        case ValueKind::Bool: return a.as_bool() <=> b.as_bool();
    }
    return std::strong_ordering::equal;
}

}  // namespace yada
