#include "afmpi/rational.hpp"

#include <charconv>
#include <cstdlib>

namespace afmpi {

namespace {

std::int64_t parse_int(std::string_view text) {
    std::int64_t value = 0;
    const auto *first = text.data();
    const auto *last = text.data() + text.size();
    if (first != last && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || first == last) {
        throw std::invalid_argument("not an integer: '" + std::string{text} + "'");
    }
    return value;
}

std::string trim(std::string_view text) {
    const auto b = text.find_first_not_of(" \t");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = text.find_last_not_of(" \t");
    return std::string{text.substr(b, e - b + 1)};
}

} // namespace

std::string Rational::str() const {
    if (den_ == 1) {
        return std::to_string(num_);
    }
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(std::string_view raw) {
    const auto text = trim(raw);
    if (const auto slash = text.find('/'); slash != std::string::npos) {
        return Rational{parse_int(trim(text.substr(0, slash))), parse_int(trim(text.substr(slash + 1)))};
    }
    if (const auto dot = text.find('.'); dot != std::string::npos) {
        const auto int_part = text.substr(0, dot);
        const auto frac_part = text.substr(dot + 1);
        if (frac_part.empty() || frac_part.size() > 18 ||
            frac_part.find_first_not_of("0123456789") != std::string::npos) {
            throw std::invalid_argument("not a decimal: '" + text + "'");
        }
        const bool negative = !int_part.empty() && int_part.front() == '-';
        const std::int64_t whole =
            (int_part.empty() || int_part == "-" || int_part == "+") ? 0 : parse_int(int_part);
        std::int64_t scale = 1;
        for (std::size_t i = 0; i < frac_part.size(); ++i) {
            scale *= 10;
        }
        const Rational frac{parse_int(frac_part), scale};
        const Rational magnitude = Rational{whole < 0 ? -whole : whole} + frac;
        return negative ? -magnitude : magnitude;
    }
    return Rational{parse_int(text)};
}

std::string to_decimal(const Rational &value, int digits) {
    __int128 scale = 1;
    for (int i = 0; i < digits; ++i) {
        scale *= 10;
    }
    const bool negative = value.num() < 0;
    const __int128 num = negative ? -static_cast<__int128>(value.num()) : value.num();
    const __int128 den = value.den();
    __int128 scaled = (num * scale * 2 + den) / (den * 2);

    const auto whole = static_cast<std::uint64_t>(scaled / scale);
    auto frac = static_cast<std::uint64_t>(scaled % scale);
    std::string out;
    if (negative && scaled != 0) {
        out += '-';
    }
    out += std::to_string(whole);
    if (digits > 0) {
        std::string frac_digits(static_cast<std::size_t>(digits), '0');
        for (int i = digits - 1; i >= 0; --i) {
            frac_digits[static_cast<std::size_t>(i)] = static_cast<char>('0' + frac % 10);
            frac /= 10;
        }
        out += '.';
        out += frac_digits;
    }
    return out;
}

} // namespace afmpi
