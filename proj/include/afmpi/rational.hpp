#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace afmpi {

/// Exact fraction with a 64-bit numerator and positive denominator, always
/// kept in lowest terms. Intermediate products use 128-bit arithmetic; a
/// result that does not fit back into 64 bits throws std::overflow_error.
class Rational {
  public:
    constexpr Rational() noexcept = default;
    constexpr Rational(std::int64_t value) noexcept : num_{value} {} // NOLINT(implicit)
    Rational(std::int64_t num, std::int64_t den) { assign(num, den); }

    constexpr std::int64_t num() const noexcept { return num_; }
    constexpr std::int64_t den() const noexcept { return den_; }

    double to_double() const noexcept {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    bool is_zero() const noexcept { return num_ == 0; }

    /// "num/den", or just "num" when den == 1.
    std::string str() const;

    /// Parses "n/d", an integer, or a plain decimal literal such as "0.3"
    /// (converted exactly to 3/10).
    static Rational parse(std::string_view text);

    friend Rational operator+(const Rational &a, const Rational &b) {
        return from_wide(static_cast<__int128>(a.num_) * b.den_ +
                             static_cast<__int128>(b.num_) * a.den_,
                         static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational &a, const Rational &b) {
        return from_wide(static_cast<__int128>(a.num_) * b.den_ -
                             static_cast<__int128>(b.num_) * a.den_,
                         static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational &a, const Rational &b) {
        return from_wide(static_cast<__int128>(a.num_) * b.num_,
                         static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational &a, const Rational &b) {
        if (b.num_ == 0) {
            throw std::domain_error("Rational division by zero");
        }
        return from_wide(static_cast<__int128>(a.num_) * b.den_,
                         static_cast<__int128>(a.den_) * b.num_);
    }
    Rational operator-() const { return Rational{-num_, den_}; }

    Rational &operator+=(const Rational &o) { return *this = *this + o; }
    Rational &operator-=(const Rational &o) { return *this = *this - o; }
    Rational &operator*=(const Rational &o) { return *this = *this * o; }
    Rational &operator/=(const Rational &o) { return *this = *this / o; }

    friend constexpr bool operator==(const Rational &a, const Rational &b) noexcept {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational &a, const Rational &b) noexcept {
        const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
        const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
        if (lhs < rhs) {
            return std::strong_ordering::less;
        }
        if (lhs > rhs) {
            return std::strong_ordering::greater;
        }
        return std::strong_ordering::equal;
    }

  private:
    void assign(std::int64_t num, std::int64_t den) {
        if (den == 0) {
            throw std::domain_error("Rational with zero denominator");
        }
        *this = from_wide(num, den);
    }

    static Rational from_wide(__int128 num, __int128 den) {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const __int128 g = gcd128(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
        constexpr __int128 max = INT64_MAX;
        if (num > max || num < -max || den > max) {
            throw std::overflow_error("Rational overflow");
        }
        Rational r;
        r.num_ = static_cast<std::int64_t>(num);
        r.den_ = static_cast<std::int64_t>(den);
        return r;
    }

    static __int128 gcd128(__int128 a, __int128 b) noexcept {
        while (b != 0) {
            const __int128 t = a % b;
            a = b;
            b = t;
        }
        return a == 0 ? 1 : a;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// Decimal rendering with `digits` fractional digits, rounded half away from
/// zero using integer arithmetic only, so output is identical on every
/// platform.
std::string to_decimal(const Rational &value, int digits);

} // namespace afmpi

template <> struct std::hash<afmpi::Rational> {
    std::size_t operator()(const afmpi::Rational &r) const noexcept {
        return std::hash<std::int64_t>{}(r.num()) * 31U + std::hash<std::int64_t>{}(r.den());
    }
};
