#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace semiqsum {

/// Non-negative reduced fraction over 64-bit integers. Arithmetic throws
/// std::overflow_error rather than wrapping.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::uint64_t num) : num_(num), den_(1) {}  // NOLINT(implicit)
    Rational(std::uint64_t num, std::uint64_t den) : num_(num), den_(den) {
        if (den == 0) throw std::domain_error("Rational: zero denominator");
        reduce();
    }

    std::uint64_t num() const noexcept { return num_; }
    std::uint64_t den() const noexcept { return den_; }
    double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

    bool is_dyadic() const noexcept { return (den_ & (den_ - 1)) == 0; }
    bool is_probability() const noexcept { return num_ <= den_; }

    std::string str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

    static Rational parse(const std::string& text) {
        const auto slash = text.find('/');
        if (slash == std::string::npos) return Rational(std::stoull(text));
        return {std::stoull(text.substr(0, slash)), std::stoull(text.substr(slash + 1))};
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        const std::uint64_t g = std::gcd(a.den_, b.den_);
        const u128 den = static_cast<u128>(a.den_ / g) * b.den_;
        const u128 num = static_cast<u128>(a.num_) * (b.den_ / g) + static_cast<u128>(b.num_) * (a.den_ / g);
        return from_wide(num, den);
    }

    /// a - b; requires a >= b.
    friend Rational operator-(const Rational& a, const Rational& b) {
        if (a < b) throw std::domain_error("Rational: negative difference");
        const std::uint64_t g = std::gcd(a.den_, b.den_);
        const u128 den = static_cast<u128>(a.den_ / g) * b.den_;
        const u128 num = static_cast<u128>(a.num_) * (b.den_ / g) - static_cast<u128>(b.num_) * (a.den_ / g);
        return from_wide(num, den);
    }

    friend Rational operator*(const Rational& a, const Rational& b) {
        const std::uint64_t g1 = std::gcd(a.num_, b.den_);
        const std::uint64_t g2 = std::gcd(b.num_, a.den_);
        const u128 num = static_cast<u128>(g1 ? a.num_ / g1 : 0) * (g2 ? b.num_ / g2 : 0);
        const u128 den = static_cast<u128>(a.den_ / (g2 ? g2 : 1)) * (b.den_ / (g1 ? g1 : 1));
        return from_wide(num, den);
    }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }

    friend bool operator==(const Rational& a, const Rational& b) noexcept {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
        return static_cast<u128>(a.num_) * b.den_ <=> static_cast<u128>(b.num_) * a.den_;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    using u128 = unsigned __int128;

    static Rational from_wide(u128 num, u128 den) {
        u128 a = num, b = den;
        while (b != 0) {
            const u128 t = a % b;
            a = b;
            b = t;
        }
        if (a > 1) {
            num /= a;
            den /= a;
        }
        constexpr u128 limit = ~std::uint64_t{0};
        if (num > limit || den > limit) throw std::overflow_error("Rational: 64-bit overflow");
        Rational r;
        r.num_ = static_cast<std::uint64_t>(num);
        r.den_ = static_cast<std::uint64_t>(den);
        if (r.num_ == 0) r.den_ = 1;
        return r;
    }

    void reduce() {
        if (num_ == 0) {
            den_ = 1;
            return;
        }
        const std::uint64_t g = std::gcd(num_, den_);
        num_ /= g;
        den_ /= g;
    }

    std::uint64_t num_ = 0;
    std::uint64_t den_ = 1;
};

/// Exact probability of a protocol event. All branch weights in this
/// protocol are dyadic, so values stay small and exact.
using ExactProbability = Rational;

/// base^exp, or nullopt if the result does not fit in 64-bit terms.
inline std::optional<Rational> checked_pow(const Rational& base, std::uint64_t exp) {
    Rational result{1};
    try {
        for (std::uint64_t i = 0; i < exp; ++i) result *= base;
    } catch (const std::overflow_error&) {
        return std::nullopt;
    }
    return result;
}

}  // namespace semiqsum
