#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ncg {

/// Exact rational number used for symbolic exponents (polynomial degrees,
/// regular-variation indices, demand-growth exponents). Keeping these exact
/// makes every degree comparison in the analyzers decidable.
class Rat {
public:
    constexpr Rat() : num_(0), den_(1) {}
    constexpr Rat(std::int64_t n) : num_(n), den_(1) {}
    Rat(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    bool is_integer() const { return den_ == 1; }

    friend Rat operator+(Rat a, Rat b) { return Rat(cross(a.num_, b.den_) + cross(b.num_, a.den_), cross(a.den_, b.den_)); }
    friend Rat operator-(Rat a, Rat b) { return Rat(cross(a.num_, b.den_) - cross(b.num_, a.den_), cross(a.den_, b.den_)); }
    friend Rat operator*(Rat a, Rat b) { return Rat(cross(a.num_, b.num_), cross(a.den_, b.den_)); }
    friend Rat operator/(Rat a, Rat b) {
        if (b.num_ == 0) throw std::domain_error("rational division by zero");
        return Rat(cross(a.num_, b.den_), cross(a.den_, b.num_));
    }
    Rat operator-() const { Rat r; r.num_ = -num_; r.den_ = den_; return r; }

    friend bool operator==(const Rat& a, const Rat& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
    friend bool operator<(const Rat& a, const Rat& b) {
        return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
    }
    friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
    friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
    friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }

    std::string to_string() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    /// Parses "3", "-2", or "3/4".
    static Rat parse(const std::string& s) {
        auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return Rat(std::stoll(s));
            return Rat(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
        } catch (const std::exception&) {
            throw std::invalid_argument("not a rational: '" + s + "'");
        }
    }

private:
    static std::int64_t cross(std::int64_t a, std::int64_t b) {
        __int128 p = static_cast<__int128>(a) * b;
        if (p > INT64_MAX || p < INT64_MIN) throw std::overflow_error("rational overflow");
        return static_cast<std::int64_t>(p);
    }

    void normalize() {
        if (den_ == 0) throw std::domain_error("rational with zero denominator");
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) { num_ /= g; den_ /= g; }
        if (num_ == 0) den_ = 1;
    }

    std::int64_t num_;
    std::int64_t den_;
};

inline Rat max(Rat a, Rat b) { return a < b ? b : a; }
inline Rat min(Rat a, Rat b) { return b < a ? b : a; }

}  // namespace ncg
