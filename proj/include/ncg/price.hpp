#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ncg/rational.hpp"

namespace ncg {

/// Polynomial price with non-negative coefficients, coeffs[i] is the
/// coefficient of x^i. Non-negative coefficients guarantee that both tau(x)
/// and x*tau(x) are non-negative, non-decreasing and convex on [0, inf).
struct Polynomial {
    std::vector<double> coeffs;
};

/// scale * x^power * ln(e + x)^log_exponent. The minimal regularly varying
/// family with symbolic index `power` and a non-trivial slowly varying part.
struct PowerLog {
    double scale = 1.0;
    Rat power;
    double log_exponent = 0.0;
};

namespace detail {

inline double adaptive_simpson(const auto& f, double a, double b, double fa, double fm, double fb,
                               double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

/// Integrates f over [a,b] to absolute tolerance tol.
inline double integrate(const auto& f, double a, double b, double tol) {
    if (b <= a) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace detail

/// Symbolic non-decreasing resource price function. Immutable after
/// construction and freely shareable across threads.
class PriceFunction {
public:
    PriceFunction() : repr_(Polynomial{{0.0}}) {}
    explicit PriceFunction(Polynomial p) : repr_(std::move(p)) {
        if (std::get<Polynomial>(repr_).coeffs.empty()) std::get<Polynomial>(repr_).coeffs.push_back(0.0);
    }
    explicit PriceFunction(PowerLog p) : repr_(p) {}

    static PriceFunction polynomial(std::vector<double> coeffs) { return PriceFunction(Polynomial{std::move(coeffs)}); }
    static PriceFunction constant(double c) { return polynomial({c}); }
    static PriceFunction power_log(double scale, Rat power, double log_exponent) {
        return PriceFunction(PowerLog{scale, power, log_exponent});
    }

    bool is_polynomial() const { return std::holds_alternative<Polynomial>(repr_); }
    bool is_power_log() const { return std::holds_alternative<PowerLog>(repr_); }
    const Polynomial& as_polynomial() const { return std::get<Polynomial>(repr_); }
    const PowerLog& as_power_log() const { return std::get<PowerLog>(repr_); }

    /// True iff the function is identically zero (only the zero polynomial is).
    bool is_zero() const {
        if (const auto* p = std::get_if<Polynomial>(&repr_)) {
            for (double c : p->coeffs)
                if (c != 0.0) return false;
            return true;
        }
        return false;
    }

    double value(double x) const {
        if (const auto* p = std::get_if<Polynomial>(&repr_)) {
            double acc = 0.0;
            for (std::size_t i = p->coeffs.size(); i-- > 0;) acc = acc * x + p->coeffs[i];
            return acc;
        }
        const auto& pl = std::get<PowerLog>(repr_);
        double lg = std::log(std::exp(1.0) + x);
        return pl.scale * std::pow(x, pl.power.to_double()) * std::pow(lg, pl.log_exponent);
    }
    double operator()(double x) const { return value(x); }

    double derivative(double x) const {
        if (const auto* p = std::get_if<Polynomial>(&repr_)) {
            double acc = 0.0;
            for (std::size_t i = p->coeffs.size(); i-- > 1;) acc = acc * x + static_cast<double>(i) * p->coeffs[i];
            return acc;
        }
        const auto& pl = std::get<PowerLog>(repr_);
        double rho = pl.power.to_double();
        double e = std::exp(1.0);
        double lg = std::log(e + x);
        // d/dx [c x^rho L^beta] = c x^(rho-1) L^(beta-1) (rho L + beta x/(e+x))
        double core = rho * lg + pl.log_exponent * x / (e + x);
        return pl.scale * std::pow(x, rho - 1.0) * std::pow(lg, pl.log_exponent - 1.0) * core;
    }

    /// Antiderivative F(x) = integral of tau over [0, x]. Closed form for
    /// polynomials; adaptive Simpson (absolute tolerance 1e-12) otherwise.
    double antiderivative(double x) const {
        if (const auto* p = std::get_if<Polynomial>(&repr_)) {
            double acc = 0.0;
            for (std::size_t i = p->coeffs.size(); i-- > 0;) acc = acc * x + p->coeffs[i] / static_cast<double>(i + 1);
            return acc * x;
        }
        return detail::integrate([this](double u) { return value(u); }, 0.0, x, 1e-12);
    }

    /// Marginal price c(x) = x tau'(x) + tau(x), the derivative of x*tau(x).
    double marginal_value(double x) const { return value(x) + x * derivative(x); }

    /// Antiderivative of the marginal price over [0, x] is exactly x*tau(x).
    double marginal_antiderivative(double x) const { return x * value(x); }

    /// Regular-variation index: the polynomial degree, or the PowerLog power.
    /// Undefined (nullopt) for the zero polynomial.
    std::optional<Rat> index() const {
        if (const auto* p = std::get_if<Polynomial>(&repr_)) {
            for (std::size_t i = p->coeffs.size(); i-- > 0;)
                if (p->coeffs[i] != 0.0) return Rat(static_cast<std::int64_t>(i));
            return std::nullopt;
        }
        return std::get<PowerLog>(repr_).power;
    }

    /// Coefficient of the index term: leading polynomial coefficient or the
    /// PowerLog scale. Zero for the zero polynomial.
    double index_coefficient() const {
        if (const auto* p = std::get_if<Polynomial>(&repr_)) {
            for (std::size_t i = p->coeffs.size(); i-- > 0;)
                if (p->coeffs[i] != 0.0) return p->coeffs[i];
            return 0.0;
        }
        return std::get<PowerLog>(repr_).scale;
    }

    /// Exponent of the slowly varying log factor (0 for polynomials).
    double log_exponent() const {
        if (is_polynomial()) return 0.0;
        return std::get<PowerLog>(repr_).log_exponent;
    }

    /// Coefficient of x^k, reading the PowerLog with integral power and
    /// log_exponent 0 as the monomial it is. Used by limit-game construction.
    double coefficient_of(const Rat& k) const {
        if (const auto* p = std::get_if<Polynomial>(&repr_)) {
            if (!k.is_integer() || k.num() < 0) return 0.0;
            auto i = static_cast<std::size_t>(k.num());
            return i < p->coeffs.size() ? p->coeffs[i] : 0.0;
        }
        const auto& pl = std::get<PowerLog>(repr_);
        return (pl.power == k && pl.log_exponent == 0.0) ? pl.scale : 0.0;
    }

    /// Contract violations, empty when the function is a valid non-negative
    /// non-decreasing price. The zero polynomial is allowed here; whether it
    /// renders a strategy free is a game-level question.
    std::vector<std::string> validate() const {
        std::vector<std::string> issues;
        if (const auto* p = std::get_if<Polynomial>(&repr_)) {
            for (std::size_t i = 0; i < p->coeffs.size(); ++i) {
                if (!(p->coeffs[i] >= 0.0))
                    issues.push_back("negative coefficient " + std::to_string(p->coeffs[i]) +
                                     " at power " + std::to_string(i));
                if (!std::isfinite(p->coeffs[i]))
                    issues.push_back("non-finite coefficient at power " + std::to_string(i));
            }
            return issues;
        }
        const auto& pl = std::get<PowerLog>(repr_);
        if (!(pl.scale > 0.0)) issues.push_back("power-log scale must be positive");
        if (pl.power < Rat(0)) issues.push_back("power-log exponent must be non-negative");
        if (pl.log_exponent < 0.0) {
            // tau' has the sign of h(x) = rho ln(e+x) + beta x/(e+x). h has a
            // single interior critical point at x* = e(-beta-rho)/rho; the
            // function is non-decreasing iff rho > 0 and h(x*) >= 0.
            double rho = pl.power.to_double();
            double beta = pl.log_exponent;
            if (!(rho > 0.0)) {
                issues.push_back("power-log with negative log exponent requires positive power");
            } else if (rho + beta < 0.0) {
                double e = std::exp(1.0);
                double xstar = e * (-beta - rho) / rho;
                double h = rho * std::log(e + xstar) + beta * xstar / (e + xstar);
                if (h < 0.0)
                    issues.push_back("power-log is decreasing near x=" + std::to_string(xstar));
            }
        }
        return issues;
    }

    std::string to_string() const {
        if (const auto* p = std::get_if<Polynomial>(&repr_)) {
            std::string out;
            bool first = true;
            for (std::size_t i = p->coeffs.size(); i-- > 0;) {
                if (p->coeffs[i] == 0.0) continue;
                if (!first) out += " + ";
                first = false;
                out += std::to_string(p->coeffs[i]);
                if (i == 1) out += "*x";
                else if (i > 1) out += "*x^" + std::to_string(i);
            }
            return first ? "0" : out;
        }
        const auto& pl = std::get<PowerLog>(repr_);
        std::string out = std::to_string(pl.scale) + "*x^" + pl.power.to_string();
        if (pl.log_exponent != 0.0) out += "*ln(e+x)^" + std::to_string(pl.log_exponent);
        return out;
    }

private:
    std::variant<Polynomial, PowerLog> repr_;
};

/// Evaluable marginal price c(x) = x tau'(x) + tau(x). For polynomials the
/// exact polynomial with coefficients (i+1)*b_i is exposed as well.
class MarginalPrice {
public:
    explicit MarginalPrice(PriceFunction base) : base_(std::move(base)) {
        if (base_.is_polynomial()) {
            std::vector<double> c = base_.as_polynomial().coeffs;
            for (std::size_t i = 0; i < c.size(); ++i) c[i] *= static_cast<double>(i + 1);
            exact_ = PriceFunction::polynomial(std::move(c));
        }
    }

    double value(double x) const { return exact_ ? exact_->value(x) : base_.marginal_value(x); }
    double operator()(double x) const { return value(x); }
    double antiderivative(double x) const { return base_.marginal_antiderivative(x); }
    const PriceFunction& base() const { return base_; }
    const std::optional<PriceFunction>& exact_polynomial() const { return exact_; }

private:
    PriceFunction base_;
    std::optional<PriceFunction> exact_;
};

inline MarginalPrice marginal_price(const PriceFunction& tau) { return MarginalPrice(tau); }

}  // namespace ncg
