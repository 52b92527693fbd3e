#pragma once

#include "mlh/dual.hpp"

#include <map>
#include <string>
#include <vector>

namespace mlh {

/// Multivariate polynomial in chart coordinates u1..un, double coefficients.
/// Used for chart maps and chart-coefficient vector fields; exact-mode data
/// never goes through here.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(int nvars) : nvars_(nvars) {}

    static Polynomial constant(int nvars, double c);
    static Polynomial variable(int nvars, int k);

    int nvars() const { return nvars_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    double constant_value() const; // valid when is_constant()
    int degree() const;

    Polynomial operator-() const;
    friend Polynomial operator+(const Polynomial& x, const Polynomial& y);
    friend Polynomial operator-(const Polynomial& x, const Polynomial& y);
    friend Polynomial operator*(const Polynomial& x, const Polynomial& y);
    Polynomial times(double c) const;
    Polynomial pow(int e) const;

    /// Symbolic partial derivative with respect to u_k.
    Polynomial derivative(int k) const;

    template <class S>
    S eval(const std::vector<S>& u) const {
        S acc{};
        for (const auto& [e, c] : terms_) {
            S t(c);
            for (int k = 0; k < nvars_; ++k)
                for (int rep = 0; rep < e[k]; ++rep) t = t * u[k];
            acc = acc + t;
        }
        return acc;
    }

    std::string str() const;

private:
    using Expo = std::vector<int>;
    void add_term(const Expo& e, double c);

    int nvars_ = 0;
    std::map<Expo, double> terms_;
};

/// Parse "u1^2 - 0.5*u2*u3 + sigma*(u1+u2)". Supported: + - * / ^, integer
/// exponents, parentheses, variables u1..u<nvars>, numeric literals, and the
/// identifier `sigma` bound to the supplied value. Division is by (constant)
/// polynomials only.
Polynomial parse_polynomial(const std::string& text, int nvars, double sigma_value);

} // namespace mlh
