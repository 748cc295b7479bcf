#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace rtp {

// Dense univariate polynomial with exact rational coefficients, ascending
// powers.  The zero polynomial has no coefficients.
class QPoly {
public:
    QPoly() = default;
    explicit QPoly(std::vector<mpq_class> ascending);
    static QPoly constant(const mpq_class& c);
    static QPoly monomial(const mpq_class& c, int power);

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<mpq_class>& coeffs() const { return c_; }
    const mpq_class& lead() const { return c_.back(); }
    mpq_class coeff(int i) const;

    mpq_class eval(const mpq_class& x) const;
    double eval(double x) const;
    // Sign at x evaluated exactly.
    int sign_at(const mpq_class& x) const;

    QPoly operator-() const;
    friend QPoly operator+(const QPoly& a, const QPoly& b);
    friend QPoly operator-(const QPoly& a, const QPoly& b);
    friend QPoly operator*(const QPoly& a, const QPoly& b);
    QPoly scaled(const mpq_class& k) const;

    // Euclidean division; returns quotient, writes remainder.
    QPoly divmod(const QPoly& d, QPoly& rem) const;
    // Monic copy (zero stays zero).
    QPoly monic() const;

    friend bool operator==(const QPoly& a, const QPoly& b) { return a.c_ == b.c_; }

    std::string str(const std::string& var = "x") const;

private:
    void trim();
    std::vector<mpq_class> c_;
};

QPoly poly_gcd(QPoly a, QPoly b);

// num/den with gcd(num, den) = 1 and monic denominator.
class RationalFunction {
public:
    RationalFunction();
    RationalFunction(QPoly num);
    RationalFunction(QPoly num, QPoly den);

    const QPoly& num() const { return num_; }
    const QPoly& den() const { return den_; }
    bool is_polynomial() const { return den_.degree() == 0; }

    friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b);
    friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b);
    friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);
    friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b);

private:
    void normalize();
    QPoly num_;
    QPoly den_;
};

}  // namespace rtp
