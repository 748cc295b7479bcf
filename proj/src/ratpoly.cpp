#include "rtp/ratpoly.hpp"
#include "rtp/errors.hpp"

#include <algorithm>
#include <sstream>

namespace rtp {

QPoly::QPoly(std::vector<mpq_class> ascending) : c_(std::move(ascending)) { trim(); }

QPoly QPoly::constant(const mpq_class& c) { return QPoly(std::vector<mpq_class>{c}); }

QPoly QPoly::monomial(const mpq_class& c, int power) {
    std::vector<mpq_class> v(static_cast<std::size_t>(power) + 1, mpq_class(0));
    v.back() = c;
    return QPoly(std::move(v));
}

void QPoly::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

mpq_class QPoly::coeff(int i) const {
    if (i < 0 || i > degree()) return 0;
    return c_[static_cast<std::size_t>(i)];
}

mpq_class QPoly::eval(const mpq_class& x) const {
    mpq_class acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

double QPoly::eval(double x) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + it->get_d();
    return acc;
}

int QPoly::sign_at(const mpq_class& x) const { return sgn(eval(x)); }

QPoly QPoly::operator-() const {
    QPoly r = *this;
    for (auto& c : r.c_) c = -c;
    return r;
}

QPoly operator+(const QPoly& a, const QPoly& b) {
    std::vector<mpq_class> v(std::max(a.c_.size(), b.c_.size()), mpq_class(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) v[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) v[i] += b.c_[i];
    return QPoly(std::move(v));
}

QPoly operator-(const QPoly& a, const QPoly& b) { return a + (-b); }

QPoly operator*(const QPoly& a, const QPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<mpq_class> v(a.c_.size() + b.c_.size() - 1, mpq_class(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
    return QPoly(std::move(v));
}

QPoly QPoly::scaled(const mpq_class& k) const {
    QPoly r = *this;
    for (auto& c : r.c_) c *= k;
    r.trim();
    return r;
}

QPoly QPoly::divmod(const QPoly& d, QPoly& rem) const {
    if (d.is_zero()) throw analysis_error("QPoly: division by the zero polynomial");
    std::vector<mpq_class> r = c_;
    const int dd = d.degree();
    if (degree() < dd) {
        rem = *this;
        return {};
    }
    std::vector<mpq_class> q(static_cast<std::size_t>(degree() - dd) + 1, mpq_class(0));
    const mpq_class inv_lead = 1 / d.lead();
    for (int i = degree(); i >= dd; --i) {
        const mpq_class f = r[static_cast<std::size_t>(i)] * inv_lead;
        if (f == 0) continue;
        q[static_cast<std::size_t>(i - dd)] = f;
        for (int j = 0; j <= dd; ++j) r[static_cast<std::size_t>(i - dd + j)] -= f * d.c_[static_cast<std::size_t>(j)];
    }
    rem = QPoly(std::move(r));
    return QPoly(std::move(q));
}

QPoly QPoly::monic() const {
    if (is_zero()) return {};
    return scaled(1 / lead());
}

std::string QPoly::str(const std::string& var) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = degree(); i >= 0; --i) {
        const mpq_class& c = c_[static_cast<std::size_t>(i)];
        if (c == 0) continue;
        if (!first) os << (c > 0 ? " + " : " - ");
        else if (c < 0) os << "-";
        mpq_class a = abs(c);
        if (a != 1 || i == 0) os << a.get_str();
        if (i > 0) os << (a != 1 ? "*" : "") << var << (i > 1 ? "^" + std::to_string(i) : "");
        first = false;
    }
    return os.str();
}

QPoly poly_gcd(QPoly a, QPoly b) {
    while (!b.is_zero()) {
        QPoly r;
        a.divmod(b, r);
        a = std::move(b);
        b = r.monic();
    }
    return a.monic();
}

RationalFunction::RationalFunction() : num_(), den_(QPoly::constant(1)) {}

RationalFunction::RationalFunction(QPoly num) : num_(std::move(num)), den_(QPoly::constant(1)) {}

RationalFunction::RationalFunction(QPoly num, QPoly den) : num_(std::move(num)), den_(std::move(den)) {
    normalize();
}

void RationalFunction::normalize() {
    if (den_.is_zero()) throw analysis_error("RationalFunction: zero denominator");
    if (num_.is_zero()) {
        den_ = QPoly::constant(1);
        return;
    }
    if (den_.degree() > 0) {
        // Cheap path first: exact division.
        QPoly rem;
        QPoly quo = num_.divmod(den_, rem);
        if (rem.is_zero()) {
            num_ = std::move(quo);
            den_ = QPoly::constant(1);
            return;
        }
        QPoly g = poly_gcd(num_, den_);
        if (g.degree() > 0) {
            num_ = num_.divmod(g, rem);
            den_ = den_.divmod(g, rem);
        }
    }
    const mpq_class k = 1 / den_.lead();
    num_ = num_.scaled(k);
    den_ = den_.scaled(k);
}

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    if (a.den_ == b.den_) return RationalFunction(a.num_ + b.num_, a.den_);
    return RationalFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) {
    if (a.den_ == b.den_) return RationalFunction(a.num_ - b.num_, a.den_);
    return RationalFunction(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    return RationalFunction(a.num_ * b.num_, a.den_ * b.den_);
}

RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
    if (b.num_.is_zero()) throw analysis_error("RationalFunction: division by zero");
    return RationalFunction(a.num_ * b.den_, a.den_ * b.num_);
}

}  // namespace rtp
