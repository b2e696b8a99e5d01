#include "cat0/num.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cat0 {

namespace {

double approx(const Quadratic& q)
{
    double v = q.a.convert_to<double>();
    if (q.b != 0)
        v += q.b.convert_to<double>() * std::sqrt(q.d.convert_to<double>());
    return v;
}

int sign_of(const Quadratic& q)
{
    int sa = q.a.sign();
    int sb = q.b.sign();
    if (sb == 0) return sa;
    if (sa == 0 || sa == sb) return sb;
    Rational lhs = q.a * q.a;
    Rational rhs = q.b * q.b * q.d;
    if (lhs > rhs) return sa;
    if (lhs < rhs) return sb;
    return 0;
}

/// Both operands live in a common field; returns the shared radicand.
std::optional<Rational> common_field(const Quadratic& x, const Quadratic& y)
{
    if (x.b == 0) return y.d;
    if (y.b == 0) return x.d;
    if (x.d == y.d) return x.d;
    return std::nullopt;
}

Quadratic normalized(Rational a, Rational b, Rational d)
{
    if (b == 0) d = 0;
    return Quadratic{std::move(a), std::move(b), std::move(d)};
}

}  // namespace

Num Num::exact_double(double v)
{
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite value has no exact form");
    int e = 0;
    double m = std::frexp(v, &e);
    // m * 2^53 is an integer for every finite double.
    auto mant = static_cast<long long>(std::ldexp(m, 53));
    Rational r(mant);
    int shift = e - 53;
    Integer p2 = Integer(1) << std::abs(shift);
    if (shift >= 0)
        r *= Rational(p2);
    else
        r /= Rational(p2);
    return Num(r);
}

Num Num::parse(const std::string& text, bool exact)
{
    if (!exact) {
        auto slash = text.find('/');
        if (slash != std::string::npos)
            return Num(std::stod(text.substr(0, slash)) / std::stod(text.substr(slash + 1)));
        return Num(std::stod(text));
    }
    return Num(parse_rational(text));
}

Rational parse_rational(const std::string& text)
{
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        Integer p(text.substr(0, slash));
        Integer q(text.substr(slash + 1));
        if (q == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
        return Rational(p, q);
    }
    auto dot = text.find('.');
    auto epos = text.find_first_of("eE");
    if (dot == std::string::npos && epos == std::string::npos) return Rational(Integer(text));
    // Decimal literal, read exactly.
    std::string mant = epos == std::string::npos ? text : text.substr(0, epos);
    long exp10 = epos == std::string::npos ? 0 : std::stol(text.substr(epos + 1));
    std::string digits;
    long frac = 0;
    bool seen_dot = false;
    for (char ch : mant) {
        if (ch == '.') {
            seen_dot = true;
            continue;
        }
        digits.push_back(ch);
        if (seen_dot && std::isdigit(static_cast<unsigned char>(ch))) ++frac;
    }
    if (digits.empty() || digits == "-" || digits == "+")
        throw std::invalid_argument("bad number '" + text + "'");
    Rational r{Integer(digits)};
    long e = exp10 - frac;
    Integer p10 = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(std::abs(e)));
    if (e >= 0)
        r *= Rational(p10);
    else
        r /= Rational(p10);
    return r;
}

Num operator+(const Num& x, const Num& y)
{
    if (x.q_ && y.q_) {
        if (auto d = common_field(*x.q_, *y.q_)) {
            Num r(x.v_ + y.v_);
            r.q_ = normalized(x.q_->a + y.q_->a, x.q_->b + y.q_->b, *d);
            return r;
        }
    }
    return Num(x.v_ + y.v_);
}

Num operator-(const Num& x, const Num& y)
{
    if (x.q_ && y.q_) {
        if (auto d = common_field(*x.q_, *y.q_)) {
            Num r(x.v_ - y.v_);
            r.q_ = normalized(x.q_->a - y.q_->a, x.q_->b - y.q_->b, *d);
            return r;
        }
    }
    return Num(x.v_ - y.v_);
}

Num operator*(const Num& x, const Num& y)
{
    if (x.q_ && y.q_) {
        if (auto d = common_field(*x.q_, *y.q_)) {
            const Quadratic& p = *x.q_;
            const Quadratic& q = *y.q_;
            Num r(x.v_ * y.v_);
            r.q_ = normalized(p.a * q.a + p.b * q.b * *d, p.a * q.b + p.b * q.a, *d);
            return r;
        }
    }
    return Num(x.v_ * y.v_);
}

Num operator/(const Num& x, const Num& y)
{
    if (y.q_) {
        const Quadratic& q = *y.q_;
        if (q.a == 0 && q.b == 0) throw std::domain_error("division by exact zero");
        if (x.q_) {
            if (auto d = common_field(*x.q_, q)) {
                // 1/(a + b sqrt d) = (a - b sqrt d) / (a^2 - b^2 d)
                Rational den = q.a * q.a - q.b * q.b * *d;
                Num inv;
                inv.v_ = 1.0 / y.v_;
                inv.q_ = normalized(q.a / den, -q.b / den, *d);
                Num r = x * inv;
                r.v_ = x.v_ / y.v_;
                return r;
            }
        }
    }
    return Num(x.v_ / y.v_);
}

Num Num::from_quadratic(const Quadratic& q)
{
    Num r(approx(q));
    r.q_ = normalized(q.a, q.b, q.d);
    return r;
}

Num Num::operator-() const
{
    Num r(-v_);
    if (q_) r.q_ = normalized(-q_->a, -q_->b, q_->d);
    return r;
}

int Num::sign() const
{
    if (q_) return sign_of(*q_);
    return (v_ > 0) - (v_ < 0);
}

std::string Num::str() const
{
    std::ostringstream os;
    if (q_) {
        os << to_string(q_->a);
        if (q_->b != 0) os << " + " << to_string(q_->b) << "*sqrt(" << to_string(q_->d) << ")";
    } else {
        os.precision(17);
        os << v_;
    }
    return os.str();
}

int compare(const Num& x, const Num& y)
{
    return (x - y).sign();
}

std::optional<Rational> exact_sqrt(const Rational& r)
{
    if (r.sign() < 0) return std::nullopt;
    Integer p = numerator(r);
    Integer q = denominator(r);
    Integer sp = boost::multiprecision::sqrt(p);
    Integer sq = boost::multiprecision::sqrt(q);
    if (sp * sp == p && sq * sq == q) return Rational(sp, sq);
    return std::nullopt;
}

namespace {

/// sqrt(r) = c * sqrt(n) with n a positive integer stripped of small square factors,
/// so that equal fields get equal radicands.
std::pair<Rational, Rational> radical_form(const Rational& r)
{
    Integer n = numerator(r) * denominator(r);
    Rational c(Integer(1), denominator(r));
    for (unsigned k = 2; k < 1000; ++k) {
        Integer k2 = Integer(k) * k;
        if (k2 > n) break;
        while (n % k2 == 0) {
            n /= k2;
            c *= k;
        }
    }
    return {c, Rational(n)};
}

}  // namespace

Num sqrt(const Num& x)
{
    if (x.sign() < 0) {
        if (x.exact()) throw std::domain_error("square root of a negative number");
        return Num(0.0);
    }
    if (x.rational()) {
        const Rational& r = x.as_rational();
        if (auto s = exact_sqrt(r)) return Num(*s);
        auto [c, n] = radical_form(r);
        if (auto s = exact_sqrt(n)) return Num(c * *s);
        return Num::from_quadratic(Quadratic{0, c, n});
    }
    return Num(std::sqrt(x.value()));
}

Num abs(const Num& x) { return x.sign() < 0 ? -x : x; }
Num min(const Num& x, const Num& y) { return compare(x, y) <= 0 ? x : y; }
Num max(const Num& x, const Num& y) { return compare(x, y) >= 0 ? x : y; }

Integer floor(const Rational& r)
{
    Integer p = numerator(r);
    Integer q = denominator(r);
    Integer f = p / q;  // truncates toward zero
    if (p.sign() < 0 && f * q != p) f -= 1;
    return f;
}

std::string to_string(const Rational& r)
{
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

}  // namespace cat0
