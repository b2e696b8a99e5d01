#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <optional>
#include <string>

namespace cat0 {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

/// a + b*sqrt(d); b == 0 implies d == 0.
struct Quadratic {
    Rational a, b, d;
};

/// Real number that stays exact while its value lives in Q or in a single
/// quadratic extension Q(sqrt d). Anything else (transcendental functions,
/// mixing two different extensions, mixing with an inexact operand) degrades
/// to a plain double. The double shadow is always maintained.
class Num {
public:
    /// Inexact zero; write Num(0) for an exact one.
    Num() : v_(0.0) {}
    Num(int v) : v_(v), q_(Quadratic{Rational(v), 0, 0}) {}
    Num(long v) : v_(static_cast<double>(v)), q_(Quadratic{Rational(v), 0, 0}) {}
    Num(long long v) : v_(static_cast<double>(v)), q_(Quadratic{Rational(v), 0, 0}) {}
    Num(const Rational& r) : v_(r.convert_to<double>()), q_(Quadratic{r, 0, 0}) {}
    explicit Num(double v) : v_(v) {}

    static Num inexact(double v) { return Num(v); }
    /// Exact dyadic value of a double.
    static Num exact_double(double v);
    static Num from_quadratic(const Quadratic& q);
    static Num ratio(long long p, long long q) { return Num(Rational(p, q)); }
    /// Parses "p/q", "p", or a decimal literal (decimal literals are exact).
    static Num parse(const std::string& text, bool exact);

    bool exact() const { return q_.has_value(); }
    bool rational() const { return q_ && q_->b == 0; }
    double value() const { return v_; }
    const Quadratic& quad() const { return *q_; }
    /// Requires rational().
    const Rational& as_rational() const { return q_->a; }

    Num inexact_copy() const { return Num(v_); }

    friend Num operator+(const Num& x, const Num& y);
    friend Num operator-(const Num& x, const Num& y);
    friend Num operator*(const Num& x, const Num& y);
    friend Num operator/(const Num& x, const Num& y);
    Num operator-() const;
    Num& operator+=(const Num& o) { return *this = *this + o; }
    Num& operator-=(const Num& o) { return *this = *this - o; }
    Num& operator*=(const Num& o) { return *this = *this * o; }
    Num& operator/=(const Num& o) { return *this = *this / o; }

    /// Sign of the value: exact when exact(), else sign of the double.
    int sign() const;

    std::string str() const;

private:
    double v_;
    std::optional<Quadratic> q_;
};

/// Sign of x - y; exact when both operands share a field.
int compare(const Num& x, const Num& y);
inline bool operator<(const Num& x, const Num& y) { return compare(x, y) < 0; }
inline bool operator<=(const Num& x, const Num& y) { return compare(x, y) <= 0; }
inline bool operator>(const Num& x, const Num& y) { return compare(x, y) > 0; }
inline bool operator>=(const Num& x, const Num& y) { return compare(x, y) >= 0; }
inline bool operator==(const Num& x, const Num& y) { return compare(x, y) == 0; }
inline bool operator!=(const Num& x, const Num& y) { return compare(x, y) != 0; }

Num sqrt(const Num& x);
Num abs(const Num& x);
Num min(const Num& x, const Num& y);
Num max(const Num& x, const Num& y);

/// Floor of a rational.
Integer floor(const Rational& r);
/// Exact square root of a rational when it is a perfect square.
std::optional<Rational> exact_sqrt(const Rational& r);
std::string to_string(const Rational& r);
Rational parse_rational(const std::string& text);

}  // namespace cat0
