#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <stdexcept>
#include <string>

namespace opval {

using bigint = boost::multiprecision::cpp_int;
using rational = boost::multiprecision::cpp_rational;

inline double to_double(const rational& r) { return r.convert_to<double>(); }

// "p/q" or "p"; validates the denominator
inline rational parse_rational(const std::string& s) {
    auto pos = s.find('/');
    try {
        if (pos == std::string::npos) return rational(bigint(s));
        bigint num(s.substr(0, pos));
        bigint den(s.substr(pos + 1));
        if (den == 0) throw std::invalid_argument("zero denominator in rational '" + s + "'");
        return rational(num, den);
    } catch (const std::runtime_error&) {
        throw std::invalid_argument("malformed rational '" + s + "'");
    }
}

inline std::string to_string(const rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

// complex number with exact rational real and imaginary parts
struct crational {
    rational re;
    rational im;

    crational() = default;
    crational(int v) : re(v) {}                    // NOLINT: implicit by design
    crational(rational r) : re(std::move(r)) {}    // NOLINT
    crational(rational r, rational i) : re(std::move(r)), im(std::move(i)) {}

    static crational i() { return crational(rational(0), rational(1)); }

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }

    crational conj() const { return crational(re, -im); }

    friend crational operator+(const crational& a, const crational& b) {
        return crational(a.re + b.re, a.im + b.im);
    }
    friend crational operator-(const crational& a, const crational& b) {
        return crational(a.re - b.re, a.im - b.im);
    }
    friend crational operator-(const crational& a) { return crational(-a.re, -a.im); }
    friend crational operator*(const crational& a, const crational& b) {
        return crational(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
    }
    friend crational operator/(const crational& a, const crational& b) {
        rational n = b.re * b.re + b.im * b.im;
        if (n == 0) throw std::domain_error("division by zero");
        return crational((a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n);
    }
    crational& operator+=(const crational& o) { re += o.re; im += o.im; return *this; }
    crational& operator-=(const crational& o) { re -= o.re; im -= o.im; return *this; }
    crational& operator*=(const crational& o) { *this = *this * o; return *this; }

    friend bool operator==(const crational& a, const crational& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const crational& a, const crational& b) { return !(a == b); }
};

inline std::complex<double> to_complex(const crational& c) {
    return {to_double(c.re), to_double(c.im)};
}

inline std::string to_string(const crational& c) {
    if (c.im == 0) return to_string(c.re);
    std::string s = to_string(c.re);
    s += (c.im < 0) ? "-" : "+";
    rational a = abs(c.im);
    if (a != 1) s += to_string(a) + "*";
    return s + "i";
}

}  // namespace opval
