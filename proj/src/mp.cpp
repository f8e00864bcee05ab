#include "dynpred/mp.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace dynpred {

namespace mp {

namespace {
thread_local mpfr_prec_t g_bits = 128;
}

mpfr_prec_t default_bits() { return g_bits; }
void set_default_bits(mpfr_prec_t bits) { g_bits = bits; }

PrecisionScope::PrecisionScope(mpfr_prec_t bits) : saved_(g_bits) { g_bits = bits; }
PrecisionScope::~PrecisionScope() { g_bits = saved_; }

}  // namespace mp

namespace {
mpfr_prec_t pick(mpfr_prec_t bits) { return bits > 0 ? bits : mp::default_bits(); }
mpfr_prec_t widest(const Real& a, const Real& b) { return std::max(a.bits(), b.bits()); }
}  // namespace

Real::Real() { mpfr_init2(v_, mp::default_bits()); mpfr_set_zero(v_, 1); }
Real::Real(mpfr_prec_t bits, int) { mpfr_init2(v_, pick(bits)); mpfr_set_zero(v_, 1); }
Real::Real(double x) { mpfr_init2(v_, std::max<mpfr_prec_t>(53, mp::default_bits())); mpfr_set_d(v_, x, MPFR_RNDN); }
Real::Real(long x) { mpfr_init2(v_, std::max<mpfr_prec_t>(64, mp::default_bits())); mpfr_set_si(v_, x, MPFR_RNDN); }
Real::Real(unsigned long x) { mpfr_init2(v_, std::max<mpfr_prec_t>(64, mp::default_bits())); mpfr_set_ui(v_, x, MPFR_RNDN); }
Real::Real(const Int& z, mpfr_prec_t bits) { mpfr_init2(v_, pick(bits)); mpfr_set_z(v_, z.get_mpz_t(), MPFR_RNDN); }
Real::Real(const Rat& q, mpfr_prec_t bits) { mpfr_init2(v_, pick(bits)); mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN); }

Real Real::parse(std::string_view s, mpfr_prec_t bits) {
    Real r(bits, 0);
    std::string tmp(s);
    if (mpfr_set_str(r.v_, tmp.c_str(), 10, MPFR_RNDN) != 0) throw std::invalid_argument("bad real literal: " + tmp);
    return r;
}

Real Real::pi(mpfr_prec_t bits) {
    Real r(bits, 0);
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
}

Real Real::with_bits(mpfr_prec_t bits, const Real& x) {
    Real r(bits, 0);
    mpfr_set(r.v_, x.v_, MPFR_RNDN);
    return r;
}

Real Real::two_pow(long e, mpfr_prec_t bits) {
    Real r(bits, 0);
    mpfr_set_ui_2exp(r.v_, 1, e, MPFR_RNDN);
    return r;
}

Real::Real(const Real& o) { mpfr_init2(v_, o.bits()); mpfr_set(v_, o.v_, MPFR_RNDN); }
Real::Real(Real&& o) noexcept { mpfr_init2(v_, MPFR_PREC_MIN); mpfr_swap(v_, o.v_); }
Real& Real::operator=(const Real& o) {
    if (this != &o) { mpfr_set_prec(v_, o.bits()); mpfr_set(v_, o.v_, MPFR_RNDN); }
    return *this;
}
Real& Real::operator=(Real&& o) noexcept { mpfr_swap(v_, o.v_); return *this; }
Real::~Real() { mpfr_clear(v_); }

double Real::to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

std::string Real::str(int digits) const {
    if (mpfr_nan_p(v_)) return "nan";
    if (mpfr_inf_p(v_)) return sign() > 0 ? "inf" : "-inf";
    if (digits <= 0) digits = static_cast<int>(std::ceil(bits() * 0.30103)) + 1;
    std::vector<char> buf(static_cast<size_t>(digits) + 64);
    mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, v_);
    return std::string(buf.data());
}

Int Real::floor_int() const {
    Int z;
    mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDD);
    return z;
}

Int Real::round_int() const {
    Int z;
    mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDN);
    return z;
}

long Real::exponent() const {
    if (mpfr_zero_p(v_)) return std::numeric_limits<long>::min() / 2;
    return mpfr_get_exp(v_);
}

Real& Real::operator+=(const Real& o) { if (o.bits() > bits()) mpfr_prec_round(v_, o.bits(), MPFR_RNDN); mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
Real& Real::operator-=(const Real& o) { if (o.bits() > bits()) mpfr_prec_round(v_, o.bits(), MPFR_RNDN); mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
Real& Real::operator*=(const Real& o) { if (o.bits() > bits()) mpfr_prec_round(v_, o.bits(), MPFR_RNDN); mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
Real& Real::operator/=(const Real& o) { if (o.bits() > bits()) mpfr_prec_round(v_, o.bits(), MPFR_RNDN); mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }

Real Real::operator-() const { Real r(*this); mpfr_neg(r.v_, r.v_, MPFR_RNDN); return r; }

Real operator+(const Real& a, const Real& b) { Real r(widest(a, b), 0); mpfr_add(r.raw(), a.raw(), b.raw(), MPFR_RNDN); return r; }
Real operator-(const Real& a, const Real& b) { Real r(widest(a, b), 0); mpfr_sub(r.raw(), a.raw(), b.raw(), MPFR_RNDN); return r; }
Real operator*(const Real& a, const Real& b) { Real r(widest(a, b), 0); mpfr_mul(r.raw(), a.raw(), b.raw(), MPFR_RNDN); return r; }
Real operator/(const Real& a, const Real& b) { Real r(widest(a, b), 0); mpfr_div(r.raw(), a.raw(), b.raw(), MPFR_RNDN); return r; }

#define DYNPRED_UNARY(name, fn)                           \
    Real name(const Real& x) {                            \
        Real r(x.bits(), 0);                              \
        fn(r.raw(), x.raw(), MPFR_RNDN);                  \
        return r;                                         \
    }
DYNPRED_UNARY(abs, mpfr_abs)
DYNPRED_UNARY(sqrt, mpfr_sqrt)
DYNPRED_UNARY(log, mpfr_log)
DYNPRED_UNARY(log1p, mpfr_log1p)
DYNPRED_UNARY(exp, mpfr_exp)
DYNPRED_UNARY(sin, mpfr_sin)
DYNPRED_UNARY(cos, mpfr_cos)
DYNPRED_UNARY(tan, mpfr_tan)
DYNPRED_UNARY(atan, mpfr_atan)
DYNPRED_UNARY(asin, mpfr_asin)
DYNPRED_UNARY(acos, mpfr_acos)
#undef DYNPRED_UNARY

Real floor(const Real& x) { Real r(x.bits(), 0); mpfr_floor(r.raw(), x.raw()); return r; }

Real atan2(const Real& y, const Real& x) {
    Real r(widest(x, y), 0);
    mpfr_atan2(r.raw(), y.raw(), x.raw(), MPFR_RNDN);
    return r;
}

Real pow(const Real& x, unsigned long e) {
    Real r(x.bits(), 0);
    mpfr_pow_ui(r.raw(), x.raw(), e, MPFR_RNDN);
    return r;
}

Real mul_2exp(const Real& x, long e) {
    Real r(x.bits(), 0);
    mpfr_mul_2si(r.raw(), x.raw(), e, MPFR_RNDN);
    return r;
}

Real min(const Real& a, const Real& b) { return a < b ? a : b; }
Real max(const Real& a, const Real& b) { return a < b ? b : a; }

Real reduce_angle(const Real& x) {
    Real twopi = mul_2exp(Real::pi(x.bits() + 32), 1);
    Real r(x.bits() + 32, 0);
    mpfr_remainder(r.raw(), x.raw(), twopi.raw(), MPFR_RNDN);
    Real pi = Real::pi(x.bits() + 32);
    if (r <= -pi) r += twopi;
    return Real::with_bits(x.bits(), r);
}

Real fmod_pos(const Real& x, const Real& m) {
    Real r(widest(x, m), 0);
    mpfr_fmod(r.raw(), x.raw(), m.raw(), MPFR_RNDN);
    if (r.sign() < 0) r += m;
    if (r >= m) r -= m;
    return r;
}

Rat rat_above(const Real& x, int frac_bits) {
    Real s = mul_2exp(x, frac_bits);
    Int z;
    mpfr_get_z(z.get_mpz_t(), s.raw(), MPFR_RNDU);
    z += 1;
    Rat q(z, 1);
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), frac_bits);
    return q;
}

Rat rat_below(const Real& x, int frac_bits) {
    Real s = mul_2exp(x, frac_bits);
    Int z;
    mpfr_get_z(z.get_mpz_t(), s.raw(), MPFR_RNDD);
    z -= 1;
    Rat q(z, 1);
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), frac_bits);
    return q;
}

Real mul_int(const Real& x, const Int& n) {
    Real r(x.bits(), 0);
    mpfr_mul_z(r.raw(), x.raw(), n.get_mpz_t(), MPFR_RNDN);
    return r;
}

std::ostream& operator<<(std::ostream& os, const Real& x) { return os << x.str(static_cast<int>(os.precision())); }

Complex& Complex::operator+=(const Complex& o) { re += o.re; im += o.im; return *this; }
Complex& Complex::operator-=(const Complex& o) { re -= o.re; im -= o.im; return *this; }
Complex& Complex::operator*=(const Complex& o) { *this = *this * o; return *this; }
Complex& Complex::operator/=(const Complex& o) { *this = *this / o; return *this; }

Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
Complex operator*(const Complex& a, const Complex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
Complex operator/(const Complex& a, const Complex& b) {
    Real den = b.norm();
    return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
}
Complex operator*(const Complex& a, const Real& s) { return {a.re * s, a.im * s}; }
Complex operator/(const Complex& a, const Real& s) { return {a.re / s, a.im / s}; }

Real abs(const Complex& z) {
    Real r(z.bits(), 0);
    mpfr_hypot(r.raw(), z.re.raw(), z.im.raw(), MPFR_RNDN);
    return r;
}

Real arg(const Complex& z) { return atan2(z.im, z.re); }

Complex pow(const Complex& z, std::uint64_t e) {
    Complex result(Real::with_bits(z.bits(), Real(1L)), Real(z.bits(), 0));
    Complex base = z;
    while (e) {
        if (e & 1) result *= base;
        e >>= 1;
        if (e) base *= base;
    }
    return result;
}

Complex pow(const Complex& z, const Int& e) {
    if (e < 0) {
        Complex one(Real::with_bits(z.bits(), Real(1L)), Real(z.bits(), 0));
        return one / pow(z, Int(-e));
    }
    Complex result(Real::with_bits(z.bits(), Real(1L)), Real(z.bits(), 0));
    Complex base = z;
    size_t nb = mpz_sizeinbase(e.get_mpz_t(), 2);
    for (size_t i = 0; i < nb; ++i) {
        if (mpz_tstbit(e.get_mpz_t(), i)) result *= base;
        if (i + 1 < nb) base *= base;
    }
    return result;
}

Complex with_bits(mpfr_prec_t bits, const Complex& z) {
    return {Real::with_bits(bits, z.re), Real::with_bits(bits, z.im)};
}

std::string to_string(const Int& z) { return z.get_str(10); }
std::string to_string(const Rat& q) { return q.get_str(10); }

Int parse_int(std::string_view s) {
    std::string t(s);
    size_t a = 0;
    while (a < t.size() && std::isspace(static_cast<unsigned char>(t[a]))) ++a;
    size_t b = t.size();
    while (b > a && std::isspace(static_cast<unsigned char>(t[b - 1]))) --b;
    t = t.substr(a, b - a);
    if (!t.empty() && t[0] == '+') t.erase(0, 1);
    Int z;
    if (t.empty() || z.set_str(t, 10) != 0) throw std::invalid_argument("bad integer literal: " + std::string(s));
    return z;
}

}  // namespace dynpred
