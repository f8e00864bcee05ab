#pragma once
// Arbitrary-precision scalars: GMP integers/rationals and a small RAII wrapper
// over mpfr_t whose precision travels with the value.

#include <gmpxx.h>
#include <mpfr.h>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace dynpred {

using Int = mpz_class;
using Rat = mpq_class;

namespace mp {

// Precision used when a Real is built without an explicit one.  Thread local,
// so parallel kernels can each pick their own.
mpfr_prec_t default_bits();
void set_default_bits(mpfr_prec_t bits);

class PrecisionScope {
public:
    explicit PrecisionScope(mpfr_prec_t bits);
    ~PrecisionScope();
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    mpfr_prec_t saved_;
};

}  // namespace mp

class Real {
public:
    Real();
    explicit Real(mpfr_prec_t bits, int);  // zero at given precision
    Real(double x);
    Real(long x);
    Real(int x) : Real(static_cast<long>(x)) {}
    Real(unsigned long x);
    explicit Real(const Int& z, mpfr_prec_t bits = 0);
    explicit Real(const Rat& q, mpfr_prec_t bits = 0);
    static Real parse(std::string_view s, mpfr_prec_t bits = 0);
    static Real pi(mpfr_prec_t bits = 0);
    static Real with_bits(mpfr_prec_t bits, const Real& x);
    static Real two_pow(long e, mpfr_prec_t bits = 0);

    Real(const Real& o);
    Real(Real&& o) noexcept;
    Real& operator=(const Real& o);
    Real& operator=(Real&& o) noexcept;
    ~Real();

    mpfr_prec_t bits() const { return mpfr_get_prec(v_); }
    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

    double to_double() const;
    std::string str(int digits = 0) const;  // 0 = enough for the precision
    Int floor_int() const;
    Int round_int() const;
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    bool is_finite() const { return mpfr_number_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }
    long exponent() const;  // x = m * 2^e with 1/2 <= |m| < 1; very negative for 0

    Real& operator+=(const Real& o);
    Real& operator-=(const Real& o);
    Real& operator*=(const Real& o);
    Real& operator/=(const Real& o);
    Real operator-() const;

    friend Real operator+(const Real& a, const Real& b);
    friend Real operator-(const Real& a, const Real& b);
    friend Real operator*(const Real& a, const Real& b);
    friend Real operator/(const Real& a, const Real& b);

    friend bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.v_, b.v_); }
    friend bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.v_, b.v_); }
    friend bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.v_, b.v_); }
    friend bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.v_, b.v_); }
    friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_); }
    friend bool operator!=(const Real& a, const Real& b) { return !mpfr_equal_p(a.v_, b.v_); }

private:
    mpfr_t v_;
};

Real abs(const Real& x);
Real sqrt(const Real& x);
Real log(const Real& x);
Real log1p(const Real& x);
Real exp(const Real& x);
Real sin(const Real& x);
Real cos(const Real& x);
Real tan(const Real& x);
Real atan(const Real& x);
Real atan2(const Real& y, const Real& x);
Real asin(const Real& x);
Real acos(const Real& x);
Real floor(const Real& x);
Real pow(const Real& x, unsigned long e);
Real mul_2exp(const Real& x, long e);
Real min(const Real& a, const Real& b);
Real max(const Real& a, const Real& b);
// x reduced to (-pi, pi]
Real reduce_angle(const Real& x);
// x mod m in [0, m)
Real fmod_pos(const Real& x, const Real& m);
// rational upper / lower neighbours of x with a power-of-two denominator
Rat rat_above(const Real& x, int frac_bits);
Rat rat_below(const Real& x, int frac_bits);
// product with a (possibly huge) integer at the operand precision
Real mul_int(const Real& x, const Int& n);

std::ostream& operator<<(std::ostream& os, const Real& x);

struct Complex {
    Real re, im;

    Complex() = default;
    Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
    explicit Complex(Real r) : re(std::move(r)), im(re.bits(), 0) {}

    mpfr_prec_t bits() const { return re.bits() > im.bits() ? re.bits() : im.bits(); }
    Complex conj() const { return {re, -im}; }
    Real norm() const { return re * re + im * im; }

    Complex& operator+=(const Complex& o);
    Complex& operator-=(const Complex& o);
    Complex& operator*=(const Complex& o);
    Complex& operator/=(const Complex& o);
    Complex operator-() const { return {-re, -im}; }
};

Complex operator+(const Complex& a, const Complex& b);
Complex operator-(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Complex& b);
Complex operator/(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Real& s);
Complex operator/(const Complex& a, const Real& s);
Real abs(const Complex& z);
Real arg(const Complex& z);
Complex pow(const Complex& z, std::uint64_t e);
Complex pow(const Complex& z, const Int& e);
Complex with_bits(mpfr_prec_t bits, const Complex& z);

std::string to_string(const Int& z);
std::string to_string(const Rat& q);
Int parse_int(std::string_view s);

}  // namespace dynpred
