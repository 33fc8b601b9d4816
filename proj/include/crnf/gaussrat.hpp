#pragma once

#include <gmpxx.h>

#include <ostream>
#include <string>

namespace crnf {

// Exact Gaussian rational re + i*im with canonical (reduced) GMP rationals.
class GaussRat {
public:
    GaussRat() = default;
    GaussRat(long v) : re_(v) {}
    GaussRat(const mpq_class& re, const mpq_class& im = 0);
    GaussRat(long num, long den) : re_(num, den) { re_.canonicalize(); }

    static GaussRat i() { return GaussRat(mpq_class(0), mpq_class(1)); }

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }

    GaussRat conj() const { return GaussRat(re_, -im_); }
    // |z|^2, always a nonnegative rational.
    mpq_class norm() const { return re_ * re_ + im_ * im_; }
    GaussRat inverse() const;

    GaussRat& operator+=(const GaussRat& o);
    GaussRat& operator-=(const GaussRat& o);
    GaussRat& operator*=(const GaussRat& o);
    GaussRat& operator/=(const GaussRat& o);

    friend GaussRat operator+(GaussRat a, const GaussRat& b) { return a += b; }
    friend GaussRat operator-(GaussRat a, const GaussRat& b) { return a -= b; }
    friend GaussRat operator*(GaussRat a, const GaussRat& b) { return a *= b; }
    friend GaussRat operator/(GaussRat a, const GaussRat& b) { return a /= b; }
    GaussRat operator-() const { return GaussRat(-re_, -im_); }

    friend bool operator==(const GaussRat& a, const GaussRat& b)
    {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const GaussRat& a, const GaussRat& b) { return !(a == b); }

    // Integer power; negative exponents require a nonzero value.
    GaussRat pow(long e) const;

    // "a+bi" style text used by the human-readable reports.
    std::string to_string() const;

private:
    mpq_class re_{0};
    mpq_class im_{0};
};

std::ostream& operator<<(std::ostream& os, const GaussRat& g);

// Canonical "p/q" (or "p" when q = 1) text of a rational.
std::string rat_to_string(const mpq_class& q);
// Parses "p", "-p", "p/q"; throws StructuralError on malformed text or q = 0.
mpq_class rat_from_string(const std::string& s);

} // namespace crnf
