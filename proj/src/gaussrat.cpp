#include "crnf/gaussrat.hpp"

#include "crnf/errors.hpp"

#include <cctype>

namespace crnf {

GaussRat::GaussRat(const mpq_class& re, const mpq_class& im) : re_(re), im_(im)
{
    re_.canonicalize();
    im_.canonicalize();
}

GaussRat GaussRat::inverse() const
{
    mpq_class n = norm();
    if (sgn(n) == 0) {
        throw NonUnitError("GaussRat: division by zero");
    }
    return GaussRat(re_ / n, -im_ / n);
}

GaussRat& GaussRat::operator+=(const GaussRat& o)
{
    re_ += o.re_;
    im_ += o.im_;
    return *this;
}

GaussRat& GaussRat::operator-=(const GaussRat& o)
{
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
}

GaussRat& GaussRat::operator*=(const GaussRat& o)
{
    if (sgn(im_) == 0 && sgn(o.im_) == 0) {
        re_ *= o.re_;
        return *this;
    }
    mpq_class r = re_ * o.re_ - im_ * o.im_;
    mpq_class i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
}

GaussRat& GaussRat::operator/=(const GaussRat& o)
{
    return *this *= o.inverse();
}

GaussRat GaussRat::pow(long e) const
{
    GaussRat base = e < 0 ? inverse() : *this;
    unsigned long n = e < 0 ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
    GaussRat acc(1);
    while (n > 0) {
        if (n & 1UL) {
            acc *= base;
        }
        base *= base;
        n >>= 1;
    }
    return acc;
}

std::string rat_to_string(const mpq_class& q)
{
    if (q.get_den() == 1) {
        return q.get_num().get_str();
    }
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

mpq_class rat_from_string(const std::string& s)
{
    auto valid_int = [](const std::string& t, bool allow_sign) {
        if (t.empty()) {
            return false;
        }
        std::size_t start = 0;
        if (allow_sign && (t[0] == '-' || t[0] == '+')) {
            start = 1;
        }
        if (start == t.size()) {
            return false;
        }
        for (std::size_t i = start; i < t.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(t[i]))) {
                return false;
            }
        }
        return true;
    };
    auto slash = s.find('/');
    std::string num = slash == std::string::npos ? s : s.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!valid_int(num, true) || !valid_int(den, false)) {
        throw StructuralError("malformed rational: '" + s + "'");
    }
    if (num[0] == '+') {
        num = num.substr(1);
    }
    mpz_class n(num, 10);
    mpz_class d(den, 10);
    if (d == 0) {
        throw StructuralError("zero denominator in rational: '" + s + "'");
    }
    mpq_class q(n, d);
    q.canonicalize();
    return q;
}

std::string GaussRat::to_string() const
{
    if (sgn(im_) == 0) {
        return rat_to_string(re_);
    }
    std::string imag;
    if (im_ == 1) {
        imag = "i";
    } else if (im_ == -1) {
        imag = "-i";
    } else {
        imag = rat_to_string(im_) + "*i";
    }
    if (sgn(re_) == 0) {
        return imag;
    }
    if (imag[0] == '-') {
        return rat_to_string(re_) + imag;
    }
    return rat_to_string(re_) + "+" + imag;
}

std::ostream& operator<<(std::ostream& os, const GaussRat& g)
{
    return os << g.to_string();
}

} // namespace crnf
