#include "crnf/hypersurface.hpp"

#include "crnf/errors.hpp"

#include <algorithm>
#include <sstream>

namespace crnf {

namespace {

std::string kl_name(int k, int l)
{
    return "h" + std::to_string(k) + std::to_string(l);
}

MultiSeries one_var_zero(const std::string& var, int order)
{
    return MultiSeries({var}, std::max(order, 0));
}

// Materializes eps*z*x + sum c_kl(t) z^k x^l in the ring (names[0..2]).
MultiSeries materialize_family(const std::vector<std::string>& names, int order, int eps, const CoeffFamily& fam)
{
    std::vector<std::pair<Exponents, GaussRat>> terms;
    if (order >= 2) {
        terms.push_back({{1, 1, 0}, GaussRat(eps)});
    }
    for (const auto& [kl, s] : fam) {
        for (const auto& [e, c] : s.terms()) {
            terms.push_back({{kl.first, kl.second, e[0]}, c});
        }
    }
    return MultiSeries::from_terms(names, order, terms);
}

// Splits a three-variable series of the admissible shape into its family,
// checking the leading eps*z*x block and the absence of other low terms.
CoeffFamily family_of(const MultiSeries& s, int eps, const std::string& var, const char* what)
{
    const auto& names = s.vars();
    CoeffView view = coeff_view(s, {names[0], names[1]});
    CoeffFamily fam;
    for (auto& [key, series] : view) {
        int k = key[0];
        int l = key[1];
        if (k == 1 && l == 1) {
            if (series != series.constant(GaussRat(eps))) {
                throw InternalError(std::string(what) + ": leading z*zbar coefficient is not the constant eps");
            }
            continue;
        }
        if (k < 2 || l < 2) {
            throw InternalError(std::string(what) + ": unexpected term with (k,l) = (" + std::to_string(k) + "," +
                                std::to_string(l) + ")");
        }
        fam.emplace(KL{k, l}, rename(series, {var}));
    }
    return fam;
}

GaussRat coefficient(const MultiSeries& s, int j)
{
    return s.coeff({j});
}

} // namespace

MultiSeries RealHypersurface::hkl(int k, int l) const
{
    auto it = h.find({k, l});
    if (it != h.end()) {
        return it->second;
    }
    return one_var_zero("u", order - k - l);
}

MultiSeries RealHypersurface::materialize() const
{
    return materialize_family({"z", "zb", "u"}, order, eps, h);
}

RealHypersurface RealHypersurface::model(int m, int eps, int order)
{
    RealHypersurface r;
    r.m = m;
    r.eps = eps;
    r.order = order;
    return r;
}

RealHypersurface RealHypersurface::from_series(int m, int eps, const MultiSeries& s)
{
    RealHypersurface r;
    r.m = m;
    r.eps = eps;
    r.order = s.order();
    r.h = family_of(s, eps, "u", "from_series");
    return r;
}

MultiSeries ExponentialForm::phikl(int k, int l) const
{
    auto it = phi.find({k, l});
    if (it != phi.end()) {
        return it->second;
    }
    return one_var_zero("w", order - k - l);
}

MultiSeries ExponentialForm::materialize() const
{
    return materialize_family({"z", "chi", "w"}, order, eps, phi);
}

ValidationReport validate(const RealHypersurface& h)
{
    ValidationReport rep;
    auto fail = [&](std::string msg) {
        rep.ok = false;
        rep.violations.push_back(std::move(msg));
    };
    if (h.m < 1) {
        fail("m must be a positive integer");
    }
    if (h.eps != 1 && h.eps != -1) {
        fail("eps must be +1 or -1");
    }
    if (h.order < 2) {
        fail("order must be at least 2");
    }
    for (const auto& [kl, s] : h.h) {
        auto [k, l] = kl;
        if (k < 2 || l < 2) {
            fail("index violation: " + kl_name(k, l) + " has an index below 2");
            continue;
        }
        if (k + l > h.order) {
            fail("index violation: " + kl_name(k, l) + " exceeds the order");
            continue;
        }
        if (s.vars() != std::vector<std::string>{"u"} || s.order() != h.order - k - l) {
            fail("shape violation: " + kl_name(k, l) + " must be a series in u of order " +
                 std::to_string(h.order - k - l));
            continue;
        }
        if (s.conj() != h.hkl(l, k)) {
            fail("reality violation: " + kl_name(k, l) + " != conj(" + kl_name(l, k) + ")");
        }
    }
    return rep;
}

namespace {

void require_valid(const RealHypersurface& h)
{
    auto rep = validate(h);
    if (!rep.ok) {
        throw ValidationError("invalid hypersurface: " + rep.violations.front());
    }
}

// artanh(x)/x = sum x^{2j}/(2j+1).
std::vector<GaussRat> artanh_over_x(int n)
{
    std::vector<GaussRat> c(static_cast<std::size_t>(n + 1), GaussRat(0));
    for (int j = 0; j <= n; j += 2) {
        c[static_cast<std::size_t>(j)] = GaussRat(1, j + 1);
    }
    return c;
}

// (e^y - 1)/y = sum y^j/(j+1)!.
std::vector<GaussRat> expm1_over_y(int n)
{
    std::vector<GaussRat> c;
    mpz_class fact = 1;
    for (int j = 0; j <= n; ++j) {
        fact *= (j + 1);
        c.emplace_back(mpq_class(mpz_class(1), fact));
    }
    return c;
}

} // namespace

ExponentialForm to_exponential(const RealHypersurface& h)
{
    require_valid(h);
    const int n = h.order;
    const int m = h.m;
    MultiSeries hs = rename(h.materialize(), {"z", "chi", "w"});
    MultiSeries z = hs.var("z");
    MultiSeries chi = hs.var("chi");
    MultiSeries w = hs.var("w");
    const GaussRat half_i = GaussRat(mpq_class(0), mpq_class(1, 2));
    // u = U(z, chi, wbar) solves u - (i/2) u^m h(z, chi, u) = wbar.
    auto residual = [&](const SeriesVec& d) {
        MultiSeries u = w + d[0];
        return SeriesVec{d[0] - half_i * pow(u, m) * substitute(hs, {z, chi, u})};
    };
    MultiSeries u = w + solve_implicit(residual, hs.zero(), 1)[0];
    MultiSeries hu = substitute(hs, {z, chi, u});
    MultiSeries x = half_i * pow(u, m - 1) * hu;
    MultiSeries phi = hu * apply_univariate(artanh_over_x(n), x) * pow(hs.one() - x, 1 - m);
    ExponentialForm out;
    out.m = m;
    out.eps = h.eps;
    out.order = n;
    out.phi = family_of(phi, h.eps, "w", "to_exponential");
    return out;
}

RealHypersurface from_exponential(const ExponentialForm& ef)
{
    if (ef.eps != 1 && ef.eps != -1) {
        throw ValidationError("eps must be +1 or -1");
    }
    const int n = ef.order;
    const int m = ef.m;
    MultiSeries phi = ef.materialize();
    MultiSeries z = phi.var("z");
    MultiSeries chi = phi.var("chi");
    MultiSeries w = phi.var("w");
    MultiSeries y = GaussRat::i() * pow(w, m - 1) * phi;
    MultiSeries e = exp_nilpotent(y);
    // wbar = W(z, chi, u) solves wbar (1 + E(z, chi, wbar)) / 2 = u.
    auto residual = [&](const SeriesVec& d) {
        MultiSeries wb = w + d[0];
        return SeriesVec{wb * (e.one() + substitute(e, {z, chi, wb})) * GaussRat(1, 2) - w};
    };
    MultiSeries wb = w + solve_implicit(residual, phi.zero(), 1)[0];
    MultiSeries g = pow(invert_unit((e.one() + e) * GaussRat(1, 2)), m) * phi * apply_univariate(expm1_over_y(n), y);
    MultiSeries hs = substitute(g, {z, chi, wb});
    RealHypersurface out;
    out.m = m;
    out.eps = ef.eps;
    out.order = n;
    out.h = family_of(rename(hs, {"z", "zb", "u"}), ef.eps, "u", "from_exponential");
    return out;
}

ComplexDefining to_complex_defining(const RealHypersurface& h)
{
    ExponentialForm ef = to_exponential(h);
    MultiSeries phi = rename(ef.materialize(), {"z", "chi", "tau"});
    MultiSeries tau = phi.var("tau");
    ComplexDefining cd;
    cd.m = h.m;
    cd.order = h.order;
    cd.theta = tau * exp_nilpotent(GaussRat::i() * pow(tau, h.m - 1) * phi);
    return cd;
}

ComplexDefining to_complex_defining_implicit(const RealHypersurface& h)
{
    require_valid(h);
    MultiSeries hs = rename(h.materialize(), {"z", "chi", "tau"});
    MultiSeries z = hs.var("z");
    MultiSeries chi = hs.var("chi");
    MultiSeries tau = hs.var("tau");
    // w - wbar = i u^m h(z, zbar, u) with u = (w + wbar)/2 and wbar = tau.
    auto residual = [&](const SeriesVec& d) {
        MultiSeries u = tau + d[0] * GaussRat(1, 2);
        return SeriesVec{d[0] - GaussRat::i() * pow(u, h.m) * substitute(hs, {z, chi, u})};
    };
    ComplexDefining cd;
    cd.m = h.m;
    cd.order = h.order;
    cd.theta = tau + solve_implicit(residual, hs.zero(), 1)[0];
    return cd;
}

std::optional<int> lowest_degree(const MultiSeries& s)
{
    if (s.is_zero()) {
        return std::nullopt;
    }
    return s.valuation();
}

namespace {

// True iff every nonzero term of s has its exponent in `allowed`.
bool only_degrees(const MultiSeries& s, std::initializer_list<int> allowed)
{
    for (const auto& [e, c] : s.terms()) {
        if (std::find(allowed.begin(), allowed.end(), e[0]) == allowed.end()) {
            return false;
        }
    }
    return true;
}

bool real_coefficients(const MultiSeries& s)
{
    for (const auto& [e, c] : s.terms()) {
        if (!c.is_real()) {
            return false;
        }
    }
    return true;
}

} // namespace

MembershipResult is_normal_form(const RealHypersurface& h)
{
    MembershipResult r;
    auto fail = [&](std::string msg) {
        r.ok = false;
        r.violations.push_back(std::move(msg));
    };
    for (auto [k, l] : {KL{2, 2}, KL{2, 3}, KL{3, 2}}) {
        if (!only_degrees(h.hkl(k, l), {0})) {
            fail(kl_name(k, l) + " nonconstant");
        }
    }
    MultiSeries h33 = h.hkl(3, 3);
    if (!only_degrees(h33, {0, h.m - 1})) {
        fail("h33 not of the form r + s*u^(m-1)");
    } else if (!real_coefficients(h33)) {
        fail("h33 has non-real coefficients");
    }
    return r;
}

MembershipResult is_fuchsian(const RealHypersurface& h)
{
    MembershipResult r;
    const int m = h.m;
    if (m == 1) {
        return r;
    }
    for (const auto& [kl, s] : h.h) {
        auto [k, l] = kl;
        int a = std::min(k, l);
        int b = std::max(k, l);
        std::optional<int> bound;
        if (a == 2 && b == 2) {
            bound = m - 1;
        } else if (a == 2 && b == 3) {
            bound = 2 * m - 2;
        } else if (a == 3 && b == 3) {
            bound = 2 * m - 2;
        } else if (a == 2 && b >= 4 && b <= 2 * m + 1) {
            bound = 2 * m - b + 2;
        } else if (a >= 3 && k + l >= 7 && k + l <= 2 * m + 4) {
            bound = 2 * m - k - l + 5;
        }
        auto low = lowest_degree(s);
        if (bound && low && *low < *bound) {
            r.ok = false;
            r.violations.push_back("ord " + kl_name(k, l) + " = " + std::to_string(*low) + " < " +
                                   std::to_string(*bound));
        }
    }
    return r;
}

MembershipResult is_fuchsian_normal_form(const RealHypersurface& h)
{
    MembershipResult r = is_fuchsian(h);
    const int m = h.m;
    if (!only_degrees(h.hkl(2, 2), {m - 1})) {
        r.ok = false;
        r.violations.push_back("h22 is not c*u^(m-1)");
    }
    for (auto [k, l] : {KL{2, 3}, KL{3, 2}, KL{3, 3}}) {
        if (!only_degrees(h.hkl(k, l), {2 * m - 2})) {
            r.ok = false;
            r.violations.push_back(kl_name(k, l) + " is not c*u^(2m-2)");
        }
    }
    return r;
}

std::optional<int> dilation_sign(int m, const GaussRat& lambda, const mpq_class& mu)
{
    if (lambda.is_zero() || sgn(mu) == 0) {
        return std::nullopt;
    }
    mpq_class lhs = GaussRat(mu).pow(1 - m).re();
    mpq_class n = lambda.norm();
    if (lhs == n) {
        return 1;
    }
    if (lhs == -n) {
        return -1;
    }
    return std::nullopt;
}

RealHypersurface apply_dilation(const RealHypersurface& h, const GaussRat& lambda, const mpq_class& mu)
{
    auto s = dilation_sign(h.m, lambda, mu);
    if (!s) {
        std::ostringstream msg;
        msg << "dilation constraint violated: mu^(1-m) must equal +-|lambda|^2 (lambda = " << lambda
            << ", mu = " << rat_to_string(mu) << ")";
        throw ParameterError(msg.str());
    }
    RealHypersurface out;
    out.m = h.m;
    out.eps = *s * h.eps;
    out.order = h.order;
    GaussRat base = GaussRat(*s) * GaussRat(lambda.norm());
    GaussRat lb = lambda.conj();
    mpq_class muinv = 1 / mu;
    for (const auto& [kl, series] : h.h) {
        auto [k, l] = kl;
        GaussRat f = base * lambda.pow(-k) * lb.pow(-l);
        std::vector<std::pair<Exponents, GaussRat>> terms;
        for (const auto& [e, c] : series.terms()) {
            terms.push_back({e, c * f * GaussRat(muinv).pow(e[0])});
        }
        MultiSeries img = MultiSeries::from_terms({"u"}, series.order(), terms);
        if (!img.is_zero()) {
            out.h.emplace(kl, img);
        }
    }
    return out;
}

} // namespace crnf
