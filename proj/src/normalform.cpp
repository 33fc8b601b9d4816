#include "crnf/normalform.hpp"

#include "crnf/segre.hpp"
#include "crnf/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <sstream>

namespace crnf {

namespace {

const std::vector<std::string> kW{"w"};

GaussRat wcoeff(const MultiSeries& s, int j)
{
    if (j > s.order()) {
        throw TruncationError("coefficient w^" + std::to_string(j) + " is beyond the series order " +
                              std::to_string(s.order()));
    }
    return s.coeff({j});
}

UPoly K() { return UPoly::k(); }
UPoly C(const GaussRat& c) { return UPoly::constant(c); }
UPoly C(long c) { return UPoly::constant(GaussRat(c)); }

std::string label(const std::array<int, 3>& abc)
{
    std::ostringstream os;
    os << "Phi_{" << abc[0] << "," << abc[1] << "," << abc[2] << "}";
    return os.str();
}

MultiSeries& component(CauchyData& y, int comp)
{
    switch (comp) {
    case 0:
        return y.g0;
    case 1:
        return y.g1;
    case 2:
        return y.f0;
    default:
        return y.f1;
    }
}

void add_monomial(MultiSeries& s, int k, const GaussRat& c)
{
    if (c.is_zero()) {
        return;
    }
    s += s.monomial({k}, c);
}

CauchyData truncated(const CauchyData& y, int order)
{
    return CauchyData{with_order(y.f0, order), with_order(y.f1, order), with_order(y.g0, order),
                      with_order(y.g1, order)};
}

// Exact integer e-th root of a nonnegative rational, if any.
std::optional<mpq_class> rational_root(const mpq_class& q, unsigned e)
{
    if (sgn(q) < 0) {
        return std::nullopt;
    }
    mpz_class num = q.get_num();
    mpz_class den = q.get_den();
    mpz_class rn;
    mpz_class rd;
    if (!mpz_root(rn.get_mpz_t(), num.get_mpz_t(), e) || !mpz_root(rd.get_mpz_t(), den.get_mpz_t(), e)) {
        return std::nullopt;
    }
    mpq_class r(rn, rd);
    r.canonicalize();
    return r;
}

// Real rational solutions of x^e = r (e != 0).
std::vector<mpq_class> real_roots(const mpq_class& r, int e)
{
    std::vector<mpq_class> out;
    if (e == 0 || sgn(r) == 0) {
        return out;
    }
    mpq_class target = e > 0 ? r : mpq_class(1 / r);
    unsigned a = static_cast<unsigned>(std::abs(e));
    if (a % 2 == 1) {
        auto root = rational_root(abs(target), a);
        if (root) {
            out.push_back(sgn(target) < 0 ? mpq_class(-*root) : *root);
        }
        return out;
    }
    if (sgn(target) < 0) {
        return out;
    }
    auto root = rational_root(target, a);
    if (root) {
        out.push_back(*root);
        out.push_back(-*root);
    }
    return out;
}

// Continued-fraction reconstruction of a double with bounded denominator.
std::optional<mpq_class> reconstruct(double x, long max_den = 100000)
{
    if (!std::isfinite(x)) {
        return std::nullopt;
    }
    long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double v = x;
    for (int it = 0; it < 64; ++it) {
        double a = std::floor(v);
        if (std::abs(a) > 1e15) {
            break;
        }
        long ai = static_cast<long>(a);
        long h2 = ai * h1 + h0;
        long k2 = ai * k1 + k0;
        if (k2 > max_den) {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - x) < 1e-12 * std::max(1.0, std::abs(x))) {
            mpq_class q(h1, k1);
            q.canonicalize();
            return q;
        }
        double frac = v - a;
        if (frac < 1e-15) {
            break;
        }
        v = 1 / frac;
    }
    return std::nullopt;
}

// Gaussian rational solutions of lambda^d = c (d != 0) with small denominators.
std::vector<GaussRat> gaussian_roots(const GaussRat& c, int d)
{
    std::vector<GaussRat> out;
    if (d == 0 || c.is_zero()) {
        return out;
    }
    if (d == 1) {
        return {c};
    }
    if (d == -1) {
        return {c.inverse()};
    }
    std::complex<double> z(c.re().get_d(), c.im().get_d());
    int a = std::abs(d);
    if (d < 0) {
        z = 1.0 / z;
    }
    GaussRat target = d > 0 ? c : c.inverse();
    double r = std::pow(std::abs(z), 1.0 / a);
    double th = std::arg(z);
    for (int t = 0; t < a; ++t) {
        std::complex<double> cand = std::polar(r, (th + 2 * M_PI * t) / a);
        auto re = reconstruct(cand.real());
        auto im = reconstruct(cand.imag());
        if (!re || !im) {
            continue;
        }
        GaussRat g(*re, *im);
        if (!g.is_zero() && g.pow(a) == target) {
            out.push_back(g);
        }
    }
    return out;
}

// Gaussian rationals of the given norm, a few small-denominator candidates.
std::vector<GaussRat> of_norm(const mpq_class& n)
{
    std::vector<GaussRat> out;
    if (sgn(n) <= 0) {
        return out;
    }
    if (auto r = rational_root(n, 2)) {
        out.push_back(GaussRat(*r));
        return out;
    }
    for (long q = 1; q <= 64 && out.empty(); ++q) {
        mpq_class scaled = n * q * q;
        if (scaled.get_den() != 1) {
            continue;
        }
        mpz_class N = scaled.get_num();
        if (N > mpz_class(1000000000L)) {
            continue;
        }
        long nn = N.get_si();
        for (long p = 0; p * p <= nn; ++p) {
            long rest = nn - p * p;
            long s = static_cast<long>(std::llround(std::sqrt(static_cast<double>(rest))));
            if (s * s == rest) {
                out.push_back(GaussRat(mpq_class(p, q), mpq_class(s, q)));
                break;
            }
        }
    }
    return out;
}

} // namespace

std::string regime_name(Regime r)
{
    switch (r) {
    case Regime::kM1:
        return "m1";
    case Regime::kMGeneral:
        return "m-general";
    case Regime::kMSpecial:
        return "m-special";
    case Regime::kFuchsian:
        return "fuchsian";
    }
    return "unknown";
}

EulerCoefficients EulerCoefficients::of(const SingularODE& e)
{
    EulerCoefficients c;
    c.alpha0 = wcoeff(e.A(0), 0);
    c.alpha1 = wcoeff(e.A(1), 0);
    c.alpha2 = wcoeff(e.A(2), 0);
    c.beta0 = wcoeff(e.B(0), 0);
    c.beta1 = wcoeff(e.B(1), 0);
    c.beta2 = wcoeff(e.B(2), 0);
    c.gamma0 = wcoeff(e.C(0), 0);
    c.gamma1 = wcoeff(e.C(1), 0);
    return c;
}

FuchsianCoefficients FuchsianCoefficients::of(const SingularODE& e)
{
    const int m = e.m;
    const int t = 2 * m - 2;
    FuchsianCoefficients c;
    c.alpha0 = wcoeff(e.A(0), m - 1);
    c.alpha0s = wcoeff(e.A(0), m);
    c.alpha1 = wcoeff(e.A(1), t);
    c.alpha1s = wcoeff(e.A(1), t + 1);
    c.alpha2 = wcoeff(e.A(2), t);
    c.beta0 = wcoeff(e.B(0), t);
    c.beta1 = wcoeff(e.B(1), t);
    c.beta2 = wcoeff(e.B(2), t);
    c.beta0s = wcoeff(e.B(0), t + 1);
    c.beta1s = wcoeff(e.B(1), t + 1);
    c.gamma0 = wcoeff(e.C(0), t);
    c.gamma1 = wcoeff(e.C(1), t);
    return c;
}

std::array<int, 4> first_variation_row_signs(Regime r)
{
    if (r == Regime::kM1 || r == Regime::kFuchsian) {
        return {-1, 1, 1, 1};
    }
    return {1, 1, 1, 1};
}

PolyMatrix euler_poly_m1(const EulerCoefficients& c)
{
    UPoly k = K();
    UPoly a0 = C(c.alpha0);
    PolyMatrix M(4, std::vector<UPoly>(4));
    M[0] = {k * (k + C(1) - a0), C(-GaussRat(3) * c.beta0), C(-c.alpha1), C(-2) * k};
    M[1] = {C(c.alpha1) * k, C(3) * k * (k + C(1) - a0) + C(GaussRat(3) * c.beta1), C(GaussRat(2) * c.alpha2),
            C(c.alpha1)};
    M[2] = {C(GaussRat(2) * c.beta0) * k, C(GaussRat(4) * c.gamma0), k * (k - C(1) + a0) + C(c.beta1), C(-c.beta0)};
    M[3] = {C(GaussRat(2) * c.beta1) * k, C(GaussRat(2) * c.beta0 * (c.alpha0 - GaussRat(1)) + GaussRat(4) * c.gamma1),
            C(c.alpha1) * k + C(GaussRat(2) * c.beta2), k * (k - C(1) + a0)};
    return M;
}

EulerMatrix build_euler_matrix_m1(int k, const EulerCoefficients& c)
{
    return EulerMatrix{k, Regime::kM1, evaluate(euler_poly_m1(c), GaussRat(k))};
}

PolyMatrix euler_poly_m(int m, const EulerCoefficients& c)
{
    UPoly s = K() + C(1 - m);
    PolyMatrix M(4, std::vector<UPoly>(4));
    M[0] = {C(c.alpha0) * s, C(GaussRat(3) * c.beta0), C(c.alpha1), UPoly()};
    M[1] = {C(c.alpha1) * s, C(GaussRat(3) * c.beta1), C(GaussRat(2) * c.alpha2), C(c.alpha1)};
    M[2] = {C(GaussRat(2) * c.beta0) * s, C(GaussRat(4) * c.gamma0), C(c.beta1), C(-c.beta0)};
    M[3] = {C(GaussRat(2) * c.beta1) * s, C(GaussRat(2) * c.beta0 * c.alpha0 + GaussRat(4) * c.gamma1),
            C(GaussRat(2) * c.beta2), UPoly()};
    return M;
}

EulerMatrix build_euler_matrices_m(int k, int m, const EulerCoefficients& c)
{
    Regime r = k == m - 1 ? Regime::kMSpecial : Regime::kMGeneral;
    return EulerMatrix{k, r, evaluate(euler_poly_m(m, c), GaussRat(k))};
}

PolyMatrix fuchsian_poly(int m, const FuchsianCoefficients& c)
{
    UPoly k = K();
    UPoly a0 = C(c.alpha0);
    UPoly km = k + C(m - 1);
    PolyMatrix M(4, std::vector<UPoly>(4));
    M[0] = {k * (k + C(1) - a0), UPoly(), UPoly(), C(-2) * k};
    M[1] = {C(c.alpha1) * km, C(3) * km * (km + C(1) - a0) + C(GaussRat(3) * c.beta1), C(GaussRat(2) * c.alpha2),
            C(c.alpha1)};
    M[2] = {C(GaussRat(2) * c.beta0) * k, C(GaussRat(4) * c.gamma0), k * (k - C(1) + a0) + C(c.beta1), C(-c.beta0)};
    M[3] = {C(GaussRat(2) * c.beta1) * k, C(GaussRat(4) * c.gamma1), C(GaussRat(2) * c.beta2), k * (k - C(1) + a0)};
    return M;
}

EulerMatrix build_fuchsian_matrix(int k, int m, const FuchsianCoefficients& c)
{
    return EulerMatrix{k, Regime::kFuchsian, evaluate(fuchsian_poly(m, c), GaussRat(k))};
}

namespace {

std::vector<long> roots_or_all(const UPoly& det, bool& every_k)
{
    if (det.is_zero()) {
        every_k = true;
        return {1};
    }
    return positive_integer_roots(det);
}

} // namespace

ResonanceReport resonance_m1(const SingularODE& e)
{
    if (e.m != 1) {
        throw ParameterError("resonance_m1: requires m = 1");
    }
    ResonanceReport r;
    r.regime = Regime::kM1;
    PolyMatrix M = euler_poly_m1(EulerCoefficients::of(e));
    r.det_poly = determinant(M);
    PolyMatrix red = M;
    for (int i = 0; i < 4; ++i) {
        const auto& cs = M[i][0].coeffs();
        red[i][0] = UPoly(cs.empty() ? cs : std::vector<GaussRat>(cs.begin() + 1, cs.end()));
    }
    r.reduced_det_poly = determinant(red);
    bool every = false;
    r.resonant_ks = roots_or_all(*r.reduced_det_poly, every);
    r.matrix_44_invertible = !every;
    return r;
}

ResonanceReport resonance_m(const SingularODE& e)
{
    if (e.m < 2) {
        throw ParameterError("resonance_m: requires m > 1");
    }
    const int m = e.m;
    ResonanceReport r;
    r.regime = Regime::kMGeneral;
    // k = m gives the unit factor k + 1 - m.
    Matrix M = evaluate(euler_poly_m(m, EulerCoefficients::of(e)), GaussRat(m));
    r.matrix_44 = M;
    r.matrix_44_invertible = !determinant(M).is_zero();
    Matrix minor(3, 3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            minor.at(i, j) = M.at(i, j + 1);
        }
    }
    r.matrix_33_invertible = !determinant(minor).is_zero();
    if (!r.matrix_44_invertible) {
        r.resonant_ks.push_back(m == 2 ? 2 : 1);
    }
    if (!r.matrix_33_invertible) {
        r.resonant_ks.push_back(m - 1);
    }
    std::sort(r.resonant_ks.begin(), r.resonant_ks.end());
    r.resonant_ks.erase(std::unique(r.resonant_ks.begin(), r.resonant_ks.end()), r.resonant_ks.end());
    return r;
}

ResonanceReport resonance_fuchsian(const SingularODE& e)
{
    if (e.m < 2) {
        throw ParameterError("resonance_fuchsian: requires m > 1");
    }
    ResonanceReport r;
    r.regime = Regime::kFuchsian;
    r.det_poly = determinant(fuchsian_poly(e.m, FuchsianCoefficients::of(e)));
    bool every = false;
    r.resonant_ks = roots_or_all(*r.det_poly, every);
    r.matrix_44_invertible = !every;
    return r;
}

std::array<mpq_class, 2> default_sigma(int m)
{
    return {mpq_class(static_cast<long>(m - 1) * (m + 2), 4) + mpq_class(1, 2), mpq_class(0)};
}

mpq_class resolve_mu(int m, const NormalFormParams& p)
{
    if (p.lambda.is_zero()) {
        throw ParameterError("lambda must be nonzero");
    }
    if (p.mu) {
        if (sgn(*p.mu) == 0) {
            throw ParameterError("mu must be nonzero");
        }
        if (!dilation_sign(m, p.lambda, *p.mu)) {
            throw ParameterError("dilation constraint violated: mu^(1-m) must equal +-|lambda|^2");
        }
        return *p.mu;
    }
    if (m == 1) {
        if (p.lambda.norm() != 1) {
            throw ParameterError("m = 1 requires |lambda| = 1");
        }
        return 1;
    }
    // mu^{1-m} = |lambda|^2, positive root.
    auto roots = real_roots(p.lambda.norm(), 1 - m);
    for (const auto& r : roots) {
        if (sgn(r) > 0) {
            return r;
        }
    }
    throw ParameterError("no rational mu with mu^(1-m) = |lambda|^2; pass mu explicitly");
}

std::array<std::array<int, 3>, 4> level_conditions(Regime r, int m, int k)
{
    if (r == Regime::kFuchsian) {
        return {{{0, m - 1 + k, 2}, {1, 2 * m - 2 + k, 2}, {0, 2 * m - 2 + k, 3}, {1, 2 * m - 2 + k, 3}}};
    }
    return {{{0, k, 2}, {1, k, 2}, {0, k, 3}, {1, k, 3}}};
}

int top_level(Regime r, int m, int order)
{
    return r == Regime::kFuchsian ? order - m - 1 : order - 2;
}

namespace {

bool within(const std::array<int, 3>& abc, int order)
{
    return abc[0] + abc[1] + abc[2] <= order;
}

void expect(MembershipResult& r, const SingularODE& e, const std::array<int, 3>& abc, const GaussRat& v)
{
    if (!within(abc, e.order())) {
        return;
    }
    GaussRat got = e.Phi_abc(abc[0], abc[1], abc[2]);
    if (got != v) {
        r.ok = false;
        r.violations.push_back(label(abc) + " = " + got.to_string() + ", expected " + v.to_string());
    }
}

} // namespace

MembershipResult in_D1(const SingularODE& e)
{
    MembershipResult r;
    if (!e.is_normalized()) {
        r.ok = false;
        r.violations.push_back("Phi is not O(zeta^2)");
    }
    for (int j = 1; j <= e.order(); ++j) {
        for (const auto& abc : level_conditions(Regime::kM1, e.m, j)) {
            expect(r, e, abc, GaussRat(0));
        }
    }
    return r;
}

MembershipResult in_Dm(const SingularODE& e, const std::array<mpq_class, 2>& sigma)
{
    const int m = e.m;
    MembershipResult r;
    if (!e.is_normalized()) {
        r.ok = false;
        r.violations.push_back("Phi is not O(zeta^2)");
    }
    for (int j = 1; j <= e.order(); ++j) {
        expect(r, e, {0, j, 2}, GaussRat(j == m - 1 ? m : 0));
        expect(r, e, {1, j, 2}, GaussRat(0));
        expect(r, e, {0, j, 3}, GaussRat(0));
        if (j == m - 1) {
            continue;
        }
        GaussRat v(0);
        if (j == 2 * m - 2) {
            v = GaussRat(sigma[0]);
        } else if (j == 3 * m - 3) {
            v = GaussRat(sigma[1]);
        }
        expect(r, e, {1, j, 3}, v);
    }
    return r;
}

MembershipResult in_Fuchsian_space(const SingularODE& e, const mpq_class& sigma)
{
    const int m = e.m;
    MembershipResult r;
    if (!e.is_normalized()) {
        r.ok = false;
        r.violations.push_back("Phi is not O(zeta^2)");
    }
    for (int j = 0; j <= e.order(); ++j) {
        if (j != m - 1) {
            expect(r, e, {0, j, 2}, GaussRat(0));
        }
        if (j == 2 * m - 2) {
            continue;
        }
        expect(r, e, {1, j, 2}, GaussRat(0));
        expect(r, e, {0, j, 3}, GaussRat(0));
        expect(r, e, {1, j, 3}, GaussRat(j == 3 * m - 3 ? sigma : mpq_class(0)));
    }
    return r;
}

namespace {

// Lowest w-degree allowed for Phi_{kl} in a Fuchsian ODE (0 when unconstrained).
int fuchsian_ode_bound(int m, int k, int l)
{
    if (k == 0 && l == 2) {
        return m - 1;
    }
    if ((k == 0 || k == 1) && (l == 2 || l == 3)) {
        return 2 * m - 2;
    }
    if (k == 0 && l >= 4 && l <= 2 * m + 1) {
        return 2 * m - l + 2;
    }
    if (l == 2 && k >= 2 && k <= 2 * m + 1) {
        return 2 * m - k;
    }
    if (k >= 1 && l >= 3 && k + l >= 5 && k + l <= 2 * m + 2) {
        return 2 * m - k - l + 3;
    }
    return 0;
}

} // namespace

MembershipResult fuchsian_check_ode(const SingularODE& e)
{
    MembershipResult r;
    for (const auto& [ex, c] : e.Phi.terms()) {
        int bound = fuchsian_ode_bound(e.m, ex[0], ex[2]);
        if (ex[1] < bound) {
            r.ok = false;
            std::ostringstream os;
            os << "ord Phi_{" << ex[0] << "," << ex[2] << "} < " << bound << " (term z^" << ex[0] << " w^" << ex[1]
               << " zeta^" << ex[2] << ")";
            r.violations.push_back(os.str());
        }
    }
    return r;
}

namespace {

struct Plan {
    Regime regime = Regime::kM1;
    int m = 1;
    std::array<mpq_class, 2> sigma;
    mpq_class sigma_fuchsian = 0;
    mpq_class tau = 0;

    // Target of row i at level k; nullopt when the coefficient stays free.
    std::optional<GaussRat> target(int k, int i) const
    {
        if (regime == Regime::kM1) {
            return GaussRat(0);
        }
        if (regime == Regime::kFuchsian) {
            if (i == 3 && k == m - 1) {
                return GaussRat(sigma_fuchsian);
            }
            return GaussRat(0);
        }
        if (i == 0 && k == m - 1) {
            return GaussRat(m);
        }
        if (i == 3) {
            if (k == m - 1) {
                return std::nullopt;
            }
            if (k == 2 * m - 2) {
                return GaussRat(sigma[0]);
            }
            if (k == 3 * m - 3) {
                return GaussRat(sigma[1]);
            }
        }
        return GaussRat(0);
    }

    std::optional<GaussRat> pin(int k, int comp) const
    {
        if (regime == Regime::kMGeneral && k == m - 1 && comp == kG0) {
            return GaussRat(tau);
        }
        return std::nullopt;
    }
};

SingularODE normalized_at(const SingularODE& e, const CauchyData& y, int degree)
{
    SingularODE et{e.m, with_order(e.Phi, degree)};
    return transform_ode(et, cauchy_extend(et, truncated(y, degree)));
}

std::vector<GaussRat> read_rows(const SingularODE& n, const std::vector<std::array<int, 3>>& rows)
{
    std::vector<GaussRat> out;
    out.reserve(rows.size());
    for (const auto& abc : rows) {
        out.push_back(n.Phi_abc(abc[0], abc[1], abc[2]));
    }
    return out;
}

// First variation of the level-k conditions in the Cauchy coefficients at level
// k (all four rows and columns), when it is known in closed form.
using JacobianFn = std::function<std::optional<Matrix>(int k)>;

struct LevelRows {
    std::vector<std::array<int, 3>> rows;
    std::vector<GaussRat> targets;
    std::vector<int> row_index;
    int degree = 0;
};

LevelRows level_rows(const Plan& plan, int k, int n)
{
    LevelRows out;
    auto conds = level_conditions(plan.regime, plan.m, k);
    for (int i = 0; i < 4; ++i) {
        auto t = plan.target(k, i);
        if (!t || !within(conds[i], n)) {
            continue;
        }
        out.rows.push_back(conds[i]);
        out.targets.push_back(*t);
        out.row_index.push_back(i);
        out.degree = std::max(out.degree, conds[i][0] + conds[i][1] + conds[i][2]);
    }
    return out;
}

CauchyData solve_levels(const SingularODE& e, const Plan& plan, const JacobianFn& jacobian)
{
    const int n = e.order();
    CauchyData y = CauchyData::zero(n);
    const int top = top_level(plan.regime, plan.m, n);
    // Normalized ODE for the current y, exact through `have_degree`.
    std::optional<SingularODE> current;
    int have_degree = -1;
    for (int k = 1; k <= top; ++k) {
        LevelRows lr = level_rows(plan, k, n);
        std::vector<int> unknowns;
        bool pinned = false;
        for (int comp = 0; comp < 4; ++comp) {
            if (auto p = plan.pin(k, comp)) {
                add_monomial(component(y, comp), k, *p);
                pinned = pinned || !p->is_zero();
            } else {
                unknowns.push_back(comp);
            }
        }
        if (lr.rows.empty()) {
            continue;
        }
        if (pinned || !current || have_degree < lr.degree) {
            LevelRows next = level_rows(plan, k + 1, n);
            have_degree = std::max(lr.degree, next.degree);
            current = normalized_at(e, y, have_degree);
        }
        std::vector<GaussRat> base = read_rows(*current, lr.rows);
        const int nr = static_cast<int>(lr.rows.size());
        const int nu = static_cast<int>(unknowns.size());
        Matrix J(nr, nu);
        if (auto full = jacobian(k)) {
            for (int i = 0; i < nr; ++i) {
                for (int u = 0; u < nu; ++u) {
                    J.at(i, u) = full->at(lr.row_index[i], unknowns[u]);
                }
            }
        } else {
            for (int u = 0; u < nu; ++u) {
                CauchyData probe = y;
                add_monomial(component(probe, unknowns[u]), k, GaussRat(1));
                std::vector<GaussRat> v = read_rows(normalized_at(e, probe, lr.degree), lr.rows);
                for (int i = 0; i < nr; ++i) {
                    J.at(i, u) = v[i] - base[i];
                }
            }
        }
        std::vector<GaussRat> rhs(nr);
        for (int i = 0; i < nr; ++i) {
            rhs[i] = lr.targets[i] - base[i];
        }
        if (rank(J) < nr) {
            std::ostringstream os;
            os << "resonance at level k = " << k << " (" << regime_name(plan.regime)
               << " regime): the recursion matrix is singular";
            throw ResonanceError(k, os.str());
        }
        auto sol = nr == nu ? solve_square(J, rhs) : solve_particular(J, rhs);
        if (!sol) {
            throw InternalError("level " + std::to_string(k) + ": full-rank system reported unsolvable");
        }
        for (int u = 0; u < nu; ++u) {
            add_monomial(component(y, unknowns[u]), k, (*sol)[u]);
        }
        LevelRows next = level_rows(plan, k + 1, n);
        have_degree = std::max(lr.degree, k < top ? next.degree : 0);
        current = normalized_at(e, y, have_degree);
        if (read_rows(*current, lr.rows) != lr.targets) {
            std::ostringstream os;
            os << "level " << k << " of the " << regime_name(plan.regime)
               << " system is not affine in the level-" << k << " Cauchy coefficients";
            throw NonlinearLevelError(k, os.str());
        }
    }
    return y;
}

// Closed-form first variation for the m = 1 and general m > 1 regimes.
JacobianFn closed_form_jacobian(Regime r, const SingularODE& e)
{
    EulerCoefficients c = EulerCoefficients::of(e);
    const int m = e.m;
    PolyMatrix P = r == Regime::kM1 ? euler_poly_m1(c) : euler_poly_m(m, c);
    auto signs = first_variation_row_signs(r);
    return [P, signs](int k) -> std::optional<Matrix> {
        Matrix M = evaluate(P, GaussRat(k));
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                M.at(i, j) = M.at(i, j) * GaussRat(signs[i]);
            }
        }
        return M;
    };
}

JacobianFn probed_jacobian()
{
    return [](int) -> std::optional<Matrix> { return std::nullopt; };
}

void refuse_if_resonant(const ResonanceReport& r, int top)
{
    for (long k : r.resonant_ks) {
        if (k <= top) {
            std::ostringstream os;
            os << "resonant at k = " << k << " (" << regime_name(r.regime) << " regime)";
            throw ResonanceError(static_cast<int>(k), os.str());
        }
    }
}

SingularODE dilated_source(const SingularODE& e, const NormalFormParams& p, mpq_class& mu)
{
    mu = resolve_mu(e.m, p);
    if (sgn(mu) == 0 || p.lambda.is_zero()) {
        throw ParameterError("lambda and mu must be nonzero");
    }
    if (p.lambda == GaussRat(1) && mu == 1) {
        return e;
    }
    return dilate_ode(e, p.lambda, GaussRat(mu));
}

NormalFormResult finish(const SingularODE& src, const CauchyData& y, Regime regime, const NormalFormParams& p,
                        const mpq_class& mu, ResonanceReport report)
{
    NormalFormResult out;
    out.regime = regime;
    out.source = src;
    out.cauchy = y;
    out.map = cauchy_extend(src, y);
    out.normalized = transform_ode(src, out.map);
    out.params = p;
    out.mu = mu;
    out.resonance = std::move(report);
    return out;
}

void require_normalized(const SingularODE& e)
{
    if (!e.is_normalized()) {
        throw ValidationError("ODE is not normalized: Phi must be O(zeta^2)");
    }
}

void assert_member(const MembershipResult& r, const char* space)
{
    if (!r.ok) {
        throw InternalError(std::string("normal form fails membership in ") + space + ": " + r.violations.front());
    }
}

} // namespace

NormalFormResult normalize_m1(const SingularODE& e, const NormalFormParams& p)
{
    if (e.m != 1) {
        throw ParameterError("normalize_m1: requires m = 1");
    }
    require_normalized(e);
    mpq_class mu;
    SingularODE src = dilated_source(e, p, mu);
    ResonanceReport rep = resonance_m1(src);
    refuse_if_resonant(rep, top_level(Regime::kM1, 1, src.order()));
    Plan plan;
    plan.regime = Regime::kM1;
    plan.m = 1;
    CauchyData y = solve_levels(src, plan, closed_form_jacobian(Regime::kM1, src));
    NormalFormResult out = finish(src, y, Regime::kM1, p, mu, std::move(rep));
    assert_member(in_D1(out.normalized), "D_1");
    return out;
}

NormalFormResult normalize_m(const SingularODE& e, const NormalFormParams& p)
{
    if (e.m < 2) {
        throw ParameterError("normalize_m: requires m > 1");
    }
    require_normalized(e);
    const int m = e.m;
    mpq_class mu;
    SingularODE src = dilated_source(e, p, mu);
    ResonanceReport rep = resonance_m(src);
    int top = top_level(Regime::kMGeneral, m, src.order());
    if (!rep.matrix_44_invertible) {
        throw ResonanceError(rep.resonant_ks.front(), "resonant: the 4x4 matrix of the m > 1 regime is singular");
    }
    if (!rep.matrix_33_invertible && m - 1 <= top) {
        throw ResonanceError(m - 1, "resonant at k = m - 1: the upper-right 3x3 minor is singular");
    }
    Plan plan;
    plan.regime = Regime::kMGeneral;
    plan.m = m;
    plan.sigma = p.sigma ? *p.sigma : default_sigma(m);
    plan.tau = p.tau;
    CauchyData y = solve_levels(src, plan, closed_form_jacobian(Regime::kMGeneral, src));
    NormalFormResult out = finish(src, y, Regime::kMGeneral, p, mu, std::move(rep));
    out.params.sigma = plan.sigma;
    assert_member(in_Dm(out.normalized, plan.sigma), "D_m^sigma");
    if (m - 1 + 4 <= out.normalized.order()) {
        out.invariant_coeff = out.normalized.Phi_abc(1, m - 1, 3);
    }
    return out;
}

NormalFormResult normalize_fuchsian(const SingularODE& e, const NormalFormParams& p)
{
    if (e.m < 2) {
        throw ParameterError("normalize_fuchsian: requires m > 1");
    }
    require_normalized(e);
    const int m = e.m;
    mpq_class mu;
    SingularODE src = dilated_source(e, p, mu);
    MembershipResult fu = fuchsian_check_ode(src);
    if (!fu.ok) {
        throw ValidationError("ODE is not of Fuchsian type: " + fu.violations.front());
    }
    ResonanceReport rep;
    rep.regime = Regime::kFuchsian;
    try {
        rep = resonance_fuchsian(src);
    } catch (const TruncationError& ex) {
        // The level systems are still solved exactly; only the frozen matrix is
        // unavailable.
        rep.note = std::string("frozen Fuchsian matrix unavailable: ") + ex.what();
    }
    refuse_if_resonant(rep, top_level(Regime::kFuchsian, m, src.order()));
    Plan plan;
    plan.regime = Regime::kFuchsian;
    plan.m = m;
    plan.sigma_fuchsian = p.sigma_fuchsian;
    CauchyData y = solve_levels(src, plan, probed_jacobian());
    NormalFormResult out = finish(src, y, Regime::kFuchsian, p, mu, std::move(rep));
    assert_member(in_Fuchsian_space(out.normalized, p.sigma_fuchsian), "F_m^sigma");
    const SingularODE& nf = out.normalized;
    out.fuchsian_invariants = std::array<GaussRat, 4>{nf.Phi_abc(0, m - 1, 2), nf.Phi_abc(0, 2 * m - 2, 3),
                                                      nf.Phi_abc(1, 2 * m - 2, 2), nf.Phi_abc(1, 2 * m - 2, 3)};
    return out;
}

NormalFormResult normalize_ode(const SingularODE& e, const NormalFormParams& p)
{
    if (e.m == 1) {
        return normalize_m1(e, p);
    }
    if (fuchsian_check_ode(e).ok) {
        return normalize_fuchsian(e, p);
    }
    return normalize_m(e, p);
}

NormalFormResult normalize_hypersurface(const RealHypersurface& h, const NormalFormParams& p)
{
    ValidationReport v = validate(h);
    if (!v.ok) {
        throw ValidationError("invalid hypersurface: " + v.violations.front());
    }
    const int m = h.m;
    mpq_class mu = resolve_mu(m, p);
    RealHypersurface hd = (p.lambda == GaussRat(1) && mu == 1) ? h : apply_dilation(h, p.lambda, mu);
    SingularODE e = ode_of_hypersurface(hd);
    NormalFormParams q = p;
    q.lambda = GaussRat(1);
    q.mu = mpq_class(1);
    NormalFormResult out;
    bool fuchsian = m > 1 && is_fuchsian(hd).ok;
    if (m == 1) {
        out = normalize_m1(e, q);
    } else if (fuchsian) {
        out = normalize_fuchsian(e, q);
    } else {
        out = normalize_m(e, q);
    }
    out.params = p;
    if (out.regime == Regime::kMGeneral && !out.params.sigma) {
        out.params.sigma = default_sigma(m);
    }
    out.mu = mu;
    int sign = hd.eps;
    RealityReport real = reality_check(segre_of_ode(out.normalized, sign));
    if (!real.real) {
        throw InternalError("normalized ODE has no real structure: " + real.first_mismatch);
    }
    RealHypersurface nf = hypersurface_of_ode(out.normalized, sign);
    ValidationReport nv = validate(nf);
    if (!nv.ok) {
        throw InternalError("normalized hypersurface is invalid: " + nv.violations.front());
    }
    MembershipResult mem = fuchsian ? is_fuchsian_normal_form(nf) : is_normal_form(nf);
    if (!mem.ok) {
        throw InternalError("normalized hypersurface fails the normal-form test: " + mem.violations.front());
    }
    out.hypersurface = nf;
    return out;
}

namespace {

struct CoeffKey {
    int k, l, j;
};

std::vector<std::pair<CoeffKey, GaussRat>> coefficient_list(const RealHypersurface& h)
{
    std::vector<std::pair<CoeffKey, GaussRat>> out;
    for (const auto& [kl, s] : h.h) {
        for (const auto& [e, c] : s.terms()) {
            out.push_back({{kl.first, kl.second, e[0]}, c});
        }
    }
    return out;
}

// First coefficient (by total degree, then k, l, j) where a and b differ.
std::optional<std::array<int, 3>> first_difference(const RealHypersurface& a, const RealHypersurface& b)
{
    std::optional<std::array<int, 3>> best;
    auto better = [](const std::array<int, 3>& x, const std::array<int, 3>& y) {
        int dx = x[0] + x[1] + x[2];
        int dy = y[0] + y[1] + y[2];
        return dx != dy ? dx < dy : x < y;
    };
    auto scan = [&](const RealHypersurface& p, const RealHypersurface& q) {
        for (const auto& [key, c] : coefficient_list(p)) {
            GaussRat other = q.hkl(key.k, key.l).coeff({key.j});
            if (other != c) {
                std::array<int, 3> cand{key.k, key.l, key.j};
                if (!best || better(cand, *best)) {
                    best = cand;
                }
            }
        }
    };
    scan(a, b);
    scan(b, a);
    return best;
}

RealHypersurface truncated(const RealHypersurface& h, int order)
{
    RealHypersurface out;
    out.m = h.m;
    out.eps = h.eps;
    out.order = order;
    for (const auto& [kl, s] : h.h) {
        int o = order - kl.first - kl.second;
        if (o < 0) {
            continue;
        }
        MultiSeries t = with_order(s, o);
        if (!t.is_zero()) {
            out.h.emplace(kl, t);
        }
    }
    return out;
}

bool same(const RealHypersurface& a, const RealHypersurface& b)
{
    return a.eps == b.eps && !first_difference(a, b);
}

} // namespace

EquivalenceVerdict equivalence_test(const RealHypersurface& h1, const RealHypersurface& h2, const NormalFormParams& p)
{
    if (h1.m != h2.m) {
        throw ParameterError("equivalence_test: different m");
    }
    const int m = h1.m;
    if (m > 1 && is_fuchsian(h1).ok != is_fuchsian(h2).ok) {
        throw ParameterError("equivalence_test: one input is of Fuchsian type and the other is not");
    }
    NormalFormParams q = p;
    q.lambda = GaussRat(1);
    q.mu.reset();
    q.tau = 0;
    RealHypersurface n1 = *normalize_hypersurface(h1, q).hypersurface;
    RealHypersurface n2 = *normalize_hypersurface(h2, q).hypersurface;
    const int order = std::min(n1.order, n2.order);
    n1 = truncated(n1, order);
    n2 = truncated(n2, order);
    EquivalenceVerdict v;
    v.order = order;
    const int s = n2.eps * n1.eps;

    // Candidate mu from mu^{(m-1)(k+l-2) - 2j} = s^{k+l} |h2|^2 / |h1|^2.
    std::vector<mpq_class> mus;
    bool mu_fixed = false;
    bool impossible = false;
    auto c1 = coefficient_list(n1);
    for (const auto& [key, a] : c1) {
        GaussRat b = n2.hkl(key.k, key.l).coeff({key.j});
        if (b.is_zero()) {
            continue;
        }
        int e = (m - 1) * (key.k + key.l - 2) - 2 * key.j;
        if (e == 0) {
            continue;
        }
        mpq_class r = b.norm() / a.norm();
        if ((key.k + key.l) % 2 == 1) {
            r *= s;
        }
        std::vector<mpq_class> cand = real_roots(r, e);
        if (!mu_fixed) {
            mus = cand;
            mu_fixed = true;
        } else {
            std::vector<mpq_class> keep;
            for (const auto& x : mus) {
                if (std::find(cand.begin(), cand.end(), x) != cand.end()) {
                    keep.push_back(x);
                }
            }
            mus = keep;
        }
        if (mus.empty()) {
            impossible = true;
            break;
        }
    }
    if (!mu_fixed) {
        mus = {mpq_class(1), mpq_class(-1)};
    }
    std::vector<std::pair<GaussRat, mpq_class>> candidates;
    if (!impossible) {
        for (const auto& mu : mus) {
            mpq_class L = m == 1 ? mpq_class(1) : mpq_class(s * GaussRat(mu).pow(1 - m).re());
            if (m == 1 && s != 1) {
                continue;
            }
            if (sgn(L) <= 0) {
                continue;
            }
            // lambda^{l-k} = (h2/h1) / (s L^{1-l} mu^{-j}), smallest |l - k| first.
            std::optional<std::pair<CoeffKey, GaussRat>> pick;
            GaussRat pick_b;
            for (const auto& [key, a] : c1) {
                int d = key.l - key.k;
                GaussRat b = n2.hkl(key.k, key.l).coeff({key.j});
                if (d == 0 || b.is_zero()) {
                    continue;
                }
                if (!pick || std::abs(d) < std::abs(pick->first.l - pick->first.k)) {
                    pick = std::make_pair(key, a);
                    pick_b = b;
                }
            }
            std::vector<GaussRat> lams;
            if (pick) {
                const CoeffKey& key = pick->first;
                GaussRat scale = GaussRat(s) * GaussRat(L).pow(1 - key.l) * GaussRat(mu).pow(-key.j);
                GaussRat c = pick_b / pick->second / scale;
                lams = gaussian_roots(c, key.l - key.k);
            } else {
                lams = of_norm(L);
            }
            for (const auto& lam : lams) {
                if (lam.norm() == L) {
                    candidates.push_back({lam, mu});
                }
            }
        }
    }
    for (const auto& [lam, mu] : candidates) {
        RealHypersurface d;
        try {
            d = apply_dilation(n1, lam, mu);
        } catch (const ParameterError&) {
            continue;
        }
        if (same(d, n2)) {
            v.equivalent = true;
            v.lambda = lam;
            v.mu = mu;
            std::ostringstream os;
            os << "equivalent up to order " << order << ": the normal forms differ by the dilation lambda = " << lam
               << ", mu = " << rat_to_string(mu);
            v.message = os.str();
            return v;
        }
    }
    RealHypersurface best = n1;
    if (!candidates.empty()) {
        try {
            best = apply_dilation(n1, candidates.front().first, candidates.front().second);
        } catch (const ParameterError&) {
        }
    }
    v.distinguishing = first_difference(best, n2);
    std::ostringstream os;
    os << "inequivalent up to order " << order;
    if (best.eps != n2.eps) {
        os << ": the normal forms have different signs";
    }
    if (v.distinguishing) {
        const auto& d = *v.distinguishing;
        os << "; first distinguishing coefficient: u^" << d[2] << " in h_" << d[0] << d[1];
    }
    v.message = os.str();
    return v;
}

} // namespace crnf
