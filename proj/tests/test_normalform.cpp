#include "doctest.h"

#include "crnf/errors.hpp"
#include "crnf/normalform.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <numeric>

using namespace crnf;
using namespace crnf::testing;

namespace {

const GaussRat I = GaussRat::i();

UPoly K() { return UPoly::k(); }
UPoly C(long c) { return UPoly::constant(GaussRat(c)); }

// Determinant by the Leibniz expansion; independent of the elimination code.
UPoly leibniz(const PolyMatrix& a)
{
    const int n = static_cast<int>(a.size());
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    UPoly out;
    do {
        int inversions = 0;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                inversions += p[i] > p[j];
            }
        }
        UPoly term = C(inversions % 2 ? -1 : 1);
        for (int i = 0; i < n; ++i) {
            term = term * a[i][p[i]];
        }
        out = out + term;
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

UPoly power(const UPoly& p, int e)
{
    UPoly out = C(1);
    for (int i = 0; i < e; ++i) {
        out = out * p;
    }
    return out;
}

EulerCoefficients zero_coefficients()
{
    EulerCoefficients c;
    for (GaussRat* v : {&c.alpha0, &c.alpha1, &c.alpha2, &c.beta0, &c.beta1, &c.beta2, &c.gamma0, &c.gamma1}) {
        *v = GaussRat(0);
    }
    return c;
}

EulerCoefficients random_coefficients(std::mt19937_64& rng)
{
    EulerCoefficients c;
    for (GaussRat* v : {&c.alpha0, &c.alpha1, &c.alpha2, &c.beta0, &c.beta1, &c.beta2, &c.gamma0, &c.gamma1}) {
        *v = random_rat(rng);
    }
    return c;
}

SingularODE model_ode(int m, int order)
{
    GaussRat c = GaussRat(mpq_class((m - 1) * (m + 2), 4)) + GaussRat(1, 2);
    std::vector<std::pair<Exponents, GaussRat>> t{{{0, m - 1, 2}, GaussRat(m)}, {{1, 2 * m - 2, 3}, c}};
    return SingularODE{m, MultiSeries::from_terms({"z", "w", "zeta"}, order, t)};
}

bool is_zero_cauchy(const CauchyData& y)
{
    return y.f0.is_zero() && y.f1.is_zero() && y.g0.is_zero() && y.g1.is_zero();
}

} // namespace

TEST_CASE("m = 1 recursion determinants")
{
    SUBCASE("alpha0 = 1, everything else zero")
    {
        EulerCoefficients c = zero_coefficients();
        c.alpha0 = GaussRat(1);
        PolyMatrix M = euler_poly_m1(c);
        CHECK(leibniz(M) == C(3) * power(K(), 8));
        CHECK(determinant(M) == leibniz(M));
    }
    SUBCASE("alpha0 = 3 has the single positive root 2")
    {
        EulerCoefficients c = zero_coefficients();
        c.alpha0 = GaussRat(3);
        PolyMatrix M = euler_poly_m1(c);
        UPoly expect = C(3) * power(K(), 4) * power(K() - C(2), 2) * power(K() + C(2), 2);
        CHECK(leibniz(M) == expect);
        CHECK(positive_integer_roots(leibniz(M)) == std::vector<long>{2});
    }
    SUBCASE("all constants zero")
    {
        PolyMatrix M = euler_poly_m1(zero_coefficients());
        UPoly expect = C(3) * power(K(), 4) * power(K() + C(1), 2) * power(K() - C(1), 2);
        CHECK(leibniz(M) == expect);
    }
    SUBCASE("random constants: degree 8, reduced degree 7")
    {
        std::mt19937_64 rng(91);
        for (int t = 0; t < 5; ++t) {
            EulerCoefficients c = random_coefficients(rng);
            PolyMatrix M = euler_poly_m1(c);
            UPoly d = leibniz(M);
            CHECK(determinant(M) == d);
            CHECK(d.degree() == 8);
            CHECK(d.coeff(0).is_zero());
            CHECK(d.coeff(8) == GaussRat(3));
            for (int k = 1; k <= 4; ++k) {
                CHECK(build_euler_matrix_m1(k, c).entries == evaluate(M, GaussRat(k)));
            }
        }
    }
}

TEST_CASE("m = 1 resonance report")
{
    SingularODE e = model_ode(1, 8);
    ResonanceReport r = resonance_m1(e);
    REQUIRE(r.det_poly);
    REQUIRE(r.reduced_det_poly);
    CHECK(*r.det_poly == leibniz(euler_poly_m1(EulerCoefficients::of(e))));
    CHECK(r.det_poly->degree() == 8);
    CHECK(r.reduced_det_poly->degree() == 7);
    CHECK_FALSE(r.resonant());
}

TEST_CASE("m > 1 recursion matrices")
{
    std::mt19937_64 rng(17);
    for (int m = 2; m <= 4; ++m) {
        EulerCoefficients c = random_coefficients(rng);
        EulerMatrix s = build_euler_matrices_m(m - 1, m, c);
        CHECK(s.regime == Regime::kMSpecial);
        for (int i = 0; i < 4; ++i) {
            CHECK(s.entries.at(i, 0).is_zero());
        }
        EulerMatrix g = build_euler_matrices_m(m + 2, m, c);
        CHECK(g.regime == Regime::kMGeneral);
        CHECK(g.entries.at(0, 0) == c.alpha0 * GaussRat(3));
        CHECK(g.entries.at(3, 1) == GaussRat(2) * c.beta0 * c.alpha0 + GaussRat(4) * c.gamma1);
        CHECK(g.entries.at(0, 3).is_zero());
        CHECK(g.entries.at(3, 3).is_zero());
    }
}

TEST_CASE("m > 1 resonance")
{
    SUBCASE("the model is resonant")
    {
        for (int m = 2; m <= 3; ++m) {
            ResonanceReport r = resonance_m(model_ode(m, 3 * m + 3));
            CHECK(r.resonant());
            CHECK_FALSE(r.matrix_33_invertible);
        }
    }
    SUBCASE("the 3x3 minor is singular when beta0 = beta1 = gamma0 = alpha1 = 0")
    {
        std::vector<std::pair<Exponents, GaussRat>> t{
            {{0, 0, 2}, GaussRat(5)}, {{2, 0, 2}, GaussRat(1)}, {{0, 0, 4}, GaussRat(2)}, {{1, 0, 4}, GaussRat(3)}};
        SingularODE e{2, MultiSeries::from_terms({"z", "w", "zeta"}, 8, t)};
        ResonanceReport r = resonance_m(e);
        CHECK_FALSE(r.matrix_33_invertible);
        CHECK(std::find(r.resonant_ks.begin(), r.resonant_ks.end(), 1) != r.resonant_ks.end());
        CHECK_THROWS_AS(normalize_m(e), ResonanceError);
    }
}

TEST_CASE("Fuchsian recursion matrix")
{
    FuchsianCoefficients c;
    for (GaussRat* v : {&c.alpha0, &c.alpha0s, &c.alpha1, &c.alpha1s, &c.alpha2, &c.beta0, &c.beta1, &c.beta2,
                        &c.beta0s, &c.beta1s, &c.gamma0, &c.gamma1}) {
        *v = GaussRat(0);
    }
    for (int m = 2; m <= 4; ++m) {
        PolyMatrix M = fuchsian_poly(m, c);
        UPoly expect = K() * (K() + C(1)) * C(3) * (K() + C(m - 1)) * (K() + C(m)) * power(K(), 2) *
                       power(K() - C(1), 2);
        CHECK(leibniz(M) == expect);
        CHECK(determinant(M) == expect);
        CHECK(positive_integer_roots(expect) == std::vector<long>{1});
    }
}

TEST_CASE("level bookkeeping")
{
    CHECK(level_conditions(Regime::kM1, 1, 3)[3] == std::array<int, 3>{1, 3, 3});
    CHECK(level_conditions(Regime::kFuchsian, 3, 1)[0] == std::array<int, 3>{0, 3, 2});
    CHECK(level_conditions(Regime::kFuchsian, 3, 1)[1] == std::array<int, 3>{1, 5, 2});
    CHECK(top_level(Regime::kM1, 1, 10) == 8);
    CHECK(top_level(Regime::kFuchsian, 2, 10) == 7);
}

TEST_CASE("m = 1 normalization")
{
    std::mt19937_64 rng(2024);
    for (int n : {6, 8}) {
        auto [e, r] = nonresonant_ode(rng, 1, n);
        CAPTURE(n);
        CHECK(in_D1(r.normalized).ok);
        CHECK(r.normalized.order() == n);

        // Rerunning is deterministic.
        NormalFormResult again = normalize_m1(e);
        CHECK(again.normalized.Phi == r.normalized.Phi);
        CHECK(again.cauchy.f1 == r.cauchy.f1);

        // Idempotence: a normal form maps to itself by the identity.
        NormalFormResult idem = normalize_m1(r.normalized);
        CHECK(idem.normalized.Phi == r.normalized.Phi);
        CHECK(is_zero_cauchy(idem.cauchy));

        // Round trip through an arbitrary normalized map.
        CauchyData y = random_cauchy(rng, n, 0.5);
        SingularODE moved = transform_ode(r.normalized, cauchy_extend(r.normalized, y));
        CHECK(normalize_m1(moved).normalized.Phi == r.normalized.Phi);

        // A unimodular lambda dilates the normal form.
        NormalFormParams p;
        p.lambda = GaussRat(mpq_class(3, 5), mpq_class(4, 5));
        NormalFormResult rl = normalize_m1(e, p);
        CHECK(rl.normalized.Phi == dilate_ode(r.normalized, p.lambda, GaussRat(1)).Phi);
    }
}

TEST_CASE("m = 1 model is its own normal form")
{
    NormalFormResult r = normalize_m1(model_ode(1, 8));
    CHECK(r.normalized.Phi == model_ode(1, 8).Phi);
    CHECK(is_zero_cauchy(r.cauchy));
}

TEST_CASE("m = 1 parameters")
{
    NormalFormParams p;
    p.lambda = GaussRat(2);
    CHECK_THROWS_AS(normalize_m1(model_ode(1, 6), p), ParameterError);
    CHECK_THROWS_AS(normalize_m(model_ode(1, 6)), ParameterError);
}

TEST_CASE("m > 1 normalization")
{
    std::mt19937_64 rng(77);
    for (int m = 2; m <= 3; ++m) {
        for (int n : {6, 8}) {
            CAPTURE(m);
            CAPTURE(n);
            auto [e, r] = nonresonant_ode(rng, m, n);
            auto sigma = default_sigma(m);
            CHECK(in_Dm(r.normalized, sigma).ok);
            CHECK(r.normalized.Phi_abc(0, m - 1, 2) == GaussRat(m));
            REQUIRE(r.invariant_coeff);

            NormalFormResult idem = normalize_m(r.normalized);
            CHECK(idem.normalized.Phi == r.normalized.Phi);

            CauchyData y = random_cauchy_tau0(rng, m, n, 0.5);
            SingularODE moved = transform_ode(r.normalized, cauchy_extend(r.normalized, y));
            NormalFormResult back = normalize_m(moved);
            CHECK(back.normalized.Phi == r.normalized.Phi);

            // The invariant coefficient does not depend on the tau pin.
            NormalFormParams p;
            p.tau = mpq_class(1, 3);
            NormalFormResult rt = normalize_m(e, p);
            CHECK(in_Dm(rt.normalized, sigma).ok);
            CHECK(rt.cauchy.g0.coeff({m - 1}) == GaussRat(mpq_class(1, 3)));
            REQUIRE(rt.invariant_coeff);
            CHECK(*rt.invariant_coeff == *r.invariant_coeff);

            // Custom sigma.
            NormalFormParams ps;
            ps.sigma = std::array<mpq_class, 2>{mpq_class(2), mpq_class(-1, 2)};
            NormalFormResult rs = normalize_m(e, ps);
            CHECK(in_Dm(rs.normalized, *ps.sigma).ok);
        }
    }
}

TEST_CASE("m > 1 model: resonant in the general regime, fixed in the Fuchsian regime")
{
    for (int m = 2; m <= 3; ++m) {
        CHECK_THROWS_AS(normalize_m(model_ode(m, 3 * m + 3)), ResonanceError);
        NormalFormResult r = normalize_hypersurface(RealHypersurface::model(m, 1, 3 * m + 5));
        CHECK(r.regime == Regime::kFuchsian);
        CHECK_FALSE(r.resonance.resonant());
        REQUIRE(r.hypersurface);
        CHECK(r.hypersurface->h.empty());
        CHECK(is_zero_cauchy(r.cauchy));
    }
}

TEST_CASE("Fuchsian membership checks")
{
    std::mt19937_64 rng(5);
    for (int m = 2; m <= 3; ++m) {
        SingularODE e = random_fuchsian_ode(rng, m, 8);
        CHECK(fuchsian_check_ode(e).ok);
        // A constant in Phi_{02} breaks the Fuchsian vanishing order.
        SingularODE bad = e;
        bad.Phi += bad.Phi.monomial({0, 0, 2}, GaussRat(1));
        MembershipResult r = fuchsian_check_ode(bad);
        CHECK_FALSE(r.ok);
        CHECK_FALSE(r.violations.empty());
        CHECK_THROWS_AS(normalize_fuchsian(bad), ValidationError);
    }
}

TEST_CASE("Fuchsian normalization on the graded class")
{
    std::mt19937_64 rng(11);
    for (int m = 2; m <= 3; ++m) {
        for (int n : {6, 8}) {
            CAPTURE(m);
            CAPTURE(n);
            SingularODE e = random_fuchsian_ode(rng, m, n);
            NormalFormResult r = normalize_fuchsian(e);
            CHECK(r.regime == Regime::kFuchsian);
            CHECK(in_Fuchsian_space(r.normalized, 0).ok);
            REQUIRE(r.fuchsian_invariants);
            CHECK((*r.fuchsian_invariants)[0] == e.Phi_abc(0, m - 1, 2));

            CauchyData y = random_cauchy_tau0(rng, m, n, 0.5);
            SingularODE moved = transform_ode(r.normalized, cauchy_extend(r.normalized, y));
            CHECK(fuchsian_check_ode(moved).ok);
            NormalFormResult back = normalize_fuchsian(moved);
            CHECK(back.normalized.Phi == r.normalized.Phi);
            CHECK(*back.fuchsian_invariants == *r.fuchsian_invariants);

            NormalFormResult dispatched = normalize_ode(e);
            CHECK(dispatched.regime == Regime::kFuchsian);
        }
    }
}

TEST_CASE("Fuchsian inputs with a nonlinear first level are refused")
{
    std::mt19937_64 rng(3);
    int refused = 0;
    for (int t = 0; t < 6; ++t) {
        SingularODE e = random_fuchsian_ode(rng, 2, 8, 0.9, false);
        try {
            NormalFormResult r = normalize_fuchsian(e);
            CHECK(in_Fuchsian_space(r.normalized, 0).ok);
        } catch (const NonlinearLevelError& ex) {
            CHECK(ex.k() == 1);
            ++refused;
        } catch (const ResonanceError&) {
        }
    }
    CHECK(refused > 0);
}

TEST_CASE("hypersurface pipeline")
{
    std::mt19937_64 rng(99);
    SUBCASE("m = 1 model")
    {
        NormalFormResult r = normalize_hypersurface(RealHypersurface::model(1, 1, 8));
        REQUIRE(r.hypersurface);
        CHECK(r.hypersurface->h.empty());
    }
    for (int m = 1; m <= 2; ++m) {
        for (int eps : {1, -1}) {
            CAPTURE(m);
            CAPTURE(eps);
            auto [h, r] = nonresonant_hypersurface(rng, m, eps, 8);
            REQUIRE(r.hypersurface);
            CHECK(validate(*r.hypersurface).ok);
            CHECK(r.hypersurface->eps == eps);
            if (r.regime == Regime::kFuchsian) {
                CHECK(is_fuchsian_normal_form(*r.hypersurface).ok);
            } else {
                CHECK(is_normal_form(*r.hypersurface).ok);
            }
            CHECK(ode_of_hypersurface(*r.hypersurface).Phi == r.normalized.Phi);
        }
    }
}

TEST_CASE("equivalence of hypersurfaces")
{
    std::mt19937_64 rng(5);
    for (int m = 1; m <= 2; ++m) {
        CAPTURE(m);
        auto [h, r] = nonresonant_hypersurface(rng, m, 1, 8);
        EquivalenceVerdict self = equivalence_test(h, h);
        CHECK(self.equivalent);

        GaussRat lam = m == 1 ? GaussRat(mpq_class(3, 5), mpq_class(4, 5)) : GaussRat(mpq_class(1), mpq_class(1));
        mpq_class mu = m == 1 ? mpq_class(2) : mpq_class(1, 2);
        RealHypersurface hd = apply_dilation(h, lam, mu);
        EquivalenceVerdict v = equivalence_test(h, hd);
        CHECK(v.equivalent);
        CHECK(v.lambda.has_value());

        if (m == 2) {
            // mu < 0 flips the sign eps.
            RealHypersurface hn = apply_dilation(h, GaussRat(mpq_class(1), mpq_class(-1)), mpq_class(-1, 2));
            CHECK(hn.eps == -h.eps);
            EquivalenceVerdict vn = equivalence_test(h, hn);
            CHECK(vn.equivalent);
            REQUIRE(vn.mu.has_value());
            CHECK(sgn(*vn.mu) < 0);
        }

        RealHypersurface n1 = *r.hypersurface;
        RealHypersurface pert = n1;
        pert.h[{2, 4}] = pert.hkl(2, 4) + u_series("u", 2, {{1, GaussRat(1)}});
        pert.h[{4, 2}] = pert.hkl(2, 4).conj();
        EquivalenceVerdict w = equivalence_test(n1, pert);
        CHECK_FALSE(w.equivalent);
        REQUIRE(w.distinguishing.has_value());
        CHECK((*w.distinguishing)[0] + (*w.distinguishing)[1] == 6);
    }
}
