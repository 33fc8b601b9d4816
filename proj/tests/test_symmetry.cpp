#include "doctest.h"

#include "crnf/errors.hpp"
#include "crnf/normalform.hpp"
#include "crnf/symmetry.hpp"
#include "test_support.hpp"

using namespace crnf;
using namespace crnf::testing;

namespace {

VectorField field(const MultiSeries& P, const MultiSeries& Q, int m)
{
    VectorField L;
    L.m = m;
    L.order = P.order();
    L.P = P;
    L.Q = Q;
    return L;
}

PolyMatrix signed_rows(PolyMatrix M, const std::array<int, 4>& signs)
{
    for (int i = 0; i < 4; ++i) {
        for (auto& e : M[i]) {
            e = UPoly::constant(GaussRat(signs[i])) * e;
        }
    }
    return M;
}

// -w^{-m} times the (z^a zeta^b) coefficient of a residual, as a series in w.
MultiSeries residual_row(const MultiSeries& R, int m, int a, int b, int order)
{
    CoeffView view = coeff_view(R, {"z", "zeta"});
    auto it = view.find(Exponents{a, b});
    if (it == view.end()) {
        return MultiSeries({"w"}, order);
    }
    return with_order(-div_monomial(rename(it->second, {"w"}), {m}), order);
}

} // namespace

TEST_CASE("second prolongation of simple fields")
{
    MultiSeries ring({"z", "w"}, 6);
    MultiSeries zero({"z", "w"}, 6);
    SUBCASE("w d/dw")
    {
        Prolongation p = prolong2(field(zero, ring.var("w"), 1));
        CHECK(p.Q1 == p.Q1.var("w1"));
        CHECK(p.Q2 == p.Q2.var("w2"));
    }
    SUBCASE("z d/dz")
    {
        Prolongation p = prolong2(field(ring.var("z"), zero, 1));
        CHECK(p.Q1 == -p.Q1.var("w1"));
        CHECK(p.Q2 == GaussRat(-2) * p.Q2.var("w2"));
    }
    SUBCASE("zero field")
    {
        Prolongation p = prolong2(field(zero, zero, 1));
        CHECK(p.Q1.is_zero());
        CHECK(p.Q2.is_zero());
    }
}

TEST_CASE("vector field shape")
{
    MultiSeries ring({"z", "w"}, 6);
    CHECK_NOTHROW(field(ring.zero(), ring.var("w") * ring.var("w"), 2).validate());
    CHECK_THROWS_AS(field(ring.zero(), ring.var("z"), 1).validate(), ValidationError);
    CHECK_THROWS_AS(field(ring.zero(), ring.var("z") * ring.var("w"), 2).validate(), ValidationError);
}

TEST_CASE("tangency residual agrees with the linear system")
{
    std::mt19937_64 rng(8);
    for (int m = 1; m <= 2; ++m) {
        CAPTURE(m);
        SingularODE e = random_normalized_ode(rng, m, m + 9, 0.7);
        LinearSystem s = symmetry_linear_system(e);
        CHECK(s.order == e.order() - 6 - m);
        CauchyData y = random_cauchy(rng, e.order(), 0.6);
        VectorField L = VectorField::from_cauchy(e, y);
        CHECK_NOTHROW(L.validate());
        MultiSeries R = tangency_residual(L, e);
        // The field keeps the ODE normalized to first order.
        CoeffView by_zeta = coeff_view(R, {"zeta"});
        CHECK((by_zeta.count(Exponents{0}) == 0 || by_zeta.at(Exponents{0}).is_zero()));
        CHECK((by_zeta.count(Exponents{1}) == 0 || by_zeta.at(Exponents{1}).is_zero()));
        auto rows = s.apply(y);
        const int pattern[4][2] = {{0, 2}, {1, 2}, {0, 3}, {1, 3}};
        for (int i = 0; i < 4; ++i) {
            CHECK(residual_row(R, m, pattern[i][0], pattern[i][1], s.order) == with_order(rows[i], s.order));
        }
        // Zero Cauchy data gives the zero field, which is a symmetry.
        VectorField L0 = VectorField::from_cauchy(e, CauchyData::zero(e.order()));
        CHECK(tangency_residual(L0, e).is_zero());
    }
}

TEST_CASE("tangency residual is the first variation along the flow")
{
    // Phi(t) for the map with Cauchy data t Y: the t-linear part of Phi(t)
    // equals -R / w^m.  The central stencil below is exact on polynomials of
    // degree at most 4 in t.
    std::mt19937_64 rng(21);
    const int m = 1;
    SingularODE e = random_normalized_ode(rng, m, 7, 0.7);
    CauchyData y = random_cauchy(rng, e.order() + 2, 0.5);
    auto scaled = [&](const GaussRat& t) {
        CauchyData z{y.f0 * t, y.f1 * t, y.g0 * t, y.g1 * t};
        return transform_ode(e, cauchy_extend(e, z)).Phi;
    };
    GaussRat h(1, 10);
    // f'(0) = (8 (f(h) - f(-h)) - (f(2h) - f(-2h))) / (12 h).
    MultiSeries d = (GaussRat(8) * (scaled(h) - scaled(-h)) - (scaled(GaussRat(2) * h) - scaled(GaussRat(-2) * h))) *
                    (GaussRat(1) / (GaussRat(12) * h));
    VectorField L = VectorField::from_cauchy(e, y);
    MultiSeries R = tangency_residual(L, e);
    // Compare the zeta^2 and zeta^3 coefficients at low degree, where the
    // transform is a polynomial of degree at most 4 in t.
    int nontrivial = 0;
    for (const auto& [a, b] : std::vector<std::pair<int, int>>{{0, 2}, {1, 2}, {0, 3}}) {
        MultiSeries lhs = residual_row(R, m, a, b, 1);
        nontrivial += !lhs.is_zero();
        CoeffView view = coeff_view(d, {"z", "zeta"});
        MultiSeries rhs = view.count(Exponents{a, b}) ? with_order(rename(view.at(Exponents{a, b}), {"w"}), 1)
                                                       : MultiSeries({"w"}, 1);
        CHECK(lhs == rhs);
    }
    CHECK(nontrivial > 0);
}

TEST_CASE("frozen matrices reproduce the recursion matrices")
{
    std::mt19937_64 rng(12);
    SUBCASE("m = 1")
    {
        SingularODE e = random_normalized_ode(rng, 1, 10, 0.8);
        PolyMatrix F = frozen_matrix(symmetry_linear_system(e), {0, 0, 0, 0});
        CHECK(F == signed_rows(euler_poly_m1(EulerCoefficients::of(e)), first_variation_row_signs(Regime::kM1)));
    }
    SUBCASE("m = 2 general regime")
    {
        SingularODE e = random_normalized_ode(rng, 2, 11, 0.8);
        PolyMatrix F = frozen_matrix(symmetry_linear_system(e), {0, 0, 0, 0});
        CHECK(F == euler_poly_m(2, EulerCoefficients::of(e)));
    }
    SUBCASE("m = 2 Fuchsian regime")
    {
        const int m = 2;
        SingularODE e = ode_of_hypersurface(random_fuchsian_hypersurface(rng, m, 1, 3 * m + 10, 0.9));
        REQUIRE(fuchsian_check_ode(e).ok);
        PolyMatrix F = frozen_matrix(symmetry_linear_system(e), {m - 1, 2 * m - 2, 2 * m - 2, 2 * m - 2});
        CHECK(F == signed_rows(fuchsian_poly(m, FuchsianCoefficients::of(e)),
                               first_variation_row_signs(Regime::kFuchsian)));
    }
    SUBCASE("insufficient order")
    {
        SingularODE e = random_normalized_ode(rng, 1, 7, 0.8);
        CHECK_THROWS_AS(frozen_matrix(symmetry_linear_system(e), {0, 0, 0, 0}), TruncationError);
        CHECK_THROWS_AS(symmetry_linear_system(random_normalized_ode(rng, 2, 6, 0.5)), TruncationError);
    }
}
