#include "doctest.h"

#include "crnf/errors.hpp"
#include "crnf/ode.hpp"
#include "test_support.hpp"
#include "transfer_identities.hpp"

using namespace crnf;
using namespace crnf::testing;

namespace {

const GaussRat I = GaussRat::i();

SingularODE model_ode(int m, int order)
{
    // w'' = w^m (m w^{m-1} zeta^2 + c z w^{2m-2} zeta^3), c = (m-1)(m+2)/4 + 1/2.
    GaussRat c = GaussRat(mpq_class((m - 1) * (m + 2), 4)) + GaussRat(1, 2);
    std::vector<std::pair<Exponents, GaussRat>> t{{{0, m - 1, 2}, GaussRat(m)}, {{1, 2 * m - 2, 3}, c}};
    return SingularODE{m, MultiSeries::from_terms({"z", "w", "zeta"}, order, t)};
}

} // namespace

TEST_CASE("ODE of the model hypersurfaces")
{
    for (int m = 1; m <= 3; ++m) {
        int n = 3 * m + 3;
        auto e = ode_of_hypersurface(RealHypersurface::model(m, 1, n + 2));
        CHECK(e.order() == n);
        CHECK(e.Phi == model_ode(m, n).Phi);
        auto back = hypersurface_of_ode(e, 1);
        CHECK(back.h.empty());
    }
}

TEST_CASE("coefficient accessors")
{
    auto e = model_ode(2, 8);
    CHECK(e.A(0) == w_mono(6, 1, GaussRat(2)));
    CHECK(e.B(1) == w_mono(4, 2, GaussRat(3, 2)));
    CHECK(e.C(0).is_zero());
    CHECK(e.Phi_abc(0, 1, 2) == GaussRat(2));
    CHECK(e.zeta_part(2) == MultiSeries::from_terms({"z", "w"}, 6, {{{0, 1}, GaussRat(2)}}));
    CHECK(e.is_normalized());
    auto bad = e;
    bad.Phi += bad.Phi.monomial({0, 3, 1});
    CHECK_FALSE(bad.is_normalized());
}

TEST_CASE("ODE and family functors are mutually inverse")
{
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 12; ++trial) {
        int m = 1 + trial % 3;
        int sign = trial % 2 ? 1 : -1;
        auto e = random_normalized_ode(rng, m, 6, 0.4);
        auto s = segre_of_ode(e, sign);
        CHECK(s.order == 8);
        CHECK(s.sign == sign);
        CHECK(ode_of_segre(s).Phi == e.Phi);
        CHECK(segre_of_ode(ode_of_segre(s), sign).phi == s.phi);
    }
}

TEST_CASE("family to ODE relations for low coefficients")
{
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 20; ++trial) {
        int m = 1 + trial % 3;
        int eps = trial % 2 ? 1 : -1;
        auto h = random_hypersurface(rng, m, eps, 8, 0.7, 8);
        auto s = segre_of_hypersurface(to_exponential(h));
        auto e = ode_of_segre(s);
        CHECK(check_family_ode_relations(s, e).empty());
        CHECK(check_h_ode_relations(h, e).empty());
    }
}

TEST_CASE("B1 constant term sits at w^(2m-2)")
{
    // A w^{3m-3} placement disagrees with the model for m > 1.
    for (int m = 2; m <= 3; ++m) {
        auto h = RealHypersurface::model(m, 1, 3 * m + 4);
        auto e = ode_of_hypersurface(h);
        CHECK(check_h_ode_relations(h, e).empty());
        CHECK_FALSE(check_h_ode_relations(h, e, true).empty());
    }
}

TEST_CASE("identity and composition of normalized maps")
{
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 9; ++trial) {
        int m = 1 + trial % 3;
        auto e = random_normalized_ode(rng, m, 5, 0.4);
        CHECK(transform_ode(e, NormalizedMap::identity(m, 7)).Phi == e.Phi);
        auto h1 = random_normalized_map(rng, m, 7);
        auto h2 = random_normalized_map(rng, m, 7);
        auto two_steps = transform_ode(transform_ode(e, h1), h2);
        auto one_step = transform_ode(e, compose(h1, h2));
        CHECK(two_steps.Phi == one_step.Phi);
    }
}

TEST_CASE("normalized map components")
{
    std::mt19937_64 rng(24);
    auto h = random_normalized_map(rng, 2, 6);
    CHECK_NOTHROW(h.validate());
    auto back = NormalizedMap::from_components(2, h.X(), h.W());
    CHECK(back.order == 4);
    CHECK(back.f == with_order(h.f, 4));
    CHECK(back.g == with_order(h.g, 4));
    CHECK(back.g0 == with_order(h.g0, 4));
    auto bad = h;
    bad.f += bad.f.monomial({1, 0});
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = h;
    bad.g += bad.g.monomial({2, 0});
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("Cauchy extension normalizes and preserves the low invariants")
{
    std::mt19937_64 rng(25);
    for (int trial = 0; trial < 12; ++trial) {
        int m = 1 + trial % 3;
        auto e = random_normalized_ode(rng, m, 6, 0.4);
        auto data = random_cauchy(rng, 8);
        data.f1 = random_w_series(rng, 8);
        auto h = cauchy_extend(e, data);
        CHECK(h.order == 8);
        CHECK_NOTHROW(h.validate());
        auto src = transform_ode(e, h);
        REQUIRE(src.is_normalized());
        for (auto [a, c] : {std::pair{0, 2}, {0, 3}, {1, 2}, {1, 3}}) {
            CHECK(src.Phi_abc(a, 0, c) == e.Phi_abc(a, 0, c));
        }
        // Cauchy data is reproduced.
        MultiSeries z = h.f.var("z");
        CHECK(rename(coeff_view(h.f, {"z"})[Exponents{0}], {"w"}) == with_order(data.f0, 8));
        CHECK(rename(coeff_view(h.g, {"z"})[Exponents{1}], {"w"}) == with_order(data.g1, 7));
    }
}

TEST_CASE("Cauchy data must vanish at the origin")
{
    auto e = model_ode(1, 5);
    auto data = CauchyData::zero(7);
    data.f0 = data.f0 + GaussRat(1);
    CHECK_THROWS_AS(cauchy_extend(e, data), ParameterError);
}

TEST_CASE("dilations of ODEs match dilations of hypersurfaces")
{
    std::mt19937_64 rng(26);
    struct Case {
        int m;
        GaussRat lambda;
        mpq_class mu;
    };
    std::vector<Case> cases{{1, GaussRat(mpq_class(3, 5), mpq_class(-4, 5)), mpq_class(5, 3)},
                            {2, GaussRat(1) + I, mpq_class(1, 2)},
                            {2, GaussRat(1) + I, mpq_class(-1, 2)},
                            {3, GaussRat(2), mpq_class(1, 2)}};
    for (const auto& c : cases) {
        auto h = random_hypersurface(rng, c.m, 1, 8, 0.6, 8);
        auto lhs = ode_of_hypersurface(apply_dilation(h, c.lambda, c.mu));
        auto rhs = dilate_ode(ode_of_hypersurface(h), c.lambda, GaussRat(c.mu));
        CHECK(lhs.Phi == rhs.Phi);
    }
    CHECK_THROWS_AS(dilate_ode(model_ode(1, 4), GaussRat(0), GaussRat(1)), ParameterError);
}

TEST_CASE("a transformed family maps onto the original")
{
    std::mt19937_64 rng(27);
    for (int m = 1; m <= 3; ++m) {
        auto e = random_normalized_ode(rng, m, 6, 0.4);
        auto h = cauchy_extend(e, random_cauchy(rng, 8));
        auto src = transform_ode(e, h);
        auto pm = recover_parameter_map(segre_of_ode(src, 1), segre_of_ode(e, 1), h.plane_map());
        CHECK(pm.certified_degree == 8);
    }
}

TEST_CASE("closed-form low coefficients agree with the ODE of a hypersurface")
{
    std::mt19937_64 rng(4242);
    for (int m = 1; m <= 3; ++m) {
        for (int eps : {1, -1}) {
            auto h = random_hypersurface(rng, m, eps, 9, 0.8);
            auto e = ode_of_hypersurface(h);
            auto t = transfer_from_h(h);
            CHECK(t.A0 == e.A(0));
            CHECK(t.A1 == e.A(1));
            CHECK(t.B0 == e.B(0));
            CHECK(t.B1 == e.B(1));
        }
    }
}

TEST_CASE("closed-form low coefficients on simple families")
{
    // m = 1, h22 = c constant: A0 = 1 - 2 i c.
    RealHypersurface h = RealHypersurface::model(1, 1, 8);
    GaussRat c(3, 2);
    h.h[{2, 2}] = u_series("u", 4, {{0, c}});
    auto t = transfer_from_h(h);
    CHECK(t.A0 == w_mono(t.A0.order(), 0, GaussRat(1) - GaussRat(2) * I * c));

    // Model: B1 is the constant term alone.
    for (int m = 1; m <= 3; ++m) {
        auto tm = transfer_from_h(RealHypersurface::model(m, 1, 3 * m + 5));
        GaussRat k = GaussRat(mpq_class((m - 1) * (m + 2), 4)) + GaussRat(1, 2);
        CHECK(tm.B1 == w_mono(tm.B1.order(), 2 * m - 2, k));
        CHECK(tm.A1.is_zero());
        CHECK(tm.B0.is_zero());
    }
}
