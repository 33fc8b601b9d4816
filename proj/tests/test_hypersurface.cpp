#include "doctest.h"

#include "crnf/errors.hpp"
#include "crnf/hypersurface.hpp"
#include "test_support.hpp"

using namespace crnf;
using namespace crnf::testing;

namespace {

const GaussRat I = GaussRat::i();

MultiSeries wpow(int order, int j, const GaussRat& c = GaussRat(1))
{
    return u_series("w", order, {{j, c}});
}

MultiSeries as_w(const MultiSeries& s)
{
    return rename(s, {"w"});
}

} // namespace

TEST_CASE("validate flags reality and index violations")
{
    auto model = RealHypersurface::model(1, 1, 6);
    CHECK(validate(model).ok);
    auto bad = model;
    bad.h[{2, 3}] = u_series("u", 1, {{0, GaussRat(1)}});
    bad.h[{3, 2}] = u_series("u", 1, {{0, GaussRat(2)}});
    auto rep = validate(bad);
    CHECK_FALSE(rep.ok);
    CHECK(rep.violations.front().find("reality") != std::string::npos);
    auto idx = model;
    idx.h[{2, 1}] = u_series("u", 3, {{0, GaussRat(1)}});
    CHECK_FALSE(validate(idx).ok);
    auto eps = model;
    eps.eps = 2;
    CHECK_FALSE(validate(eps).ok);
}

TEST_CASE("exponential form closed examples")
{
    SUBCASE("m = 2 model gives phi22 = (i/2) w")
    {
        auto ef = to_exponential(RealHypersurface::model(2, 1, 8));
        CHECK(ef.phikl(2, 2) == wpow(4, 1, GaussRat(mpq_class(0), mpq_class(1, 2))));
    }
    SUBCASE("m = 1 constant h22")
    {
        auto h = RealHypersurface::model(1, 1, 8);
        h.h[{2, 2}] = u_series("u", 4, {{0, GaussRat(3, 7)}});
        auto ef = to_exponential(h);
        CHECK(ef.phikl(2, 2) == wpow(4, 0, GaussRat(3, 7)));
        auto back = from_exponential(ef);
        CHECK(back.hkl(2, 2) == h.hkl(2, 2));
    }
    SUBCASE("h23 = u^2 gives phi23 = w^2")
    {
        for (int m = 1; m <= 3; ++m) {
            auto h = RealHypersurface::model(m, 1, 9);
            h.h[{2, 3}] = u_series("u", 4, {{2, GaussRat(1)}});
            h.h[{3, 2}] = u_series("u", 4, {{2, GaussRat(1)}});
            CHECK(to_exponential(h).phikl(2, 3) == wpow(4, 2));
        }
    }
}

TEST_CASE("exponential round trip on random hypersurfaces")
{
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        int m = 1 + trial % 3;
        int eps = (trial / 3) % 2 == 0 ? 1 : -1;
        auto h = random_hypersurface(rng, m, eps, 6 + trial % 3, 0.5);
        REQUIRE(validate(h).ok);
        auto back = from_exponential(to_exponential(h));
        REQUIRE(back.h == h.h);
        REQUIRE(back.eps == h.eps);
    }
}

TEST_CASE("low-order coefficient identities between h and phi")
{
    std::mt19937_64 rng(202);
    for (int trial = 0; trial < 100; ++trial) {
        int m = 1 + trial % 3;
        int n = 6 + trial % 5;
        auto h = random_hypersurface(rng, m, 1, n, 0.6, 8);
        auto ef = to_exponential(h);
        MultiSeries h22 = as_w(h.hkl(2, 2));
        GaussRat c22(mpq_class(0), mpq_class(m - 1, 2));
        REQUIRE(ef.phikl(2, 2) == h22 + wpow(n - 4, m - 1, c22));
        REQUIRE(ef.phikl(3, 2) == as_w(h.hkl(3, 2)));
        REQUIRE(ef.phikl(2, 3) == as_w(h.hkl(2, 3)));
        int o = n - 6;
        if (o < 0) {
            continue;
        }
        MultiSeries h22o = with_order(h22, o);
        MultiSeries w = wpow(o, 1);
        MultiSeries rhs = as_w(h.hkl(3, 3)) + GaussRat(mpq_class(0), mpq_class(m - 1)) * h22o * pow(w, m - 1) -
                          wpow(o, 2 * m - 2, GaussRat(mpq_class((m - 1) * (3 * m - 2), 8))) +
                          GaussRat(mpq_class(0), mpq_class(1, 2)) * with_order(diff(h22, 0), o) * pow(w, m) -
                          wpow(o, 2 * m - 2, GaussRat(1, 12));
        REQUIRE(ef.phikl(3, 3) == rhs);
    }
}

TEST_CASE("phi33 of the model is weighted homogeneous")
{
    // Under z -> t^{(1-m)} z, w -> t^2 w the model is invariant, which forces
    // phi33 of the model to be a multiple of w^{2m-2}.
    for (int m = 1; m <= 4; ++m) {
        auto ef = to_exponential(RealHypersurface::model(m, 1, 3 * m + 4));
        GaussRat c = -GaussRat(mpq_class((m - 1) * (3 * m - 2), 8)) - GaussRat(1, 12);
        REQUIRE(ef.phikl(3, 3) == wpow(3 * m - 2, 2 * m - 2, c));
    }
}

TEST_CASE("complex defining function normality and reality")
{
    std::mt19937_64 rng(303);
    for (int trial = 0; trial < 12; ++trial) {
        int m = 1 + trial % 3;
        auto h = random_hypersurface(rng, m, trial % 2 ? 1 : -1, 7, 0.5);
        auto cd = to_complex_defining(h);
        REQUIRE(cd.theta == to_complex_defining_implicit(h).theta);
        const MultiSeries& th = cd.theta;
        auto z = th.var("z");
        auto chi = th.var("chi");
        auto tau = th.var("tau");
        REQUIRE(substitute(th, {z, th.zero(), tau}) == tau);
        REQUIRE(substitute(th, {th.zero(), chi, tau}) == tau);
        // Theta(z, chi, conj-Theta(chi, z, w)) = w.
        MultiSeries thbar = substitute(th.conj(), {chi, z, tau});
        REQUIRE(substitute(th, {z, chi, thbar}) == tau);
    }
}

TEST_CASE("normal form predicates")
{
    auto model = RealHypersurface::model(1, 1, 8);
    CHECK(is_normal_form(model).ok);
    auto h = model;
    h.h[{2, 2}] = u_series("u", 4, {{1, GaussRat(1)}});
    auto r = is_normal_form(h);
    CHECK_FALSE(r.ok);
    CHECK(r.violations.front() == "h22 nonconstant");
    auto h3 = RealHypersurface::model(3, 1, 12);
    h3.h[{3, 3}] = u_series("u", 6, {{0, GaussRat(1)}, {2, GaussRat(2)}});
    CHECK(is_normal_form(h3).ok);
    h3.h[{3, 3}] = u_series("u", 6, {{0, GaussRat(1)}, {1, GaussRat(2)}});
    CHECK_FALSE(is_normal_form(h3).ok);
}

TEST_CASE("Fuchsian predicates")
{
    CHECK(is_fuchsian(RealHypersurface::model(2, 1, 10)).ok);
    std::mt19937_64 rng(404);
    CHECK(is_fuchsian(random_hypersurface(rng, 1, 1, 8)).ok);
    auto h = RealHypersurface::model(2, 1, 10);
    h.h[{2, 2}] = u_series("u", 6, {{0, GaussRat(1)}});
    CHECK_FALSE(is_fuchsian(h).ok);
    CHECK(is_fuchsian_normal_form(RealHypersurface::model(2, 1, 10)).ok);
    h.h[{2, 2}] = u_series("u", 6, {{1, GaussRat(3)}});
    CHECK(is_fuchsian_normal_form(h).ok);
    h.h[{2, 2}] = u_series("u", 6, {{1, GaussRat(1)}, {2, GaussRat(1)}});
    CHECK_FALSE(is_fuchsian_normal_form(h).ok);
}

TEST_CASE("dilations")
{
    std::mt19937_64 rng(505);
    auto h = random_hypersurface(rng, 1, 1, 8, 0.6);
    CHECK(apply_dilation(h, GaussRat(1), 1).h == h.h);
    // m = 1 requires |lambda| = 1; any nonzero real mu is allowed.
    GaussRat lam(mpq_class(3, 5), mpq_class(4, 5));
    auto d = apply_dilation(h, lam, mpq_class(2));
    CHECK(validate(d).ok);
    CHECK(apply_dilation(d, lam.inverse(), mpq_class(1, 2)).h == h.h);
    CHECK_THROWS_AS(apply_dilation(h, GaussRat(2), mpq_class(3)), ParameterError);
    // Even m: a negative mu flips eps.
    auto h2 = random_hypersurface(rng, 2, -1, 8, 0.6);
    auto d2 = apply_dilation(h2, GaussRat(1), mpq_class(-1));
    CHECK(d2.eps == 1);
    CHECK(validate(d2).ok);
    // Dilations preserve the normal form.
    auto nf = RealHypersurface::model(3, 1, 12);
    nf.h[{2, 2}] = u_series("u", 8, {{0, GaussRat(5)}});
    nf.h[{3, 3}] = u_series("u", 6, {{0, GaussRat(1)}, {2, GaussRat(2)}});
    CHECK(is_normal_form(apply_dilation(nf, GaussRat(2), mpq_class(1, 2))).ok);
}
