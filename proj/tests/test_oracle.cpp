#include "doctest.h"

#include "crnf/errors.hpp"
#include "crnf/oracle.hpp"
#include "test_support.hpp"

using namespace crnf;
using namespace crnf::testing;

namespace {

bool same_cauchy(const CauchyData& a, const CauchyData& b)
{
    return a.f0 == b.f0 && a.f1 == b.f1 && a.g0 == b.g0 && a.g1 == b.g1;
}

SingularODE ode_from(int m, int order, const std::vector<std::pair<Exponents, GaussRat>>& t)
{
    return SingularODE{m, MultiSeries::from_terms({"z", "w", "zeta"}, order, t)};
}

} // namespace

TEST_CASE("dense oracle on the m = 1 model")
{
    SingularODE e = ode_from(1, 6, {{{0, 0, 2}, GaussRat(1)}, {{1, 0, 3}, GaussRat(1, 2)}});
    CauchyData y = dense_solve_normalization(e, Regime::kM1);
    CHECK(y.f0.is_zero());
    CHECK(y.f1.is_zero());
    CHECK(y.g0.is_zero());
    CHECK(y.g1.is_zero());
}

TEST_CASE("dense oracle agrees with the level solvers")
{
    std::mt19937_64 rng(606);
    for (int m = 1; m <= 3; ++m) {
        CAPTURE(m);
        auto [e, r] = nonresonant_ode(rng, m, 5);
        CauchyData y = dense_solve_normalization(e, m == 1 ? Regime::kM1 : Regime::kMGeneral);
        CHECK(same_cauchy(y, r.cauchy));
    }
    for (int m = 2; m <= 3; ++m) {
        CAPTURE(m);
        SingularODE e = random_fuchsian_ode(rng, m, 6);
        CHECK(same_cauchy(dense_solve_normalization(e, Regime::kFuchsian), normalize_fuchsian(e).cauchy));
    }
}

TEST_CASE("dense oracle honours the parameters")
{
    std::mt19937_64 rng(17);
    auto [e, r] = nonresonant_ode(rng, 2, 5);
    NormalFormParams p;
    p.tau = mpq_class(-2);
    p.sigma = std::array<mpq_class, 2>{mpq_class(1, 3), mpq_class(0)};
    CHECK(same_cauchy(dense_solve_normalization(e, Regime::kMGeneral, p), normalize_m(e, p).cauchy));
}

TEST_CASE("dense oracle detects resonance at the same level")
{
    // alpha0 = 3: the m = 1 recursion is singular at k = 2.
    SingularODE e = ode_from(1, 6, {{{0, 0, 2}, GaussRat(3)}, {{1, 1, 2}, GaussRat(1)}});
    int level_solver = -1;
    int oracle = -1;
    try {
        normalize_m1(e);
    } catch (const ResonanceError& ex) {
        level_solver = ex.k();
    }
    try {
        dense_solve_normalization(e, Regime::kM1);
    } catch (const ResonanceError& ex) {
        oracle = ex.k();
    }
    CHECK(level_solver == 2);
    CHECK(oracle == 2);
}

TEST_CASE("dense oracle limits")
{
    std::mt19937_64 rng(1);
    CHECK_THROWS_AS(dense_solve_normalization(random_normalized_ode(rng, 1, 7), Regime::kM1), ParameterError);
    CHECK_THROWS_AS(dense_solve_normalization(random_normalized_ode(rng, 2, 5), Regime::kM1), ParameterError);
}

TEST_CASE("stacked system shape")
{
    std::mt19937_64 rng(4);
    SingularODE e = random_normalized_ode(rng, 1, 5, 0.9);
    DenseSystem s = dense_system(e, Regime::kM1, {}, CauchyData::zero(5));
    CHECK(s.jacobian.rows() == static_cast<int>(s.rows.size()));
    CHECK(s.jacobian.cols() == static_cast<int>(s.unknowns.size()));
    CHECK(s.rows.size() == s.targets.size());
    // At order 5: level 1 is complete, level 2 lacks Phi_{1,2,3}, level 3 has
    // only Phi_{0,3,2}.
    CHECK(s.rows.size() == 8);
    CHECK(s.unknowns.size() == 8);
}

TEST_CASE("residual certificates")
{
    std::mt19937_64 rng(8);
    SUBCASE("functor round trip")
    {
        SingularODE e = random_normalized_ode(rng, 2, 8, 0.6);
        SingularODE back = ode_of_segre(segre_of_ode(e, 1));
        ResidualCertificate c = residual_certificate(back.Phi, e.Phi);
        CHECK(c.holds());
        CHECK(c.verified_degree == 8);
        CHECK_FALSE(c.failing_term);
    }
    SUBCASE("corrupted coefficient")
    {
        SingularODE e = random_normalized_ode(rng, 1, 8, 0.6);
        MultiSeries bad = e.Phi + e.Phi.monomial({1, 2, 2}, GaussRat(1, 7));
        ResidualCertificate c = residual_certificate(bad, e.Phi);
        CHECK_FALSE(c.holds());
        CHECK(c.verified_degree == 4);
        REQUIRE(c.failing_term);
        CHECK(*c.failing_term == "(1/7) * z * w^2 * zeta^2");
    }
    SUBCASE("zero claim")
    {
        MultiSeries z({"z", "w"}, 5);
        CHECK(residual_certificate(z, z).verified_degree == 5);
    }
    SUBCASE("normalization")
    {
        auto [e, r] = nonresonant_ode(rng, 1, 7);
        CHECK(residual_certificate(r).holds());
        NormalFormResult forged = r;
        forged.normalized.Phi += forged.normalized.Phi.monomial({0, 3, 3}, GaussRat(1));
        CHECK(residual_certificate(forged).verified_degree == 5);
    }
}
