#include "doctest.h"

#include "crnf/errors.hpp"
#include "crnf/io.hpp"
#include "test_support.hpp"

using namespace crnf;
using namespace crnf::testing;

namespace {

bool same_family(const CoeffFamily& a, const CoeffFamily& b)
{
    auto nonzero = [](const CoeffFamily& f) {
        CoeffFamily out;
        for (const auto& [kl, s] : f) {
            if (!s.is_zero()) {
                out[kl] = s;
            }
        }
        return out;
    };
    CoeffFamily x = nonzero(a);
    CoeffFamily y = nonzero(b);
    if (x.size() != y.size()) {
        return false;
    }
    for (const auto& [kl, s] : x) {
        if (!y.count(kl) || !(y.at(kl) == s)) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("rationals and complex numbers")
{
    CHECK(rational_string(mpq_class(-3, 6)) == "-1/2");
    CHECK(rational_string(mpq_class(4)) == "4");
    CHECK(parse_rational("6/4") == mpq_class(3, 2));
    CHECK(parse_rational("-7") == mpq_class(-7));
    CHECK(parse_rational("+2/3") == mpq_class(2, 3));
    for (const char* bad : {"", "1/", "/2", "1/0", "1.5", "a", "1/-2", "--1"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_rational(bad), ValidationError);
    }
    GaussRat c(mpq_class(1, 3), mpq_class(-5, 2));
    CHECK(to_json(c) == Json::array({"1/3", "-5/2"}));
    CHECK(gauss_from_json(to_json(c)) == c);
    CHECK(gauss_from_json(Json("2/5")) == GaussRat(mpq_class(2, 5)));
    CHECK(gauss_from_json(Json(3)) == GaussRat(3));
    CHECK_THROWS_AS(gauss_from_json(Json::array({"1"})), ValidationError);
    CHECK_THROWS_AS(gauss_from_json(Json::array({1, 2})), ValidationError);
}

TEST_CASE("series documents round trip")
{
    std::mt19937_64 rng(31);
    MultiSeries s = random_series(rng, {"z", "w", "zeta"}, 6);
    Json j = to_json(s);
    CHECK(series_from_json(j) == s);
    CHECK(dump(to_json(series_from_json(j))) == dump(j));
    Json bad = j;
    bad["terms"].push_back(Json::object({{"exponents", {7, 0, 0}}, {"re", "1"}, {"im", "0"}}));
    CHECK_THROWS_AS(series_from_json(bad), ValidationError);
    bad = j;
    bad["terms"].push_back(Json::object({{"exponents", {1, 0}}, {"re", "1"}, {"im", "0"}}));
    CHECK_THROWS_AS(series_from_json(bad), ValidationError);
}

TEST_CASE("hypersurface, exponential and Segre documents round trip")
{
    std::mt19937_64 rng(32);
    for (int m = 1; m <= 3; ++m) {
        for (int eps : {1, -1}) {
            CAPTURE(m);
            CAPTURE(eps);
            RealHypersurface h = random_hypersurface(rng, m, eps, 9);
            Json jh = to_json(h);
            RealHypersurface h2 = hypersurface_from_json(jh);
            CHECK(h2.m == m);
            CHECK(h2.eps == eps);
            CHECK(h2.order == 9);
            CHECK(same_family(h2.h, h.h));
            CHECK(dump(to_json(h2)) == dump(jh));
            CHECK(document_kind(jh) == DocumentKind::kHypersurface);

            ExponentialForm e = to_exponential(h);
            Json je = to_json(e);
            ExponentialForm e2 = exponential_from_json(je);
            CHECK(same_family(e2.phi, e.phi));
            CHECK(dump(to_json(e2)) == dump(je));
            CHECK(document_kind(je) == DocumentKind::kExponential);

            SegreFamily s = segre_of_hypersurface(e);
            Json js = to_json(s);
            SegreFamily s2 = segre_from_json(js);
            CHECK(s2.sign == s.sign);
            CHECK(same_family(s2.phi, s.phi));
            CHECK(dump(to_json(s2)) == dump(js));
            CHECK(document_kind(js) == DocumentKind::kSegre);
        }
    }
}

TEST_CASE("ODE and Cauchy documents round trip")
{
    std::mt19937_64 rng(33);
    SingularODE e = random_normalized_ode(rng, 2, 7);
    Json j = to_json(e);
    SingularODE e2 = ode_from_json(j);
    CHECK(e2.m == 2);
    CHECK(e2.Phi == e.Phi);
    CHECK(dump(to_json(e2)) == dump(j));
    CHECK(document_kind(j) == DocumentKind::kODE);

    CauchyData y = random_cauchy(rng, 6);
    Json jy = to_json(y);
    CauchyData y2 = cauchy_from_json(jy, 6);
    CHECK(y2.f0 == y.f0);
    CHECK(y2.f1 == y.f1);
    CHECK(y2.g0 == y.g0);
    CHECK(y2.g1 == y.g1);
    CHECK_THROWS_AS(cauchy_from_json(jy, 0), ValidationError);
}

TEST_CASE("serialized text is canonical")
{
    RealHypersurface h;
    h.m = 1;
    h.eps = 1;
    h.order = 6;
    h.h[{2, 2}] = u_series("u", 2, {{0, GaussRat(mpq_class(3, 2))}, {2, GaussRat(mpq_class(0), mpq_class(-1))}});
    h.h[{3, 1}] = u_series("u", 2, {});
    CHECK(dump(to_json(h)) == R"({
  "m": 1,
  "eps": 1,
  "order": 6,
  "h": {
    "2,2": [
      [
        "3/2",
        "0"
      ],
      [
        "0",
        "0"
      ],
      [
        "0",
        "-1"
      ]
    ]
  }
}
)");
}

TEST_CASE("malformed documents are rejected")
{
    auto parse = [](const char* text) { return Json::parse(text); };
    CHECK_THROWS_AS(document_kind(parse("[1, 2]")), ValidationError);
    CHECK_THROWS_AS(document_kind(parse(R"({"m": 1})")), ValidationError);
    CHECK_THROWS_AS(hypersurface_from_json(parse(R"({"m": 1, "eps": 2, "order": 4, "h": {}})")), ValidationError);
    CHECK_THROWS_AS(hypersurface_from_json(parse(R"({"m": 0, "eps": 1, "order": 4, "h": {}})")), ValidationError);
    CHECK_THROWS_AS(hypersurface_from_json(parse(R"({"m": 1, "eps": 1, "h": {}})")), ValidationError);
    CHECK_THROWS_AS(hypersurface_from_json(parse(R"({"m": 1, "eps": 1, "order": 4, "h": {"2;2": []}})")),
                    ValidationError);
    CHECK_THROWS_AS(hypersurface_from_json(parse(R"({"m": 1, "eps": 1, "order": 4, "h": {"3,3": [["1", "0"]]}})")),
                    ValidationError);
    CHECK_THROWS_AS(
        hypersurface_from_json(parse(R"({"m": 1, "eps": 1, "order": 4, "h": {"2,2": [["1", "0"], [], []]}})")),
        ValidationError);
    CHECK_THROWS_AS(segre_from_json(parse(R"({"m": 1, "sign": 0, "order": 4, "phi": {}})")), ValidationError);
    CHECK_THROWS_AS(ode_from_json(parse(R"({"m": 1, "order": 4, "phi": [{"exponents": [0, 0, 2], "re": 1, "im": "0"}]})")),
                    ValidationError);
}
