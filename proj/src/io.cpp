#include "crnf/io.hpp"

#include "crnf/errors.hpp"

#include <algorithm>

namespace crnf {

namespace {

int require_int(const Json& j, const char* key)
{
    if (!j.contains(key) || !j.at(key).is_number_integer()) {
        throw ValidationError(std::string("JSON: missing integer field \"") + key + "\"");
    }
    return j.at(key).get<int>();
}

const Json& require(const Json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key)) {
        throw ValidationError(std::string("JSON: missing field \"") + key + "\"");
    }
    return j.at(key);
}

// Dense coefficient list of a one-variable series, trailing zeros dropped.
Json dense_list(const MultiSeries& s)
{
    Json out = Json::array();
    int last = -1;
    for (const auto& [e, c] : s.terms()) {
        last = std::max(last, e[0]);
    }
    for (int j = 0; j <= last; ++j) {
        out.push_back(to_json(s.coeff({j})));
    }
    return out;
}

MultiSeries from_dense_list(const Json& list, const std::string& var, int order)
{
    if (!list.is_array()) {
        throw ValidationError("JSON: coefficient list must be an array");
    }
    if (static_cast<int>(list.size()) > order + 1) {
        throw ValidationError("JSON: coefficient list longer than the truncation order allows");
    }
    std::vector<std::pair<Exponents, GaussRat>> terms;
    for (std::size_t j = 0; j < list.size(); ++j) {
        GaussRat c = gauss_from_json(list[j]);
        if (!c.is_zero()) {
            terms.push_back({{static_cast<int>(j)}, c});
        }
    }
    return MultiSeries::from_terms({var}, order, terms);
}

Json family_to_json(const CoeffFamily& f)
{
    Json out = Json::object();
    for (const auto& [kl, s] : f) {
        if (s.is_zero()) {
            continue;
        }
        out[std::to_string(kl.first) + "," + std::to_string(kl.second)] = dense_list(s);
    }
    return out;
}

KL parse_kl(const std::string& key)
{
    auto comma = key.find(',');
    try {
        if (comma == std::string::npos) {
            throw std::invalid_argument(key);
        }
        std::size_t used1 = 0;
        std::size_t used2 = 0;
        int k = std::stoi(key.substr(0, comma), &used1);
        int l = std::stoi(key.substr(comma + 1), &used2);
        if (used1 != comma || used2 != key.size() - comma - 1) {
            throw std::invalid_argument(key);
        }
        return {k, l};
    } catch (const std::logic_error&) {
        throw ValidationError("JSON: bad coefficient key \"" + key + "\" (expected \"k,l\")");
    }
}

CoeffFamily family_from_json(const Json& j, const std::string& var, int order)
{
    if (!j.is_object()) {
        throw ValidationError("JSON: coefficient family must be an object");
    }
    CoeffFamily out;
    for (const auto& [key, list] : j.items()) {
        KL kl = parse_kl(key);
        if (kl.first < 0 || kl.second < 0 || kl.first + kl.second > order) {
            throw ValidationError("JSON: coefficient " + key + " outside the truncation order");
        }
        MultiSeries s = from_dense_list(list, var, order - kl.first - kl.second);
        if (!s.is_zero()) {
            out[kl] = s;
        }
    }
    return out;
}

} // namespace

std::string rational_string(const mpq_class& q)
{
    mpq_class c = q;
    c.canonicalize();
    return c.get_str();
}

mpq_class parse_rational(const std::string& s)
{
    auto digits = [](const std::string& t, bool allow_sign) {
        std::size_t i = allow_sign && !t.empty() && (t[0] == '-' || t[0] == '+') ? 1 : 0;
        return i < t.size() && std::all_of(t.begin() + static_cast<long>(i), t.end(), ::isdigit);
    };
    auto slash = s.find('/');
    std::string num = s.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!digits(num, true) || !digits(den, false)) {
        throw ValidationError("JSON: bad rational \"" + s + "\"");
    }
    if (num[0] == '+') {
        num = num.substr(1);
    }
    mpz_class n(num);
    mpz_class d(den);
    if (d == 0) {
        throw ValidationError("JSON: zero denominator in \"" + s + "\"");
    }
    mpq_class q(n, d);
    q.canonicalize();
    return q;
}

Json to_json(const GaussRat& c) { return Json::array({rational_string(c.re()), rational_string(c.im())}); }

GaussRat gauss_from_json(const Json& j)
{
    if (j.is_string()) {
        return GaussRat(parse_rational(j.get<std::string>()));
    }
    if (j.is_number_integer()) {
        return GaussRat(j.get<long>());
    }
    if (!j.is_array() || j.size() != 2 || !j[0].is_string() || !j[1].is_string()) {
        throw ValidationError("JSON: complex number must be [\"re\", \"im\"]");
    }
    return GaussRat(parse_rational(j[0].get<std::string>()), parse_rational(j[1].get<std::string>()));
}

Json term_records(const MultiSeries& s)
{
    Json out = Json::array();
    for (const auto& [e, c] : s.terms()) {
        Json rec = Json::object();
        rec["exponents"] = e;
        rec["re"] = rational_string(c.re());
        rec["im"] = rational_string(c.im());
        out.push_back(rec);
    }
    return out;
}

MultiSeries series_from_records(const Json& records, const std::vector<std::string>& vars, int order)
{
    if (!records.is_array()) {
        throw ValidationError("JSON: term records must be an array");
    }
    std::vector<std::pair<Exponents, GaussRat>> terms;
    for (const auto& rec : records) {
        const Json& ex = require(rec, "exponents");
        if (!ex.is_array() || ex.size() != vars.size()) {
            throw ValidationError("JSON: exponent vector of the wrong length");
        }
        Exponents e;
        int deg = 0;
        for (const auto& x : ex) {
            if (!x.is_number_integer() || x.get<int>() < 0) {
                throw ValidationError("JSON: exponents must be nonnegative integers");
            }
            e.push_back(x.get<int>());
            deg += e.back();
        }
        if (deg > order) {
            throw ValidationError("JSON: term beyond the truncation order");
        }
        const Json& re = require(rec, "re");
        const Json& im = require(rec, "im");
        if (!re.is_string() || !im.is_string()) {
            throw ValidationError("JSON: term coefficients must be \"p/q\" strings");
        }
        terms.push_back({e, GaussRat(parse_rational(re.get<std::string>()), parse_rational(im.get<std::string>()))});
    }
    return MultiSeries::from_terms(vars, order, terms);
}

Json to_json(const MultiSeries& s)
{
    Json out = Json::object();
    out["vars"] = s.vars();
    out["order"] = s.order();
    out["terms"] = term_records(s);
    return out;
}

MultiSeries series_from_json(const Json& j)
{
    const Json& vars = require(j, "vars");
    if (!vars.is_array() || vars.empty()) {
        throw ValidationError("JSON: \"vars\" must be a nonempty array of names");
    }
    return series_from_records(require(j, "terms"), vars.get<std::vector<std::string>>(), require_int(j, "order"));
}

Json to_json(const RealHypersurface& h)
{
    Json out = Json::object();
    out["m"] = h.m;
    out["eps"] = h.eps;
    out["order"] = h.order;
    out["h"] = family_to_json(h.h);
    return out;
}

RealHypersurface hypersurface_from_json(const Json& j)
{
    RealHypersurface h;
    h.m = require_int(j, "m");
    h.eps = require_int(j, "eps");
    h.order = require_int(j, "order");
    if (h.m < 1 || (h.eps != 1 && h.eps != -1) || h.order < 0) {
        throw ValidationError("JSON: need m >= 1, eps = +-1 and order >= 0");
    }
    h.h = family_from_json(require(j, "h"), "u", h.order);
    return h;
}

Json to_json(const ExponentialForm& e)
{
    Json out = Json::object();
    out["m"] = e.m;
    out["eps"] = e.eps;
    out["order"] = e.order;
    out["phi"] = family_to_json(e.phi);
    return out;
}

ExponentialForm exponential_from_json(const Json& j)
{
    ExponentialForm e;
    e.m = require_int(j, "m");
    e.eps = require_int(j, "eps");
    e.order = require_int(j, "order");
    if (e.m < 1 || (e.eps != 1 && e.eps != -1) || e.order < 0) {
        throw ValidationError("JSON: need m >= 1, eps = +-1 and order >= 0");
    }
    e.phi = family_from_json(require(j, "phi"), "w", e.order);
    return e;
}

Json to_json(const SegreFamily& s)
{
    Json out = Json::object();
    out["m"] = s.m;
    out["sign"] = s.sign;
    out["order"] = s.order;
    out["phi"] = family_to_json(s.phi);
    return out;
}

SegreFamily segre_from_json(const Json& j)
{
    SegreFamily s;
    s.m = require_int(j, "m");
    s.sign = require_int(j, "sign");
    s.order = require_int(j, "order");
    if (s.m < 1 || (s.sign != 1 && s.sign != -1) || s.order < 0) {
        throw ValidationError("JSON: need m >= 1, sign = +-1 and order >= 0");
    }
    s.phi = family_from_json(require(j, "phi"), "eta", s.order);
    return s;
}

Json to_json(const SingularODE& e)
{
    Json out = Json::object();
    out["m"] = e.m;
    out["order"] = e.order();
    out["phi"] = term_records(e.Phi);
    return out;
}

SingularODE ode_from_json(const Json& j)
{
    SingularODE e;
    e.m = require_int(j, "m");
    int order = require_int(j, "order");
    if (e.m < 1 || order < 0) {
        throw ValidationError("JSON: need m >= 1 and order >= 0");
    }
    e.Phi = series_from_records(require(j, "phi"), {"z", "w", "zeta"}, order);
    return e;
}

Json to_json(const CauchyData& y)
{
    Json out = Json::object();
    out["f0"] = dense_list(y.f0);
    out["f1"] = dense_list(y.f1);
    out["g0"] = dense_list(y.g0);
    out["g1"] = dense_list(y.g1);
    return out;
}

CauchyData cauchy_from_json(const Json& j, int order)
{
    return CauchyData{from_dense_list(require(j, "f0"), "w", order), from_dense_list(require(j, "f1"), "w", order),
                      from_dense_list(require(j, "g0"), "w", order), from_dense_list(require(j, "g1"), "w", order)};
}

DocumentKind document_kind(const Json& j)
{
    if (!j.is_object()) {
        throw ValidationError("JSON: top-level value must be an object");
    }
    if (j.contains("h")) {
        return DocumentKind::kHypersurface;
    }
    if (j.contains("sign")) {
        return DocumentKind::kSegre;
    }
    if (j.contains("phi") && j.at("phi").is_array()) {
        return DocumentKind::kODE;
    }
    if (j.contains("phi") && j.contains("eps")) {
        return DocumentKind::kExponential;
    }
    throw ValidationError("JSON: unrecognized document (expected a hypersurface, exponential form, Segre family or ODE)");
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

} // namespace crnf
