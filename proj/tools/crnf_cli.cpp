// Command-line front end: reads JSON documents, runs a pipeline and prints a
// report (JSON or text).  Exit codes: 0 success, 1 internal failure,
// 2 resonance or nonlinear refusal, 3 validation failure, 4 parameter error.

#include "crnf/errors.hpp"
#include "crnf/hypersurface.hpp"
#include "crnf/io.hpp"
#include "crnf/normalform.hpp"
#include "crnf/ode.hpp"
#include "crnf/oracle.hpp"
#include "crnf/segre.hpp"
#include "crnf/symmetry.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

using namespace crnf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitResonance = 2;
constexpr int kExitValidation = 3;
constexpr int kExitParameter = 4;
constexpr int kMaxOrder = 16;

struct Options {
    std::string command;
    std::vector<std::string> inputs;
    int order = 10;
    bool allow_large = false;
    std::string lambda = "1";
    std::string tau = "0";
    std::string sigma1;
    std::string sigma2;
    std::string fuchsian_sigma = "0";
    std::string format = "json";
    int jobs = 1;
    int sign = 1;
};

struct Outcome {
    int code = kExitOk;
    Json report;
};

// ---------------------------------------------------------------- inputs --

mpq_class rational_option(const std::string& s, const char* name)
{
    try {
        return parse_rational(s);
    } catch (const ValidationError&) {
        throw ParameterError(std::string("--") + name + ": expected a rational \"p/q\", got \"" + s + "\"");
    }
}

// "re" or "re,im".
GaussRat complex_option(const std::string& s, const char* name)
{
    auto comma = s.find(',');
    if (comma == std::string::npos) {
        return GaussRat(rational_option(s, name));
    }
    return GaussRat(rational_option(s.substr(0, comma), name), rational_option(s.substr(comma + 1), name));
}

NormalFormParams parameters(const Options& o, int m)
{
    NormalFormParams p;
    p.lambda = complex_option(o.lambda, "lambda");
    p.tau = rational_option(o.tau, "tau");
    p.sigma_fuchsian = rational_option(o.fuchsian_sigma, "fuchsian-sigma");
    if (!o.sigma1.empty() || !o.sigma2.empty()) {
        auto sigma = default_sigma(m);
        if (!o.sigma1.empty()) {
            sigma[0] = rational_option(o.sigma1, "sigma1");
        }
        if (!o.sigma2.empty()) {
            sigma[1] = rational_option(o.sigma2, "sigma2");
        }
        p.sigma = sigma;
    }
    return p;
}

Json read_document(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ParameterError("cannot open input file \"" + path + "\"");
    }
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& ex) {
        throw ValidationError("\"" + path + "\" is not valid JSON: " + ex.what());
    }
}

CoeffFamily cut(const CoeffFamily& f, int order)
{
    CoeffFamily out;
    for (const auto& [kl, s] : f) {
        if (kl.first + kl.second <= order) {
            out[kl] = with_order(s, order - kl.first - kl.second);
        }
    }
    return out;
}

// A parsed input, truncated to the requested order.
struct Document {
    DocumentKind kind = DocumentKind::kODE;
    std::optional<RealHypersurface> h;
    std::optional<ExponentialForm> exp;
    std::optional<SegreFamily> segre;
    std::optional<SingularODE> ode;

    int m() const
    {
        if (h) {
            return h->m;
        }
        if (exp) {
            return exp->m;
        }
        if (segre) {
            return segre->m;
        }
        return ode->m;
    }
    // Order of the equivalent hypersurface jet.
    int jet_order() const
    {
        if (h) {
            return h->order;
        }
        if (exp) {
            return exp->order;
        }
        if (segre) {
            return segre->order;
        }
        return ode->order() + 2;
    }
};

Document load(const std::string& path, int order)
{
    Json j = read_document(path);
    Document d;
    d.kind = document_kind(j);
    switch (d.kind) {
    case DocumentKind::kHypersurface: {
        RealHypersurface h = hypersurface_from_json(j);
        h.order = std::min(h.order, order);
        h.h = cut(h.h, h.order);
        d.h = h;
        break;
    }
    case DocumentKind::kExponential: {
        ExponentialForm e = exponential_from_json(j);
        e.order = std::min(e.order, order);
        e.phi = cut(e.phi, e.order);
        d.exp = e;
        break;
    }
    case DocumentKind::kSegre: {
        SegreFamily s = segre_from_json(j);
        s.order = std::min(s.order, order);
        s.phi = cut(s.phi, s.order);
        d.segre = s;
        break;
    }
    case DocumentKind::kODE: {
        SingularODE e = ode_from_json(j);
        d.ode = SingularODE{e.m, with_order(e.Phi, std::min(e.order(), order))};
        break;
    }
    }
    return d;
}

RealHypersurface require_hypersurface(const Document& d)
{
    if (d.h) {
        return *d.h;
    }
    if (d.exp) {
        return from_exponential(*d.exp);
    }
    throw ValidationError("this command needs a hypersurface or exponential-form input");
}

SegreFamily family_of(const Document& d, int sign)
{
    if (d.segre) {
        return *d.segre;
    }
    if (d.ode) {
        return segre_of_ode(*d.ode, sign);
    }
    if (d.exp) {
        return segre_of_hypersurface(*d.exp);
    }
    return segre_of_hypersurface(to_exponential(*d.h));
}

SingularODE ode_of(const Document& d)
{
    if (d.ode) {
        return *d.ode;
    }
    if (d.h) {
        return ode_of_hypersurface(*d.h);
    }
    return ode_of_segre(family_of(d, 1));
}

void require_normalization_order(const Document& d)
{
    if (d.jet_order() < d.m() + 7) {
        std::ostringstream os;
        os << "normalization needs a jet of order at least m + 7 = " << d.m() + 7 << " (have "
           << d.jet_order() << (d.ode ? ", ODE order + 2" : "") << ")";
        throw ParameterError(os.str());
    }
}

Regime regime_of(const SingularODE& e)
{
    if (e.m == 1) {
        return Regime::kM1;
    }
    return fuchsian_check_ode(e).ok ? Regime::kFuchsian : Regime::kMGeneral;
}

// --------------------------------------------------------------- reports --

Json membership_json(const std::vector<std::string>& violations)
{
    Json j = Json::array();
    for (const auto& v : violations) {
        j.push_back(v);
    }
    return j;
}

Json matrix_json(const Matrix& a)
{
    Json rows = Json::array();
    for (int i = 0; i < a.rows(); ++i) {
        Json row = Json::array();
        for (int k = 0; k < a.cols(); ++k) {
            row.push_back(to_json(a.at(i, k)));
        }
        rows.push_back(row);
    }
    return rows;
}

Json poly_matrix_json(const PolyMatrix& a)
{
    Json rows = Json::array();
    for (const auto& r : a) {
        Json row = Json::array();
        for (const auto& p : r) {
            row.push_back(p.to_string());
        }
        rows.push_back(row);
    }
    return rows;
}

Json resonance_json(const ResonanceReport& r)
{
    Json j = Json::object();
    j["regime"] = regime_name(r.regime);
    j["resonant"] = r.resonant();
    j["resonant_ks"] = r.resonant_ks;
    if (r.det_poly) {
        j["det_poly"] = r.det_poly->to_string();
    }
    if (r.reduced_det_poly) {
        j["reduced_det_poly"] = r.reduced_det_poly->to_string();
    }
    if (r.matrix_44) {
        j["matrix_44"] = matrix_json(*r.matrix_44);
    }
    j["matrix_44_invertible"] = r.matrix_44_invertible;
    j["matrix_33_invertible"] = r.matrix_33_invertible;
    if (!r.note.empty()) {
        j["note"] = r.note;
    }
    return j;
}

ResonanceReport resonance_of(const SingularODE& e)
{
    switch (regime_of(e)) {
    case Regime::kM1:
        return resonance_m1(e);
    case Regime::kFuchsian: {
        try {
            return resonance_fuchsian(e);
        } catch (const TruncationError& ex) {
            ResonanceReport r;
            r.regime = Regime::kFuchsian;
            r.note = std::string("frozen Fuchsian matrix unavailable: ") + ex.what();
            return r;
        }
    }
    default:
        return resonance_m(e);
    }
}

Json certificate_json(const ResidualCertificate& c)
{
    Json j = Json::object();
    j["order"] = c.order;
    j["verified_degree"] = c.verified_degree;
    j["holds"] = c.holds();
    if (c.failing_term) {
        j["failing_term"] = *c.failing_term;
    }
    return j;
}

Json parameters_json(const NormalFormResult& r)
{
    Json j = Json::object();
    j["lambda"] = to_json(r.params.lambda);
    j["mu"] = rational_string(r.mu);
    if (r.regime == Regime::kMGeneral) {
        j["tau"] = rational_string(r.params.tau);
        auto sigma = r.params.sigma ? *r.params.sigma : default_sigma(r.normalized.m);
        j["sigma"] = Json::array({rational_string(sigma[0]), rational_string(sigma[1])});
    }
    if (r.regime == Regime::kFuchsian) {
        j["fuchsian_sigma"] = rational_string(r.params.sigma_fuchsian);
    }
    return j;
}

Json normal_form_json(const NormalFormResult& r)
{
    Json j = Json::object();
    j["regime"] = regime_name(r.regime);
    j["parameters"] = parameters_json(r);
    j["resonance"] = resonance_json(r.resonance);
    Json inv = Json::object();
    if (r.invariant_coeff) {
        inv["phi_1_m-1_3"] = to_json(*r.invariant_coeff);
    }
    if (r.fuchsian_invariants) {
        const char* names[4] = {"phi_0_m-1_2", "phi_0_2m-2_3", "phi_1_2m-2_2", "phi_1_2m-2_3"};
        for (int i = 0; i < 4; ++i) {
            inv[names[i]] = to_json((*r.fuchsian_invariants)[i]);
        }
    }
    j["invariants"] = inv;
    j["normalized_ode"] = to_json(r.normalized);
    if (r.hypersurface) {
        j["normal_form"] = to_json(*r.hypersurface);
    }
    Json map = Json::object();
    map["cauchy"] = to_json(r.cauchy);
    map["f"] = to_json(r.map.f);
    map["g0"] = to_json(r.map.g0);
    map["g"] = to_json(r.map.g);
    j["map"] = map;
    j["certificate"] = certificate_json(residual_certificate(r));
    return j;
}

// -------------------------------------------------------------- commands --

Outcome cmd_validate(const Document& d)
{
    Outcome out;
    std::vector<std::string> violations;
    if (d.ode) {
        if (!d.ode->is_normalized()) {
            violations.push_back("Phi is not O(zeta^2)");
        }
    } else if (d.segre) {
        // Parsing already checked the shape of the family.
    } else {
        ValidationReport v = validate(require_hypersurface(d));
        violations = v.violations;
    }
    out.report["valid"] = violations.empty();
    out.report["violations"] = membership_json(violations);
    out.code = violations.empty() ? kExitOk : kExitValidation;
    return out;
}

Outcome cmd_exponential(const Document& d)
{
    Outcome out;
    if (d.exp) {
        RealHypersurface h = from_exponential(*d.exp);
        out.report["hypersurface"] = to_json(h);
    } else {
        out.report["exponential"] = to_json(to_exponential(require_hypersurface(d)));
    }
    return out;
}

Outcome cmd_reality(const Document& d, int sign)
{
    Outcome out;
    RealityReport r = reality_check(family_of(d, sign));
    out.report["real"] = r.real;
    if (!r.real) {
        out.report["first_mismatch"] = r.first_mismatch;
    }
    out.code = r.real ? kExitOk : kExitValidation;
    return out;
}

Outcome cmd_resonance(const Document& d)
{
    SingularODE e = ode_of(d);
    if (!e.is_normalized()) {
        throw ValidationError("ODE is not normalized: Phi must be O(zeta^2)");
    }
    Outcome out;
    out.report["resonance"] = resonance_json(resonance_of(e));
    return out;
}

Outcome cmd_normalize(const Document& d, const Options& o)
{
    require_normalization_order(d);
    NormalFormParams p = parameters(o, d.m());
    NormalFormResult r;
    if (d.ode) {
        r = normalize_ode(*d.ode, p);
    } else {
        r = normalize_hypersurface(require_hypersurface(d), p);
    }
    Outcome out;
    out.report["normalization"] = normal_form_json(r);
    return out;
}

Outcome cmd_fuchsian(const Document& d)
{
    Outcome out;
    if (!d.ode) {
        MembershipResult h = is_fuchsian(require_hypersurface(d));
        out.report["hypersurface_fuchsian"] = h.ok;
        out.report["hypersurface_violations"] = membership_json(h.violations);
    }
    MembershipResult e = fuchsian_check_ode(ode_of(d));
    out.report["ode_fuchsian"] = e.ok;
    out.report["ode_violations"] = membership_json(e.violations);
    return out;
}

Outcome cmd_equivalence(const Document& a, const Document& b, const Options& o)
{
    require_normalization_order(a);
    require_normalization_order(b);
    EquivalenceVerdict v = equivalence_test(require_hypersurface(a), require_hypersurface(b), parameters(o, a.m()));
    Outcome out;
    out.report["equivalent"] = v.equivalent;
    out.report["verdict"] = v.equivalent ? "equivalent" : "inequivalent to order " + std::to_string(v.order);
    out.report["order"] = v.order;
    if (v.lambda) {
        out.report["witness"] = Json::object({{"lambda", to_json(*v.lambda)}, {"mu", rational_string(*v.mu)}});
    }
    if (v.distinguishing) {
        auto [k, l, j] = *v.distinguishing;
        out.report["distinguishing"] = Json::object({{"k", k}, {"l", l}, {"u_degree", j}});
    }
    out.report["message"] = v.message;
    return out;
}

Outcome cmd_symmetry(const Document& d)
{
    if (d.jet_order() < d.m() + 10) {
        throw ParameterError("check-symmetry needs a jet of order at least m + 10 = " + std::to_string(d.m() + 10) +
                             " (have " + std::to_string(d.jet_order()) + ")");
    }
    SingularODE e = ode_of(d);
    const int m = e.m;
    Regime r = regime_of(e);
    std::array<int, 4> shifts{0, 0, 0, 0};
    PolyMatrix expected;
    if (r == Regime::kM1) {
        expected = euler_poly_m1(EulerCoefficients::of(e));
    } else if (r == Regime::kFuchsian) {
        shifts = {m - 1, 2 * m - 2, 2 * m - 2, 2 * m - 2};
        expected = fuchsian_poly(m, FuchsianCoefficients::of(e));
    } else {
        expected = euler_poly_m(m, EulerCoefficients::of(e));
    }
    auto signs = first_variation_row_signs(r);
    for (int i = 0; i < 4; ++i) {
        for (auto& p : expected[i]) {
            p = UPoly::constant(GaussRat(signs[i])) * p;
        }
    }
    PolyMatrix frozen = frozen_matrix(symmetry_linear_system(e), shifts);
    Outcome out;
    out.report["regime"] = regime_name(r);
    out.report["frozen_matrix"] = poly_matrix_json(frozen);
    out.report["recursion_matrix"] = poly_matrix_json(expected);
    out.report["consistent"] = frozen == expected;
    out.code = frozen == expected ? kExitOk : kExitInternal;
    return out;
}

// Randomized consistency checks seeded by CRNF_SEED.
Outcome cmd_self_test()
{
    unsigned long seed = 1;
    if (const char* s = std::getenv("CRNF_SEED")) {
        try {
            seed = std::stoul(s);
        } catch (const std::logic_error&) {
            throw ParameterError("CRNF_SEED must be a nonnegative integer");
        }
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> num(-5, 5);
    std::uniform_int_distribution<long> den(1, 4);
    auto random_ode = [&](int m, int order) {
        std::vector<std::pair<Exponents, GaussRat>> terms;
        for (int a = 0; a <= order; ++a) {
            for (int b = 0; a + b <= order; ++b) {
                for (int c = 2; a + b + c <= order; ++c) {
                    terms.push_back({{a, b, c}, GaussRat(mpq_class(num(rng), den(rng)), mpq_class(num(rng), den(rng)))});
                }
            }
        }
        return SingularODE{m, MultiSeries::from_terms({"z", "w", "zeta"}, order, terms)};
    };
    Json checks = Json::array();
    bool all = true;
    auto record = [&](const std::string& name, bool ok, const std::string& detail) {
        checks.push_back(Json::object({{"check", name}, {"ok", ok}, {"detail", detail}}));
        all = all && ok;
    };
    for (int m = 1; m <= 3; ++m) {
        SingularODE e = random_ode(m, 6);
        ResidualCertificate c = residual_certificate(ode_of_segre(segre_of_ode(e, 1)).Phi, e.Phi);
        record("functor round trip m=" + std::to_string(m), c.holds(),
               "verified through degree " + std::to_string(c.verified_degree));
    }
    for (int m = 1; m <= 3; ++m) {
        SingularODE e = random_ode(m, 5);
        Regime r = m == 1 ? Regime::kM1 : Regime::kMGeneral;
        std::string name = "dense oracle m=" + std::to_string(m);
        try {
            NormalFormResult n = m == 1 ? normalize_m1(e) : normalize_m(e);
            CauchyData y = dense_solve_normalization(e, r);
            bool same = y.f0 == n.cauchy.f0 && y.f1 == n.cauchy.f1 && y.g0 == n.cauchy.g0 && y.g1 == n.cauchy.g1;
            ResidualCertificate c = residual_certificate(n);
            record(name, same && c.holds(), same ? "Cauchy data agree" : "Cauchy data differ");
        } catch (const ResonanceError& ex) {
            int k = -1;
            try {
                dense_solve_normalization(e, r);
            } catch (const ResonanceError& ex2) {
                k = ex2.k();
            }
            record(name, k == ex.k(), "resonant at k = " + std::to_string(ex.k()));
        }
    }
    Outcome out;
    out.report["seed"] = seed;
    out.report["checks"] = checks;
    out.report["passed"] = all;
    out.code = all ? kExitOk : kExitInternal;
    return out;
}

Outcome run_single(const Options& o, const std::string& input)
{
    Document d = load(input, o.order);
    const std::string& c = o.command;
    if (c == "validate") {
        return cmd_validate(d);
    }
    if (c == "exponential") {
        return cmd_exponential(d);
    }
    if (c == "ode") {
        return {kExitOk, Json::object({{"ode", to_json(ode_of(d))}})};
    }
    if (c == "segre") {
        return {kExitOk, Json::object({{"segre", to_json(family_of(d, o.sign))}})};
    }
    if (c == "dual") {
        return {kExitOk, Json::object({{"dual", to_json(dual(family_of(d, o.sign)))}})};
    }
    if (c == "check-reality") {
        return cmd_reality(d, o.sign);
    }
    if (c == "resonance") {
        return cmd_resonance(d);
    }
    if (c == "normalize") {
        return cmd_normalize(d, o);
    }
    if (c == "fuchsian-check") {
        return cmd_fuchsian(d);
    }
    if (c == "check-symmetry") {
        return cmd_symmetry(d);
    }
    throw ParameterError("unknown command \"" + c + "\"");
}

Json error_json(const char* kind, const std::string& message, std::optional<int> k = std::nullopt)
{
    Json e = Json::object();
    e["kind"] = kind;
    if (k) {
        e["k"] = *k;
    }
    e["message"] = message;
    return e;
}

// Runs one job and maps library errors to exit codes.
Outcome run_guarded(const Options& o, const std::vector<std::string>& inputs)
{
    Outcome out;
    try {
        if (o.command == "equivalence") {
            out = cmd_equivalence(load(inputs.at(0), o.order), load(inputs.at(1), o.order), o);
        } else if (o.command == "self-test") {
            out = cmd_self_test();
        } else {
            out = run_single(o, inputs.at(0));
        }
    } catch (const ResonanceError& ex) {
        out = {kExitResonance, Json::object({{"error", error_json("resonance", ex.what(), ex.k())}})};
    } catch (const NonlinearLevelError& ex) {
        out = {kExitResonance, Json::object({{"error", error_json("nonlinear", ex.what(), ex.k())}})};
    } catch (const ValidationError& ex) {
        out = {kExitValidation, Json::object({{"error", error_json("validation", ex.what())}})};
    } catch (const StructuralError& ex) {
        out = {kExitValidation, Json::object({{"error", error_json("validation", ex.what())}})};
    } catch (const ParameterError& ex) {
        out = {kExitParameter, Json::object({{"error", error_json("parameter", ex.what())}})};
    } catch (const TruncationError& ex) {
        out = {kExitParameter, Json::object({{"error", error_json("parameter", ex.what())}})};
    } catch (const std::exception& ex) {
        out = {kExitInternal, Json::object({{"error", error_json("internal", ex.what())}})};
    }
    Json report = Json::object();
    report["command"] = o.command;
    if (o.command == "equivalence") {
        report["inputs"] = inputs;
    } else if (!inputs.empty()) {
        report["input"] = inputs.front();
    }
    report["exit_code"] = out.code;
    for (const auto& [k, v] : out.report.items()) {
        report[k] = v;
    }
    out.report = report;
    return out;
}

// ---------------------------------------------------------------- output --

void render_text(const Json& j, const std::string& prefix, std::ostream& os)
{
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            render_text(v, prefix.empty() ? k : prefix + "." + k, os);
        }
        return;
    }
    os << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
}

std::string render(const Json& j, const std::string& format)
{
    if (format == "text") {
        std::ostringstream os;
        render_text(j, "", os);
        return os.str();
    }
    return dump(j);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact normal forms of infinite-type real hypersurfaces in C^2 and their singular ODEs"};
    app.require_subcommand(1);
    Options o;
    struct Spec {
        const char* name;
        const char* help;
        int inputs;
    };
    const std::vector<Spec> commands{
        {"validate", "check a hypersurface, exponential form or ODE", -1},
        {"exponential", "convert between defining function and exponential form", -1},
        {"ode", "associated singular ODE", -1},
        {"segre", "Segre family (ODE inputs use --sign)", -1},
        {"dual", "dual Segre family", -1},
        {"check-reality", "test dual = conjugate on the Segre family", -1},
        {"resonance", "resonance report of the associated ODE", -1},
        {"normalize", "normal form, normalizing map and residual certificate", -1},
        {"fuchsian-check", "Fuchsian-type vanishing orders", -1},
        {"equivalence", "decide equivalence of two hypersurfaces up to the order", 2},
        {"check-symmetry", "compare the frozen symmetry system with the recursion matrix", -1},
        {"self-test", "randomized consistency checks (seed from CRNF_SEED)", 0},
    };
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        if (c.inputs != 0) {
            auto* opt = sub->add_option("inputs", o.inputs, "input JSON file(s)")->required();
            if (c.inputs > 0) {
                opt->expected(c.inputs);
            }
        }
        sub->add_option("--order", o.order, "truncation order (default 10)");
        sub->add_flag("--allow-large", o.allow_large, "permit orders above 16");
        sub->add_option("--lambda", o.lambda, "dilation parameter \"re[,im]\"");
        sub->add_option("--tau", o.tau, "real parameter pinned at level m-1");
        sub->add_option("--sigma1", o.sigma1, "target of Phi_{1,2m-2,3}");
        sub->add_option("--sigma2", o.sigma2, "target of Phi_{1,3m-3,3}");
        sub->add_option("--fuchsian-sigma", o.fuchsian_sigma, "target of Phi_{1,3m-3,3} (Fuchsian)");
        sub->add_option("--format", o.format, "json or text")->check(CLI::IsMember({"json", "text"}));
        sub->add_option("--jobs", o.jobs, "parallel jobs for several inputs")->check(CLI::PositiveNumber);
        sub->add_option("--sign", o.sign, "sign of the Segre family for ODE inputs")->check(CLI::IsMember({1, -1}));
        sub->callback([&o, sub] { o.command = sub->get_name(); });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitParameter;
    }

    if (o.order < 0 || (o.order > kMaxOrder && !o.allow_large)) {
        Json err = Json::object({{"command", o.command},
                                 {"exit_code", kExitParameter},
                                 {"error", error_json("parameter", "order must be in [0, 16]; pass --allow-large "
                                                                   "for larger orders")}});
        std::cout << render(err, o.format);
        return kExitParameter;
    }

    std::vector<std::vector<std::string>> jobs;
    if (o.command == "equivalence" || o.command == "self-test") {
        jobs.push_back(o.inputs);
    } else {
        for (const auto& in : o.inputs) {
            jobs.push_back({in});
        }
    }
    std::vector<Outcome> results(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            results[i] = run_guarded(o, jobs[i]);
        }
    };
    const int threads = std::min<int>(o.jobs, static_cast<int>(jobs.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }

    int code = kExitOk;
    for (const auto& r : results) {
        code = std::max(code, r.code);
    }
    if (results.size() == 1) {
        std::cout << render(results.front().report, o.format);
    } else if (o.format == "json") {
        Json all = Json::array();
        for (const auto& r : results) {
            all.push_back(r.report);
        }
        std::cout << dump(all);
    } else {
        for (std::size_t i = 0; i < results.size(); ++i) {
            std::cout << (i ? "\n" : "") << render(results[i].report, o.format);
        }
    }
    return code;
}
