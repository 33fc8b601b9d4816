#include "crnf/segre.hpp"

#include "crnf/errors.hpp"

namespace crnf {

namespace {

MultiSeries materialize_psi(int order, const CoeffFamily& fam)
{
    std::vector<std::pair<Exponents, GaussRat>> terms;
    if (order >= 2) {
        terms.push_back({{1, 1, 0}, GaussRat(1)});
    }
    for (const auto& [kl, s] : fam) {
        for (const auto& [e, c] : s.terms()) {
            terms.push_back({{kl.first, kl.second, e[0]}, c});
        }
    }
    return MultiSeries::from_terms({"z", "xi", "eta"}, order, terms);
}

CoeffFamily family_of_psi(const MultiSeries& psi, const char* what)
{
    CoeffView view = coeff_view(psi, {"z", "xi"});
    CoeffFamily fam;
    for (auto& [key, series] : view) {
        int k = key[0];
        int l = key[1];
        if (k == 1 && l == 1) {
            if (series != series.one()) {
                throw InternalError(std::string(what) + ": leading z*xi coefficient is not 1");
            }
            continue;
        }
        if (k < 2 || l < 2) {
            throw InternalError(std::string(what) + ": family is not admissible at (k,l) = (" + std::to_string(k) +
                                "," + std::to_string(l) + ")");
        }
        fam.emplace(KL{k, l}, series);
    }
    return fam;
}

CoeffFamily scaled(const CoeffFamily& fam, const GaussRat& c, const std::string& var)
{
    CoeffFamily out;
    for (const auto& [kl, s] : fam) {
        out.emplace(kl, rename(s * c, {var}));
    }
    return out;
}

} // namespace

MultiSeries SegreFamily::phikl(int k, int l) const
{
    auto it = phi.find({k, l});
    if (it != phi.end()) {
        return it->second;
    }
    return MultiSeries({"eta"}, std::max(order - k - l, 0));
}

MultiSeries SegreFamily::materialize() const
{
    return materialize_psi(order, phi);
}

MultiSeries SegreFamily::defining_function() const
{
    MultiSeries psi = materialize();
    MultiSeries eta = psi.var("eta");
    return eta * exp_nilpotent(GaussRat::i() * GaussRat(sign) * pow(eta, m - 1) * psi);
}

SegreFamily SegreFamily::from_series(int m, int sign, const MultiSeries& psi)
{
    SegreFamily s;
    s.m = m;
    s.sign = sign;
    s.order = psi.order();
    s.phi = family_of_psi(psi, "SegreFamily::from_series");
    return s;
}

SegreFamily segre_of_hypersurface(const ExponentialForm& ef)
{
    SegreFamily s;
    s.m = ef.m;
    s.sign = ef.eps;
    s.order = ef.order;
    s.phi = scaled(ef.phi, GaussRat(ef.eps), "eta");
    return s;
}

ExponentialForm exponential_of_segre(const SegreFamily& s)
{
    ExponentialForm ef;
    ef.m = s.m;
    ef.eps = s.sign;
    ef.order = s.order;
    ef.phi = scaled(s.phi, GaussRat(s.sign), "w");
    return ef;
}

SegreFamily conjugate(const SegreFamily& s)
{
    SegreFamily out;
    out.m = s.m;
    out.sign = -s.sign;
    out.order = s.order;
    for (const auto& [kl, series] : s.phi) {
        out.phi.emplace(kl, series.conj());
    }
    return out;
}

SegreFamily dual(const SegreFamily& s)
{
    // Solving w = eta*exp(i s eta^{m-1} psi(z, xi, eta)) for eta gives
    // eta = w*R with R*exp(i s w^{m-1} R^{m-1} psi(z, xi, w R)) = 1; the dual
    // family has sign -s and psi* = R^{m-1} psi(z, xi, w R) with z and xi exchanged.
    const int m = s.m;
    MultiSeries psi = s.materialize();
    MultiSeries z = psi.var("z");
    MultiSeries xi = psi.var("xi");
    MultiSeries eta = psi.var("eta");
    const GaussRat is = GaussRat::i() * GaussRat(s.sign);
    auto residual = [&](const SeriesVec& d) {
        MultiSeries r = psi.one() + d[0];
        MultiSeries inner = pow(eta, m - 1) * pow(r, m - 1) * substitute(psi, {z, xi, eta * r});
        return SeriesVec{r * exp_nilpotent(is * inner) - psi.one()};
    };
    MultiSeries r = psi.one() + solve_implicit(residual, psi.zero(), 1)[0];
    MultiSeries star = pow(r, m - 1) * substitute(psi, {z, xi, eta * r});
    star = substitute(star, {xi, z, eta});
    SegreFamily out;
    out.m = m;
    out.sign = -s.sign;
    out.order = s.order;
    out.phi = family_of_psi(star, "dual");
    return out;
}

RealityReport reality_check(const SegreFamily& s)
{
    SegreFamily d = dual(s);
    SegreFamily c = conjugate(s);
    RealityReport rep;
    for (int k = 2; k <= s.order; ++k) {
        for (int l = 2; k + l <= s.order; ++l) {
            MultiSeries a = d.phikl(k, l);
            MultiSeries b = c.phikl(k, l);
            if (a != b) {
                rep.real = false;
                rep.first_mismatch = "phi" + std::to_string(k) + std::to_string(l) + " differs at eta-degree " +
                                     std::to_string(first_difference_degree(a, b));
                return rep;
            }
        }
    }
    return rep;
}

ProductMap recover_parameter_map(const SegreFamily& s1, const SegreFamily& s2, const PlaneMap& fg)
{
    if (s1.m != s2.m || s1.order != s2.order) {
        throw StructuralError("recover_parameter_map: families differ in m or order");
    }
    const int m = s1.m;
    const int n = s1.order;
    // Division by eta^m below costs m degrees; work at a raised order.
    const int big = n + m;
    MultiSeries pr({"xi", "eta"}, big);
    MultiSeries xi = pr.var("xi");
    MultiSeries eta = pr.var("eta");
    MultiSeries F = with_order(fg.F, big);
    MultiSeries G = with_order(fg.G, big);
    MultiSeries Fz = diff(F, "z");
    MultiSeries Fw = diff(F, "w");
    MultiSeries Gz = diff(G, "z");
    MultiSeries Gw = diff(G, "w");
    auto at_z0 = [&](const MultiSeries& s) { return substitute(s, {pr.zero(), eta}, true); };
    MultiSeries F0 = at_z0(F);
    MultiSeries G0 = at_z0(G);
    MultiSeries Fz0 = at_z0(Fz);
    MultiSeries Fw0 = at_z0(Fw);
    MultiSeries Gz0 = at_z0(Gz);
    MultiSeries Gw0 = at_z0(Gw);
    for (const auto* s : {&F0, &G0}) {
        if (!s->constant_term().is_zero()) {
            throw ValidationError("recover_parameter_map: plane map does not fix the origin");
        }
    }
    const GaussRat mu = G.coeff({0, 1});
    if (mu.is_zero() || Fz.constant_term().is_zero()) {
        throw ValidationError("recover_parameter_map: plane map is not invertible at the origin");
    }

    MultiSeries psi2 = with_order(s2.materialize(), big);
    MultiSeries psi2z = diff(psi2, "z");
    const GaussRat is1 = GaussRat::i() * GaussRat(s1.sign);
    const GaussRat is2 = GaussRat::i() * GaussRat(s2.sign);
    // rho1_z(0, xi, eta) = i s1 xi eta^m.
    MultiSeries rho1z = is1 * xi * pow(eta, m);
    MultiSeries e1_lhs;
    MultiSeries e2_lhs;
    try {
        e1_lhs = div_monomial(G0, {0, 1});
        e2_lhs = div_monomial(Gz0 + Gw0 * rho1z, {0, m});
    } catch (const StructuralError&) {
        throw ValidationError("recover_parameter_map: plane map does not preserve w = 0 to the required order");
    }
    MultiSeries tangent = Fz0 + Fw0 * rho1z;

    // Unknowns: Lambda and delta with Omega = eta (mu + delta).
    auto residual = [&](const SeriesVec& u) {
        MultiSeries r = pr.constant(mu) + u[1];
        MultiSeries omega = eta * r;
        SeriesVec images{F0, u[0], omega};
        MultiSeries psi = substitute(psi2, images);
        MultiSeries ex = exp_nilpotent(is2 * pow(omega, m - 1) * psi);
        // rho2 / eta and rho2_z / eta^m at (F(0,eta), Lambda, Omega).
        MultiSeries rho_over_eta = r * ex;
        MultiSeries rhoz_over = is2 * pow(r, m) * substitute(psi2z, images) * ex;
        return SeriesVec{e1_lhs - rho_over_eta, e2_lhs - rhoz_over * tangent};
    };
    SeriesVec at_zero = residual({pr.zero(), pr.zero()});
    if (!at_zero[0].constant_term().is_zero() || !at_zero[1].constant_term().is_zero()) {
        throw ValidationError("recover_parameter_map: the plane map does not send the first family into the second");
    }
    SeriesVec sol = solve_implicit(residual, pr.zero(), 2);
    ProductMap out;
    out.FG = fg;
    out.Lambda = with_order(sol[0], n);
    out.Omega = with_order(eta * (pr.constant(mu) + sol[1]), n);

    // Verify G(z, rho1) = rho2(F(z, rho1), Lambda, Omega) in (z, xi, eta).
    MultiSeries rho1 = s1.defining_function();
    MultiSeries z = rho1.var("z");
    MultiSeries lam = embed(out.Lambda, {"z", "xi", "eta"}, n);
    MultiSeries om = embed(out.Omega, {"z", "xi", "eta"}, n);
    MultiSeries lhs = substitute(with_order(fg.G, n), {z, rho1});
    MultiSeries rho2 = s2.defining_function();
    MultiSeries rhs = substitute(rho2, {substitute(with_order(fg.F, n), {z, rho1}), lam, om});
    int deg = first_difference_degree(lhs, rhs);
    out.certified_degree = deg - 1;
    if (deg <= n) {
        throw ValidationError("recover_parameter_map: the plane map does not send the first family into the "
                              "second (mismatch at degree " +
                              std::to_string(deg) + ")");
    }
    return out;
}

} // namespace crnf
