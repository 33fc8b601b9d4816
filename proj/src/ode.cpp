#include "crnf/ode.hpp"

#include "crnf/errors.hpp"

namespace crnf {

namespace {

const std::vector<std::string> kODE{"z", "w", "zeta"};
const std::vector<std::string> kPlane{"z", "w"};

// Derivative data of a normalized map, truncated to the working order n and
// expressed in the plane ring ("z", "w").
struct MapJet {
    MultiSeries X, W, V, D;
    MultiSeries fz, fw, fzz, fzw, fww;
    MultiSeries gz, gzz;
    MultiSeries Wzw, Www;
};

MapJet map_jet(int m, const MultiSeries& f, const MultiSeries& g0, const MultiSeries& g, int n)
{
    // f, g0, g are given in the plane ring of order n + 2.
    MultiSeries w = f.var("w");
    MultiSeries z = f.var("z");
    MultiSeries wm = pow(w, m);
    MultiSeries W = w * (f.one() + g0) + wm * g;
    MultiSeries X = z + f;
    MultiSeries D = diff(W, "w");
    MultiSeries fz = diff(f, "z");
    MultiSeries fw = diff(f, "w");
    MultiSeries gz = diff(g, "z");
    MapJet j;
    j.X = with_order(X, n);
    j.W = with_order(W, n);
    j.V = with_order(f.one() + g0 + pow(w, m - 1) * g, n);
    j.D = with_order(D, n);
    j.fz = with_order(fz, n);
    j.fw = with_order(fw, n);
    j.fzz = with_order(diff(fz, "z"), n);
    j.fzw = with_order(diff(fz, "w"), n);
    j.fww = with_order(diff(fw, "w"), n);
    j.gz = with_order(gz, n);
    j.gzz = with_order(diff(gz, "z"), n);
    j.Wzw = with_order(diff(diff(W, "z"), "w"), n);
    j.Www = with_order(diff(D, "w"), n);
    return j;
}

// Phi_c(X, W) for every zeta-power c of Phi, in the plane ring of order n.
std::vector<MultiSeries> zeta_parts_at(const SingularODE& e, const MultiSeries& X, const MultiSeries& W)
{
    std::vector<MultiSeries> out;
    const int n = e.order();
    for (int c = 0; c <= n; ++c) {
        MultiSeries part_c = e.zeta_part(c);
        if (part_c.is_zero()) {
            out.push_back(X.zero());
            continue;
        }
        out.push_back(substitute(part_c, {X, W}));
    }
    return out;
}

MultiSeries plane_to_ode(const MultiSeries& s, int n)
{
    return embed(s, kODE, n);
}

} // namespace

MultiSeries SingularODE::zeta_part(int c) const
{
    CoeffView view = coeff_view(Phi, {"zeta"});
    auto it = view.find(Exponents{c});
    if (it != view.end()) {
        return it->second;
    }
    return MultiSeries(kPlane, std::max(order() - c, 0));
}

MultiSeries SingularODE::coefficient(int j, int c) const
{
    std::vector<std::pair<Exponents, GaussRat>> terms;
    for (const auto& [e, v] : Phi.terms()) {
        if (e[0] == j && e[2] == c) {
            terms.push_back({{e[1]}, v});
        }
    }
    return MultiSeries::from_terms({"w"}, std::max(order() - j - c, 0), terms);
}

bool SingularODE::is_normalized() const
{
    for (const auto& [e, v] : Phi.terms()) {
        if (e[2] < 2) {
            return false;
        }
    }
    return true;
}

SingularODE SingularODE::zero(int m, int order)
{
    return SingularODE{m, MultiSeries(kODE, order)};
}

NormalizedMap NormalizedMap::identity(int m, int order)
{
    NormalizedMap h;
    h.m = m;
    h.order = order;
    h.f = MultiSeries(kPlane, order);
    h.g = MultiSeries(kPlane, order);
    h.g0 = MultiSeries({"w"}, order);
    return h;
}

MultiSeries NormalizedMap::X() const
{
    MultiSeries f2 = with_order(f, order);
    return f2.var("z") + f2;
}

MultiSeries NormalizedMap::W() const
{
    MultiSeries g2 = with_order(g, order);
    MultiSeries w = g2.var("w");
    return w * (g2.one() + embed(g0, kPlane, order)) + pow(w, m) * g2;
}

void NormalizedMap::validate() const
{
    if (f.vars() != kPlane || g.vars() != kPlane || g0.vars() != std::vector<std::string>{"w"}) {
        throw StructuralError("normalized map: f and g must live in (z, w) and g0 in (w)");
    }
    if (!f.constant_term().is_zero()) {
        throw ValidationError("normalized map: f(0, 0) != 0");
    }
    if (!f.coeff({1, 0}).is_zero()) {
        throw ValidationError("normalized map: f_z(0, 0) != 0");
    }
    if (!g0.constant_term().is_zero()) {
        throw ValidationError("normalized map: g0(0) != 0");
    }
    for (const auto& [e, c] : g.terms()) {
        if (e[0] == 0 || e[1] == 0) {
            throw ValidationError("normalized map: g is not O(z w)");
        }
    }
}

NormalizedMap NormalizedMap::from_components(int m, const MultiSeries& X, const MultiSeries& W)
{
    // g = (W - W(0, w)) / w^m is known only through degree order - m.
    const int n = X.order() - m;
    if (n < 0) {
        throw StructuralError("normalized map: components of order below m");
    }
    NormalizedMap h;
    h.m = m;
    h.order = n;
    MultiSeries w = X.var("w");
    h.f = with_order(X - X.var("z"), n);
    MultiSeries W0 = substitute(W, {X.zero(), w}, true);
    MultiSeries g0p = div_monomial(W0, {0, 1}) - X.one();
    h.g0 = with_order(rename(coeff_view(g0p, {"z"})[Exponents{0}], {"w"}), n);
    try {
        h.g = with_order(div_monomial(W - W0, {0, m}), n);
    } catch (const StructuralError&) {
        throw ValidationError("normalized map: W - W(0, w) is not divisible by w^m");
    }
    h.validate();
    return h;
}

NormalizedMap compose(const NormalizedMap& outer, const NormalizedMap& inner)
{
    if (outer.m != inner.m) {
        throw StructuralError("compose: maps differ in m");
    }
    // Working m degrees higher keeps the composite g exact through the
    // common order.
    const int n = std::min(outer.order, inner.order) + outer.m;
    auto padded = [n](NormalizedMap h) {
        h.order = n;
        return h;
    };
    MultiSeries X1 = padded(outer).X();
    MultiSeries W1 = padded(outer).W();
    MultiSeries X2 = padded(inner).X();
    MultiSeries W2 = padded(inner).W();
    return NormalizedMap::from_components(outer.m, substitute(X1, {X2, W2}), substitute(W1, {X2, W2}));
}

CauchyData CauchyData::zero(int order)
{
    MultiSeries z({"w"}, order);
    return CauchyData{z, z, z, z};
}

SingularODE ode_of_segre(const SegreFamily& s)
{
    const int m = s.m;
    const int big = s.order;
    const int n = big - 2;
    if (n < 0) {
        throw StructuralError("ode_of_segre: family order must be at least 2");
    }
    MultiSeries psi = s.materialize();
    MultiSeries eta = psi.var("eta");
    const GaussRat is = GaussRat::i() * GaussRat(s.sign);
    MultiSeries eta_m1 = pow(eta, m - 1);
    MultiSeries emin = exp_nilpotent(is * GaussRat(1 - m) * eta_m1 * psi);
    MultiSeries psiz = diff(psi, "z");
    MultiSeries psizz = diff(psiz, "z");
    MultiSeries rho = with_order(s.defining_function(), n);
    MultiSeries zeta_s = with_order(is * psiz * emin, n);
    MultiSeries phi_s = with_order(emin * (is * psizz - eta_m1 * psiz * psiz), n);

    // Invert (xi, eta) -> (w, zeta) at fixed z.
    MultiSeries pr(kODE, n);
    MultiSeries z = pr.var("z");
    MultiSeries w = pr.var("w");
    MultiSeries zeta = pr.var("zeta");
    auto residual = [&](const SeriesVec& u) {
        SeriesVec images{z, u[0], u[1]};
        return SeriesVec{substitute(rho, images) - w, substitute(zeta_s, images) - zeta};
    };
    SeriesVec xe = solve_implicit(residual, pr.zero(), 2);
    SingularODE e{m, substitute(phi_s, {z, xe[0], xe[1]})};
    if (!e.is_normalized()) {
        throw InternalError("ode_of_segre: the ODE of an admissible family must be O(zeta^2)");
    }
    return e;
}

SegreFamily segre_of_ode(const SingularODE& e, int sign)
{
    const int m = e.m;
    const int n = e.order();
    const int big = n + 2;
    MultiSeries pr({"z", "xi", "eta"}, big);
    MultiSeries z = pr.var("z");
    MultiSeries xi = pr.var("xi");
    MultiSeries eta = pr.var("eta");
    MultiSeries eta_m1 = pow(eta, m - 1);
    const GaussRat is = GaussRat::i() * GaussRat(sign);
    // psi_zz = -i s [e^{i s (m-1) eta^{m-1} psi} Phi(z, rho, zeta) + eta^{m-1} psi_z^2],
    // by Picard iteration from psi = z xi.
    MultiSeries psi = z * xi;
    for (int iter = 0; iter <= big + 2; ++iter) {
        MultiSeries psiz = diff(psi, "z");
        MultiSeries t = is * eta_m1 * psi;
        MultiSeries eplus = exp_nilpotent(t);
        MultiSeries emul = exp_nilpotent(GaussRat(m - 1) * t);
        MultiSeries einv = exp_nilpotent(GaussRat(1 - m) * t);
        MultiSeries rho = eta * eplus;
        MultiSeries zeta = is * psiz * einv;
        MultiSeries rhs = -is * (emul * substitute(e.Phi, {z, rho, zeta}) + eta_m1 * psiz * psiz);
        MultiSeries next = z * xi + integrate(integrate(rhs, 0), 0);
        if (next == psi) {
            return SegreFamily::from_series(m, sign, psi);
        }
        psi = std::move(next);
    }
    throw InternalError("segre_of_ode: Picard iteration did not stabilize");
}

SingularODE transform_ode(const SingularODE& target, const NormalizedMap& h)
{
    const int m = target.m;
    if (h.m != m) {
        throw StructuralError("transform_ode: map and ODE differ in m");
    }
    const int n = target.order();
    const int big = n + 2;
    MultiSeries f = with_order(h.f, big);
    MultiSeries g = with_order(h.g, big);
    MultiSeries g0 = embed(h.g0, kPlane, big);
    MapJet j = map_jet(m, f, g0, g, n);

    auto L = [n](const MultiSeries& s) { return plane_to_ode(s, n); };
    MultiSeries pr(kODE, n);
    MultiSeries w = pr.var("w");
    MultiSeries zeta = pr.var("zeta");
    MultiSeries wm = pow(w, m);
    MultiSeries one = pr.one();
    MultiSeries fz1 = one + L(j.fz);
    MultiSeries fw = L(j.fw);
    MultiSeries D = L(j.D);
    MultiSeries gz = L(j.gz);
    MultiSeries gzz = L(j.gzz);
    MultiSeries fzz = L(j.fzz);
    MultiSeries fzw = L(j.fzw);
    MultiSeries fww = L(j.fww);
    MultiSeries Wzw = L(j.Wzw);
    MultiSeries Www = L(j.Www);
    MultiSeries Vm = pow(L(j.V), m);

    MultiSeries P = fz1 + wm * zeta * fw;
    MultiSeries Z = (gz + zeta * D) * invert_unit(Vm * P);
    MultiSeries J = fz1 * D - fw * wm * gz;

    std::vector<MultiSeries> parts = zeta_parts_at(target, j.X, j.W);
    MultiSeries phi_star = pr.zero();
    MultiSeries zc = pr.one();
    for (std::size_t c = 0; c < parts.size(); ++c) {
        if (!parts[c].is_zero()) {
            phi_star += L(parts[c]) * zc;
        }
        zc *= Z;
    }
    MultiSeries I0 = gz * fzz - fz1 * gzz;
    MultiSeries I1 = D * fzz - wm * fw * gzz - GaussRat(2) * fz1 * Wzw + GaussRat(2) * wm * gz * fzw;
    MultiSeries I2 = GaussRat(2) * D * fzw - GaussRat(2) * fw * Wzw - fz1 * Www + wm * gz * fww;
    MultiSeries I3 = D * fww - fw * Www;
    MultiSeries num = P * P * P * Vm * phi_star + I0 + I1 * zeta + I2 * wm * zeta * zeta +
                      I3 * wm * wm * zeta * zeta * zeta;
    return SingularODE{m, num * invert_unit(J)};
}

NormalizedMap cauchy_extend(const SingularODE& target, const CauchyData& data)
{
    const int m = target.m;
    const int n = target.order();
    const int big = n + 2;
    for (const auto* s : {&data.f0, &data.f1, &data.g0, &data.g1}) {
        if (s->vars() != std::vector<std::string>{"w"}) {
            throw StructuralError("cauchy_extend: Cauchy data must be series in (w)");
        }
        if (!s->constant_term().is_zero()) {
            throw ParameterError("cauchy_extend: Cauchy data must vanish at w = 0");
        }
    }
    MultiSeries pr(kPlane, big);
    MultiSeries z = pr.var("z");
    MultiSeries w = pr.var("w");
    auto P2 = [&](const MultiSeries& s) { return embed(with_order(s, big), kPlane, big); };
    MultiSeries f_init = P2(data.f0) + z * P2(data.f1);
    MultiSeries g_init = z * P2(data.g1);
    MultiSeries g0 = P2(data.g0);

    MultiSeries f = f_init;
    MultiSeries g = g_init;
    MultiSeries wm = pow(MultiSeries(kPlane, n).var("w"), m);
    for (int iter = 0; iter <= big + 2; ++iter) {
        MapJet j = map_jet(m, f, g0, g, n);
        MultiSeries one = j.fz.one();
        MultiSeries fz1 = one + j.fz;
        MultiSeries Vm = pow(j.V, m);
        MultiSeries inv_vp = invert_unit(Vm * fz1);
        MultiSeries Z0 = j.gz * inv_vp;
        MultiSeries Zp = j.D * inv_vp - j.gz * wm * j.fw * inv_vp * invert_unit(fz1);
        std::vector<MultiSeries> parts = zeta_parts_at(target, j.X, j.W);
        MultiSeries phi0 = one.zero();
        MultiSeries phid = one.zero();
        MultiSeries zc = one;
        for (std::size_t c = 0; c < parts.size(); ++c) {
            if (!parts[c].is_zero()) {
                phi0 += parts[c] * zc;
            }
            if (c + 1 < parts.size() && !parts[c + 1].is_zero()) {
                phid += GaussRat(static_cast<long>(c + 1)) * parts[c + 1] * zc;
            }
            zc *= Z0;
        }
        MultiSeries fz1sq = fz1 * fz1;
        MultiSeries base = fz1sq * fz1 * Vm * phi0;
        MultiSeries dbase = GaussRat(3) * fz1sq * wm * j.fw * Vm * phi0 + fz1sq * fz1 * Vm * phid * Zp;
        MultiSeries R0 = -base;
        MultiSeries R1 = -dbase + GaussRat(2) * fz1 * j.Wzw - GaussRat(2) * wm * j.gz * j.fzw;
        MultiSeries Jinv = invert_unit(fz1 * j.D - j.fw * wm * j.gz);
        MultiSeries fzz = (fz1 * R1 - wm * j.fw * R0) * Jinv;
        MultiSeries gzz = (j.gz * R1 - j.D * R0) * Jinv;
        MultiSeries f_next = f_init + integrate(integrate(with_order(fzz, big), 0), 0);
        MultiSeries g_next = g_init + integrate(integrate(with_order(gzz, big), 0), 0);
        if (f_next == f && g_next == g) {
            NormalizedMap h;
            h.m = m;
            h.order = big;
            h.f = f;
            h.g = g;
            h.g0 = with_order(data.g0, big);
            return h;
        }
        f = std::move(f_next);
        g = std::move(g_next);
    }
    throw InternalError("cauchy_extend: Picard iteration did not stabilize");
}

SingularODE dilate_ode(const SingularODE& e, const GaussRat& lambda, const GaussRat& mu)
{
    if (lambda.is_zero() || mu.is_zero()) {
        throw ParameterError("dilate_ode: lambda and mu must be nonzero");
    }
    const int m = e.m;
    std::vector<std::pair<Exponents, GaussRat>> terms;
    GaussRat base = mu.pow(1 - m) * lambda.pow(-2);
    for (const auto& [ex, c] : e.Phi.terms()) {
        int a = ex[0];
        int b = ex[1];
        int cz = ex[2];
        GaussRat factor = base * lambda.pow(cz - a) * mu.pow(static_cast<long>(m - 1) * cz - b);
        terms.push_back({ex, c * factor});
    }
    return SingularODE{m, MultiSeries::from_terms(kODE, e.order(), terms)};
}

SingularODE ode_of_hypersurface(const RealHypersurface& h)
{
    return ode_of_segre(segre_of_hypersurface(to_exponential(h)));
}

RealHypersurface hypersurface_of_ode(const SingularODE& e, int eps)
{
    return from_exponential(exponential_of_segre(segre_of_ode(e, eps)));
}

TransferCoefficients transfer_from_h(const RealHypersurface& h)
{
    const int m = h.m;
    const int n = h.order - 2;
    const GaussRat I = GaussRat::i();
    auto H = [&](int k, int l, int o) { return with_order(rename(h.hkl(k, l), {"w"}), o); };
    auto mono = [&](int o, int j, const GaussRat& c) {
        MultiSeries z({"w"}, o);
        return j <= o ? z.monomial({j}, c) : z;
    };
    TransferCoefficients t;
    t.A0 = mono(n - 2, m - 1, GaussRat(m)) - GaussRat(2) * I * H(2, 2, n - 2);
    t.A1 = GaussRat(-6) * I * H(3, 2, n - 3);
    t.B0 = GaussRat(-2 * h.eps) * H(2, 3, n - 3);
    const int o = n - 4;
    MultiSeries h22 = H(2, 2, o);
    MultiSeries dh22 = with_order(diff(H(2, 2, o + 1), 0), o);
    t.B1 = GaussRat(-6 * h.eps) * H(3, 3, o) + GaussRat(8) * h22 * h22 - I * mono(o, m, GaussRat(1)) * dh22 +
           mono(o, 2 * m - 2, GaussRat(mpq_class((m - 1) * (m + 2), 4) + mpq_class(1, 2)));
    return t;
}

LowOrderInvariants low_order_invariants(const SingularODE& e)
{
    return {e.A(0), e.A(1), e.A(2), e.B(0), e.B(1), e.B(2), e.C(0), e.C(1)};
}

} // namespace crnf
