#include "crnf/symmetry.hpp"

#include "crnf/errors.hpp"

#include <algorithm>
#include <string>

namespace crnf {

namespace {

const std::vector<std::string> kODE{"z", "w", "zeta"};
const std::vector<std::string> kPlane{"z", "w"};
const std::vector<std::string> kW{"w"};

// Linear form in the jets of the four Cauchy components with coefficients in
// the ring ("z", "w", "zeta").  Components depend on w only.
struct LinForm {
    std::map<std::pair<int, int>, MultiSeries> c;

    LinForm& operator+=(const LinForm& o)
    {
        for (const auto& [key, s] : o.c) {
            auto it = c.find(key);
            if (it == c.end()) {
                c.emplace(key, s);
            } else {
                it->second += s;
            }
        }
        return *this;
    }
    friend LinForm operator+(LinForm a, const LinForm& b) { return a += b; }
    friend LinForm operator-(LinForm a, const LinForm& b)
    {
        for (const auto& [key, s] : b.c) {
            auto it = a.c.find(key);
            if (it == a.c.end()) {
                a.c.emplace(key, -s);
            } else {
                it->second -= s;
            }
        }
        return a;
    }
    friend LinForm operator*(const LinForm& a, const MultiSeries& s)
    {
        LinForm out;
        for (const auto& [key, v] : a.c) {
            out.c.emplace(key, v * s);
        }
        return out;
    }
    friend LinForm operator*(const LinForm& a, const GaussRat& k)
    {
        LinForm out;
        for (const auto& [key, v] : a.c) {
            out.c.emplace(key, v * k);
        }
        return out;
    }
};

LinForm dz(const LinForm& a)
{
    LinForm out;
    for (const auto& [key, v] : a.c) {
        out.c.emplace(key, diff(v, "z"));
    }
    return out;
}

LinForm dw(const LinForm& a)
{
    LinForm out;
    for (const auto& [key, v] : a.c) {
        out += LinForm{{{key, diff(v, "w")}}};
        out += LinForm{{{{key.first, key.second + 1}, v}}};
    }
    return out;
}

MultiSeries dz(const MultiSeries& s) { return diff(s, "z"); }
MultiSeries dw(const MultiSeries& s) { return diff(s, "w"); }

// L^(2)(w2 - w^m Phi) on the ODE, in ("z", "w", "zeta") of the ring of `ring`.
template <class T>
T residual_expr(const T& P, const T& Q, const SingularODE& e, const MultiSeries& ring)
{
    const int m = e.m;
    MultiSeries phi = with_order(e.Phi, ring.order());
    MultiSeries w = ring.var("w");
    MultiSeries zeta = ring.var("zeta");
    MultiSeries wm = pow(w, m);
    MultiSeries w1 = wm * zeta;
    MultiSeries w1sq = w1 * w1;
    MultiSeries w2 = wm * phi;
    MultiSeries phiz = diff(phi, "z");
    MultiSeries phiw = diff(phi, "w");
    MultiSeries phizeta = diff(phi, "zeta");
    MultiSeries dwcoef = GaussRat(m) * pow(w, m - 1) * (phi - zeta * phizeta) + wm * phiw;

    T Pz = dz(P);
    T Pw = dw(P);
    T Qz = dz(Q);
    T Qw = dw(Q);
    T Q1 = Qz + (Qw - Pz) * w1 - Pw * w1sq;
    T Q2 = dz(Qz) + (dw(Qz) * GaussRat(2) - dz(Pz)) * w1 + (dw(Qw) - dw(Pz) * GaussRat(2)) * w1sq -
           dw(Pw) * (w1sq * w1) + (Qw - Pz * GaussRat(2)) * w2 - Pw * (GaussRat(3) * w1 * w2);
    return Q2 - P * (wm * phiz) - Q * dwcoef - Q1 * phizeta;
}

MultiSeries w_jet(const MultiSeries& s, int d)
{
    MultiSeries out = s;
    for (int i = 0; i < d; ++i) {
        out = diff(out, "w");
    }
    return out;
}

} // namespace

void VectorField::validate() const
{
    if (P.vars() != kPlane || Q.vars() != kPlane) {
        throw StructuralError("vector field: P and Q must live in (z, w)");
    }
    for (const auto& [e, c] : Q.terms()) {
        if (e[1] == 0 || (e[0] > 0 && e[1] < m)) {
            throw ValidationError("vector field: Q is not of the form w g0(w) + w^m (g1(w) z + ...)");
        }
    }
}

VectorField VectorField::from_cauchy(const SingularODE& e, const CauchyData& data)
{
    const int m = e.m;
    const int n = e.order();
    MultiSeries pr(kPlane, n);
    MultiSeries z = pr.var("z");
    MultiSeries w = pr.var("w");
    auto P2 = [&](const MultiSeries& s) { return embed(with_order(s, n), kPlane, n); };
    MultiSeries wm = pow(w, m);
    MultiSeries g1 = P2(data.g1);
    MultiSeries phi2 = with_order(e.zeta_part(2), n);
    MultiSeries I2 = integrate(integrate(phi2, 0), 0);
    VectorField L;
    L.m = m;
    L.order = n;
    L.Q = w * P2(data.g0) + wm * z * g1;
    L.P = P2(data.f0) + z * P2(data.f1) +
          z * z * (GaussRat(m) * pow(w, m - 1) * g1 + wm * diff(g1, "w")) - GaussRat(2) * g1 * I2;
    return L;
}

Prolongation prolong2(const VectorField& L)
{
    const int n = L.order;
    const std::vector<std::string> v1{"z", "w", "w1"};
    const std::vector<std::string> v2{"z", "w", "w1", "w2"};
    MultiSeries P1 = embed(L.P, v1, n);
    MultiSeries Qv = embed(L.Q, v1, n);
    MultiSeries w1 = P1.var("w1");
    MultiSeries Pz = diff(P1, "z");
    MultiSeries Pw = diff(P1, "w");
    MultiSeries Qz = diff(Qv, "z");
    MultiSeries Qw = diff(Qv, "w");
    Prolongation out;
    out.Q1 = Qz + (Qw - Pz) * w1 - Pw * w1 * w1;
    MultiSeries P2 = embed(L.P, v2, n);
    MultiSeries Q2v = embed(L.Q, v2, n);
    MultiSeries x1 = P2.var("w1");
    MultiSeries x2 = P2.var("w2");
    MultiSeries pz = diff(P2, "z");
    MultiSeries pw = diff(P2, "w");
    MultiSeries qz = diff(Q2v, "z");
    MultiSeries qw = diff(Q2v, "w");
    out.Q2 = diff(qz, "z") + (GaussRat(2) * diff(qz, "w") - diff(pz, "z")) * x1 +
             (diff(qw, "w") - GaussRat(2) * diff(pz, "w")) * x1 * x1 - diff(pw, "w") * x1 * x1 * x1 +
             (qw - GaussRat(2) * pz) * x2 - GaussRat(3) * pw * x1 * x2;
    return out;
}

MultiSeries tangency_residual(const VectorField& L, const SingularODE& e)
{
    if (L.m != e.m) {
        throw StructuralError("tangency_residual: vector field and ODE differ in m");
    }
    const int n = std::max(L.order, e.order());
    MultiSeries ring(kODE, n);
    MultiSeries P = embed(L.P, kODE, n);
    MultiSeries Q = embed(L.Q, kODE, n);
    MultiSeries r = residual_expr(P, Q, e, ring);
    // Second derivatives of L and first derivatives of Phi are exact through
    // these degrees.
    return with_order(r, std::min(L.order - 2, e.order() - 1));
}

MultiSeries JetForm::coefficient(int component, int derivative) const
{
    auto it = coeff.find({component, derivative});
    if (it == coeff.end()) {
        int order = coeff.empty() ? 0 : coeff.begin()->second.order();
        return MultiSeries(kW, order);
    }
    return it->second;
}

MultiSeries JetForm::apply(const CauchyData& y) const
{
    const MultiSeries* comp[4] = {&y.g0, &y.g1, &y.f0, &y.f1};
    MultiSeries out;
    bool first = true;
    for (const auto& [key, c] : coeff) {
        MultiSeries term = c * with_order(w_jet(*comp[key.first], key.second), c.order());
        if (first) {
            out = term;
            first = false;
        } else {
            out += term;
        }
    }
    return out;
}

std::array<MultiSeries, 4> LinearSystem::apply(const CauchyData& y) const
{
    std::array<MultiSeries, 4> out;
    for (int i = 0; i < 4; ++i) {
        out[i] = rows[i].apply(y);
    }
    return out;
}

LinearSystem symmetry_linear_system(const SingularODE& e)
{
    const int m = e.m;
    const int n = e.order();
    MultiSeries ring(kODE, n);
    MultiSeries z = ring.var("z");
    MultiSeries w = ring.var("w");
    MultiSeries wm = pow(w, m);
    MultiSeries I2 = integrate(integrate(with_order(e.zeta_part(2), n), 0), 0);
    MultiSeries I2e = embed(I2, kODE, n);

    LinForm Q{{{{kG0, 0}, w}, {{kG1, 0}, wm * z}}};
    LinForm P{{{{kF0, 0}, ring.one()},
                {{kF1, 0}, z},
                {{kG1, 0}, GaussRat(m) * pow(w, m - 1) * z * z - GaussRat(2) * I2e},
                {{kG1, 1}, wm * z * z}}};
    LinForm R = residual_expr(P, Q, e, ring);

    LinearSystem s;
    s.m = m;
    s.order = n - 6 - m;
    if (s.order < 0) {
        throw TruncationError("symmetry_linear_system: ODE order too small for m");
    }
    const std::array<std::pair<int, int>, 4> pattern{{{0, 2}, {1, 2}, {0, 3}, {1, 3}}};
    for (const auto& [key, coef] : R.c) {
        CoeffView view = coeff_view(with_order(coef, n - 2), {"z", "zeta"});
        for (int i = 0; i < 4; ++i) {
            auto it = view.find(Exponents{pattern[i].first, pattern[i].second});
            if (it == view.end()) {
                continue;
            }
            MultiSeries cw = rename(it->second, kW);
            MultiSeries q;
            try {
                q = div_monomial(cw, {m});
            } catch (const StructuralError&) {
                throw InternalError("symmetry_linear_system: residual coefficient not divisible by w^m");
            }
            MultiSeries row = with_order(-q, s.order);
            if (!row.is_zero()) {
                s.rows[i].coeff[key] = row;
            }
        }
    }
    return s;
}

PolyMatrix frozen_matrix(const LinearSystem& s, const std::array<int, 4>& shifts)
{
    // The rows involve derivatives up to order 2.
    const int need = *std::max_element(shifts.begin(), shifts.end()) + 2;
    if (need > s.order) {
        throw TruncationError("frozen_matrix: linear system known only through degree " + std::to_string(s.order) +
                              ", need " + std::to_string(need));
    }
    PolyMatrix M(4, std::vector<UPoly>(4));
    for (int i = 0; i < 4; ++i) {
        for (const auto& [key, c] : s.rows[i].coeff) {
            auto [comp, d] = key;
            int deg = shifts[i] + d;
            if (deg > s.order) {
                throw TruncationError("frozen_matrix: linear system known only through degree " +
                                      std::to_string(s.order));
            }
            GaussRat v = c.coeff({deg});
            if (v.is_zero()) {
                continue;
            }
            // Falling factorial k (k - 1) ... (k - d + 1).
            UPoly ff = UPoly::constant(GaussRat(1));
            for (int t = 0; t < d; ++t) {
                ff = ff * (UPoly::k() - UPoly::constant(GaussRat(t)));
            }
            M[i][comp] = M[i][comp] + ff * UPoly::constant(v);
        }
    }
    return M;
}

} // namespace crnf
