#include "crnf/oracle.hpp"

#include "crnf/errors.hpp"
#include "crnf/symmetry.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace crnf {

namespace {

struct Condition {
    std::array<int, 3> abc;
    GaussRat target;
    int level;
};

int total_degree(const std::array<int, 3>& abc) { return abc[0] + abc[1] + abc[2]; }

// Constrained coefficients of the normal-form space, listed per level.
std::vector<Condition> conditions(Regime r, int m, int order, const NormalFormParams& p)
{
    std::array<mpq_class, 2> sigma = p.sigma ? *p.sigma : default_sigma(m);
    std::vector<Condition> out;
    for (int k = 1; k <= top_level(r, m, order); ++k) {
        auto abc = level_conditions(r, m, k);
        for (int i = 0; i < 4; ++i) {
            if (total_degree(abc[i]) > order) {
                continue;
            }
            GaussRat t(0);
            if (r == Regime::kMGeneral) {
                if (i == 0 && k == m - 1) {
                    t = GaussRat(m);
                }
                if (i == 3 && k == m - 1) {
                    continue;
                }
                if (i == 3 && k == 2 * m - 2) {
                    t = GaussRat(sigma[0]);
                } else if (i == 3 && k == 3 * m - 3) {
                    t = GaussRat(sigma[1]);
                }
            } else if (r == Regime::kFuchsian && i == 3 && k == m - 1) {
                t = GaussRat(p.sigma_fuchsian);
            }
            out.push_back({abc[i], t, k});
        }
    }
    return out;
}

// Pivot columns of the reduced echelon form, scanning columns left to right.
std::vector<int> pivot_columns(Matrix a)
{
    std::vector<int> pivots;
    int row = 0;
    for (int c = 0; c < a.cols() && row < a.rows(); ++c) {
        int piv = -1;
        for (int i = row; i < a.rows(); ++i) {
            if (!a.at(i, c).is_zero()) {
                piv = i;
                break;
            }
        }
        if (piv < 0) {
            continue;
        }
        for (int j = 0; j < a.cols(); ++j) {
            std::swap(a.at(row, j), a.at(piv, j));
        }
        for (int i = 0; i < a.rows(); ++i) {
            if (i == row || a.at(i, c).is_zero()) {
                continue;
            }
            GaussRat f = a.at(i, c) / a.at(row, c);
            for (int j = c; j < a.cols(); ++j) {
                a.at(i, j) -= f * a.at(row, j);
            }
        }
        pivots.push_back(c);
        ++row;
    }
    return pivots;
}

MultiSeries& slot(CauchyData& y, int comp)
{
    switch (comp) {
    case kG0:
        return y.g0;
    case kG1:
        return y.g1;
    case kF0:
        return y.f0;
    default:
        return y.f1;
    }
}

void bump(CauchyData& y, int comp, int level, const GaussRat& v)
{
    MultiSeries& s = slot(y, comp);
    s += s.monomial({level}, v);
}

struct Layout {
    std::vector<Condition> rows;
    std::vector<std::pair<int, int>> unknowns;
    CauchyData base;
};

std::vector<GaussRat> evaluate_rows(const SingularODE& e, const CauchyData& y, const std::vector<Condition>& rows)
{
    SingularODE t = transform_ode(e, cauchy_extend(e, y));
    std::vector<GaussRat> out;
    out.reserve(rows.size());
    for (const auto& c : rows) {
        out.push_back(t.Phi_abc(c.abc[0], c.abc[1], c.abc[2]));
    }
    return out;
}

Matrix probe_jacobian(const SingularODE& e, const Layout& L, const CauchyData& y, const std::vector<GaussRat>& at)
{
    const int nr = static_cast<int>(L.rows.size());
    const int nu = static_cast<int>(L.unknowns.size());
    Matrix J(nr, nu);
    for (int u = 0; u < nu; ++u) {
        CauchyData probe = y;
        bump(probe, L.unknowns[u].first, L.unknowns[u].second, GaussRat(1));
        std::vector<GaussRat> v = evaluate_rows(e, probe, L.rows);
        for (int i = 0; i < nr; ++i) {
            J.at(i, u) = v[i] - at[i];
        }
    }
    return J;
}

Layout layout(const SingularODE& e, Regime r, const NormalFormParams& p)
{
    const int m = e.m;
    const int n = e.order();
    const int top = top_level(r, m, n);
    Layout all;
    all.rows = conditions(r, m, n, p);
    all.base = CauchyData::zero(n);
    for (int k = 1; k <= top; ++k) {
        for (int c = 0; c < 4; ++c) {
            if (r == Regime::kMGeneral && k == m - 1 && c == kG0) {
                bump(all.base, c, k, GaussRat(p.tau));
            } else {
                all.unknowns.push_back({c, k});
            }
        }
    }
    std::vector<GaussRat> at = evaluate_rows(e, all.base, all.rows);
    Matrix J = probe_jacobian(e, all, all.base, at);
    // Unknowns that the conditions within the order leave undetermined are
    // fixed to zero by the echelon convention on the level's diagonal block.
    Layout out;
    out.rows = all.rows;
    out.base = all.base;
    for (int k = 1; k <= top; ++k) {
        std::vector<int> rs;
        std::vector<int> cs;
        for (std::size_t i = 0; i < all.rows.size(); ++i) {
            if (all.rows[i].level == k) {
                rs.push_back(static_cast<int>(i));
            }
        }
        for (std::size_t j = 0; j < all.unknowns.size(); ++j) {
            if (all.unknowns[j].second == k) {
                cs.push_back(static_cast<int>(j));
            }
        }
        std::vector<int> keep(cs.size());
        std::iota(keep.begin(), keep.end(), 0);
        if (rs.size() < cs.size()) {
            Matrix sub(static_cast<int>(rs.size()), static_cast<int>(cs.size()));
            for (std::size_t i = 0; i < rs.size(); ++i) {
                for (std::size_t j = 0; j < cs.size(); ++j) {
                    sub.at(static_cast<int>(i), static_cast<int>(j)) = J.at(rs[i], cs[j]);
                }
            }
            keep = pivot_columns(sub);
        }
        for (int j : keep) {
            out.unknowns.push_back(all.unknowns[cs[j]]);
        }
    }
    return out;
}

// First level whose leading block of the stacked system loses rank.
int first_singular_level(const Layout& L, const Matrix& J, int top)
{
    for (int k = 1; k <= top; ++k) {
        std::vector<int> rs;
        std::vector<int> cs;
        for (std::size_t i = 0; i < L.rows.size(); ++i) {
            if (L.rows[i].level <= k) {
                rs.push_back(static_cast<int>(i));
            }
        }
        for (std::size_t j = 0; j < L.unknowns.size(); ++j) {
            if (L.unknowns[j].second <= k) {
                cs.push_back(static_cast<int>(j));
            }
        }
        Matrix sub(static_cast<int>(rs.size()), static_cast<int>(cs.size()));
        for (std::size_t i = 0; i < rs.size(); ++i) {
            for (std::size_t j = 0; j < cs.size(); ++j) {
                sub.at(static_cast<int>(i), static_cast<int>(j)) = J.at(rs[i], cs[j]);
            }
        }
        if (rank(sub) < static_cast<int>(rs.size())) {
            return k;
        }
    }
    return top;
}

SingularODE oracle_source(const SingularODE& e, const NormalFormParams& p)
{
    mpq_class mu = resolve_mu(e.m, p);
    if (p.lambda == GaussRat(1) && mu == 1) {
        return e;
    }
    return dilate_ode(e, p.lambda, GaussRat(mu));
}

std::string term_string(const MultiSeries& s, const Exponents& ex, const GaussRat& c)
{
    std::ostringstream os;
    os << "(" << c.to_string() << ")";
    for (std::size_t i = 0; i < ex.size(); ++i) {
        if (ex[i] > 0) {
            os << " * " << s.vars()[i];
            if (ex[i] > 1) {
                os << "^" << ex[i];
            }
        }
    }
    return os.str();
}

} // namespace

DenseSystem dense_system(const SingularODE& e, Regime r, const NormalFormParams& p, const CauchyData& y)
{
    Layout L = layout(e, r, p);
    DenseSystem out;
    out.unknowns = L.unknowns;
    std::vector<GaussRat> at = evaluate_rows(e, y, L.rows);
    for (std::size_t i = 0; i < L.rows.size(); ++i) {
        out.rows.push_back(L.rows[i].abc);
        out.targets.push_back(L.rows[i].target);
        out.rhs.push_back(L.rows[i].target - at[i]);
    }
    out.jacobian = probe_jacobian(e, L, y, at);
    return out;
}

CauchyData dense_solve_normalization(const SingularODE& input, Regime r, const NormalFormParams& p)
{
    if (input.order() > kOracleMaxOrder) {
        throw ParameterError("dense oracle: order " + std::to_string(input.order()) + " exceeds " +
                             std::to_string(kOracleMaxOrder));
    }
    if ((r == Regime::kM1) != (input.m == 1)) {
        throw ParameterError("dense oracle: regime does not match m");
    }
    SingularODE e = oracle_source(input, p);
    const int n = e.order();
    const int top = top_level(r, e.m, n);
    Layout L = layout(e, r, p);
    CauchyData y = L.base;
    std::vector<GaussRat> targets;
    for (const auto& c : L.rows) {
        targets.push_back(c.target);
    }
    std::vector<GaussRat> at = evaluate_rows(e, y, L.rows);
    Matrix J = probe_jacobian(e, L, y, at);
    if (L.rows.size() != L.unknowns.size() || rank(J) < J.rows()) {
        int k = first_singular_level(L, J, top);
        throw ResonanceError(k, "dense oracle: stacked system singular at level " + std::to_string(k));
    }
    // Each chord step fixes at least one more level.
    for (int iter = 0; iter <= top + 1; ++iter) {
        if (at == targets) {
            return y;
        }
        std::vector<GaussRat> rhs(at.size());
        for (std::size_t i = 0; i < at.size(); ++i) {
            rhs[i] = targets[i] - at[i];
        }
        auto step = solve_square(J, rhs);
        if (!step) {
            throw InternalError("dense oracle: full-rank system reported singular");
        }
        for (std::size_t u = 0; u < L.unknowns.size(); ++u) {
            bump(y, L.unknowns[u].first, L.unknowns[u].second, (*step)[u]);
        }
        at = evaluate_rows(e, y, L.rows);
    }
    for (std::size_t i = 0; i < at.size(); ++i) {
        if (at[i] != targets[i]) {
            throw NonlinearLevelError(L.rows[i].level, "dense oracle: chord iteration did not converge at level " +
                                                           std::to_string(L.rows[i].level));
        }
    }
    return y;
}

ResidualCertificate residual_certificate(const MultiSeries& lhs, const MultiSeries& rhs)
{
    if (lhs.vars() != rhs.vars()) {
        throw StructuralError("residual_certificate: operands live in different rings");
    }
    const int order = std::min(lhs.order(), rhs.order());
    MultiSeries d = with_order(lhs, order) - with_order(rhs, order);
    ResidualCertificate c;
    c.order = order;
    if (d.is_zero()) {
        c.verified_degree = order;
        return c;
    }
    c.verified_degree = d.valuation() - 1;
    for (const auto& [ex, v] : d.terms()) {
        int deg = 0;
        for (int x : ex) {
            deg += x;
        }
        if (deg == d.valuation()) {
            c.failing_term = term_string(d, ex, v);
            break;
        }
    }
    return c;
}

ResidualCertificate residual_certificate(const NormalFormResult& r)
{
    SingularODE recomputed = transform_ode(r.source, cauchy_extend(r.source, r.cauchy));
    return residual_certificate(recomputed.Phi, r.normalized.Phi);
}

} // namespace crnf
