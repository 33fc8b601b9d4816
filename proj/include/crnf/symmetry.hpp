#pragma once

#include "crnf/linalg.hpp"
#include "crnf/ode.hpp"
#include "crnf/series.hpp"

#include <array>
#include <map>
#include <utility>

namespace crnf {

// Vector field L = P d/dz + Q d/dw with P, Q in ("z", "w").
struct VectorField {
    int m = 1;
    int order = 0;
    MultiSeries P;
    MultiSeries Q;

    // Checks the shape Q = w g0(w) + w^m (g1(w) z + g2(w) z^2 + ...); throws
    // ValidationError.
    void validate() const;
    // The first-order part of the normalized map with the given Cauchy data
    // whose flow keeps `e` normalized: Q = w g0 + w^m g1 z and
    // P = f0 + f1 z + (m w^{m-1} g1 + w^m g1') z^2 - 2 g1 I(Phi_2), where
    // I(Phi_2) is the double z-antiderivative of the zeta^2 part of Phi.
    static VectorField from_cauchy(const SingularODE& e, const CauchyData& data);
};

// Second jet prolongation: Q1 in ("z", "w", "w1"), Q2 in ("z", "w", "w1", "w2").
struct Prolongation {
    MultiSeries Q1;
    MultiSeries Q2;
};

Prolongation prolong2(const VectorField& L);

// L^(2) applied to w2 - w^m Phi(z, w, w1 / w^m), restricted to the ODE and
// written in ("z", "w", "zeta") with w1 = w^m zeta.  L is an infinitesimal
// symmetry iff the result vanishes; in general it equals -w^m times the first
// variation of Phi under the pull-back by the flow of L.
MultiSeries tangency_residual(const VectorField& L, const SingularODE& e);

// Index of a Cauchy component in linear systems and Euler matrices.
enum Component { kG0 = 0, kG1 = 1, kF0 = 2, kF1 = 3 };

// sum over (component, derivative order) of c(w) * component^(derivative).
struct JetForm {
    std::map<std::pair<int, int>, MultiSeries> coeff;

    MultiSeries coefficient(int component, int derivative) const;
    // Value on concrete Cauchy data, as a series in ("w") of the form's order.
    MultiSeries apply(const CauchyData& y) const;
};

// The four linear ODEs for (g0, g1, f0, f1): the first variations of the
// coefficients of z^0 zeta^2, z^1 zeta^2, z^0 zeta^3, z^1 zeta^3 of Phi
// (that is, of -R / w^m for the tangency residual R of from_cauchy(e, Y)).
struct LinearSystem {
    int m = 1;
    int order = 0;
    std::array<JetForm, 4> rows;

    std::array<MultiSeries, 4> apply(const CauchyData& y) const;
};

LinearSystem symmetry_linear_system(const SingularODE& e);

// Recursion matrix of a linear system for the ansatz component = w^k: entry
// (i, j) is the coefficient of w^{shift_i + k} in row i applied to w^k in
// component j, as a polynomial in k.
PolyMatrix frozen_matrix(const LinearSystem& s, const std::array<int, 4>& shifts);

} // namespace crnf
