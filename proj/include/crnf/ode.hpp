#pragma once

#include "crnf/segre.hpp"
#include "crnf/series.hpp"

#include <vector>

namespace crnf {

// Second-order ODE w'' = w^m * Phi(z, w, zeta) with zeta = w'/w^m.
// Phi lives in ("z", "w", "zeta"); Phi_{a,b,c} denotes the coefficient of
// z^a w^b zeta^c.  Phi of a normalized ODE is O(zeta^2); in that case
// A_j, B_j, C_j are the coefficients of z^j zeta^2, z^j zeta^3, z^j zeta^4.
struct SingularODE {
    int m = 1;
    MultiSeries Phi;

    int order() const { return Phi.order(); }
    // Coefficient of zeta^c as a series in ("z", "w").
    MultiSeries zeta_part(int c) const;
    // Coefficient of z^j zeta^c as a series in ("w").
    MultiSeries coefficient(int j, int c) const;
    MultiSeries A(int j) const { return coefficient(j, 2); }
    MultiSeries B(int j) const { return coefficient(j, 3); }
    MultiSeries C(int j) const { return coefficient(j, 4); }
    GaussRat Phi_abc(int a, int b, int c) const { return Phi.coeff({a, b, c}); }
    bool is_normalized() const;

    static SingularODE zero(int m, int order);
};

// Map (z, w) -> (z + f, w (1 + g0(w)) + w^m g(z, w)) with f_z(0,0) = 0,
// g0(0) = 0 and g = O(z w).  f, g live in ("z", "w") and g0 in ("w"); all are
// treated as exact polynomials when used at a higher order.
struct NormalizedMap {
    int m = 1;
    int order = 0;
    MultiSeries f;
    MultiSeries g0;
    MultiSeries g;

    static NormalizedMap identity(int m, int order);
    MultiSeries X() const;
    MultiSeries W() const;
    PlaneMap plane_map() const { return {X(), W()}; }
    // Checks the normalization conditions; throws ValidationError.
    void validate() const;
    // Rebuilds a normalized map from full components (X, W) in ("z", "w") of
    // order n; the result has order n - m because g = (W - W(0,w)) / w^m.
    static NormalizedMap from_components(int m, const MultiSeries& X, const MultiSeries& W);
};

// (this o other)(z, w) = this(other(z, w)).
NormalizedMap compose(const NormalizedMap& outer, const NormalizedMap& inner);

// Cauchy data of a normalized map: f = f0 + f1 z + O(z^2), g = g1 z + O(z^2).
struct CauchyData {
    MultiSeries f0;
    MultiSeries f1;
    MultiSeries g0;
    MultiSeries g1;

    static CauchyData zero(int order);
};

// ODE whose solutions are the curves of the family; order = family order - 2.
SingularODE ode_of_segre(const SegreFamily& s);
// Family of the given sign solving the ODE; order = ODE order + 2.
SegreFamily segre_of_ode(const SingularODE& e, int sign);

// ODE E with H(E) = target; H must have order >= target order + 2 or is
// zero-padded (treated as exact polynomial data).
SingularODE transform_ode(const SingularODE& target, const NormalizedMap& h);

// Unique normalized map with the given Cauchy data whose pullback of `target`
// is O(zeta^2); the map has order target.order() + 2.
NormalizedMap cauchy_extend(const SingularODE& target, const CauchyData& data);

// Image of the ODE under (z, w) -> (lambda z, mu w).
SingularODE dilate_ode(const SingularODE& e, const GaussRat& lambda, const GaussRat& mu);

// The ODE of the hypersurface (through its exponential form and Segre family).
SingularODE ode_of_hypersurface(const RealHypersurface& h);
RealHypersurface hypersurface_of_ode(const SingularODE& e, int eps);

// A0, A1, B0, B1 of ode_of_hypersurface(h) in closed form from h_22, h_23,
// h_32, h_33 (same orders as the ODE's coefficient series).  The constant
// term of B1 is (1/4 (m-1)(m+2) + 1/2) w^{2m-2}.
struct TransferCoefficients {
    MultiSeries A0, A1, B0, B1;
};
TransferCoefficients transfer_from_h(const RealHypersurface& h);

struct LowOrderInvariants {
    MultiSeries A0, A1, A2, B0, B1, B2, C0, C1;
};
LowOrderInvariants low_order_invariants(const SingularODE& e);

} // namespace crnf
