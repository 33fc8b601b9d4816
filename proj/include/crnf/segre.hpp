#pragma once

#include "crnf/hypersurface.hpp"
#include "crnf/series.hpp"

#include <optional>
#include <string>

namespace crnf {

// m-admissible Segre family
//   w = eta * exp(i * sign * eta^{m-1} * psi(z, xi, eta)),
//   psi = z*xi + sum_{k,l>=2} phi_kl(eta) z^k xi^l,
// with xi, eta independent formal parameters.  phi_kl lives in ("eta") with
// order order-k-l.  A negative family (sign = -1) built from a hypersurface with
// eps = -1 stores eps * phi^exp_kl, so that its leading term is +z*xi.
struct SegreFamily {
    int m = 1;
    int sign = 1;
    int order = 0;
    CoeffFamily phi;

    MultiSeries phikl(int k, int l) const;
    // psi(z, xi, eta) in ("z", "xi", "eta").
    MultiSeries materialize() const;
    // eta * exp(i sign eta^{m-1} psi), the defining function rho(z, xi, eta).
    MultiSeries defining_function() const;
    static SegreFamily from_series(int m, int sign, const MultiSeries& psi);
};

SegreFamily segre_of_hypersurface(const ExponentialForm& phi);
ExponentialForm exponential_of_segre(const SegreFamily& s);

// Family obtained by exchanging the roles of points and parameters.
SegreFamily dual(const SegreFamily& s);
// All coefficients conjugated, sign flipped.
SegreFamily conjugate(const SegreFamily& s);

struct RealityReport {
    bool real = true;
    std::string first_mismatch;
};
// dual(s) == conjugate(s) coefficientwise.
RealityReport reality_check(const SegreFamily& s);

// Holomorphic plane map (z, w) -> (F, G) given by series in ("z", "w").
struct PlaneMap {
    MultiSeries F;
    MultiSeries G;
};

// A map of Segre families: (z, w, xi, eta) -> (F, G, Lambda, Omega).
struct ProductMap {
    PlaneMap FG;
    // Parameter map, series in ("xi", "eta").
    MultiSeries Lambda;
    MultiSeries Omega;
    // Highest degree through which G(z, rho1) = rho2(F(z, rho1), Lambda, Omega)
    // was verified.
    int certified_degree = -1;
};

// Recovers the parameter map (Lambda, Omega) with Lambda(0,0) = 0 and
// Omega/eta = 1 at the origin so that (F, G, Lambda, Omega) sends s1 into s2.
// Throws ValidationError when no such map exists to the family order.
ProductMap recover_parameter_map(const SegreFamily& s1, const SegreFamily& s2, const PlaneMap& fg);

} // namespace crnf
