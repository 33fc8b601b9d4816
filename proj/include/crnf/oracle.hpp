#pragma once

#include "crnf/linalg.hpp"
#include "crnf/normalform.hpp"
#include "crnf/ode.hpp"

#include <optional>
#include <string>
#include <vector>

namespace crnf {

// All normalization conditions of a truncated problem stacked into one system
// in the Cauchy coefficients.
struct DenseSystem {
    // Unknown j is the coefficient of w^{level} in a Cauchy component.
    std::vector<std::pair<int, int>> unknowns; // (component, level)
    std::vector<std::array<int, 3>> rows;      // Phi_{a,b,c}
    std::vector<GaussRat> targets;
    Matrix jacobian;
    std::vector<GaussRat> rhs;
};

// Highest order accepted by the dense oracle.
inline constexpr int kOracleMaxOrder = 6;

// Cauchy data of the normal form in the regime `r`, computed by stacking every
// coefficient condition up to the ODE's order and solving the whole system by
// exact Gaussian elimination.  The Jacobian is probed once at the starting
// data and the chord iteration is repeated until the conditions hold exactly.
// Unknowns that the conditions within the order leave undetermined are fixed to
// zero by the reduced-echelon convention on their level's diagonal block.  A
// singular leading block at level k raises ResonanceError(k).  Requires order <= kOracleMaxOrder.
CauchyData dense_solve_normalization(const SingularODE& e, Regime r, const NormalFormParams& p = {});

// The stacked system at the given Cauchy data (exposed for inspection).
DenseSystem dense_system(const SingularODE& e, Regime r, const NormalFormParams& p, const CauchyData& y);

struct ResidualCertificate {
    int order = 0;
    // Highest total degree through which the residual vanishes (equals order
    // when the identity holds to the truncation order; -1 when the constant
    // term already differs).
    int verified_degree = 0;
    // First nonzero residual term, as "coeff * var^e ...".
    std::optional<std::string> failing_term;

    bool holds() const { return verified_degree >= order; }
};

// Certificate for the claim lhs == rhs (same ring, compared to the smaller order).
ResidualCertificate residual_certificate(const MultiSeries& lhs, const MultiSeries& rhs);
// Certificate for a normalization: recomputes the transform of the source by
// the map of the Cauchy data and compares with the claimed normal form.
ResidualCertificate residual_certificate(const NormalFormResult& r);

} // namespace crnf
