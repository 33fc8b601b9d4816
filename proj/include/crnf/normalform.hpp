#pragma once

#include "crnf/errors.hpp"
#include "crnf/hypersurface.hpp"
#include "crnf/linalg.hpp"
#include "crnf/ode.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace crnf {

enum class Regime { kM1, kMGeneral, kMSpecial, kFuchsian };
std::string regime_name(Regime r);

// alpha_j = A_j(0), beta_j = B_j(0), gamma_j = C_j(0).
struct EulerCoefficients {
    GaussRat alpha0, alpha1, alpha2, beta0, beta1, beta2, gamma0, gamma1;

    static EulerCoefficients of(const SingularODE& e);
};

// Fuchsian constants: alpha0 = [w^{m-1}] A0, alpha0s = [w^m] A0, and for the
// remaining series S in (A1, A2, B0, B1, B2, C0, C1) the [w^{2m-2}] coefficient
// (starred: [w^{2m-1}]).
struct FuchsianCoefficients {
    GaussRat alpha0, alpha0s, alpha1, alpha1s, alpha2, beta0, beta1, beta2, beta0s, beta1s, gamma0, gamma1;

    static FuchsianCoefficients of(const SingularODE& e);
};

// Recursion matrix for the Taylor coefficients of the Cauchy data at level k.
// Columns are ordered (g0, g1, f0, f1).  Rows correspond to the coefficients
// Phi_{0,*,2}, Phi_{1,*,2}, Phi_{0,*,3}, Phi_{1,*,3} read at the level's degree.
struct EulerMatrix {
    int k = 1;
    Regime regime = Regime::kM1;
    Matrix entries;
};

// Row signs relating a regime's recursion matrix to the first variation of the
// four normalized coefficients under the Cauchy data (diag(-1, 1, 1, 1) for m = 1
// and Fuchsian, identity otherwise).
std::array<int, 4> first_variation_row_signs(Regime r);

// m = 1: rows
//   [k(k+1-a0), -3 b0, -a1, -2k]
//   [a1 k, 3k(k+1-a0) + 3 b1, 2 a2, a1]
//   [2k b0, 4 c0, k(k-1+a0) + b1, -b0]
//   [2k b1, 2 b0 (a0 - 1) + 4 c1, k a1 + 2 b2, k(k-1+a0)].
PolyMatrix euler_poly_m1(const EulerCoefficients& c);
EulerMatrix build_euler_matrix_m1(int k, const EulerCoefficients& c);

// m > 1: the matrix with rows
//   [a0 (k+1-m), 3 b0, a1, 0], [a1 (k+1-m), 3 b1, 2 a2, a1],
//   [2 b0 (k+1-m), 4 c0, b1, -b0], [2 b1 (k+1-m), 2 b0 a0 + 4 c1, 2 b2, 0];
// regime kMSpecial (first column zero) when k = m - 1.
PolyMatrix euler_poly_m(int m, const EulerCoefficients& c);
EulerMatrix build_euler_matrices_m(int k, int m, const EulerCoefficients& c);

// Fuchsian regime (m > 1), rows
//   [k(k+1-a0), 0, 0, -2k]
//   [a1 (k+m-1), 3(k+m-1)(k+m-a0) + 3 b1, 2 a2, a1]
//   [2k b0, 4 c0, k(k-1+a0) + b1, -b0]
//   [2k b1, 4 c1, 2 b2, k(k-1+a0)].
PolyMatrix fuchsian_poly(int m, const FuchsianCoefficients& c);
EulerMatrix build_fuchsian_matrix(int k, int m, const FuchsianCoefficients& c);

struct ResonanceReport {
    Regime regime = Regime::kM1;
    std::vector<long> resonant_ks;
    std::optional<UPoly> det_poly;
    // m = 1: det_poly with the common factor k of the first column removed.
    std::optional<UPoly> reduced_det_poly;
    // m > 1 general regime: the k-independent 4x4 matrix and its upper-right
    // 3x3 minor.
    std::optional<Matrix> matrix_44;
    bool matrix_44_invertible = true;
    bool matrix_33_invertible = true;
    // Set when the report could not be computed (for example, constants beyond
    // the truncation order).
    std::string note;

    bool resonant() const { return !resonant_ks.empty() || !matrix_44_invertible || !matrix_33_invertible; }
};

ResonanceReport resonance_m1(const SingularODE& e);
ResonanceReport resonance_m(const SingularODE& e);
ResonanceReport resonance_fuchsian(const SingularODE& e);

struct NormalFormParams {
    GaussRat lambda = GaussRat(1);
    // Defaults: 1 for m = 1; otherwise the rational solution of
    // mu^{1-m} = |lambda|^2 (ParameterError if there is none).
    std::optional<mpq_class> mu;
    mpq_class tau = 0;
    // Defaults: (1/4 (m-1)(m+2) + 1/2, 0).
    std::optional<std::array<mpq_class, 2>> sigma;
    mpq_class sigma_fuchsian = 0;
};

std::array<mpq_class, 2> default_sigma(int m);
// mu for the given parameters; validated against the dilation constraint
// mu^{1-m} = +-|lambda|^2.
mpq_class resolve_mu(int m, const NormalFormParams& p);

struct NormalFormResult {
    Regime regime = Regime::kM1;
    // The source after the dilation (lambda, mu) was applied.
    SingularODE source;
    SingularODE normalized;
    NormalizedMap map;
    CauchyData cauchy;
    NormalFormParams params;
    mpq_class mu = 1;
    // Phi_{1,m-1,3} of the normal form (m > 1, general regime).
    std::optional<GaussRat> invariant_coeff;
    // Phi_{0,m-1,2}, Phi_{0,2m-2,3}, Phi_{1,2m-2,2}, Phi_{1,2m-2,3} (Fuchsian).
    std::optional<std::array<GaussRat, 4>> fuchsian_invariants;
    ResonanceReport resonance;
    // Present for the hypersurface pipeline.
    std::optional<RealHypersurface> hypersurface;
};

// Membership in the normal-form spaces, checked on every coefficient that is
// within the ODE's order.
MembershipResult in_D1(const SingularODE& e);
MembershipResult in_Dm(const SingularODE& e, const std::array<mpq_class, 2>& sigma);
MembershipResult in_Fuchsian_space(const SingularODE& e, const mpq_class& sigma);

MembershipResult fuchsian_check_ode(const SingularODE& e);

NormalFormResult normalize_m1(const SingularODE& e, const NormalFormParams& p = {});
NormalFormResult normalize_m(const SingularODE& e, const NormalFormParams& p = {});
NormalFormResult normalize_fuchsian(const SingularODE& e, const NormalFormParams& p = {});
// Fuchsian regime for Fuchsian input with m > 1, general regime otherwise.
NormalFormResult normalize_ode(const SingularODE& e, const NormalFormParams& p = {});
NormalFormResult normalize_hypersurface(const RealHypersurface& h, const NormalFormParams& p = {});

struct EquivalenceVerdict {
    bool equivalent = false;
    int order = 0;
    std::optional<GaussRat> lambda;
    std::optional<mpq_class> mu;
    // First coefficient (k, l, j) of h_kl u^j where the normal forms differ
    // (after the closest dilation candidate).
    std::optional<std::array<int, 3>> distinguishing;
    std::string message;
};

EquivalenceVerdict equivalence_test(const RealHypersurface& h1, const RealHypersurface& h2,
                                    const NormalFormParams& p = {});

// The four normalization conditions at level k of a regime: coefficient indices
// (a, b, c) of Phi_{a,b,c}.
std::array<std::array<int, 3>, 4> level_conditions(Regime r, int m, int k);
// Highest level whose first condition is within the given ODE order.
int top_level(Regime r, int m, int order);

// The level-1 system of a Fuchsian ODE can contain products of the unknowns;
// the normalizer refuses such inputs.
class NonlinearLevelError : public Error {
public:
    NonlinearLevelError(int k, const std::string& what) : Error(what), k_(k) {}
    int k() const { return k_; }

private:
    int k_;
};

} // namespace crnf
