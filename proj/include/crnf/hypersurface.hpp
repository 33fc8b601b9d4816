#pragma once

#include "crnf/gaussrat.hpp"
#include "crnf/series.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace crnf {

// Index pair (k, l) of a coefficient z^k zbar^l.
using KL = std::pair<int, int>;
// Family of coefficient functions indexed by (k, l); each value is a
// one-variable series whose order is (family order) - k - l.
using CoeffFamily = std::map<KL, MultiSeries>;

// Real hypersurface v = (1/2) u^m (eps |z|^2 + sum_{k,l>=2} h_kl(u) z^k zbar^l),
// with w = u + i v.  Each h_kl lives in the ring ("u") with order order-k-l.
struct RealHypersurface {
    int m = 1;
    int eps = 1;
    int order = 0;
    CoeffFamily h;

    // h_kl, or the zero series of the right ring when absent.
    MultiSeries hkl(int k, int l) const;
    // The series h(z, zbar, u) of total order `order` in ("z", "zb", "u").
    MultiSeries materialize() const;
    static RealHypersurface model(int m, int eps, int order);
    static RealHypersurface from_series(int m, int eps, const MultiSeries& h);
};

// Exponential form w = wbar exp(i wbar^{m-1} phi(z, zbar, wbar)) with
// phi = eps z zbar + sum phi_kl(w) z^k zbar^l; phi_kl lives in ("w").
struct ExponentialForm {
    int m = 1;
    int eps = 1;
    int order = 0;
    CoeffFamily phi;

    MultiSeries phikl(int k, int l) const;
    // phi(z, chi, w) of total order `order` in ("z", "chi", "w").
    MultiSeries materialize() const;
};

// Complex defining function w = Theta(z, chi, tau) in ("z", "chi", "tau").
struct ComplexDefining {
    int m = 1;
    int order = 0;
    MultiSeries theta;
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> violations;
};

// Structural and Hermitian checks.  Never throws.
ValidationReport validate(const RealHypersurface& h);

ExponentialForm to_exponential(const RealHypersurface& h);
RealHypersurface from_exponential(const ExponentialForm& phi);
ComplexDefining to_complex_defining(const RealHypersurface& h);
// Theta from the real defining equation by implicit solving (independent of
// the exponential route).
ComplexDefining to_complex_defining_implicit(const RealHypersurface& h);

struct MembershipResult {
    bool ok = true;
    std::vector<std::string> violations;
};

// h22, h23, h32 constant and h33 = r + s u^{m-1} with r, s real.
MembershipResult is_normal_form(const RealHypersurface& h);
// Vanishing-order inequalities of the Fuchsian class (always true for m = 1).
MembershipResult is_fuchsian(const RealHypersurface& h);
// Fuchsian and h22 = c u^{m-1}, h23 = c u^{2m-2}, h33 = c u^{2m-2}.
MembershipResult is_fuchsian_normal_form(const RealHypersurface& h);

// Push-forward under (z, w) -> (lambda z, mu w).  Requires mu^{1-m} = s |lambda|^2
// with s = +1 or -1; the image has eps' = s eps.
RealHypersurface apply_dilation(const RealHypersurface& h, const GaussRat& lambda, const mpq_class& mu);
// Sign s of a dilation, or nullopt if mu^{1-m} != +-|lambda|^2.
std::optional<int> dilation_sign(int m, const GaussRat& lambda, const mpq_class& mu);

// Lowest exponent with a nonzero coefficient; nullopt for the zero series.
std::optional<int> lowest_degree(const MultiSeries& s);

} // namespace crnf
