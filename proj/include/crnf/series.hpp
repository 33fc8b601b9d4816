#pragma once

#include "crnf/gaussrat.hpp"

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace crnf {

// Exponent tuple of a monomial, one entry per ring variable.
using Exponents = std::vector<int>;

// Truncated multivariate power series with exact Gaussian-rational coefficients.
//
// The ring is fixed by an ordered list of at most four variable names and a
// total-degree bound `order`.  Coefficients are stored as Gaussian-integer
// numerators over one positive common denominator, reduced so that the gcd of
// the denominator and all numerators is one.  Terms are kept sorted by their
// exponent tuple in lexicographic order and zero coefficients are never stored,
// so two equal series always have identical internal data.
class MultiSeries {
public:
    static constexpr int kMaxVars = 4;

    struct Term {
        std::uint64_t key;
        mpz_class re;
        mpz_class im;
    };

    // The zero series of the ring with no variables and order 0.
    MultiSeries();
    // The zero series of the given ring.
    MultiSeries(std::vector<std::string> vars, int order);

    static MultiSeries from_terms(std::vector<std::string> vars, int order,
                                  const std::vector<std::pair<Exponents, GaussRat>>& terms);

    // Ring data.
    const std::vector<std::string>& vars() const { return layout_->vars; }
    int nvars() const { return static_cast<int>(layout_->vars.size()); }
    int order() const { return layout_->order; }
    int var_index(const std::string& name) const;
    bool has_var(const std::string& name) const;
    bool same_ring(const MultiSeries& o) const;

    // Elements of the same ring.
    MultiSeries zero() const;
    MultiSeries constant(const GaussRat& c) const;
    MultiSeries one() const { return constant(GaussRat(1)); }
    MultiSeries var(const std::string& name) const;
    MultiSeries var(int index) const;
    MultiSeries monomial(const Exponents& e, const GaussRat& c = GaussRat(1)) const;

    // Coefficient access.
    GaussRat coeff(const Exponents& e) const;
    GaussRat constant_term() const;
    std::vector<std::pair<Exponents, GaussRat>> terms() const;
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    // Smallest total degree of a stored term; order() + 1 for the zero series.
    int valuation() const;
    // Largest exponent of the given variable among stored terms (-1 if zero).
    int degree_in(int var) const;
    bool is_monomial() const { return terms_.size() == 1; }

    MultiSeries conj() const;
    MultiSeries operator-() const;

    MultiSeries& operator+=(const MultiSeries& o);
    MultiSeries& operator-=(const MultiSeries& o);
    MultiSeries& operator*=(const MultiSeries& o);
    MultiSeries& operator*=(const GaussRat& c);

    friend MultiSeries operator+(const MultiSeries& a, const MultiSeries& b);
    friend MultiSeries operator-(const MultiSeries& a, const MultiSeries& b);
    friend MultiSeries operator*(const MultiSeries& a, const MultiSeries& b);
    friend MultiSeries operator*(const MultiSeries& a, const GaussRat& c);
    friend MultiSeries operator*(const GaussRat& c, const MultiSeries& a) { return a * c; }
    friend MultiSeries operator+(const MultiSeries& a, const GaussRat& c) { return a + a.constant(c); }
    friend MultiSeries operator-(const MultiSeries& a, const GaussRat& c) { return a - a.constant(c); }
    friend MultiSeries operator+(const GaussRat& c, const MultiSeries& a) { return a + a.constant(c); }
    friend MultiSeries operator-(const GaussRat& c, const MultiSeries& a) { return a.constant(c) - a; }

    friend bool operator==(const MultiSeries& a, const MultiSeries& b);
    friend bool operator!=(const MultiSeries& a, const MultiSeries& b) { return !(a == b); }

    // Low-level access used by the kernels.
    const std::vector<Term>& raw_terms() const { return terms_; }
    const mpz_class& raw_den() const { return den_; }
    static MultiSeries from_raw(const MultiSeries& like, std::vector<Term> terms, mpz_class den);

    // Packing of exponent tuples into sortable keys (16 bits per variable).
    static std::uint64_t pack(const Exponents& e);
    static std::uint64_t pack(const int* e, int n);
    static void unpack(std::uint64_t key, int n, int* out);
    static int key_degree(std::uint64_t key);
    static int key_exp(std::uint64_t key, int var) { return static_cast<int>((key >> (48 - 16 * var)) & 0xFFFF); }

private:
    struct Layout {
        std::vector<std::string> vars;
        int order = 0;
    };
    std::shared_ptr<const Layout> layout_;
    std::vector<Term> terms_;
    mpz_class den_{1};

    void canonicalize();
    void require_same_ring(const MultiSeries& o, const char* op) const;
    friend MultiSeries with_layout(const MultiSeries& s, std::vector<std::string> vars, int order);
    friend MultiSeries mul_impl(const MultiSeries& a, const MultiSeries& b);
};

// Components over a common ring (the H = (f, g), Y(w), vector unknowns, ...).
using SeriesVec = std::vector<MultiSeries>;

MultiSeries add(const MultiSeries& a, const MultiSeries& b);
MultiSeries mul(const MultiSeries& a, const MultiSeries& b);
MultiSeries pow(const MultiSeries& s, int n);

// Sum of c_k * s_k over series of one ring, accumulated without intermediates.
MultiSeries linear_combination(const MultiSeries& like,
                               const std::vector<std::pair<GaussRat, const MultiSeries*>>& parts);

// Composition f(images[0], ..., images[n-1]).  All images share one ring, which
// is the ring of the result.  An image with a nonzero constant term is rejected
// (TruncationError) when f depends on that variable, unless the caller declares
// f an exact polynomial.
MultiSeries substitute(const MultiSeries& f, const SeriesVec& images, bool f_is_exact_polynomial = false);

// 1/s; throws NonUnitError when the constant term vanishes.
MultiSeries invert_unit(const MultiSeries& s);
// sum_{j <= order} s^j / j!; throws StructuralError on a nonzero constant term.
MultiSeries exp_nilpotent(const MultiSeries& s);
// sum_j coeffs[j] * x^j for x with zero constant term.
MultiSeries apply_univariate(const std::vector<GaussRat>& coeffs, const MultiSeries& x);

MultiSeries diff(const MultiSeries& s, const std::string& var);
MultiSeries diff(const MultiSeries& s, int var);
// Antiderivative vanishing at var = 0; terms pushed above the order are dropped.
MultiSeries integrate(const MultiSeries& s, int var);

// Multiplication by a monomial, and exact division by one (StructuralError if
// some term is not divisible).
MultiSeries mul_monomial(const MultiSeries& s, const Exponents& e);
MultiSeries div_monomial(const MultiSeries& s, const Exponents& e);

// Terms whose exponent of `var` equals k, with that exponent removed.
MultiSeries part(const MultiSeries& s, int var, int k);
// Terms with exponent of `var` at most k (all others dropped).
MultiSeries truncate_in(const MultiSeries& s, int var, int k);

// Same variables, new total-degree bound.  Lowering drops terms; raising keeps
// all terms, treating the series as an exact polynomial.
MultiSeries with_order(const MultiSeries& s, int order);
// Re-expresses s in a ring whose variables include all variables of s.
MultiSeries embed(const MultiSeries& s, const std::vector<std::string>& vars, int order);
// Renames variables positionally (same count).
MultiSeries rename(const MultiSeries& s, const std::vector<std::string>& vars);
// Terms of total degree at most d (others dropped, ring unchanged).
MultiSeries truncate_degree(const MultiSeries& s, int d);

// Regrouping by a subset of variables.  Keys are the exponents of the grouped
// variables (in the order given); values live in the remaining variables with
// order reduced by the key degree.
using CoeffView = std::map<Exponents, MultiSeries>;
CoeffView coeff_view(const MultiSeries& s, const std::vector<std::string>& pattern);
MultiSeries reassemble(const CoeffView& view, const std::vector<std::string>& pattern,
                       const std::vector<std::string>& vars, int order);

// Implicit-function solve of F(u, p) = 0 for u(p) with u(0) = 0.
//
// `residual` maps r candidate series in the parameter ring to the r residual
// series F(u(p), p).  The constant-term Jacobian is probed from the residual
// itself, and the chord iteration u <- u - J0^{-1} F(u) gains at least one
// degree per step, so it terminates with an exact solution.
SeriesVec solve_implicit(const std::function<SeriesVec(const SeriesVec&)>& residual,
                         const MultiSeries& param_zero, int unknowns);
// Same, for a system given as series in the ring (u_1..u_r, p_1..p_s).
SeriesVec solve_implicit(const SeriesVec& system, int unknowns);

// Lowest total degree at which a - b is nonzero (order + 1 if equal).
int first_difference_degree(const MultiSeries& a, const MultiSeries& b);

} // namespace crnf
