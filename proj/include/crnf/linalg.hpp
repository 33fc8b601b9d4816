#pragma once

#include "crnf/gaussrat.hpp"

#include <optional>
#include <string>
#include <vector>

namespace crnf {

// Dense matrix over the Gaussian rationals.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols)) {}
    static Matrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    GaussRat& at(int i, int j) { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
    const GaussRat& at(int i, int j) const { return data_[static_cast<std::size_t>(i * cols_ + j)]; }

    friend bool operator==(const Matrix& a, const Matrix& b)
    {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }
    friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

    Matrix operator*(const Matrix& o) const;
    std::vector<GaussRat> operator*(const std::vector<GaussRat>& v) const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<GaussRat> data_;
};

GaussRat determinant(Matrix a);
int rank(Matrix a);
std::optional<Matrix> inverse(const Matrix& a);
// Unique solution of a square system; nullopt when the matrix is singular.
std::optional<std::vector<GaussRat>> solve_square(const Matrix& a, const std::vector<GaussRat>& b);
// A solution of a (possibly rectangular) consistent system, free unknowns set to
// zero (reduced echelon form); nullopt when inconsistent.
std::optional<std::vector<GaussRat>> solve_particular(const Matrix& a, const std::vector<GaussRat>& b);

// Univariate polynomial in k with Gaussian-rational coefficients.
class UPoly {
public:
    UPoly() = default;
    explicit UPoly(std::vector<GaussRat> coeffs);
    static UPoly constant(const GaussRat& c) { return UPoly({c}); }
    // The polynomial k.
    static UPoly k() { return UPoly({GaussRat(0), GaussRat(1)}); }

    // -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<GaussRat>& coeffs() const { return c_; }
    GaussRat coeff(int j) const;
    GaussRat eval(const GaussRat& k) const;
    bool is_zero() const { return c_.empty(); }

    UPoly operator+(const UPoly& o) const;
    UPoly operator-(const UPoly& o) const;
    UPoly operator*(const UPoly& o) const;
    UPoly operator-() const;
    friend bool operator==(const UPoly& a, const UPoly& b) { return a.c_ == b.c_; }
    friend bool operator!=(const UPoly& a, const UPoly& b) { return !(a == b); }

    // Human-readable "3*k^8 + ..." form (highest degree first).
    std::string to_string() const;

private:
    std::vector<GaussRat> c_;
    void trim();
};

using PolyMatrix = std::vector<std::vector<UPoly>>;
UPoly determinant(const PolyMatrix& a);
Matrix evaluate(const PolyMatrix& a, const GaussRat& k);

// Integer upper bound for the absolute values of all complex roots (Cauchy).
long cauchy_root_bound(const UPoly& p);
// Integer upper bound for the absolute values of all complex roots (Fujiwara).
long fujiwara_root_bound(const UPoly& p);
// All positive integer roots, found by evaluation on [1, min of both bounds].
// Throws StructuralError for the zero polynomial.
std::vector<long> positive_integer_roots(const UPoly& p);

} // namespace crnf
