#include "crnf/linalg.hpp"

#include "crnf/errors.hpp"

#include <algorithm>
#include <sstream>

namespace crnf {

Matrix Matrix::identity(int n)
{
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        m.at(i, i) = GaussRat(1);
    }
    return m;
}

Matrix Matrix::operator*(const Matrix& o) const
{
    if (cols_ != o.rows_) {
        throw StructuralError("matrix product: shape mismatch");
    }
    Matrix r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i) {
        for (int j = 0; j < o.cols_; ++j) {
            GaussRat acc;
            for (int t = 0; t < cols_; ++t) {
                if (!at(i, t).is_zero() && !o.at(t, j).is_zero()) {
                    acc += at(i, t) * o.at(t, j);
                }
            }
            r.at(i, j) = acc;
        }
    }
    return r;
}

std::vector<GaussRat> Matrix::operator*(const std::vector<GaussRat>& v) const
{
    if (static_cast<int>(v.size()) != cols_) {
        throw StructuralError("matrix-vector product: shape mismatch");
    }
    std::vector<GaussRat> r(static_cast<std::size_t>(rows_));
    for (int i = 0; i < rows_; ++i) {
        for (int t = 0; t < cols_; ++t) {
            if (!at(i, t).is_zero() && !v[static_cast<std::size_t>(t)].is_zero()) {
                r[static_cast<std::size_t>(i)] += at(i, t) * v[static_cast<std::size_t>(t)];
            }
        }
    }
    return r;
}

namespace {

// Gaussian elimination on an augmented matrix; returns pivot columns.
std::vector<int> row_reduce(Matrix& a, int ncols_to_pivot)
{
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < ncols_to_pivot && r < a.rows(); ++c) {
        int p = -1;
        for (int i = r; i < a.rows(); ++i) {
            if (!a.at(i, c).is_zero()) {
                p = i;
                break;
            }
        }
        if (p < 0) {
            continue;
        }
        if (p != r) {
            for (int j = 0; j < a.cols(); ++j) {
                std::swap(a.at(p, j), a.at(r, j));
            }
        }
        GaussRat inv = a.at(r, c).inverse();
        for (int j = c; j < a.cols(); ++j) {
            a.at(r, j) *= inv;
        }
        for (int i = 0; i < a.rows(); ++i) {
            if (i == r || a.at(i, c).is_zero()) {
                continue;
            }
            GaussRat f = a.at(i, c);
            for (int j = c; j < a.cols(); ++j) {
                if (!a.at(r, j).is_zero()) {
                    a.at(i, j) -= f * a.at(r, j);
                }
            }
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

} // namespace

GaussRat determinant(Matrix a)
{
    if (a.rows() != a.cols()) {
        throw StructuralError("determinant of a non-square matrix");
    }
    int n = a.rows();
    GaussRat det(1);
    for (int c = 0; c < n; ++c) {
        int p = -1;
        for (int i = c; i < n; ++i) {
            if (!a.at(i, c).is_zero()) {
                p = i;
                break;
            }
        }
        if (p < 0) {
            return GaussRat(0);
        }
        if (p != c) {
            for (int j = 0; j < n; ++j) {
                std::swap(a.at(p, j), a.at(c, j));
            }
            det = -det;
        }
        det *= a.at(c, c);
        GaussRat inv = a.at(c, c).inverse();
        for (int i = c + 1; i < n; ++i) {
            if (a.at(i, c).is_zero()) {
                continue;
            }
            GaussRat f = a.at(i, c) * inv;
            for (int j = c; j < n; ++j) {
                if (!a.at(c, j).is_zero()) {
                    a.at(i, j) -= f * a.at(c, j);
                }
            }
        }
    }
    return det;
}

int rank(Matrix a)
{
    return static_cast<int>(row_reduce(a, a.cols()).size());
}

std::optional<Matrix> inverse(const Matrix& a)
{
    int n = a.rows();
    if (n != a.cols()) {
        throw StructuralError("inverse of a non-square matrix");
    }
    Matrix aug(n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            aug.at(i, j) = a.at(i, j);
        }
        aug.at(i, n + i) = GaussRat(1);
    }
    auto piv = row_reduce(aug, n);
    if (static_cast<int>(piv.size()) < n) {
        return std::nullopt;
    }
    Matrix inv(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            inv.at(i, j) = aug.at(i, n + j);
        }
    }
    return inv;
}

std::optional<std::vector<GaussRat>> solve_square(const Matrix& a, const std::vector<GaussRat>& b)
{
    if (a.rows() != a.cols()) {
        throw StructuralError("solve_square: non-square matrix");
    }
    auto x = solve_particular(a, b);
    if (!x || rank(a) < a.rows()) {
        return std::nullopt;
    }
    return x;
}

std::optional<std::vector<GaussRat>> solve_particular(const Matrix& a, const std::vector<GaussRat>& b)
{
    if (static_cast<int>(b.size()) != a.rows()) {
        throw StructuralError("solve: right-hand side length mismatch");
    }
    Matrix aug(a.rows(), a.cols() + 1);
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) {
            aug.at(i, j) = a.at(i, j);
        }
        aug.at(i, a.cols()) = b[static_cast<std::size_t>(i)];
    }
    auto piv = row_reduce(aug, a.cols());
    for (int i = static_cast<int>(piv.size()); i < a.rows(); ++i) {
        if (!aug.at(i, a.cols()).is_zero()) {
            return std::nullopt;
        }
    }
    std::vector<GaussRat> x(static_cast<std::size_t>(a.cols()));
    for (std::size_t r = 0; r < piv.size(); ++r) {
        x[static_cast<std::size_t>(piv[r])] = aug.at(static_cast<int>(r), a.cols());
    }
    return x;
}

UPoly::UPoly(std::vector<GaussRat> coeffs) : c_(std::move(coeffs))
{
    trim();
}

void UPoly::trim()
{
    while (!c_.empty() && c_.back().is_zero()) {
        c_.pop_back();
    }
}

GaussRat UPoly::coeff(int j) const
{
    if (j < 0 || j >= static_cast<int>(c_.size())) {
        return GaussRat(0);
    }
    return c_[static_cast<std::size_t>(j)];
}

GaussRat UPoly::eval(const GaussRat& k) const
{
    GaussRat acc;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
        acc = acc * k + *it;
    }
    return acc;
}

UPoly UPoly::operator+(const UPoly& o) const
{
    std::vector<GaussRat> r(std::max(c_.size(), o.c_.size()));
    for (std::size_t j = 0; j < r.size(); ++j) {
        r[j] = coeff(static_cast<int>(j)) + o.coeff(static_cast<int>(j));
    }
    return UPoly(std::move(r));
}

UPoly UPoly::operator-(const UPoly& o) const
{
    return *this + (-o);
}

UPoly UPoly::operator-() const
{
    std::vector<GaussRat> r(c_);
    for (auto& x : r) {
        x = -x;
    }
    return UPoly(std::move(r));
}

UPoly UPoly::operator*(const UPoly& o) const
{
    if (c_.empty() || o.c_.empty()) {
        return UPoly();
    }
    std::vector<GaussRat> r(c_.size() + o.c_.size() - 1);
    for (std::size_t i = 0; i < c_.size(); ++i) {
        for (std::size_t j = 0; j < o.c_.size(); ++j) {
            r[i + j] += c_[i] * o.c_[j];
        }
    }
    return UPoly(std::move(r));
}

std::string UPoly::to_string() const
{
    if (c_.empty()) {
        return "0";
    }
    std::ostringstream os;
    bool first = true;
    for (int j = degree(); j >= 0; --j) {
        const GaussRat& c = c_[static_cast<std::size_t>(j)];
        if (c.is_zero()) {
            continue;
        }
        if (!first) {
            os << " + ";
        }
        first = false;
        bool simple = c.is_real() || sgn(c.re()) == 0;
        std::string cs = simple ? c.to_string() : "(" + c.to_string() + ")";
        if (j == 0) {
            os << cs;
        } else {
            os << cs << "*k";
            if (j > 1) {
                os << "^" << j;
            }
        }
    }
    return os.str();
}

UPoly determinant(const PolyMatrix& a)
{
    std::size_t n = a.size();
    for (const auto& row : a) {
        if (row.size() != n) {
            throw StructuralError("polynomial determinant: non-square matrix");
        }
    }
    if (n == 0) {
        return UPoly::constant(GaussRat(1));
    }
    if (n == 1) {
        return a[0][0];
    }
    // Laplace expansion along the first row; matrices here are at most 4x4.
    UPoly det;
    for (std::size_t j = 0; j < n; ++j) {
        if (a[0][j].is_zero()) {
            continue;
        }
        PolyMatrix minor;
        for (std::size_t i = 1; i < n; ++i) {
            std::vector<UPoly> row;
            for (std::size_t t = 0; t < n; ++t) {
                if (t != j) {
                    row.push_back(a[i][t]);
                }
            }
            minor.push_back(std::move(row));
        }
        UPoly term = a[0][j] * determinant(minor);
        det = (j % 2 == 0) ? det + term : det - term;
    }
    return det;
}

Matrix evaluate(const PolyMatrix& a, const GaussRat& k)
{
    int n = static_cast<int>(a.size());
    int m = n == 0 ? 0 : static_cast<int>(a[0].size());
    Matrix r(n, m);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            r.at(i, j) = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].eval(k);
        }
    }
    return r;
}

long cauchy_root_bound(const UPoly& p)
{
    if (p.degree() < 1) {
        return 0;
    }
    // |root| <= 1 + max_j |a_j / a_n|; each ratio is bounded via an integer
    // square root of the ceiling of its squared modulus.
    GaussRat lead_inv = p.coeffs().back().inverse();
    mpz_class best = 0;
    for (int j = 0; j < p.degree(); ++j) {
        mpq_class nrm = (p.coeff(j) * lead_inv).norm();
        mpz_class ceil_nrm;
        mpz_cdiv_q(ceil_nrm.get_mpz_t(), nrm.get_num_mpz_t(), nrm.get_den_mpz_t());
        mpz_class r;
        mpz_sqrt(r.get_mpz_t(), ceil_nrm.get_mpz_t());
        if (r * r < ceil_nrm) {
            r += 1;
        }
        if (r > best) {
            best = r;
        }
    }
    mpz_class bound = best + 1;
    if (!bound.fits_slong_p()) {
        throw StructuralError("root bound exceeds the machine integer range");
    }
    return bound.get_si();
}

long fujiwara_root_bound(const UPoly& p)
{
    const int n = p.degree();
    if (n < 1) {
        return 0;
    }
    // |root| <= 2 max_j |a_{n-j} / a_n|^{1/j}; the j-th root of the modulus is
    // bounded by the ceiling of the (2j)-th root of the ceiling of the norm.
    GaussRat lead_inv = p.coeffs().back().inverse();
    mpz_class best = 0;
    for (int j = 1; j <= n; ++j) {
        mpq_class nrm = (p.coeff(n - j) * lead_inv).norm();
        if (sgn(nrm) == 0) {
            continue;
        }
        mpz_class ceil_nrm;
        mpz_cdiv_q(ceil_nrm.get_mpz_t(), nrm.get_num_mpz_t(), nrm.get_den_mpz_t());
        mpz_class r;
        if (mpz_root(r.get_mpz_t(), ceil_nrm.get_mpz_t(), static_cast<unsigned long>(2 * j)) == 0) {
            r += 1;
        }
        if (r > best) {
            best = r;
        }
    }
    mpz_class bound = 2 * best;
    if (!bound.fits_slong_p()) {
        throw StructuralError("root bound exceeds the machine integer range");
    }
    return bound.get_si();
}

std::vector<long> positive_integer_roots(const UPoly& p)
{
    if (p.is_zero()) {
        throw StructuralError("positive_integer_roots of the zero polynomial");
    }
    std::vector<long> roots;
    long bound = std::min(cauchy_root_bound(p), fujiwara_root_bound(p));
    for (long k = 1; k <= bound; ++k) {
        if (p.eval(GaussRat(k)).is_zero()) {
            roots.push_back(k);
        }
    }
    return roots;
}

} // namespace crnf
