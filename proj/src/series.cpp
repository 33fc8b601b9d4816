#include "crnf/series.hpp"

#include "crnf/errors.hpp"
#include "crnf/linalg.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace crnf {

namespace {


mpz_class lcm_of(const mpz_class& a, const mpz_class& b)
{
    mpz_class r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

void check_layout(const std::vector<std::string>& vars, int order)
{
    if (vars.size() > static_cast<std::size_t>(MultiSeries::kMaxVars)) {
        throw StructuralError("MultiSeries supports at most 4 variables");
    }
    if (order < 0 || order > 0xFFFF) {
        throw StructuralError("MultiSeries order out of range");
    }
    for (std::size_t i = 0; i < vars.size(); ++i) {
        for (std::size_t j = i + 1; j < vars.size(); ++j) {
            if (vars[i] == vars[j]) {
                throw StructuralError("duplicate variable name '" + vars[i] + "'");
            }
        }
    }
}

} // namespace

std::uint64_t MultiSeries::pack(const int* e, int n)
{
    std::uint64_t key = 0;
    for (int i = 0; i < n; ++i) {
        if (e[i] < 0 || e[i] > 0xFFFF) {
            throw StructuralError("exponent out of range");
        }
        key |= static_cast<std::uint64_t>(e[i]) << (48 - 16 * i);
    }
    return key;
}

std::uint64_t MultiSeries::pack(const Exponents& e)
{
    if (e.size() > static_cast<std::size_t>(kMaxVars)) {
        throw StructuralError("too many exponents");
    }
    return pack(e.data(), static_cast<int>(e.size()));
}

void MultiSeries::unpack(std::uint64_t key, int n, int* out)
{
    for (int i = 0; i < n; ++i) {
        out[i] = key_exp(key, i);
    }
}

int MultiSeries::key_degree(std::uint64_t key)
{
    return static_cast<int>((key >> 48) + ((key >> 32) & 0xFFFF) + ((key >> 16) & 0xFFFF) + (key & 0xFFFF));
}

MultiSeries::MultiSeries() : MultiSeries(std::vector<std::string>{}, 0) {}

MultiSeries::MultiSeries(std::vector<std::string> vars, int order)
{
    check_layout(vars, order);
    auto layout = std::make_shared<Layout>();
    layout->vars = std::move(vars);
    layout->order = order;
    layout_ = std::move(layout);
}

MultiSeries MultiSeries::from_terms(std::vector<std::string> vars, int order,
                                    const std::vector<std::pair<Exponents, GaussRat>>& terms)
{
    MultiSeries s(std::move(vars), order);
    std::map<std::uint64_t, GaussRat> acc;
    for (const auto& [e, c] : terms) {
        if (static_cast<int>(e.size()) != s.nvars()) {
            throw StructuralError("exponent tuple length does not match the variable count");
        }
        std::uint64_t key = pack(e);
        if (key_degree(key) > order || c.is_zero()) {
            continue;
        }
        acc[key] += c;
    }
    mpz_class den = 1;
    for (const auto& [key, c] : acc) {
        den = lcm_of(den, c.re().get_den());
        den = lcm_of(den, c.im().get_den());
    }
    for (const auto& [key, c] : acc) {
        if (c.is_zero()) {
            continue;
        }
        Term t{key, c.re().get_num() * (den / c.re().get_den()), c.im().get_num() * (den / c.im().get_den())};
        s.terms_.push_back(std::move(t));
    }
    s.den_ = den;
    s.canonicalize();
    return s;
}

MultiSeries MultiSeries::from_raw(const MultiSeries& like, std::vector<Term> terms, mpz_class den)
{
    MultiSeries s = like.zero();
    s.terms_ = std::move(terms);
    s.den_ = std::move(den);
    s.canonicalize();
    return s;
}

void MultiSeries::canonicalize()
{
    terms_.erase(std::remove_if(terms_.begin(), terms_.end(),
                                [](const Term& t) { return sgn(t.re) == 0 && sgn(t.im) == 0; }),
                 terms_.end());
    if (terms_.empty()) {
        den_ = 1;
        return;
    }
    if (sgn(den_) < 0) {
        den_ = -den_;
        for (auto& t : terms_) {
            t.re = -t.re;
            t.im = -t.im;
        }
    }
    mpz_class g = den_;
    for (const auto& t : terms_) {
        if (g == 1) {
            break;
        }
        if (sgn(t.re) != 0) {
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.re.get_mpz_t());
        }
        if (g != 1 && sgn(t.im) != 0) {
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.im.get_mpz_t());
        }
    }
    if (g != 1) {
        mpz_divexact(den_.get_mpz_t(), den_.get_mpz_t(), g.get_mpz_t());
        for (auto& t : terms_) {
            mpz_divexact(t.re.get_mpz_t(), t.re.get_mpz_t(), g.get_mpz_t());
            mpz_divexact(t.im.get_mpz_t(), t.im.get_mpz_t(), g.get_mpz_t());
        }
    }
}

int MultiSeries::var_index(const std::string& name) const
{
    const auto& v = layout_->vars;
    auto it = std::find(v.begin(), v.end(), name);
    if (it == v.end()) {
        throw StructuralError("unknown variable '" + name + "'");
    }
    return static_cast<int>(it - v.begin());
}

bool MultiSeries::has_var(const std::string& name) const
{
    const auto& v = layout_->vars;
    return std::find(v.begin(), v.end(), name) != v.end();
}

bool MultiSeries::same_ring(const MultiSeries& o) const
{
    return layout_ == o.layout_ || (layout_->order == o.layout_->order && layout_->vars == o.layout_->vars);
}

void MultiSeries::require_same_ring(const MultiSeries& o, const char* op) const
{
    if (!same_ring(o)) {
        throw StructuralError(std::string(op) + ": operands live in different rings");
    }
}

MultiSeries MultiSeries::zero() const
{
    MultiSeries s;
    s.layout_ = layout_;
    return s;
}

MultiSeries MultiSeries::constant(const GaussRat& c) const
{
    return monomial(Exponents(static_cast<std::size_t>(nvars()), 0), c);
}

MultiSeries MultiSeries::var(const std::string& name) const
{
    return var(var_index(name));
}

MultiSeries MultiSeries::var(int index) const
{
    if (index < 0 || index >= nvars()) {
        throw StructuralError("variable index out of range");
    }
    Exponents e(static_cast<std::size_t>(nvars()), 0);
    e[static_cast<std::size_t>(index)] = 1;
    return monomial(e);
}

MultiSeries MultiSeries::monomial(const Exponents& e, const GaussRat& c) const
{
    if (static_cast<int>(e.size()) != nvars()) {
        throw StructuralError("monomial: exponent length mismatch");
    }
    MultiSeries s = zero();
    std::uint64_t key = pack(e);
    if (c.is_zero() || key_degree(key) > order()) {
        return s;
    }
    mpz_class den = lcm_of(c.re().get_den(), c.im().get_den());
    s.terms_.push_back(Term{key, c.re().get_num() * (den / c.re().get_den()), c.im().get_num() * (den / c.im().get_den())});
    s.den_ = den;
    s.canonicalize();
    return s;
}

GaussRat MultiSeries::coeff(const Exponents& e) const
{
    if (static_cast<int>(e.size()) != nvars()) {
        throw StructuralError("coeff: exponent length mismatch");
    }
    std::uint64_t key = pack(e);
    auto it = std::lower_bound(terms_.begin(), terms_.end(), key,
                               [](const Term& t, std::uint64_t k) { return t.key < k; });
    if (it == terms_.end() || it->key != key) {
        return GaussRat(0);
    }
    return GaussRat(mpq_class(it->re, den_), mpq_class(it->im, den_));
}

GaussRat MultiSeries::constant_term() const
{
    if (!terms_.empty() && terms_.front().key == 0) {
        return GaussRat(mpq_class(terms_.front().re, den_), mpq_class(terms_.front().im, den_));
    }
    return GaussRat(0);
}

std::vector<std::pair<Exponents, GaussRat>> MultiSeries::terms() const
{
    std::vector<std::pair<Exponents, GaussRat>> out;
    out.reserve(terms_.size());
    int n = nvars();
    for (const auto& t : terms_) {
        Exponents e(static_cast<std::size_t>(n));
        unpack(t.key, n, e.data());
        out.emplace_back(std::move(e), GaussRat(mpq_class(t.re, den_), mpq_class(t.im, den_)));
    }
    return out;
}

int MultiSeries::valuation() const
{
    int v = order() + 1;
    for (const auto& t : terms_) {
        v = std::min(v, key_degree(t.key));
    }
    return v;
}

int MultiSeries::degree_in(int var) const
{
    int d = -1;
    for (const auto& t : terms_) {
        d = std::max(d, key_exp(t.key, var));
    }
    return d;
}

MultiSeries MultiSeries::conj() const
{
    MultiSeries s = *this;
    for (auto& t : s.terms_) {
        t.im = -t.im;
    }
    return s;
}

MultiSeries MultiSeries::operator-() const
{
    MultiSeries s = *this;
    for (auto& t : s.terms_) {
        t.re = -t.re;
        t.im = -t.im;
    }
    return s;
}

namespace {

MultiSeries add_scaled(const MultiSeries& a, const MultiSeries& b, bool subtract)
{
    const auto& ta = a.raw_terms();
    const auto& tb = b.raw_terms();
    if (tb.empty()) {
        return a;
    }
    if (ta.empty()) {
        return subtract ? -b : b;
    }
    mpz_class den = lcm_of(a.raw_den(), b.raw_den());
    mpz_class fa = den / a.raw_den();
    mpz_class fb = den / b.raw_den();
    if (subtract) {
        fb = -fb;
    }
    std::vector<MultiSeries::Term> out;
    out.reserve(ta.size() + tb.size());
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ta.size() || j < tb.size()) {
        if (j == tb.size() || (i < ta.size() && ta[i].key < tb[j].key)) {
            out.push_back({ta[i].key, ta[i].re * fa, ta[i].im * fa});
            ++i;
        } else if (i == ta.size() || tb[j].key < ta[i].key) {
            out.push_back({tb[j].key, tb[j].re * fb, tb[j].im * fb});
            ++j;
        } else {
            out.push_back({ta[i].key, ta[i].re * fa + tb[j].re * fb, ta[i].im * fa + tb[j].im * fb});
            ++i;
            ++j;
        }
    }
    return MultiSeries::from_raw(a, std::move(out), std::move(den));
}

} // namespace

MultiSeries& MultiSeries::operator+=(const MultiSeries& o)
{
    require_same_ring(o, "add");
    *this = add_scaled(*this, o, false);
    return *this;
}

MultiSeries& MultiSeries::operator-=(const MultiSeries& o)
{
    require_same_ring(o, "sub");
    *this = add_scaled(*this, o, true);
    return *this;
}

MultiSeries& MultiSeries::operator*=(const MultiSeries& o)
{
    *this = mul(*this, o);
    return *this;
}

MultiSeries& MultiSeries::operator*=(const GaussRat& c)
{
    if (c.is_zero()) {
        terms_.clear();
        den_ = 1;
        return *this;
    }
    mpz_class cden = lcm_of(c.re().get_den(), c.im().get_den());
    mpz_class p = c.re().get_num() * (cden / c.re().get_den());
    mpz_class q = c.im().get_num() * (cden / c.im().get_den());
    for (auto& t : terms_) {
        mpz_class r = t.re * p - t.im * q;
        mpz_class i = t.re * q + t.im * p;
        t.re = std::move(r);
        t.im = std::move(i);
    }
    den_ *= cden;
    canonicalize();
    return *this;
}

MultiSeries operator+(const MultiSeries& a, const MultiSeries& b)
{
    MultiSeries r = a;
    r += b;
    return r;
}

MultiSeries operator-(const MultiSeries& a, const MultiSeries& b)
{
    MultiSeries r = a;
    r -= b;
    return r;
}

MultiSeries operator*(const MultiSeries& a, const MultiSeries& b)
{
    return mul(a, b);
}

MultiSeries operator*(const MultiSeries& a, const GaussRat& c)
{
    MultiSeries r = a;
    r *= c;
    return r;
}

bool operator==(const MultiSeries& a, const MultiSeries& b)
{
    if (!a.same_ring(b) || a.terms_.size() != b.terms_.size() || a.den_ != b.den_) {
        return false;
    }
    for (std::size_t i = 0; i < a.terms_.size(); ++i) {
        const auto& x = a.terms_[i];
        const auto& y = b.terms_[i];
        if (x.key != y.key || x.re != y.re || x.im != y.im) {
            return false;
        }
    }
    return true;
}

MultiSeries add(const MultiSeries& a, const MultiSeries& b)
{
    return a + b;
}

MultiSeries pow(const MultiSeries& s, int n)
{
    if (n < 0) {
        return pow(invert_unit(s), -n);
    }
    MultiSeries acc = s.one();
    MultiSeries base = s;
    while (n > 0) {
        if (n & 1) {
            acc = acc * base;
        }
        n >>= 1;
        if (n > 0) {
            base = base * base;
        }
    }
    return acc;
}

MultiSeries with_layout(const MultiSeries& s, std::vector<std::string> vars, int order)
{
    MultiSeries r(std::move(vars), order);
    r.terms_ = s.terms_;
    r.den_ = s.den_;
    return r;
}

MultiSeries with_order(const MultiSeries& s, int order)
{
    MultiSeries r = with_layout(s, s.vars(), order);
    if (order < s.order()) {
        return truncate_degree(r, order);
    }
    return r;
}

MultiSeries truncate_degree(const MultiSeries& s, int d)
{
    std::vector<MultiSeries::Term> out;
    for (const auto& t : s.raw_terms()) {
        if (MultiSeries::key_degree(t.key) <= d) {
            out.push_back(t);
        }
    }
    return MultiSeries::from_raw(s, std::move(out), s.raw_den());
}

MultiSeries embed(const MultiSeries& s, const std::vector<std::string>& vars, int order)
{
    MultiSeries target(vars, order);
    std::vector<int> map(static_cast<std::size_t>(s.nvars()));
    for (int i = 0; i < s.nvars(); ++i) {
        map[static_cast<std::size_t>(i)] = target.var_index(s.vars()[static_cast<std::size_t>(i)]);
    }
    std::vector<MultiSeries::Term> out;
    int src[MultiSeries::kMaxVars];
    for (const auto& t : s.raw_terms()) {
        if (MultiSeries::key_degree(t.key) > order) {
            continue;
        }
        int dst[MultiSeries::kMaxVars] = {0, 0, 0, 0};
        MultiSeries::unpack(t.key, s.nvars(), src);
        for (int i = 0; i < s.nvars(); ++i) {
            dst[map[static_cast<std::size_t>(i)]] = src[i];
        }
        out.push_back({MultiSeries::pack(dst, target.nvars()), t.re, t.im});
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.key < y.key; });
    return MultiSeries::from_raw(target, std::move(out), s.raw_den());
}

MultiSeries rename(const MultiSeries& s, const std::vector<std::string>& vars)
{
    if (static_cast<int>(vars.size()) != s.nvars()) {
        throw StructuralError("rename: variable count mismatch");
    }
    return with_layout(s, vars, s.order());
}

MultiSeries diff(const MultiSeries& s, const std::string& var)
{
    return diff(s, s.var_index(var));
}

MultiSeries diff(const MultiSeries& s, int var)
{
    if (var < 0 || var >= s.nvars()) {
        throw StructuralError("diff: variable index out of range");
    }
    std::vector<MultiSeries::Term> out;
    std::uint64_t unit = std::uint64_t{1} << (48 - 16 * var);
    for (const auto& t : s.raw_terms()) {
        int e = MultiSeries::key_exp(t.key, var);
        if (e == 0) {
            continue;
        }
        out.push_back({t.key - unit, t.re * e, t.im * e});
    }
    return MultiSeries::from_raw(s, std::move(out), s.raw_den());
}

MultiSeries integrate(const MultiSeries& s, int var)
{
    if (var < 0 || var >= s.nvars()) {
        throw StructuralError("integrate: variable index out of range");
    }
    std::uint64_t unit = std::uint64_t{1} << (48 - 16 * var);
    mpz_class l = 1;
    for (const auto& t : s.raw_terms()) {
        if (MultiSeries::key_degree(t.key) < s.order()) {
            l = lcm_of(l, mpz_class(MultiSeries::key_exp(t.key, var) + 1));
        }
    }
    std::vector<MultiSeries::Term> out;
    for (const auto& t : s.raw_terms()) {
        if (MultiSeries::key_degree(t.key) >= s.order()) {
            continue;
        }
        mpz_class f = l / (MultiSeries::key_exp(t.key, var) + 1);
        out.push_back({t.key + unit, t.re * f, t.im * f});
    }
    return MultiSeries::from_raw(s, std::move(out), s.raw_den() * l);
}

MultiSeries mul_monomial(const MultiSeries& s, const Exponents& e)
{
    return s * s.monomial(e);
}

MultiSeries div_monomial(const MultiSeries& s, const Exponents& e)
{
    std::uint64_t key = MultiSeries::pack(e);
    std::vector<MultiSeries::Term> out;
    for (const auto& t : s.raw_terms()) {
        for (int i = 0; i < s.nvars(); ++i) {
            if (MultiSeries::key_exp(t.key, i) < e[static_cast<std::size_t>(i)]) {
                throw StructuralError("div_monomial: series not divisible by the monomial");
            }
        }
        out.push_back({t.key - key, t.re, t.im});
    }
    return MultiSeries::from_raw(s, std::move(out), s.raw_den());
}

MultiSeries part(const MultiSeries& s, int var, int k)
{
    std::uint64_t shift = static_cast<std::uint64_t>(k) << (48 - 16 * var);
    std::vector<MultiSeries::Term> out;
    for (const auto& t : s.raw_terms()) {
        if (MultiSeries::key_exp(t.key, var) == k) {
            out.push_back({t.key - shift, t.re, t.im});
        }
    }
    return MultiSeries::from_raw(s, std::move(out), s.raw_den());
}

MultiSeries truncate_in(const MultiSeries& s, int var, int k)
{
    std::vector<MultiSeries::Term> out;
    for (const auto& t : s.raw_terms()) {
        if (MultiSeries::key_exp(t.key, var) <= k) {
            out.push_back(t);
        }
    }
    return MultiSeries::from_raw(s, std::move(out), s.raw_den());
}

CoeffView coeff_view(const MultiSeries& s, const std::vector<std::string>& pattern)
{
    std::vector<int> pidx;
    for (const auto& p : pattern) {
        pidx.push_back(s.var_index(p));
    }
    std::vector<int> rest;
    std::vector<std::string> rest_names;
    for (int i = 0; i < s.nvars(); ++i) {
        if (std::find(pidx.begin(), pidx.end(), i) == pidx.end()) {
            rest.push_back(i);
            rest_names.push_back(s.vars()[static_cast<std::size_t>(i)]);
        }
    }
    std::map<Exponents, std::vector<MultiSeries::Term>> groups;
    int e[MultiSeries::kMaxVars];
    for (const auto& t : s.raw_terms()) {
        MultiSeries::unpack(t.key, s.nvars(), e);
        Exponents k;
        for (int i : pidx) {
            k.push_back(e[i]);
        }
        int r[MultiSeries::kMaxVars] = {0, 0, 0, 0};
        for (std::size_t j = 0; j < rest.size(); ++j) {
            r[j] = e[rest[j]];
        }
        groups[k].push_back({MultiSeries::pack(r, static_cast<int>(rest.size())), t.re, t.im});
    }
    CoeffView view;
    for (auto& [k, terms] : groups) {
        int kdeg = std::accumulate(k.begin(), k.end(), 0);
        MultiSeries ring(rest_names, s.order() - kdeg);
        std::sort(terms.begin(), terms.end(), [](const auto& x, const auto& y) { return x.key < y.key; });
        view.emplace(k, MultiSeries::from_raw(ring, std::move(terms), s.raw_den()));
    }
    return view;
}

MultiSeries reassemble(const CoeffView& view, const std::vector<std::string>& pattern,
                       const std::vector<std::string>& vars, int order)
{
    MultiSeries target(vars, order);
    std::vector<int> pidx;
    for (const auto& p : pattern) {
        pidx.push_back(target.var_index(p));
    }
    std::vector<std::pair<Exponents, GaussRat>> all;
    for (const auto& [k, series] : view) {
        std::vector<int> ridx;
        for (const auto& name : series.vars()) {
            ridx.push_back(target.var_index(name));
        }
        for (const auto& [e, c] : series.terms()) {
            Exponents full(vars.size(), 0);
            for (std::size_t j = 0; j < pidx.size(); ++j) {
                full[static_cast<std::size_t>(pidx[j])] = k[j];
            }
            for (std::size_t j = 0; j < ridx.size(); ++j) {
                full[static_cast<std::size_t>(ridx[j])] = e[j];
            }
            all.emplace_back(std::move(full), c);
        }
    }
    return MultiSeries::from_terms(vars, order, all);
}

MultiSeries invert_unit(const MultiSeries& s)
{
    GaussRat c0 = s.constant_term();
    if (c0.is_zero()) {
        throw NonUnitError("invert_unit: constant term is zero");
    }
    GaussRat c0inv = c0.inverse();
    MultiSeries t = s * c0inv - s.one();
    if (t.is_zero()) {
        return s.constant(c0inv);
    }
    int v = t.valuation();
    int terms = s.order() / v;
    // 1/(1+t) = 1 - t(1 - t(1 - ...)).
    MultiSeries acc = s.one();
    for (int j = 0; j < terms; ++j) {
        acc = s.one() - t * acc;
    }
    return acc * c0inv;
}

MultiSeries apply_univariate(const std::vector<GaussRat>& coeffs, const MultiSeries& x)
{
    if (!x.constant_term().is_zero()) {
        throw StructuralError("apply_univariate: argument has a nonzero constant term");
    }
    if (coeffs.empty()) {
        return x.zero();
    }
    if (x.is_zero()) {
        return x.constant(coeffs[0]);
    }
    int v = x.valuation();
    int top = std::min(static_cast<int>(coeffs.size()) - 1, x.order() / v);
    MultiSeries acc = x.constant(coeffs[static_cast<std::size_t>(top)]);
    for (int j = top - 1; j >= 0; --j) {
        acc = acc * x + coeffs[static_cast<std::size_t>(j)];
    }
    return acc;
}

MultiSeries exp_nilpotent(const MultiSeries& s)
{
    if (!s.constant_term().is_zero()) {
        throw StructuralError("exp_nilpotent: nonzero constant term");
    }
    std::vector<GaussRat> c;
    mpz_class fact = 1;
    for (int j = 0; j <= s.order(); ++j) {
        if (j > 0) {
            fact *= j;
        }
        c.emplace_back(mpq_class(mpz_class(1), fact));
    }
    return apply_univariate(c, s);
}

int first_difference_degree(const MultiSeries& a, const MultiSeries& b)
{
    return (a - b).valuation();
}

SeriesVec solve_implicit(const std::function<SeriesVec(const SeriesVec&)>& residual,
                         const MultiSeries& param_zero, int unknowns)
{
    SeriesVec u(static_cast<std::size_t>(unknowns), param_zero.zero());
    SeriesVec f0 = residual(u);
    if (static_cast<int>(f0.size()) != unknowns) {
        throw StructuralError("solve_implicit: residual count differs from unknown count");
    }
    for (const auto& f : f0) {
        if (!f.constant_term().is_zero()) {
            throw StructuralError("solve_implicit: F(0,0) != 0");
        }
    }
    if (param_zero.nvars() == 0 || param_zero.order() == 0) {
        return u;
    }
    // Probe the constant Jacobian through the linear coefficient of the first
    // parameter variable.
    Exponents e1(static_cast<std::size_t>(param_zero.nvars()), 0);
    e1[0] = 1;
    Matrix j0(unknowns, unknowns);
    MultiSeries p1 = param_zero.var(0);
    for (int j = 0; j < unknowns; ++j) {
        SeriesVec probe = u;
        probe[static_cast<std::size_t>(j)] = p1;
        SeriesVec fj = residual(probe);
        for (int i = 0; i < unknowns; ++i) {
            j0.at(i, j) = fj[static_cast<std::size_t>(i)].coeff(e1) - f0[static_cast<std::size_t>(i)].coeff(e1);
        }
    }
    auto jinv = inverse(j0);
    if (!jinv) {
        throw DegeneracyError("solve_implicit: singular constant Jacobian");
    }
    SeriesVec f = f0;
    for (int it = 0; it <= param_zero.order() + 1; ++it) {
        bool done = std::all_of(f.begin(), f.end(), [](const MultiSeries& x) { return x.is_zero(); });
        if (done) {
            return u;
        }
        for (int i = 0; i < unknowns; ++i) {
            std::vector<std::pair<GaussRat, const MultiSeries*>> parts;
            parts.emplace_back(GaussRat(1), &u[static_cast<std::size_t>(i)]);
            std::vector<GaussRat> coeffs;
            for (int j = 0; j < unknowns; ++j) {
                if (!jinv->at(i, j).is_zero()) {
                    parts.emplace_back(-jinv->at(i, j), &f[static_cast<std::size_t>(j)]);
                }
            }
            u[static_cast<std::size_t>(i)] = linear_combination(param_zero, parts);
        }
        f = residual(u);
    }
    throw InternalError("solve_implicit: chord iteration did not terminate");
}

SeriesVec solve_implicit(const SeriesVec& system, int unknowns)
{
    if (system.empty() || static_cast<int>(system.size()) != unknowns) {
        throw StructuralError("solve_implicit: need one equation per unknown");
    }
    const MultiSeries& f0 = system.front();
    for (const auto& f : system) {
        if (!f.same_ring(f0)) {
            throw StructuralError("solve_implicit: equations live in different rings");
        }
    }
    if (unknowns > f0.nvars()) {
        throw StructuralError("solve_implicit: more unknowns than variables");
    }
    std::vector<std::string> params(f0.vars().begin() + unknowns, f0.vars().end());
    MultiSeries pz(params, f0.order());
    auto residual = [&](const SeriesVec& u) {
        SeriesVec images = u;
        for (int j = 0; j < pz.nvars(); ++j) {
            images.push_back(pz.var(j));
        }
        SeriesVec out;
        for (const auto& f : system) {
            out.push_back(substitute(f, images));
        }
        return out;
    };
    return solve_implicit(residual, pz, unknowns);
}

} // namespace crnf
