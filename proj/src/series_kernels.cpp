// Multiplication, linear combination and composition kernels for MultiSeries.
#include "crnf/errors.hpp"
#include "crnf/series.hpp"

#include <algorithm>
#include <array>

namespace crnf {

namespace {

using Term = MultiSeries::Term;

// Dense mixed-radix indexing of monomials of degree <= N: exponent addition is
// index addition, so products can be accumulated in a flat array.
struct DenseIndex {
    int nv = 0;
    int n = 0;
    std::array<long, MultiSeries::kMaxVars> stride{};
    long size = 1;

    DenseIndex(int nvars, int order) : nv(nvars), n(order)
    {
        long s = 1;
        for (int i = nv - 1; i >= 0; --i) {
            stride[static_cast<std::size_t>(i)] = s;
            s *= (n + 1);
        }
        size = s;
    }

    long index(std::uint64_t key) const
    {
        long idx = 0;
        for (int i = 0; i < nv; ++i) {
            idx += MultiSeries::key_exp(key, i) * stride[static_cast<std::size_t>(i)];
        }
        return idx;
    }

    std::uint64_t key(long idx) const
    {
        std::uint64_t k = 0;
        for (int i = 0; i < nv; ++i) {
            long e = idx / stride[static_cast<std::size_t>(i)];
            idx -= e * stride[static_cast<std::size_t>(i)];
            k |= static_cast<std::uint64_t>(e) << (48 - 16 * i);
        }
        return k;
    }
};

void set_i128(mpz_class& z, __int128 v)
{
    bool neg = v < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
    mpz_set_ui(z.get_mpz_t(), static_cast<unsigned long>(u >> 64));
    mpz_mul_2exp(z.get_mpz_t(), z.get_mpz_t(), 64);
    mpz_add_ui(z.get_mpz_t(), z.get_mpz_t(), static_cast<unsigned long>(u));
    if (neg) {
        mpz_neg(z.get_mpz_t(), z.get_mpz_t());
    }
}

std::size_t max_bits(const std::vector<Term>& t, bool& real)
{
    std::size_t b = 0;
    real = true;
    for (const auto& x : t) {
        b = std::max(b, mpz_sizeinbase(x.re.get_mpz_t(), 2));
        if (sgn(x.im) != 0) {
            real = false;
            b = std::max(b, mpz_sizeinbase(x.im.get_mpz_t(), 2));
        }
    }
    return b;
}

struct Operand {
    std::vector<long> idx;
    std::vector<int> deg;
    std::vector<long> re;
    std::vector<long> im;
};

struct Scratch {
    std::vector<__int128> re;
    std::vector<__int128> im;
    std::vector<mpz_class> zre;
    std::vector<mpz_class> zim;
    std::vector<char> used;
    std::vector<long> touched;
};

Scratch& scratch()
{
    thread_local Scratch s;
    return s;
}

template <bool AReal, bool BReal>
void accumulate_small(const Operand& a, const Operand& b, int n, Scratch& s)
{
    for (std::size_t i = 0; i < a.idx.size(); ++i) {
        const int lim = n - a.deg[i];
        const long ia = a.idx[i];
        const __int128 ar = a.re[i];
        const __int128 ai = AReal ? 0 : a.im[i];
        for (std::size_t j = 0; j < b.idx.size() && b.deg[j] <= lim; ++j) {
            const long k = ia + b.idx[j];
            if (!s.used[static_cast<std::size_t>(k)]) {
                s.used[static_cast<std::size_t>(k)] = 1;
                s.touched.push_back(k);
            }
            const __int128 br = b.re[j];
            if constexpr (AReal && BReal) {
                s.re[static_cast<std::size_t>(k)] += ar * br;
            } else if constexpr (AReal) {
                s.re[static_cast<std::size_t>(k)] += ar * br;
                s.im[static_cast<std::size_t>(k)] += ar * static_cast<__int128>(b.im[j]);
            } else if constexpr (BReal) {
                s.re[static_cast<std::size_t>(k)] += ar * br;
                s.im[static_cast<std::size_t>(k)] += ai * br;
            } else {
                const __int128 bi = b.im[j];
                s.re[static_cast<std::size_t>(k)] += ar * br - ai * bi;
                s.im[static_cast<std::size_t>(k)] += ar * bi + ai * br;
            }
        }
    }
}

MultiSeries monomial_times(const MultiSeries& mono, const MultiSeries& b)
{
    const Term& m = mono.raw_terms().front();
    const int n = b.order();
    std::vector<Term> out;
    out.reserve(b.size());
    const bool mreal = sgn(m.im) == 0;
    for (const auto& t : b.raw_terms()) {
        if (MultiSeries::key_degree(t.key) + MultiSeries::key_degree(m.key) > n) {
            continue;
        }
        if (mreal) {
            out.push_back({t.key + m.key, t.re * m.re, t.im * m.re});
        } else {
            out.push_back({t.key + m.key, t.re * m.re - t.im * m.im, t.re * m.im + t.im * m.re});
        }
    }
    return MultiSeries::from_raw(b, std::move(out), mono.raw_den() * b.raw_den());
}

} // namespace

MultiSeries mul_impl(const MultiSeries& a, const MultiSeries& b)
{
    if (a.is_zero() || b.is_zero()) {
        return a.zero();
    }
    if (a.is_monomial()) {
        return monomial_times(a, b);
    }
    if (b.is_monomial()) {
        return monomial_times(b, a);
    }
    const int n = a.order();
    DenseIndex dense(a.nvars(), n);

    bool areal = true;
    bool breal = true;
    std::size_t ba = max_bits(a.terms_, areal);
    std::size_t bb = max_bits(b.terms_, breal);
    std::size_t pairs = std::min(a.size(), b.size());
    std::size_t lp = 0;
    while ((std::size_t{1} << lp) < pairs + 1) {
        ++lp;
    }
    const bool small = ba <= 62 && bb <= 62 && ba + bb + 2 + lp <= 126;

    // b sorted by degree lets the inner loop stop at the truncation bound.
    std::vector<std::size_t> border(b.size());
    for (std::size_t j = 0; j < border.size(); ++j) {
        border[j] = j;
    }
    std::stable_sort(border.begin(), border.end(), [&](std::size_t x, std::size_t y) {
        return MultiSeries::key_degree(b.terms_[x].key) < MultiSeries::key_degree(b.terms_[y].key);
    });

    Scratch& s = scratch();
    if (static_cast<long>(s.used.size()) < dense.size) {
        s.used.assign(static_cast<std::size_t>(dense.size), 0);
    }
    s.touched.clear();

    std::vector<Term> out;
    if (small) {
        if (static_cast<long>(s.re.size()) < dense.size) {
            s.re.assign(static_cast<std::size_t>(dense.size), 0);
            s.im.assign(static_cast<std::size_t>(dense.size), 0);
        }
        Operand oa;
        Operand ob;
        for (const auto& t : a.terms_) {
            oa.idx.push_back(dense.index(t.key));
            oa.deg.push_back(MultiSeries::key_degree(t.key));
            oa.re.push_back(t.re.get_si());
            oa.im.push_back(t.im.get_si());
        }
        for (std::size_t j : border) {
            const auto& t = b.terms_[j];
            ob.idx.push_back(dense.index(t.key));
            ob.deg.push_back(MultiSeries::key_degree(t.key));
            ob.re.push_back(t.re.get_si());
            ob.im.push_back(t.im.get_si());
        }
        if (areal && breal) {
            accumulate_small<true, true>(oa, ob, n, s);
        } else if (areal) {
            accumulate_small<true, false>(oa, ob, n, s);
        } else if (breal) {
            accumulate_small<false, true>(oa, ob, n, s);
        } else {
            accumulate_small<false, false>(oa, ob, n, s);
        }
        std::sort(s.touched.begin(), s.touched.end());
        out.reserve(s.touched.size());
        for (long k : s.touched) {
            auto uk = static_cast<std::size_t>(k);
            s.used[uk] = 0;
            if (s.re[uk] != 0 || s.im[uk] != 0) {
                Term t{dense.key(k), 0, 0};
                set_i128(t.re, s.re[uk]);
                set_i128(t.im, s.im[uk]);
                out.push_back(std::move(t));
            }
            s.re[uk] = 0;
            s.im[uk] = 0;
        }
    } else {
        if (static_cast<long>(s.zre.size()) < dense.size) {
            s.zre.resize(static_cast<std::size_t>(dense.size));
            s.zim.resize(static_cast<std::size_t>(dense.size));
        }
        std::vector<long> bidx;
        std::vector<int> bdeg;
        for (std::size_t j : border) {
            bidx.push_back(dense.index(b.terms_[j].key));
            bdeg.push_back(MultiSeries::key_degree(b.terms_[j].key));
        }
        for (const auto& ta : a.terms_) {
            const int lim = n - MultiSeries::key_degree(ta.key);
            const long ia = dense.index(ta.key);
            const bool ai_zero = sgn(ta.im) == 0;
            for (std::size_t j = 0; j < border.size() && bdeg[j] <= lim; ++j) {
                const auto& tb = b.terms_[border[j]];
                const auto k = static_cast<std::size_t>(ia + bidx[j]);
                if (!s.used[k]) {
                    s.used[k] = 1;
                    s.touched.push_back(static_cast<long>(k));
                    s.zre[k] = 0;
                    s.zim[k] = 0;
                }
                mpz_addmul(s.zre[k].get_mpz_t(), ta.re.get_mpz_t(), tb.re.get_mpz_t());
                mpz_addmul(s.zim[k].get_mpz_t(), ta.re.get_mpz_t(), tb.im.get_mpz_t());
                if (!ai_zero) {
                    mpz_submul(s.zre[k].get_mpz_t(), ta.im.get_mpz_t(), tb.im.get_mpz_t());
                    mpz_addmul(s.zim[k].get_mpz_t(), ta.im.get_mpz_t(), tb.re.get_mpz_t());
                }
            }
        }
        std::sort(s.touched.begin(), s.touched.end());
        out.reserve(s.touched.size());
        for (long k : s.touched) {
            auto uk = static_cast<std::size_t>(k);
            s.used[uk] = 0;
            if (sgn(s.zre[uk]) != 0 || sgn(s.zim[uk]) != 0) {
                out.push_back(Term{dense.key(k), s.zre[uk], s.zim[uk]});
            }
        }
    }
    return MultiSeries::from_raw(a, std::move(out), a.den_ * b.den_);
}

MultiSeries mul(const MultiSeries& a, const MultiSeries& b)
{
    if (!a.same_ring(b)) {
        throw StructuralError("mul: operands live in different rings");
    }
    return mul_impl(a, b);
}

MultiSeries linear_combination(const MultiSeries& like,
                               const std::vector<std::pair<GaussRat, const MultiSeries*>>& parts)
{
    // Common denominator of all c_k / D_k.
    mpz_class l = 1;
    struct Scaled {
        mpz_class p;
        mpz_class q;
        const MultiSeries* s;
    };
    std::vector<Scaled> scaled;
    for (const auto& [c, s] : parts) {
        if (!s->same_ring(like)) {
            throw StructuralError("linear_combination: operands live in different rings");
        }
        if (c.is_zero() || s->is_zero()) {
            continue;
        }
        mpz_class cden;
        mpz_lcm(cden.get_mpz_t(), c.re().get_den_mpz_t(), c.im().get_den_mpz_t());
        mpz_class full = cden * s->raw_den();
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), full.get_mpz_t());
        scaled.push_back({c.re().get_num() * (cden / c.re().get_den()), c.im().get_num() * (cden / c.im().get_den()), s});
    }
    if (scaled.empty()) {
        return like.zero();
    }
    if (scaled.size() == 1 && l == scaled[0].s->raw_den() && scaled[0].p == 1 && sgn(scaled[0].q) == 0) {
        return *scaled[0].s;
    }
    DenseIndex dense(like.nvars(), like.order());
    Scratch& sc = scratch();
    if (static_cast<long>(sc.used.size()) < dense.size) {
        sc.used.assign(static_cast<std::size_t>(dense.size), 0);
    }
    if (static_cast<long>(sc.zre.size()) < dense.size) {
        sc.zre.resize(static_cast<std::size_t>(dense.size));
        sc.zim.resize(static_cast<std::size_t>(dense.size));
    }
    sc.touched.clear();
    std::size_t idx = 0;
    for (const auto& [c, s] : parts) {
        if (c.is_zero() || s->is_zero()) {
            continue;
        }
        const Scaled& part = scaled[idx++];
        mpz_class cden;
        mpz_lcm(cden.get_mpz_t(), c.re().get_den_mpz_t(), c.im().get_den_mpz_t());
        mpz_class m = l / (cden * s->raw_den());
        mpz_class p = part.p * m;
        mpz_class q = part.q * m;
        const bool qzero = sgn(q) == 0;
        for (const auto& t : s->raw_terms()) {
            const long k = dense.index(t.key);
            const auto uk = static_cast<std::size_t>(k);
            if (!sc.used[uk]) {
                sc.used[uk] = 1;
                sc.touched.push_back(k);
                sc.zre[uk] = 0;
                sc.zim[uk] = 0;
            }
            mpz_addmul(sc.zre[uk].get_mpz_t(), p.get_mpz_t(), t.re.get_mpz_t());
            mpz_addmul(sc.zim[uk].get_mpz_t(), p.get_mpz_t(), t.im.get_mpz_t());
            if (!qzero) {
                mpz_submul(sc.zre[uk].get_mpz_t(), q.get_mpz_t(), t.im.get_mpz_t());
                mpz_addmul(sc.zim[uk].get_mpz_t(), q.get_mpz_t(), t.re.get_mpz_t());
            }
        }
    }
    std::sort(sc.touched.begin(), sc.touched.end());
    std::vector<Term> out;
    out.reserve(sc.touched.size());
    for (long k : sc.touched) {
        auto uk = static_cast<std::size_t>(k);
        sc.used[uk] = 0;
        if (sgn(sc.zre[uk]) != 0 || sgn(sc.zim[uk]) != 0) {
            out.push_back(Term{dense.key(k), sc.zre[uk], sc.zim[uk]});
        }
    }
    return MultiSeries::from_raw(like, std::move(out), std::move(l));
}

namespace {

struct SubstContext {
    const MultiSeries* f;
    const MultiSeries* ring;
    std::vector<std::vector<MultiSeries>> powers;
    int nv;
};

// Evaluates the terms in [lo, hi) of f, which all share the exponents of the
// variables before `level`, as a series in the image ring.
MultiSeries eval_range(const SubstContext& ctx, std::size_t lo, std::size_t hi, int level)
{
    const auto& terms = ctx.f->raw_terms();
    const mpz_class& den = ctx.f->raw_den();
    if (level == ctx.nv - 1) {
        std::vector<std::pair<GaussRat, const MultiSeries*>> parts;
        parts.reserve(hi - lo);
        for (std::size_t t = lo; t < hi; ++t) {
            int e = MultiSeries::key_exp(terms[t].key, level);
            parts.emplace_back(GaussRat(mpq_class(terms[t].re, den), mpq_class(terms[t].im, den)),
                               &ctx.powers[static_cast<std::size_t>(level)][static_cast<std::size_t>(e)]);
        }
        return linear_combination(*ctx.ring, parts);
    }
    std::vector<MultiSeries> pieces;
    std::size_t start = lo;
    while (start < hi) {
        int e = MultiSeries::key_exp(terms[start].key, level);
        std::size_t end = start;
        while (end < hi && MultiSeries::key_exp(terms[end].key, level) == e) {
            ++end;
        }
        const MultiSeries& pw = ctx.powers[static_cast<std::size_t>(level)][static_cast<std::size_t>(e)];
        if (!pw.is_zero()) {
            MultiSeries inner = eval_range(ctx, start, end, level + 1);
            pieces.push_back(e == 0 ? std::move(inner) : mul_impl(pw, inner));
        }
        start = end;
    }
    std::vector<std::pair<GaussRat, const MultiSeries*>> parts;
    for (const auto& p : pieces) {
        parts.emplace_back(GaussRat(1), &p);
    }
    return linear_combination(*ctx.ring, parts);
}

} // namespace

MultiSeries substitute(const MultiSeries& f, const SeriesVec& images, bool f_is_exact_polynomial)
{
    if (static_cast<int>(images.size()) != f.nvars()) {
        throw StructuralError("substitute: need one image per variable");
    }
    if (images.empty()) {
        throw StructuralError("substitute: no images given; the target ring is unknown");
    }
    const MultiSeries& ring = images.front();
    for (const auto& im : images) {
        if (!im.same_ring(ring)) {
            throw StructuralError("substitute: images live in different rings");
        }
    }
    if (f.is_zero()) {
        return ring.zero();
    }
    const int nv = f.nvars();
    SubstContext ctx{&f, &ring, {}, nv};
    ctx.powers.resize(static_cast<std::size_t>(nv));
    for (int v = 0; v < nv; ++v) {
        int d = f.degree_in(v);
        const MultiSeries& img = images[static_cast<std::size_t>(v)];
        if (d > 0 && !f_is_exact_polynomial && !img.constant_term().is_zero()) {
            throw TruncationError("substitute: image of '" + f.vars()[static_cast<std::size_t>(v)] +
                                  "' has a nonzero constant term");
        }
        auto& pw = ctx.powers[static_cast<std::size_t>(v)];
        pw.reserve(static_cast<std::size_t>(d + 1));
        pw.push_back(ring.one());
        int val = img.valuation();
        for (int j = 1; j <= d; ++j) {
            if (val > 0 && static_cast<long>(val) * j > ring.order()) {
                pw.push_back(ring.zero());
            } else {
                pw.push_back(mul_impl(pw.back(), img));
            }
        }
    }
    return eval_range(ctx, 0, f.size(), 0);
}

} // namespace crnf
