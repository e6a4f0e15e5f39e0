#include "cpn/intlinalg.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <utility>

namespace cpn {

Integer floor_div(const Integer& a, const Integer& b)
{
    Integer q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        q -= 1;
    return q;
}

Integer floor_mod(const Integer& a, const Integer& b)
{
    return a - floor_div(a, b) * b;
}

namespace {

// x*a + y*b = g, g >= 0
void ext_gcd(const Integer& a, const Integer& b, Integer& g, Integer& x, Integer& y)
{
    Integer old_r = a, r = b;
    Integer old_s = 1, s = 0;
    Integer old_t = 0, t = 1;
    while (r != 0) {
        Integer q = old_r / r;
        Integer tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        tmp = old_s - q * s;
        old_s = s;
        s = tmp;
        tmp = old_t - q * t;
        old_t = t;
        t = tmp;
    }
    if (old_r < 0) {
        old_r = -old_r;
        old_s = -old_s;
        old_t = -old_t;
    }
    g = old_r;
    x = old_s;
    y = old_t;
}

// (col_r, col_j) <- (x col_r + y col_j, u col_r + v col_j)
void mix_cols(IntMatrix& m, Index r, Index j, const Integer& x, const Integer& y,
              const Integer& u, const Integer& v)
{
    for (Index i = 0; i < m.rows(); ++i) {
        Integer a = m(i, r), b = m(i, j);
        m(i, r) = x * a + y * b;
        m(i, j) = u * a + v * b;
    }
}

void axpy_col(IntMatrix& m, Index dst, const Integer& q, Index src)
{
    for (Index i = 0; i < m.rows(); ++i)
        m(i, dst) -= q * m(i, src);
}

void axpy_row(IntMatrix& m, Index dst, const Integer& q, Index src)
{
    for (Index k = 0; k < m.cols(); ++k)
        m(dst, k) -= q * m(src, k);
}

} // namespace

HnfResult hnf(const IntMatrix& m)
{
    HnfResult res;
    res.H = m;
    res.U = IntMatrix::Identity(m.cols(), m.cols());
    IntMatrix& H = res.H;
    IntMatrix& U = res.U;
    const Index cols = m.cols();
    Index r = 0;
    for (Index i = 0; i < m.rows() && r < cols; ++i) {
        for (Index j = r + 1; j < cols; ++j) {
            if (H(i, j) == 0)
                continue;
            if (H(i, r) == 0) {
                H.col(r).swap(H.col(j));
                U.col(r).swap(U.col(j));
                continue;
            }
            Integer g, x, y;
            ext_gcd(H(i, r), H(i, j), g, x, y);
            const Integer ag = H(i, r) / g;
            const Integer bg = H(i, j) / g;
            mix_cols(H, r, j, x, y, -bg, ag);
            mix_cols(U, r, j, x, y, -bg, ag);
        }
        if (H(i, r) == 0)
            continue;
        if (H(i, r) < 0) {
            H.col(r) = -H.col(r);
            U.col(r) = -U.col(r);
        }
        for (Index j = 0; j < r; ++j) {
            Integer q = floor_div(H(i, j), H(i, r));
            if (q != 0) {
                axpy_col(H, j, q, r);
                axpy_col(U, j, q, r);
            }
        }
        res.pivot_rows.push_back(i);
        ++r;
    }
    res.rank = r;
    return res;
}

SnfResult snf(const IntMatrix& m)
{
    SnfResult res;
    res.S = m;
    res.U = IntMatrix::Identity(m.rows(), m.rows());
    res.V = IntMatrix::Identity(m.cols(), m.cols());
    IntMatrix& S = res.S;
    const Index n = std::min(m.rows(), m.cols());
    Index t = 0;

    auto move_smallest = [&](bool whole_block) {
        Index bi = -1, bj = -1;
        Integer best;
        for (Index j = t; j < S.cols(); ++j)
            for (Index i = t; i < S.rows(); ++i) {
                if (!whole_block && i != t && j != t)
                    continue;
                if (S(i, j) == 0)
                    continue;
                Integer a = abs(S(i, j));
                if (bi < 0 || a < best) {
                    best = a;
                    bi = i;
                    bj = j;
                }
            }
        if (bi < 0)
            return false;
        if (bi != t) {
            S.row(t).swap(S.row(bi));
            res.U.row(t).swap(res.U.row(bi));
        }
        if (bj != t) {
            S.col(t).swap(S.col(bj));
            res.V.col(t).swap(res.V.col(bj));
        }
        return true;
    };

    while (t < n) {
        if (!move_smallest(true))
            break;
        for (;;) {
            bool clean = true;
            for (Index i = t + 1; i < S.rows(); ++i) {
                if (S(i, t) == 0)
                    continue;
                Integer q = floor_div(S(i, t), S(t, t));
                axpy_row(S, i, q, t);
                axpy_row(res.U, i, q, t);
                if (S(i, t) != 0)
                    clean = false;
            }
            for (Index j = t + 1; j < S.cols(); ++j) {
                if (S(t, j) == 0)
                    continue;
                Integer q = floor_div(S(t, j), S(t, t));
                axpy_col(S, j, q, t);
                axpy_col(res.V, j, q, t);
                if (S(t, j) != 0)
                    clean = false;
            }
            if (!clean) {
                move_smallest(false);
                continue;
            }
            Index bad = -1;
            for (Index j = t + 1; j < S.cols() && bad < 0; ++j)
                for (Index i = t + 1; i < S.rows(); ++i)
                    if (S(i, j) % S(t, t) != 0) {
                        bad = i;
                        break;
                    }
            if (bad < 0)
                break;
            // pull the offending row into row t and eliminate again
            axpy_row(S, t, Integer(-1), bad);
            axpy_row(res.U, t, Integer(-1), bad);
        }
        if (S(t, t) < 0) {
            S.row(t) = -S.row(t);
            res.U.row(t) = -res.U.row(t);
        }
        ++t;
    }
    res.rank = t;
    return res;
}

std::vector<Integer> invariant_factors(const IntMatrix& m)
{
    auto s = snf(m);
    std::vector<Integer> d;
    for (Index i = 0; i < s.rank; ++i)
        d.push_back(s.S(i, i));
    return d;
}

Integer determinant(const IntMatrix& m)
{
    if (m.rows() != m.cols())
        throw StructuralError("determinant of a non-square matrix");
    const Index n = m.rows();
    if (n == 0)
        return 1;
    IntMatrix a = m;
    Integer sign = 1, prev = 1;
    for (Index k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            Index sw = -1;
            for (Index i = k + 1; i < n; ++i)
                if (a(i, k) != 0) {
                    sw = i;
                    break;
                }
            if (sw < 0)
                return 0;
            a.row(k).swap(a.row(sw));
            sign = -sign;
        }
        for (Index i = k + 1; i < n; ++i)
            for (Index j = k + 1; j < n; ++j)
                a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

// --- Lattice ------------------------------------------------------------------

Lattice::Lattice(const IntMatrix& generators)
{
    auto h = hnf(generators);
    basis_ = h.H.leftCols(h.rank);
    pivots_ = std::move(h.pivot_rows);
}

Lattice Lattice::zero(Index dim)
{
    return Lattice(IntMatrix(dim, 0));
}

Lattice Lattice::full(Index dim)
{
    return Lattice(IntMatrix::Identity(dim, dim));
}

std::optional<IntVector> Lattice::coordinates(const IntVector& v) const
{
    if (v.size() != dim())
        throw StructuralError("lattice membership: dimension " + std::to_string(v.size())
                              + " does not match ambient dimension " + std::to_string(dim()));
    IntVector res = v;
    IntVector c(rank());
    for (Index k = 0; k < rank(); ++k) {
        const Index p = pivots_[static_cast<std::size_t>(k)];
        for (Index i = (k == 0 ? 0 : pivots_[static_cast<std::size_t>(k - 1)] + 1); i < p; ++i)
            if (res(i) != 0)
                return std::nullopt;
        if (res(p) % basis_(p, k) != 0)
            return std::nullopt;
        c(k) = res(p) / basis_(p, k);
        if (c(k) != 0)
            res -= c(k) * basis_.col(k);
    }
    for (Index i = 0; i < res.size(); ++i)
        if (res(i) != 0)
            return std::nullopt;
    return c;
}

bool Lattice::contains(const Lattice& other) const
{
    if (other.dim() != dim())
        return false;
    for (Index k = 0; k < other.rank(); ++k)
        if (!contains(IntVector(other.basis_.col(k))))
            return false;
    return true;
}

IntVector Lattice::reduce(const IntVector& v) const
{
    if (v.size() != dim())
        throw StructuralError("lattice reduction: dimension mismatch");
    IntVector res = v;
    for (Index k = 0; k < rank(); ++k) {
        const Index p = pivots_[static_cast<std::size_t>(k)];
        Integer q = floor_div(res(p), basis_(p, k));
        if (q != 0)
            res -= q * basis_.col(k);
    }
    return res;
}

Lattice kernel(const IntMatrix& m)
{
    auto h = hnf(m);
    return Lattice(IntMatrix(h.U.rightCols(m.cols() - h.rank)));
}

Lattice column_lattice(const IntMatrix& m)
{
    return Lattice(m);
}

Lattice intersect(const Lattice& a, const Lattice& b)
{
    if (a.dim() != b.dim())
        throw StructuralError("lattice intersection: dimension mismatch");
    IntMatrix ab(a.dim(), a.rank() + b.rank());
    ab.leftCols(a.rank()) = a.basis();
    ab.rightCols(b.rank()) = -b.basis();
    Lattice k = kernel(ab);
    IntMatrix top = k.basis().topRows(a.rank());
    return Lattice(IntMatrix(a.basis() * top));
}

Lattice preimage(const IntMatrix& m, const Lattice& target)
{
    if (m.rows() != target.dim())
        throw StructuralError("lattice preimage: dimension mismatch");
    IntMatrix ab(m.rows(), m.cols() + target.rank());
    ab.leftCols(m.cols()) = m;
    ab.rightCols(target.rank()) = -target.basis();
    Lattice k = kernel(ab);
    return Lattice(IntMatrix(k.basis().topRows(m.cols())));
}

std::optional<IntVector> in_lattice(const Lattice& lattice, const IntVector& v)
{
    return lattice.coordinates(v);
}

std::optional<IntVector> solve_integer(const IntMatrix& a, const IntVector& b)
{
    if (a.rows() != b.size())
        throw StructuralError("integer solve: dimension mismatch");
    auto h = hnf(a);
    IntVector res = b;
    IntVector y = IntVector::Zero(a.cols());
    for (Index k = 0; k < h.rank; ++k) {
        const Index p = h.pivot_rows[static_cast<std::size_t>(k)];
        if (res(p) % h.H(p, k) != 0)
            return std::nullopt;
        y(k) = res(p) / h.H(p, k);
        if (y(k) != 0)
            res -= y(k) * h.H.col(k);
    }
    for (Index i = 0; i < res.size(); ++i)
        if (res(i) != 0)
            return std::nullopt;
    return IntVector(h.U * y);
}

std::optional<IntMatrix> solve_integer(const IntMatrix& a, const IntMatrix& b)
{
    IntMatrix x(a.cols(), b.cols());
    for (Index j = 0; j < b.cols(); ++j) {
        auto c = solve_integer(a, IntVector(b.col(j)));
        if (!c)
            return std::nullopt;
        x.col(j) = *c;
    }
    return x;
}

// --- QuotientModule -------------------------------------------------------------

QuotientModule::QuotientModule(const IntMatrix& relations)
    : relations_(relations)
{
    const Index n = relations.rows();
    auto s = snf(relations_.basis());
    std::vector<Index> rows;
    for (Index i = 0; i < s.rank; ++i)
        if (s.S(i, i) != 1) {
            torsion_.push_back(s.S(i, i));
            rows.push_back(i);
        }
    for (Index i = s.rank; i < n; ++i)
        rows.push_back(i);
    free_rank_ = n - s.rank;

    RatMatrix uinv_q = *solve_linear<Rational>(rationalize(s.U), RatMatrix(RatMatrix::Identity(n, n)));
    IntMatrix uinv = integral_part(uinv_q);

    coord_map_ = IntMatrix(static_cast<Index>(rows.size()), n);
    generators_ = IntMatrix(n, static_cast<Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const Index r = rows[k];
        IntVector row = s.U.row(r).transpose();
        IntVector gen = uinv.col(r);
        if (k >= torsion_.size()) {
            // free coordinate: orient so the first nonzero entry is positive
            for (Index i = 0; i < n; ++i)
                if (row(i) != 0) {
                    if (row(i) < 0) {
                        row = -row;
                        gen = -gen;
                    }
                    break;
                }
        }
        coord_map_.row(static_cast<Index>(k)) = row.transpose();
        generators_.col(static_cast<Index>(k)) = gen;
    }
}

bool QuotientModule::class_equal(const IntVector& v, const IntVector& w) const
{
    if (v.size() != ambient_dim() || w.size() != ambient_dim())
        throw StructuralError("class comparison: dimension mismatch");
    return relations_.contains(IntVector(v - w));
}

IntVector QuotientModule::canonical_rep(const IntVector& v) const
{
    return relations_.reduce(v);
}

IntVector QuotientModule::coordinates(const IntVector& v) const
{
    if (v.size() != ambient_dim())
        throw StructuralError("class coordinates: dimension mismatch");
    IntVector c = coord_map_ * v;
    for (std::size_t k = 0; k < torsion_.size(); ++k)
        c(static_cast<Index>(k)) = floor_mod(c(static_cast<Index>(k)), torsion_[k]);
    return c;
}

IntVector QuotientModule::from_coordinates(const IntVector& c) const
{
    if (c.size() != coordinate_count())
        throw StructuralError("class coordinates: wrong length");
    return canonical_rep(IntVector(generators_ * c));
}

QuotientModule cokernel(const IntMatrix& m)
{
    return QuotientModule(m);
}

// --- Graver / Hilbert ---------------------------------------------------------

bool lex_less(const IntVector& a, const IntVector& b)
{
    for (Index i = 0; i < std::min(a.size(), b.size()); ++i)
        if (a(i) != b(i))
            return a(i) < b(i);
    return a.size() < b.size();
}

namespace {

struct LexLess {
    bool operator()(const IntVector& a, const IntVector& b) const { return lex_less(a, b); }
};

// g is conformally below s: same signs and |g_i| <= |s_i|
bool conformal_le(const IntVector& g, const IntVector& s)
{
    for (Index i = 0; i < g.size(); ++i) {
        if (g(i) == 0)
            continue;
        if (g(i) > 0) {
            if (s(i) < g(i))
                return false;
        } else if (s(i) > g(i)) {
            return false;
        }
    }
    return true;
}

bool has_sign_conflict(const IntVector& a, const IntVector& b)
{
    for (Index i = 0; i < a.size(); ++i)
        if ((a(i) > 0 && b(i) < 0) || (a(i) < 0 && b(i) > 0))
            return true;
    return false;
}

IntVector normal_form(IntVector s, const std::vector<IntVector>& basis)
{
    bool reduced = true;
    while (reduced && !is_zero(s)) {
        reduced = false;
        for (const auto& g : basis)
            if (conformal_le(g, s)) {
                s -= g;
                reduced = true;
                break;
            }
    }
    return s;
}

} // namespace

std::vector<IntVector> graver_basis(const Lattice& lattice, std::size_t guard)
{
    std::vector<IntVector> G;
    std::set<IntVector, LexLess> seen;
    for (Index k = 0; k < lattice.rank(); ++k) {
        IntVector b = lattice.basis().col(k);
        for (const IntVector& v : {b, IntVector(-b)})
            if (seen.insert(v).second)
                G.push_back(v);
    }
    std::deque<IntVector> pending;
    for (std::size_t i = 0; i < G.size(); ++i)
        for (std::size_t j = i + 1; j < G.size(); ++j)
            if (has_sign_conflict(G[i], G[j]))
                pending.push_back(G[i] + G[j]);

    while (!pending.empty()) {
        if (G.size() + pending.size() > guard)
            throw ResourceError("Hilbert/Graver completion exceeded guard of " + std::to_string(guard)
                                    + " intermediate vectors",
                                G.size() + pending.size());
        IntVector s = std::move(pending.front());
        pending.pop_front();
        IntVector h = normal_form(std::move(s), G);
        if (is_zero(h) || !seen.insert(h).second)
            continue;
        for (const auto& g : G)
            if (has_sign_conflict(g, h))
                pending.push_back(g + h);
        G.push_back(h);
    }

    // keep only conformally minimal elements
    std::vector<IntVector> out;
    for (std::size_t i = 0; i < G.size(); ++i) {
        bool minimal = true;
        for (std::size_t j = 0; j < G.size() && minimal; ++j)
            if (i != j && conformal_le(G[j], G[i]))
                minimal = false;
        if (minimal)
            out.push_back(G[i]);
    }
    std::sort(out.begin(), out.end(), LexLess{});
    return out;
}

std::vector<IntVector> hilbert_basis(const Lattice& lattice, std::size_t guard)
{
    std::vector<IntVector> out;
    for (auto& g : graver_basis(lattice, guard))
        if (is_nonnegative(g) && !is_zero(g))
            out.push_back(std::move(g));
    return out;
}

std::vector<IntVector> nonneg_kernel_generators(const IntMatrix& m, std::size_t guard)
{
    return hilbert_basis(kernel(m), guard);
}

// --- rational side ------------------------------------------------------------

RationalQuotient::RationalQuotient(const RatMatrix& relations)
    : dim_(relations.rows())
{
    reduced_ = relations.transpose();
    pivots_ = rref_in_place(reduced_);
    reduced_.conservativeResize(static_cast<Index>(pivots_.size()), dim_);
    std::vector<bool> piv(static_cast<std::size_t>(dim_), false);
    for (Index p : pivots_)
        piv[static_cast<std::size_t>(p)] = true;
    for (Index i = 0; i < dim_; ++i)
        if (!piv[static_cast<std::size_t>(i)])
            free_.push_back(i);
}

namespace {

RatVector reduce_by(const RatMatrix& reduced, const std::vector<Index>& pivots, RatVector v)
{
    for (std::size_t r = 0; r < pivots.size(); ++r) {
        const Rational c = v(pivots[r]);
        if (c != 0)
            v -= c * reduced.row(static_cast<Index>(r)).transpose();
    }
    return v;
}

} // namespace

bool RationalQuotient::is_zero(const RatVector& v) const
{
    if (v.size() != dim_)
        throw StructuralError("rational class: dimension mismatch");
    return cpn::is_zero(reduce_by(reduced_, pivots_, v));
}

bool RationalQuotient::class_equal(const RatVector& v, const RatVector& w) const
{
    return is_zero(RatVector(v - w));
}

RatVector RationalQuotient::coordinates(const RatVector& v) const
{
    if (v.size() != dim_)
        throw StructuralError("rational class: dimension mismatch");
    return select(reduce_by(reduced_, pivots_, v), free_);
}

RationalQuotient rationalize(const QuotientModule& q)
{
    return RationalQuotient(rationalize(q.relations().basis()));
}

RatMatrix rationalize(const Lattice& lattice)
{
    return rationalize(lattice.basis());
}

} // namespace cpn
