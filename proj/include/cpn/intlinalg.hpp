#pragma once

#include "cpn/error.hpp"
#include "cpn/scalar.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace cpn {

Integer floor_div(const Integer& a, const Integer& b);
Integer floor_mod(const Integer& a, const Integer& b);

struct HnfResult {
    IntMatrix H; // column Hermite normal form, nonzero columns first
    IntMatrix U; // unimodular, H = m * U
    Index rank = 0;
    std::vector<Index> pivot_rows; // pivot row of each nonzero column, strictly increasing
};

/// Column Hermite normal form: lower echelon, positive pivots, entries left of a
/// pivot reduced into [0, pivot).
HnfResult hnf(const IntMatrix& m);

struct SnfResult {
    IntMatrix S; // diagonal, d_i | d_{i+1}, non-negative
    IntMatrix U; // unimodular row transform
    IntMatrix V; // unimodular column transform, S = U * m * V
    Index rank = 0;
};

SnfResult snf(const IntMatrix& m);

/// Invariant factors d_1 | d_2 | ... (nonzero diagonal entries of the SNF).
std::vector<Integer> invariant_factors(const IntMatrix& m);

/// Determinant of a square integer matrix (fraction-free elimination).
Integer determinant(const IntMatrix& m);

/// A sublattice of Z^n stored by its canonical column-HNF basis.
class Lattice {
public:
    Lattice() = default;
    /// Lattice spanned by the columns of `generators` (n x k).
    explicit Lattice(const IntMatrix& generators);
    static Lattice zero(Index dim);
    static Lattice full(Index dim);

    Index dim() const { return basis_.rows(); }
    Index rank() const { return basis_.cols(); }
    const IntMatrix& basis() const { return basis_; }
    const std::vector<Index>& pivot_rows() const { return pivots_; }

    /// Integer coordinates of v in basis(), if v lies in the lattice.
    std::optional<IntVector> coordinates(const IntVector& v) const;
    bool contains(const IntVector& v) const { return coordinates(v).has_value(); }
    bool contains(const Lattice& other) const;

    /// Lattice reduction of v: pivot entries moved into [0, pivot).
    IntVector reduce(const IntVector& v) const;

    friend bool operator==(const Lattice& a, const Lattice& b)
    {
        return a.basis_.rows() == b.basis_.rows() && a.basis_.cols() == b.basis_.cols()
            && a.basis_ == b.basis_;
    }
    friend bool operator!=(const Lattice& a, const Lattice& b) { return !(a == b); }

private:
    IntMatrix basis_;
    std::vector<Index> pivots_;
};

Lattice kernel(const IntMatrix& m);
Lattice column_lattice(const IntMatrix& m);
Lattice intersect(const Lattice& a, const Lattice& b);
/// {x : m x in target}
Lattice preimage(const IntMatrix& m, const Lattice& target);

std::optional<IntVector> in_lattice(const Lattice& lattice, const IntVector& v);

/// An integer solution of a x = b, if one exists.
std::optional<IntVector> solve_integer(const IntMatrix& a, const IntVector& b);
/// Integer solution X of a X = b column by column; empty if any column is unsolvable.
std::optional<IntMatrix> solve_integer(const IntMatrix& a, const IntMatrix& b);

/// Z^n modulo the column lattice of a relation matrix.
class QuotientModule {
public:
    QuotientModule() = default;
    /// Relations are the columns of `relations` (n x k).
    explicit QuotientModule(const IntMatrix& relations);

    Index ambient_dim() const { return relations_.dim(); }
    const Lattice& relations() const { return relations_; }

    /// Nontrivial invariant factors (all > 1); the torsion part.
    const std::vector<Integer>& torsion() const { return torsion_; }
    Index free_rank() const { return free_rank_; }
    /// Number of coordinates: torsion factors followed by free part.
    Index coordinate_count() const
    {
        return static_cast<Index>(torsion_.size()) + free_rank_;
    }

    bool class_equal(const IntVector& v, const IntVector& w) const;
    bool is_zero(const IntVector& v) const { return relations_.contains(v); }
    IntVector canonical_rep(const IntVector& v) const;

    /// Smith coordinates of the class of v: torsion residues in [0, d_i), then
    /// free coordinates. Two vectors have equal class iff coordinates agree.
    IntVector coordinates(const IntVector& v) const;
    /// A representative whose coordinates are the given ones.
    IntVector from_coordinates(const IntVector& c) const;
    /// Matrix sending ambient vectors to coordinates (torsion rows not yet reduced).
    const IntMatrix& coordinate_map() const { return coord_map_; }
    /// Column k is a representative of the k-th coordinate generator.
    const IntMatrix& generators() const { return generators_; }

private:
    Lattice relations_;
    std::vector<Integer> torsion_;
    Index free_rank_ = 0;
    IntMatrix coord_map_;
    IntMatrix generators_;
};

QuotientModule cokernel(const IntMatrix& m);

/// Pottier completion of a symmetric generating set of the lattice into its
/// Graver basis (conformally minimal elements). Throws ResourceError once more
/// than `guard` vectors are held at the same time.
std::vector<IntVector> graver_basis(const Lattice& lattice, std::size_t guard = 10000);

/// Hilbert basis of the pointed cone lattice ∩ N^n, sorted lexicographically.
std::vector<IntVector> hilbert_basis(const Lattice& lattice, std::size_t guard = 10000);

/// Hilbert basis of ker(m) ∩ N^cols.
std::vector<IntVector> nonneg_kernel_generators(const IntMatrix& m, std::size_t guard = 10000);

bool lex_less(const IntVector& a, const IntVector& b);

// --- rational side -----------------------------------------------------------

/// Reduced row echelon form over a field; returns pivot columns.
template <typename Scalar>
std::vector<Index> rref_in_place(Matrix<Scalar>& m)
{
    std::vector<Index> pivots;
    Index row = 0;
    for (Index col = 0; col < m.cols() && row < m.rows(); ++col) {
        Index sel = -1;
        for (Index i = row; i < m.rows(); ++i)
            if (m(i, col) != 0) {
                sel = i;
                break;
            }
        if (sel < 0)
            continue;
        m.row(row).swap(m.row(sel));
        Scalar p = m(row, col);
        m.row(row) /= p;
        for (Index i = 0; i < m.rows(); ++i)
            if (i != row && m(i, col) != 0) {
                Scalar f = m(i, col);
                m.row(i) -= f * m.row(row);
            }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

template <typename Scalar>
Index rank_of(Matrix<Scalar> m)
{
    return static_cast<Index>(rref_in_place(m).size());
}

/// Basis of the right null space as columns.
template <typename Scalar>
Matrix<Scalar> nullspace(Matrix<Scalar> m)
{
    const auto pivots = rref_in_place(m);
    std::vector<bool> is_pivot(static_cast<std::size_t>(m.cols()), false);
    for (Index p : pivots)
        is_pivot[static_cast<std::size_t>(p)] = true;
    std::vector<Vector<Scalar>> out;
    for (Index f = 0; f < m.cols(); ++f) {
        if (is_pivot[static_cast<std::size_t>(f)])
            continue;
        Vector<Scalar> v = Vector<Scalar>::Zero(m.cols());
        v(f) = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r)
            v(pivots[r]) = -m(static_cast<Index>(r), f);
        out.push_back(v);
    }
    return columns_of(out, m.cols());
}

/// A solution of a x = b over a field, free variables set to zero.
template <typename Scalar>
std::optional<Vector<Scalar>> solve_linear(const Matrix<Scalar>& a, const Vector<Scalar>& b)
{
    Matrix<Scalar> aug(a.rows(), a.cols() + 1);
    aug.leftCols(a.cols()) = a;
    aug.col(a.cols()) = b;
    const auto pivots = rref_in_place(aug);
    Vector<Scalar> x = Vector<Scalar>::Zero(a.cols());
    for (std::size_t r = 0; r < pivots.size(); ++r) {
        if (pivots[r] == a.cols())
            return std::nullopt;
        x(pivots[r]) = aug(static_cast<Index>(r), a.cols());
    }
    return x;
}

template <typename Scalar>
std::optional<Matrix<Scalar>> solve_linear(const Matrix<Scalar>& a, const Matrix<Scalar>& b)
{
    Matrix<Scalar> x(a.cols(), b.cols());
    for (Index j = 0; j < b.cols(); ++j) {
        auto col = solve_linear<Scalar>(a, Vector<Scalar>(b.col(j)));
        if (!col)
            return std::nullopt;
        x.col(j) = *col;
    }
    return x;
}

/// Q-vector-space quotient Q^n / span(relations); torsion disappears.
class RationalQuotient {
public:
    RationalQuotient() = default;
    explicit RationalQuotient(const RatMatrix& relations);

    Index ambient_dim() const { return dim_; }
    Index dimension() const { return static_cast<Index>(free_.size()); }
    bool class_equal(const RatVector& v, const RatVector& w) const;
    bool is_zero(const RatVector& v) const;
    /// Coordinates in the complement spanned by the non-pivot unit vectors.
    RatVector coordinates(const RatVector& v) const;

private:
    Index dim_ = 0;
    RatMatrix reduced_;          // rref of relations^T
    std::vector<Index> pivots_;  // pivot coordinates of the relation space
    std::vector<Index> free_;    // complement coordinates
};

RationalQuotient rationalize(const QuotientModule& q);
/// Rational span of a lattice as an echelon basis (columns).
RatMatrix rationalize(const Lattice& lattice);

} // namespace cpn
