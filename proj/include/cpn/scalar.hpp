#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace cpn {

using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using IntMatrix = Matrix<Integer>;
using IntVector = Vector<Integer>;
using RatMatrix = Matrix<Rational>;
using RatVector = Vector<Rational>;

using Index = Eigen::Index;

/// Coefficient ring of sections: the non-negative cone, the integers, or the rationals.
enum class Ring { N, Z, Q };

inline const char* to_string(Ring r)
{
    switch (r) {
    case Ring::N: return "n";
    case Ring::Z: return "z";
    case Ring::Q: return "q";
    }
    return "?";
}

inline Rational to_rational(const Integer& v) { return Rational(v); }

inline bool is_integral(const Rational& v) { return denominator(v) == 1; }

template <typename Derived>
bool is_integral(const Eigen::MatrixBase<Derived>& m)
{
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i)
            if (denominator(m(i, j)) != 1)
                return false;
    return true;
}

template <typename Derived>
bool is_nonnegative(const Eigen::MatrixBase<Derived>& m)
{
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i)
            if (m(i, j) < 0)
                return false;
    return true;
}

template <typename Derived>
bool is_zero(const Eigen::MatrixBase<Derived>& m)
{
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i)
            if (m(i, j) != 0)
                return false;
    return true;
}

inline RatMatrix rationalize(const IntMatrix& m) { return m.cast<Rational>(); }
inline RatVector rationalize(const IntVector& v) { return v.cast<Rational>(); }

/// Numerators of an integral rational matrix. Throws if any entry is fractional.
IntMatrix integral_part(const RatMatrix& m);
IntVector integral_part(const RatVector& v);

/// Selects rows (and optionally columns) by index lists, in the given order.
template <typename Scalar>
Matrix<Scalar> select_rows(const Matrix<Scalar>& m, const std::vector<Index>& rows)
{
    Matrix<Scalar> out(static_cast<Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.row(static_cast<Index>(i)) = m.row(rows[i]);
    return out;
}

template <typename Scalar>
Matrix<Scalar> select(const Matrix<Scalar>& m, const std::vector<Index>& rows,
                      const std::vector<Index>& cols)
{
    Matrix<Scalar> out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < rows.size(); ++i)
            out(static_cast<Index>(i), static_cast<Index>(j)) = m(rows[i], cols[j]);
    return out;
}

template <typename Scalar>
Vector<Scalar> select(const Vector<Scalar>& v, const std::vector<Index>& idx)
{
    Vector<Scalar> out(static_cast<Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i)
        out(static_cast<Index>(i)) = v(idx[i]);
    return out;
}

/// Horizontal concatenation of column blocks with equal row counts.
template <typename Scalar>
Matrix<Scalar> hstack(const Matrix<Scalar>& a, const Matrix<Scalar>& b)
{
    Matrix<Scalar> out(a.rows(), a.cols() + b.cols());
    out.leftCols(a.cols()) = a;
    out.rightCols(b.cols()) = b;
    return out;
}

template <typename Scalar>
Matrix<Scalar> vstack(const Matrix<Scalar>& a, const Matrix<Scalar>& b)
{
    Matrix<Scalar> out(a.rows() + b.rows(), a.cols());
    if (a.rows() > 0)
        out.topRows(a.rows()) = a;
    if (b.rows() > 0)
        out.bottomRows(b.rows()) = b;
    return out;
}

template <typename Scalar>
Matrix<Scalar> columns_of(const std::vector<Vector<Scalar>>& cols, Index rows)
{
    Matrix<Scalar> out(rows, static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
        out.col(static_cast<Index>(j)) = cols[j];
    return out;
}

/// Compact single-line rendering: "(1, -2, 3)".
std::string format_vector(const IntVector& v);
std::string format_vector(const RatVector& v);
std::string format_matrix(const IntMatrix& m);
std::string format_matrix(const RatMatrix& m);

} // namespace cpn
