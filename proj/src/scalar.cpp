#include "cpn/scalar.hpp"
#include "cpn/error.hpp"

#include <sstream>

namespace cpn {

IntMatrix integral_part(const RatMatrix& m)
{
    IntMatrix out(m.rows(), m.cols());
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i) {
            if (denominator(m(i, j)) != 1)
                throw StructuralError("fractional entry " + m(i, j).str() + " where an integer was required");
            out(i, j) = numerator(m(i, j));
        }
    return out;
}

IntVector integral_part(const RatVector& v)
{
    return integral_part(RatMatrix(v)).col(0);
}

namespace {

template <typename Derived>
std::string join_vector(const Derived& v)
{
    std::ostringstream os;
    os << '(';
    for (Index i = 0; i < v.size(); ++i) {
        if (i)
            os << ", ";
        os << v(i).str();
    }
    os << ')';
    return os.str();
}

template <typename M>
std::string join_matrix(const M& m)
{
    std::ostringstream os;
    os << '[';
    for (Index i = 0; i < m.rows(); ++i) {
        if (i)
            os << "; ";
        for (Index j = 0; j < m.cols(); ++j) {
            if (j)
                os << ' ';
            os << m(i, j).str();
        }
    }
    os << ']';
    return os.str();
}

} // namespace

std::string format_vector(const IntVector& v) { return join_vector(v); }
std::string format_vector(const RatVector& v) { return join_vector(v); }
std::string format_matrix(const IntMatrix& m) { return join_matrix(m); }
std::string format_matrix(const RatMatrix& m) { return join_matrix(m); }

} // namespace cpn
