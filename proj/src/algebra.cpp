#include "lambda_soliton/algebra.hpp"

#include "lambda_soliton/error.hpp"
#include "lambda_soliton/tolerances.hpp"

#include <algorithm>
#include <cmath>

namespace lambda_soliton {

real Vec3::norm2() const
{
    return std::norm(c[0]) + std::norm(c[1]) + std::norm(c[2]);
}

real Vec3::max_abs() const
{
    return std::max({std::abs(c[0]), std::abs(c[1]), std::abs(c[2])});
}

Mat3::Mat3(std::initializer_list<std::initializer_list<complex>> rows)
{
    std::size_t r = 0;
    for (const auto& row : rows) {
        std::size_t col = 0;
        for (const auto& v : row) {
            if (r < 3 && col < 3)
                (*this)(r, col) = v;
            ++col;
        }
        ++r;
    }
}

Mat3 Mat3::identity()
{
    return diag(1.0, 1.0, 1.0);
}

Mat3 Mat3::diag(complex d0, complex d1, complex d2)
{
    Mat3 m;
    m(0, 0) = d0;
    m(1, 1) = d1;
    m(2, 2) = d2;
    return m;
}

Mat3 Mat3::outer(const Vec3& u, const Vec3& v)
{
    Mat3 m;
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c)
            m(r, c) = u[r] * std::conj(v[c]);
    return m;
}

Mat3 Mat3::adjoint() const
{
    Mat3 m;
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c)
            m(r, c) = std::conj((*this)(c, r));
    return m;
}

complex Mat3::trace() const
{
    return e_[0] + e_[4] + e_[8];
}

complex Mat3::det() const
{
    const auto& m = *this;
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
         - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
         + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

real Mat3::norm_inf() const
{
    real best = 0.0;
    for (std::size_t r = 0; r < 3; ++r) {
        real row = 0.0;
        for (std::size_t c = 0; c < 3; ++c)
            row += std::abs((*this)(r, c));
        best = std::max(best, row);
    }
    return best;
}

real Mat3::max_abs() const
{
    real best = 0.0;
    for (const auto& v : e_)
        best = std::max(best, std::abs(v));
    return best;
}

bool Mat3::finite() const
{
    return std::all_of(e_.begin(), e_.end(), [](const complex& v) {
        return std::isfinite(v.real()) && std::isfinite(v.imag());
    });
}

Mat3& Mat3::operator+=(const Mat3& o)
{
    for (std::size_t i = 0; i < 9; ++i)
        e_[i] += o.e_[i];
    return *this;
}

Mat3& Mat3::operator-=(const Mat3& o)
{
    for (std::size_t i = 0; i < 9; ++i)
        e_[i] -= o.e_[i];
    return *this;
}

Mat3& Mat3::operator*=(complex s)
{
    for (auto& v : e_)
        v *= s;
    return *this;
}

Mat3 operator*(const Mat3& a, const Mat3& b)
{
    Mat3 m;
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c)
            m(r, c) = a(r, 0) * b(0, c) + a(r, 1) * b(1, c) + a(r, 2) * b(2, c);
    return m;
}

Vec3 operator*(const Mat3& a, const Vec3& v)
{
    Vec3 out;
    for (std::size_t r = 0; r < 3; ++r)
        out[r] = a(r, 0) * v[0] + a(r, 1) * v[1] + a(r, 2) * v[2];
    return out;
}

Mat3 commutator(const Mat3& a, const Mat3& b)
{
    return a * b - b * a;
}

Mat3 projector_from_vector(const Vec3& v)
{
    const real n2 = v.norm2();
    if (!(n2 >= tol::zero_vector_norm2))
        throw Error(ErrorCode::ZeroVector, "cannot build a projector from a (near) zero vector");
    return Mat3::outer(v, v) * complex(1.0 / n2);
}

Mat3 involution_from_projector(const Mat3& p)
{
    if (idempotency_defect(p) > tol::projector || hermiticity_defect(p) > tol::projector)
        throw Error(ErrorCode::NotAProjector, "matrix is not a hermitian idempotent");
    return p * complex(2.0) - Mat3::identity();
}

Mat3 involution_from_vector(const Vec3& v)
{
    Mat3 m = projector_from_vector(v) * complex(2.0);
    for (int k = 0; k < 3; ++k)
        m(k, k) -= 1.0;
    return m;
}

Mat3 inverse3(const Mat3& m)
{
    const complex d = m.det();
    if (d == complex(0.0))
        throw Error(ErrorCode::SingularMatrix, "determinant is exactly zero");

    Mat3 adj;
    adj(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    adj(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
    adj(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
    adj(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
    adj(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
    adj(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
    adj(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
    adj(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
    adj(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);

    Mat3 inv = adj * (complex(1.0) / d);
    const real cond = m.norm_inf() * inv.norm_inf();
    if (!std::isfinite(cond) || cond > tol::inverse_condition_cap || !inv.finite())
        throw Error(ErrorCode::SingularMatrix, "condition estimate exceeds cap");
    return inv;
}

real hermiticity_defect(const Mat3& m)
{
    return (m - m.adjoint()).max_abs();
}

real involution_defect(const Mat3& m)
{
    return (m * m - Mat3::identity()).max_abs();
}

real idempotency_defect(const Mat3& m)
{
    return (m * m - m).max_abs();
}

} // namespace lambda_soliton
