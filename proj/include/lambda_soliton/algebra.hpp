#ifndef LAMBDA_SOLITON_ALGEBRA_HPP
#define LAMBDA_SOLITON_ALGEBRA_HPP

#include <array>
#include <complex>
#include <cstddef>

namespace lambda_soliton {

using real = double;
using complex = std::complex<real>;

inline constexpr complex I_unit{0.0, 1.0};

/// 3-component complex column vector.
struct Vec3 {
    std::array<complex, 3> c{};

    complex& operator[](std::size_t i) { return c[i]; }
    const complex& operator[](std::size_t i) const { return c[i]; }

    real norm2() const;
    real max_abs() const;
};

/// Dense 3x3 complex matrix, row-major.
class Mat3 {
public:
    Mat3() = default;
    Mat3(std::initializer_list<std::initializer_list<complex>> rows);

    static Mat3 identity();
    static Mat3 zero() { return Mat3{}; }
    static Mat3 diag(complex d0, complex d1, complex d2);
    static Mat3 outer(const Vec3& u, const Vec3& v); // u v^dagger

    complex& operator()(std::size_t r, std::size_t c) { return e_[3 * r + c]; }
    const complex& operator()(std::size_t r, std::size_t c) const { return e_[3 * r + c]; }

    Mat3 adjoint() const;
    complex trace() const;
    complex det() const;
    /// Max absolute row sum.
    real norm_inf() const;
    /// Largest entry magnitude; used for the "||.||_inf < tol" style checks.
    real max_abs() const;
    bool finite() const;

    Mat3& operator+=(const Mat3& o);
    Mat3& operator-=(const Mat3& o);
    Mat3& operator*=(complex s);

    friend Mat3 operator+(Mat3 a, const Mat3& b) { return a += b; }
    friend Mat3 operator-(Mat3 a, const Mat3& b) { return a -= b; }
    friend Mat3 operator*(Mat3 a, complex s) { return a *= s; }
    friend Mat3 operator*(complex s, Mat3 a) { return a *= s; }
    friend Mat3 operator*(const Mat3& a, const Mat3& b);
    friend Vec3 operator*(const Mat3& a, const Vec3& v);

private:
    std::array<complex, 9> e_{};
};

Mat3 commutator(const Mat3& a, const Mat3& b);

/// |v><v| / <v|v>. Throws ZeroVector if ||v||^2 is below tol::zero_vector_norm2.
Mat3 projector_from_vector(const Vec3& v);

/// 2P - I. Throws NotAProjector unless P is a hermitian idempotent.
Mat3 involution_from_projector(const Mat3& p);

/// 2 |v><v| / <v|v> - I, the same as the two steps above without the projector check.
Mat3 involution_from_vector(const Vec3& v);

/// Closed-form adjugate inverse guarded by the condition estimate ||m||_inf ||m^-1||_inf.
Mat3 inverse3(const Mat3& m);

// Structural defects, all measured as max entry magnitude.
real hermiticity_defect(const Mat3& m);
real involution_defect(const Mat3& m);
real idempotency_defect(const Mat3& m);

} // namespace lambda_soliton

#endif
