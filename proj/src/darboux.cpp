#include "lambda_soliton/darboux.hpp"

#include "lambda_soliton/error.hpp"
#include "lambda_soliton/tolerances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace lambda_soliton {

namespace {

real sech(real x)
{
    const real ax = std::abs(x);
    if (ax > 700.0)
        return 0.0;
    return 1.0 / std::cosh(x);
}

std::array<bool, 3> zero_pattern(const std::array<complex, 3>& a)
{
    const real scale = std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])});
    std::array<bool, 3> zero{};
    for (int k = 0; k < 3; ++k)
        zero[k] = !(scale > 0.0) || std::abs(a[k]) < tol::type_zero_constant * scale;
    return zero;
}

} // namespace

std::string_view to_string(SolitonKind kind)
{
    switch (kind) {
    case SolitonKind::Type1: return "type1";
    case SolitonKind::Type2: return "type2";
    case SolitonKind::Type3: return "type3";
    }
    return "unknown";
}

SolitonKind classify_constants(const std::array<complex, 3>& a)
{
    const auto zero = zero_pattern(a);
    if (!zero[0] && !zero[1] && !zero[2])
        return SolitonKind::Type1;
    if (zero[0] && !zero[1] && !zero[2])
        return SolitonKind::Type2;
    if (!zero[0] && zero[1] && !zero[2])
        return SolitonKind::Type3;
    throw Error(ErrorCode::InvalidSpec, "integration constants match no soliton type");
}

void SolitonSpec::validate() const
{
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw Error(ErrorCode::InvalidSpec, "tau must be positive and finite");
    for (const auto& v : a)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw Error(ErrorCode::InvalidSpec, "integration constants must be finite");

    // Entries the kind sets to zero may carry residue below the relative threshold;
    // the others only need to be genuinely nonzero, since large location offsets
    // (|eta| of tens to hundreds) are legitimate.
    const auto small = zero_pattern(a);
    const int zero_index = kind == SolitonKind::Type2 ? 0 : kind == SolitonKind::Type3 ? 1 : -1;
    for (int k = 0; k < 3; ++k) {
        const bool must_vanish = k == zero_index;
        if (must_vanish && !small[k])
            throw Error(ErrorCode::InvalidSpec, "constant a" + std::to_string(k + 1) + " must be zero for a "
                                                    + std::string(to_string(kind)) + " soliton");
        if (!must_vanish && !(std::abs(a[k]) > 0.0))
            throw Error(ErrorCode::InvalidSpec, "constant a" + std::to_string(k + 1) + " must be nonzero for a "
                                                    + std::string(to_string(kind)) + " soliton");
    }
}

real SolitonSpec::eta(int j, int k) const
{
    return std::log(std::abs(a[j]) / std::abs(a[k]));
}

complex SolitonSpec::phase(int j, int k) const
{
    return a[j] * std::conj(a[k]) / (std::abs(a[j]) * std::abs(a[k]));
}

std::array<complex, 3> SolitonSpec::constants() const
{
    auto out = a;
    if (kind == SolitonKind::Type2)
        out[0] = 0.0;
    else if (kind == SolitonKind::Type3)
        out[1] = 0.0;
    return out;
}

SolitonSpec SolitonSpec::type1(real tau, real eta12, real eta13)
{
    return {SolitonKind::Type1, tau, {complex(1.0), complex(std::exp(-eta12)), complex(std::exp(-eta13))}};
}

SolitonSpec SolitonSpec::type2(real tau, real eta23)
{
    return {SolitonKind::Type2, tau, {complex(0.0), complex(1.0), complex(std::exp(-eta23))}};
}

SolitonSpec SolitonSpec::type3(real tau, real eta13)
{
    return {SolitonKind::Type3, tau, {complex(1.0), complex(0.0), complex(std::exp(-eta13))}};
}

Mat3 w_matrix()
{
    return Mat3::diag(0.0, 0.0, I_unit);
}

Mat3 seed_density()
{
    return Mat3::diag(1.0, 0.0, 0.0);
}

complex rabi13(const Mat3& h)
{
    return -2.0 * h(2, 0);
}

complex rabi23(const Mat3& h)
{
    return -2.0 * h(2, 1);
}

Mat3 darboux_hamiltonian_step(complex lambda, const Mat3& m)
{
    // [M, W] with W = i|3><3| only touches the third row and column.
    const complex c = -I_unit * lambda;
    Mat3 h;
    for (int j = 0; j < 3; ++j) {
        h(j, 2) += c * I_unit * m(j, 2);
        h(2, j) -= c * I_unit * m(2, j);
    }
    return h;
}

SolutionState state_from_chain(std::span<const Mat3> chain, std::span<const complex> lambdas)
{
    // rho0 = |1><1| so rho = n n^dagger with n the first column of the accumulated product.
    Vec3 n;
    n[0] = 1.0;
    Mat3 h;
    for (std::size_t k = 0; k < chain.size(); ++k) {
        n = chain[k] * n;
        h += darboux_hamiltonian_step(lambdas[k], chain[k]);
    }
    SolutionState s;
    s.rho = Mat3::outer(n, n);
    s.h = h;
    s.omega13 = rabi13(h);
    s.omega23 = rabi23(h);
    return s;
}

Vec3 phi_vector(const SolitonSpec& spec, const SystemParams& sys, real T, real Z)
{
    const auto a = spec.constants();
    const std::array<real, 3> exponent{-spec.kappa(sys) * Z, 0.0, -T / spec.tau};

    // Work with log-magnitudes so e^{T/tau} never overflows before normalization.
    std::array<real, 3> logmag{};
    real top = -std::numeric_limits<real>::infinity();
    for (int k = 0; k < 3; ++k) {
        logmag[k] = a[k] == complex(0.0) ? -std::numeric_limits<real>::infinity()
                                         : std::log(std::abs(a[k])) + exponent[k];
        top = std::max(top, logmag[k]);
    }
    Vec3 phi;
    for (int k = 0; k < 3; ++k) {
        if (a[k] == complex(0.0))
            continue;
        phi[k] = std::polar(std::exp(logmag[k] - top), std::arg(a[k]));
    }
    return phi;
}

Mat3 involution_first(const SolitonSpec& spec, const SystemParams& sys, real T, real Z)
{
    return involution_from_vector(phi_vector(spec, sys, T, Z));
}

SolutionState state_first(const SolitonSpec& spec, const SystemParams& sys, real T, real Z)
{
    const Mat3 m = involution_first(spec, sys, T, Z);
    const complex lambda = spec.lambda();
    return state_from_chain(std::span<const Mat3>(&m, 1), std::span<const complex>(&lambda, 1));
}

Mat3 table1_asymptote(const SolitonSpec& spec, AsymptoticRegime regime, const SystemParams& sys,
                      real T, real Z)
{
    const bool type1 = spec.kind == SolitonKind::Type1;
    if (type1 == (regime == AsymptoticRegime::AllTimes))
        throw Error(ErrorCode::RegimeMismatch,
                    type1 ? "type1 has only early/late asymptotes" : "types 2 and 3 use the all-times form");

    const real kz = spec.kappa(sys) * Z;
    Mat3 m;
    auto set_pair = [&m](int r, int c, complex v) {
        m(r, c) = v;
        m(c, r) = std::conj(v);
    };

    const bool signal_form = spec.kind == SolitonKind::Type3
                             || (type1 && regime == AsymptoticRegime::EarlyTime);
    if (signal_form) {
        const real u = T / spec.tau - kz + spec.eta(0, 2);
        m(0, 0) = std::tanh(u);
        m(1, 1) = -1.0;
        m(2, 2) = -std::tanh(u);
        set_pair(0, 2, spec.phase(0, 2) * sech(u));
    } else if (type1) {
        const real u = -kz + spec.eta(0, 1);
        const real v = T / spec.tau + spec.eta(1, 2);
        m(0, 0) = std::tanh(u);
        m(1, 1) = -std::tanh(u);
        m(2, 2) = -1.0;
        set_pair(0, 1, spec.phase(0, 1) * sech(u));
        set_pair(1, 2, spec.phase(1, 2) * sech(v));
    } else {
        const real v = T / spec.tau + spec.eta(1, 2);
        m(0, 0) = -1.0;
        m(1, 1) = std::tanh(v);
        m(2, 2) = -std::tanh(v);
        set_pair(1, 2, spec.phase(1, 2) * sech(v));
    }
    return m;
}

} // namespace lambda_soliton
