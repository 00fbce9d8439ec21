#ifndef LAMBDA_SOLITON_DARBOUX_HPP
#define LAMBDA_SOLITON_DARBOUX_HPP

#include "lambda_soliton/algebra.hpp"
#include "lambda_soliton/system.hpp"

#include <array>
#include <span>
#include <string_view>

namespace lambda_soliton {

enum class SolitonKind { Type1, Type2, Type3 };

/// One Darboux step applied to the quiescent seed.
///
/// Type1 keeps all three integration constants, Type2 has a1 = 0 (a control
/// pulse decoupled from the medium) and Type3 has a2 = 0 (a self-induced
/// transparency signal pulse). Indices of eta() and phase() are 0-based, so
/// eta(0, 1) is ln|a1/a2|.
struct SolitonSpec {
    SolitonKind kind = SolitonKind::Type1;
    real tau = 1.0;
    std::array<complex, 3> a{complex(1.0), complex(1.0), complex(1.0)};

    /// Throws InvalidSpec when tau <= 0 or the zero pattern of `a` contradicts `kind`.
    void validate() const;

    /// Spectral parameter i / tau.
    complex lambda() const { return {0.0, 1.0 / tau}; }
    real kappa(const SystemParams& sys) const { return 0.5 * sys.mu * tau; }
    real eta(int j, int k) const;
    complex phase(int j, int k) const;

    /// Integration constants with entries that are zero by kind forced to exactly zero.
    std::array<complex, 3> constants() const;

    // Convenience constructors from the location parameters.
    static SolitonSpec type1(real tau, real eta12, real eta13);
    static SolitonSpec type2(real tau, real eta23);
    static SolitonSpec type3(real tau, real eta13);
};

/// Kind implied by the zero pattern of `a` (entries below tol::type_zero_constant
/// relative to the largest are zero). Throws InvalidSpec for other patterns.
SolitonKind classify_constants(const std::array<complex, 3>& a);

std::string_view to_string(SolitonKind kind);

/// i|3><3|
Mat3 w_matrix();

/// The quiescent seed |1><1|.
Mat3 seed_density();

/// Rabi frequencies from the RWA Hamiltonian: H31 = -Omega13 / 2, H32 = -Omega23 / 2.
complex rabi13(const Mat3& h);
complex rabi23(const Mat3& h);

/// Hamiltonian increment -i lambda [M, W] contributed by one Darboux step.
Mat3 darboux_hamiltonian_step(complex lambda, const Mat3& m);

/// Builds (rho, H, Omega) from the chain of involutions M1, M2, ... with their
/// spectral parameters: rho = (...M2 M1) rho0 (M1 M2 ...), H = sum of steps.
SolutionState state_from_chain(std::span<const Mat3> chain, std::span<const complex> lambdas);

/// Solution of the linear problem for |phi>, scaled so its largest component has modulus 1.
Vec3 phi_vector(const SolitonSpec& spec, const SystemParams& sys, real T, real Z);

/// M = 2P - I with P the projector on phi_vector.
Mat3 involution_first(const SolitonSpec& spec, const SystemParams& sys, real T, real Z);

SolutionState state_first(const SolitonSpec& spec, const SystemParams& sys, real T, real Z);

enum class AsymptoticRegime { EarlyTime, LateTime, AllTimes };

/// Closed-form asymptotic involution elements per soliton kind. Type1 accepts
/// EarlyTime/LateTime; Types 2 and 3 accept AllTimes only (RegimeMismatch otherwise).
Mat3 table1_asymptote(const SolitonSpec& spec, AsymptoticRegime regime, const SystemParams& sys,
                      real T, real Z);

} // namespace lambda_soliton

#endif
