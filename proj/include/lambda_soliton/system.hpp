#ifndef LAMBDA_SOLITON_SYSTEM_HPP
#define LAMBDA_SOLITON_SYSTEM_HPP

// Types shared by the analytic solutions and the numerical integrator.

#include "lambda_soliton/algebra.hpp"

namespace lambda_soliton {

/// Atom-field coupling (equal on both arms). hbar = 1.
struct SystemParams {
    real mu = 2.0;

    /// Throws InvalidSpec unless mu is positive and finite.
    void validate() const;
};

/// Density matrix, Hamiltonian and the two Rabi frequencies at one (T, Z).
struct SolutionState {
    Mat3 rho;
    Mat3 h;
    complex omega13;
    complex omega23;
};

} // namespace lambda_soliton

#endif
