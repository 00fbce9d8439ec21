#ifndef LAMBDA_SOLITON_SUPERPOSITION_HPP
#define LAMBDA_SOLITON_SUPERPOSITION_HPP

#include "lambda_soliton/darboux.hpp"

#include <vector>

namespace lambda_soliton {

/// Second-order involution from two first-order ones:
///   M^ab = (la M^a - lb M^b)(la M^a M^b - lb I)^-1
/// The result is the involution of the step with parameter lb applied on top of solution a.
/// Throws DegenerateSpectralParams when la and lb coincide (tau_a == tau_b).
Mat3 superpose_involutions(complex lambda_a, const Mat3& m_a, complex lambda_b, const Mat3& m_b);

/// Third-order involution from the two second-order involutions sharing step a:
///   M^abc = (lb M^ab - lc M^ac)(lb M^ab M^ac - lc I)^-1
Mat3 superpose_third(complex lambda_b, const Mat3& m_ab, complex lambda_c, const Mat3& m_ac);

/// How the higher-order Hamiltonian is assembled.
enum class HFormula {
    /// H accumulates -i lambda_k [M_k, W] along the Darboux chain.
    Compositional,
    /// The closed forms with the (la^2 - lb^2) prefactor, kept for comparison only.
    Printed,
};

/// The printed closed-form Hamiltonians (zero detuning, zero seed field).
Mat3 printed_hamiltonian_second(complex lambda_a, const Mat3& m_a, complex lambda_b, const Mat3& m_b);
Mat3 printed_hamiltonian_third(complex lambda_a, const Mat3& m_a, complex lambda_b, const Mat3& m_ab,
                               complex lambda_c, const Mat3& m_ac);

/// Solution built from up to 3 first-order steps on the quiescent seed (none gives the seed).
/// Link k is the involution of the linear-problem solution of step k dressed by
/// links 1..k-1; it coincides with superpose_involutions / superpose_third.
class OrderedSolution {
public:
    struct Evaluation {
        /// M^a, M^ab, M^abc (as many as the order).
        std::vector<Mat3> chain;
        SolutionState state;
    };

    /// Throws InvalidSpec for more than 3 specs, DegenerateSpectralParams
    /// (naming the pair) when two durations coincide.
    explicit OrderedSolution(std::vector<SolitonSpec> specs, SystemParams sys = {},
                             HFormula formula = HFormula::Compositional);

    std::size_t order() const { return specs_.size(); }
    const std::vector<SolitonSpec>& specs() const { return specs_; }
    const SystemParams& system() const { return sys_; }
    HFormula formula() const { return formula_; }

    Evaluation evaluate(real T, real Z) const;
    SolutionState state(real T, real Z) const { return evaluate(T, Z).state; }

    /// Largest mismatch between all Bianchi paths: compares the accumulated
    /// product N = M^{..pq} ... M^p and the first-order-in-lambda coefficient
    /// S = sum_k lambda_k M_k of the composite Darboux matrix. Zero below order 2.
    real permutability_defect(real T, real Z) const;

    /// Largest difference between the chain links and the closed-form
    /// superposition matrices built from the first-order involutions.
    real superposition_defect(real T, real Z) const;

private:
    std::vector<SolitonSpec> specs_;
    SystemParams sys_;
    HFormula formula_;
};

/// Throws DegenerateSpectralParams if |tau_a - tau_b| / max(tau_a, tau_b) is below tol::tau_degeneracy.
void check_distinct_durations(real tau_a, real tau_b);

SolutionState state_second(const SolitonSpec& spec_a, const SolitonSpec& spec_b, const SystemParams& sys,
                           real T, real Z);
SolutionState state_third(const SolitonSpec& spec_a, const SolitonSpec& spec_b, const SolitonSpec& spec_c,
                          const SystemParams& sys, real T, real Z);

} // namespace lambda_soliton

#endif
