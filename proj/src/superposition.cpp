#include "lambda_soliton/superposition.hpp"

#include "lambda_soliton/error.hpp"
#include "lambda_soliton/tolerances.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

namespace lambda_soliton {

namespace {

void check_distinct_lambdas(complex la, complex lb)
{
    const real scale = std::max(std::abs(la), std::abs(lb));
    if (!(std::abs(la - lb) >= tol::tau_degeneracy * scale))
        throw Error(ErrorCode::DegenerateSpectralParams, "spectral parameters coincide (equal durations)");
}

Mat3 superpose(complex la, const Mat3& ma, complex lb, const Mat3& mb)
{
    check_distinct_lambdas(la, lb);
    const Mat3 numerator = ma * la - mb * lb;
    const Mat3 denominator = ma * mb * la - Mat3::identity() * lb;
    return numerator * inverse3(denominator);
}

struct PathResult {
    std::vector<Mat3> links; // M^p, M^pq, M^pqr
    Mat3 product;            // links applied in order to the seed side
    Mat3 linear;             // sum of lambda_k M_k
};

// Each new step uses the linear-problem solution dressed by the links already
// applied: v = (l - l_k M_k) ... (l - l_1 M_1) phi. Equal to the superposition
// formula, but the projector keeps M^2 = I at round-off level even when two
// durations are close, where the matrix inverse loses digits.
PathResult bianchi_path(std::span<const Vec3> phis, std::span<const complex> lambdas,
                        std::span<const std::size_t> perm)
{
    PathResult out;
    out.product = Mat3::identity();
    out.links.reserve(perm.size());
    std::array<complex, 3> used{};
    for (const std::size_t k : perm) {
        Vec3 v = phis[k];
        for (std::size_t i = 0; i < out.links.size(); ++i)
            v = (Mat3::identity() * lambdas[k] - out.links[i] * used[i]) * v;
        const real scale = v.max_abs();
        if (!(scale > 0.0))
            throw Error(ErrorCode::ZeroVector, "dressed linear-problem solution vanished");
        for (auto& c : v.c)
            c /= scale;
        const Mat3 m = involution_from_vector(v);
        out.links.push_back(m);
        used[out.links.size() - 1] = lambdas[k];
        out.product = m * out.product;
        out.linear += m * lambdas[k];
    }
    return out;
}

} // namespace

void check_distinct_durations(real tau_a, real tau_b)
{
    if (!(std::abs(tau_a - tau_b) >= tol::tau_degeneracy * std::max(tau_a, tau_b)))
        throw Error(ErrorCode::DegenerateSpectralParams, "soliton durations coincide");
}

Mat3 superpose_involutions(complex lambda_a, const Mat3& m_a, complex lambda_b, const Mat3& m_b)
{
    return superpose(lambda_a, m_a, lambda_b, m_b);
}

Mat3 superpose_third(complex lambda_b, const Mat3& m_ab, complex lambda_c, const Mat3& m_ac)
{
    return superpose(lambda_b, m_ab, lambda_c, m_ac);
}

Mat3 printed_hamiltonian_second(complex lambda_a, const Mat3& m_a, complex lambda_b, const Mat3& m_b)
{
    const complex prefactor = -I_unit * (lambda_a * lambda_a - lambda_b * lambda_b);
    return commutator(m_a * lambda_a - m_b * lambda_b, w_matrix()) * prefactor;
}

Mat3 printed_hamiltonian_third(complex lambda_a, const Mat3& m_a, complex lambda_b, const Mat3& m_ab,
                               complex lambda_c, const Mat3& m_ac)
{
    const complex prefactor = -I_unit * (lambda_b * lambda_b - lambda_c * lambda_c);
    return darboux_hamiltonian_step(lambda_a, m_a)
           + commutator(m_ab * lambda_b - m_ac * lambda_c, w_matrix()) * prefactor;
}

OrderedSolution::OrderedSolution(std::vector<SolitonSpec> specs, SystemParams sys, HFormula formula)
    : specs_(std::move(specs)), sys_(sys), formula_(formula)
{
    if (specs_.size() > 3)
        throw Error(ErrorCode::InvalidSpec, "at most 3 solitons are supported");
    sys_.validate();
    for (const auto& s : specs_)
        s.validate();
    for (std::size_t i = 0; i < specs_.size(); ++i)
        for (std::size_t j = i + 1; j < specs_.size(); ++j) {
            try {
                check_distinct_durations(specs_[i].tau, specs_[j].tau);
            } catch (const Error&) {
                throw Error(ErrorCode::DegenerateSpectralParams,
                            "solitons " + std::to_string(i) + " and " + std::to_string(j)
                                + " have equal durations");
            }
        }
}

OrderedSolution::Evaluation OrderedSolution::evaluate(real T, real Z) const
{
    const std::size_t n = order();
    std::array<Vec3, 3> phi_store;
    std::array<complex, 3> lambda_store;
    for (std::size_t k = 0; k < n; ++k) {
        phi_store[k] = phi_vector(specs_[k], sys_, T, Z);
        lambda_store[k] = specs_[k].lambda();
    }
    const std::span<const Vec3> phis(phi_store.data(), n);
    const std::span<const complex> lambdas(lambda_store.data(), n);
    static constexpr std::array<std::size_t, 3> identity_order{0, 1, 2};

    Evaluation ev;
    ev.chain = bianchi_path(phis, lambdas, std::span(identity_order).first(n)).links;
    // Each link of the chain uses the spectral parameter of the step it adds.
    ev.state = state_from_chain(ev.chain, lambdas);
    if (formula_ == HFormula::Printed && order() >= 2) {
        const Mat3& m_a = ev.chain[0];
        const Mat3 m_b = involution_first(specs_[1], sys_, T, Z);
        if (order() == 2) {
            ev.state.h = printed_hamiltonian_second(lambdas[0], m_a, lambdas[1], m_b);
        } else {
            const Mat3 m_ac = bianchi_path(phis, lambdas, std::array<std::size_t, 2>{0, 2}).links[1];
            ev.state.h = printed_hamiltonian_third(lambdas[0], m_a, lambdas[1], ev.chain[1], lambdas[2], m_ac);
        }
        ev.state.omega13 = rabi13(ev.state.h);
        ev.state.omega23 = rabi23(ev.state.h);
    }
    return ev;
}

real OrderedSolution::permutability_defect(real T, real Z) const
{
    if (order() <= 1)
        return 0.0;
    std::vector<Vec3> phis;
    std::vector<complex> lambdas;
    phis.reserve(order());
    lambdas.reserve(order());
    for (const auto& s : specs_) {
        phis.push_back(phi_vector(s, sys_, T, Z));
        lambdas.push_back(s.lambda());
    }
    std::vector<std::size_t> perm(order());
    std::iota(perm.begin(), perm.end(), 0);
    const PathResult reference = bianchi_path(phis, lambdas, perm);
    // S carries a factor 1/tau; compare in units of the spectral scale.
    const real scale = std::abs(lambdas[0]);
    real worst = 0.0;
    while (std::next_permutation(perm.begin(), perm.end())) {
        const PathResult other = bianchi_path(phis, lambdas, perm);
        worst = std::max(worst, (other.product - reference.product).max_abs());
        worst = std::max(worst, (other.linear - reference.linear).max_abs() / scale);
    }
    return worst;
}

real OrderedSolution::superposition_defect(real T, real Z) const
{
    if (order() <= 1)
        return 0.0;
    const Evaluation ev = evaluate(T, Z);
    std::vector<Mat3> first;
    std::vector<complex> lambdas;
    for (const auto& s : specs_) {
        first.push_back(involution_first(s, sys_, T, Z));
        lambdas.push_back(s.lambda());
    }
    const Mat3 m_ab = superpose_involutions(lambdas[0], first[0], lambdas[1], first[1]);
    real worst = (m_ab - ev.chain[1]).max_abs();
    if (order() == 3) {
        const Mat3 m_ac = superpose_involutions(lambdas[0], first[0], lambdas[2], first[2]);
        worst = std::max(worst, (superpose_third(lambdas[1], m_ab, lambdas[2], m_ac) - ev.chain[2]).max_abs());
    }
    return worst;
}

SolutionState state_second(const SolitonSpec& spec_a, const SolitonSpec& spec_b, const SystemParams& sys,
                           real T, real Z)
{
    return OrderedSolution({spec_a, spec_b}, sys).state(T, Z);
}

SolutionState state_third(const SolitonSpec& spec_a, const SolitonSpec& spec_b, const SolitonSpec& spec_c,
                          const SystemParams& sys, real T, real Z)
{
    return OrderedSolution({spec_a, spec_b, spec_c}, sys).state(T, Z);
}

} // namespace lambda_soliton
