#ifndef LAMBDA_SOLITON_TOLERANCES_HPP
#define LAMBDA_SOLITON_TOLERANCES_HPP

// Every numerical threshold used by the library lives here.

namespace lambda_soliton::tol {

// algebra
inline constexpr double zero_vector_norm2 = 1e-300;
inline constexpr double projector = 1e-10;
inline constexpr double inverse_condition_cap = 1e12;

// darboux
inline constexpr double type_zero_constant = 1e-12;

// superposition
inline constexpr double tau_degeneracy = 1e-9;

// observables
inline constexpr double area_tail_fraction = 1e-8;
inline constexpr double imprint_threshold = 0.5;
inline constexpr int min_peak_separation_cells = 3;
inline constexpr double late_time_margin = 40.0; // in units of the longest tau

// mbsolver
inline constexpr double trace_drift = 1e-6;
inline constexpr double cfl_field_change = 0.1;

// structural checks on analytic solutions
inline constexpr double structural = 1e-10;

} // namespace lambda_soliton::tol

#endif
