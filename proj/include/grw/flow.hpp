#pragma once

// Richards-equation pressure solver via L-scheme fixed-point iteration and
// Darcy velocity reconstruction, supplying (theta, U, V) to the transport
// solvers.

#include "grw/constitutive.hpp"
#include "grw/lattice.hpp"

namespace grw {

struct FlowState {
  ScalarField psi;    // pressure head, length
  ScalarField theta;  // water content
  ScalarField U, V;   // Darcy flux components, length/time

  FlowState() = default;
  explicit FlowState(const Lattice2D& lat)
      : psi(lat), theta(lat), U(lat), V(lat) {}
};

struct LSchemeConfig {
  double L = 1.0;       // stabilization parameter
  double eps_a = 1e-6;  // absolute tolerance
  double eps_r = 1e-6;  // relative tolerance
  int max_iter = 50000;

  void validate() const;
};

struct FlowStepResult {
  int iterations = 0;
  bool converged = false;
  double residual = 0;  // ||psi^s - psi^(s-1)|| at exit
};

// Advances the pressure head one time level with the fixed-point iteration
//   L(psi^{s+1}-psi^s) + theta(psi^s) - theta(psi_{k-1})
//     - dt div(K(theta(psi^s)) grad(psi^s + z)) = dt f,
// conductivities harmonically averaged on cell faces, iterating from
// psi^1 = psi_{k-1} until ||psi^s - psi^{s-1}|| <= eps_a + eps_r ||psi^s||.
// Boundary kinds: Dirichlet (value at t_new) or NoFlux (mirror flux).
// Refuses when the explicit sweep built from the maximum site conductivity
// violates r_x + r_z <= 1. Updates state.psi and state.theta.
FlowStepResult richards_lscheme_step(FlowState& state, const ConstitutiveLaw& law, double dt,
                                     const BoundaryTable& bc, const ScalarField* source,
                                     double t_new, const LSchemeConfig& cfg);

// Largest admissible time step of the flow sweep for the given law, grid and
// stabilization parameter.
double flow_max_dt(const ConstitutiveLaw& law, const Lattice2D& lat, double L);

// q = -K(theta(psi)) grad(psi + z) with centered differences in the interior;
// boundary values copied from the first interior neighbor (default) or from
// one-sided differences.
void darcy_velocity(FlowState& state, const ConstitutiveLaw& law,
                    bool one_sided_boundary = false);

// Sets psi, theta from an initial pressure profile and zeroes the flux.
void init_flow_state(FlowState& state, const ConstitutiveLaw& law,
                     const std::function<double(double, double)>& psi0);

}  // namespace grw
