#pragma once

// Reaction-rate evaluation (double Monod and the polynomial test kinetics)
// and the deterministic operator-splitting reaction step for mobile and
// immobile species.

#include "grw/lattice.hpp"

namespace grw {

struct MonodParams {
  double mu_max = 0;   // maximum growth rate, 1/time
  double m1 = 1;       // half-saturation constant of the electron donor, moles
  double m2 = 1;       // half-saturation constant of the electron acceptor, moles
  double alpha1 = 1;   // donor stoichiometric constant
  double alpha2 = 1;   // acceptor stoichiometric constant
  double yield = 0;    // microbial yield per unit donor consumed
  double kd = 0;       // biomass decay rate, 1/time
  int gamma = 0;       // 1: logistic growth limitation, 0: none
  double c3_max = 1;   // maximum immobile concentration (gamma = 1)

  void validate() const;
};

enum class ReactionKind { None, BimolecularTest, Monod };

struct ReactionSystem {
  ReactionKind kind = ReactionKind::None;
  MonodParams monod;
  bool constant_biomass = false;  // freeze c3 (benchmarks with fixed biomass)

  static ReactionSystem none();
  static ReactionSystem bimolecular_test();
  static ReactionSystem monod_system(const MonodParams& p, bool constant_biomass);
};

// mu = mu_max * c1/(M1+c1) * c2/(M2+c2) * c3. Negative inputs are a domain
// error; the result is bounded by mu_max*c3.
double monod_rate(const MonodParams& p, double c1, double c2, double c3);

// Per-site clamp bookkeeping of one reaction pass.
struct ReactionStats {
  long clamp_events = 0;
  double clamped_mass_c1 = 0;  // moles removed by clamping, per species
  double clamped_mass_c2 = 0;
  bool stability_warning = false;
};

// One explicit Euler reaction step on post-transport mobile concentrations:
// c_nu <- c_nu + (dt/theta)*R_nu(c1, c2, c3_prev), clamped at zero. theta may
// be a field (variably saturated) or constant. mu_out, when given, receives
// the Monod rate used at every site so the immobile update sees the same
// linearization.
ReactionStats reaction_step(const ReactionSystem& sys, ScalarField& c1, ScalarField& c2,
                            const ScalarField& c3_prev, const ScalarField* theta_field,
                            double theta_const, double dt, ScalarField* mu_out = nullptr);

// Explicit Euler update of the immobile species:
// c3 <- c3 + dt*[Y*mu*(1 - gamma*c3/c3_max) - kd*c3], clamped at zero.
long immobile_step(const MonodParams& p, ScalarField& c3, const ScalarField& mu, double dt);

}  // namespace grw
