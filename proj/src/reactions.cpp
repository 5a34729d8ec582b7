#include "grw/reactions.hpp"

#include <cmath>

namespace grw {

void MonodParams::validate() const {
  if (!(mu_max >= 0)) throw ConfigError("Monod: mu_max must be nonnegative");
  if (!(m1 > 0) || !(m2 > 0)) throw ConfigError("Monod: M1, M2 must be positive");
  if (!(yield >= 0) || !(kd >= 0)) throw ConfigError("Monod: Y, kd must be nonnegative");
  if (gamma != 0 && gamma != 1) throw ConfigError("Monod: gamma must be 0 or 1");
  if (gamma == 1 && !(c3_max > 0)) throw ConfigError("Monod: c3_max must be positive when gamma=1");
}

ReactionSystem ReactionSystem::none() { return ReactionSystem{}; }

ReactionSystem ReactionSystem::bimolecular_test() {
  ReactionSystem s;
  s.kind = ReactionKind::BimolecularTest;
  return s;
}

ReactionSystem ReactionSystem::monod_system(const MonodParams& p, bool constant_biomass) {
  p.validate();
  ReactionSystem s;
  s.kind = ReactionKind::Monod;
  s.monod = p;
  s.constant_biomass = constant_biomass;
  return s;
}

double monod_rate(const MonodParams& p, double c1, double c2, double c3) {
  if (!(c1 >= 0) || !(c2 >= 0) || !(c3 >= 0))
    throw ContractError("monod_rate: concentrations must be nonnegative");
  return p.mu_max * (c1 / (p.m1 + c1)) * (c2 / (p.m2 + c2)) * c3;
}

ReactionStats reaction_step(const ReactionSystem& sys, ScalarField& c1, ScalarField& c2,
                            const ScalarField& c3_prev, const ScalarField* theta_field,
                            double theta_const, double dt, ScalarField* mu_out) {
  ReactionStats stats;
  if (sys.kind == ReactionKind::None) return stats;
  if (!(dt > 0)) throw ConfigError("reaction_step: dt must be positive");

  const size_t nsite = c1.values.size();
  double total_before_c1 = 0, total_before_c2 = 0;
  for (size_t s = 0; s < nsite; ++s) {
    total_before_c1 += c1.values[s];
    total_before_c2 += c2.values[s];
  }

  for (size_t s = 0; s < nsite; ++s) {
    double a = c1.values[s];
    double b = c2.values[s];
    double theta = theta_field ? theta_field->values[s] : theta_const;
    double r1, r2;
    if (sys.kind == ReactionKind::BimolecularTest) {
      r1 = -a * b * b;
      r2 = -2.0 * a * b * b;
    } else {
      double c3 = c3_prev.values[s];
      double mu = monod_rate(sys.monod, a, b, c3);
      if (mu_out) mu_out->values[s] = mu;
      // Consumption semantics: R_nu = -theta*alpha_nu*mu.
      r1 = -theta * sys.monod.alpha1 * mu;
      r2 = -theta * sys.monod.alpha2 * mu;
    }
    double a_new = a + dt / theta * r1;
    double b_new = b + dt / theta * r2;
    if (a_new < 0) {
      stats.clamped_mass_c1 += -a_new;
      ++stats.clamp_events;
      a_new = 0;
    }
    if (b_new < 0) {
      stats.clamped_mass_c2 += -b_new;
      ++stats.clamp_events;
      b_new = 0;
    }
    c1.values[s] = a_new;
    c2.values[s] = b_new;
  }

  // A clamp volume above 1% of a species' lattice total in one step signals
  // an overlarge dt.
  if (stats.clamped_mass_c1 > 0.01 * total_before_c1 ||
      stats.clamped_mass_c2 > 0.01 * total_before_c2)
    stats.stability_warning = true;
  return stats;
}

long immobile_step(const MonodParams& p, ScalarField& c3, const ScalarField& mu, double dt) {
  if (!(dt > 0)) throw ConfigError("immobile_step: dt must be positive");
  long clamps = 0;
  for (size_t s = 0; s < c3.values.size(); ++s) {
    double c = c3.values[s];
    double growth = p.yield * mu.values[s];
    if (p.gamma == 1) growth *= (1.0 - c / p.c3_max);
    double c_new = c + dt * (growth - p.kd * c);
    if (c_new < 0) {
      c_new = 0;
      ++clamps;
    }
    c3.values[s] = c_new;
  }
  return clamps;
}

}  // namespace grw
