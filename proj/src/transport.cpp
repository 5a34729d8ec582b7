#include "grw/transport.hpp"

#include <algorithm>
#include <cmath>

namespace grw {

double bgrw_max_dt(double d1, double d2, const Lattice2D& lat, double divisor) {
  return divisor / (2.0 * (d1 / (lat.dx * lat.dx) + d2 / (lat.dz * lat.dz)));
}

double bgrw_lscheme_max_dt(double d1, double d2, const Lattice2D& lat, double L,
                           double theta_max) {
  double contraction = 1.0 - theta_max / (2.0 * L);
  if (!(contraction > 0))
    throw ConfigError("transport L-scheme: stabilization parameter too small for theta_max");
  return contraction * bgrw_max_dt(d1, d2, lat, L);
}

namespace {

std::string site_str(const Lattice2D& lat, int s) {
  return "(" + std::to_string(s % lat.nx) + "," + std::to_string(s / lat.nx) + ")";
}

void check_bgrw_restrictions(const BgrwParams& p, const Lattice2D& lat, double d1, double d2) {
  int worst = -1;
  double worst_excess = 0;
  for (int s = 0; s < lat.size(); ++s) {
    double rxs = p.rx_at(s), rzs = p.rz_at(s);
    if (rxs + rzs > 1.0 + 1e-12) {
      double dt_max = p.dt / (rxs + rzs);
      throw ContractError("BGRW restriction broken: r_x+r_z = " + std::to_string(rxs + rzs) +
                          " > 1 at site " + site_str(lat, s) + "; largest admissible dt = " +
                          std::to_string(dt_max));
    }
    double ex = std::max(std::abs(p.u.values[s]) - rxs, std::abs(p.v.values[s]) - rzs);
    if (ex > worst_excess) {
      worst_excess = ex;
      worst = s;
    }
  }
  if (!p.strict) return;
  if (worst >= 0 && worst_excess > 1e-12) {
    double pe_x = d1 > 0 ? std::abs(p.u.values[worst]) / p.rx_at(worst) * 2.0 : 0;
    double pe_z = d2 > 0 ? std::abs(p.v.values[worst]) / p.rz_at(worst) * 2.0 : 0;
    throw ContractError(
        "BGRW restriction broken: |u| <= r_x, |v| <= r_z fails at site " + site_str(lat, worst) +
        " (local Peclet " + std::to_string(std::max(pe_x, pe_z)) +
        " > 2); refine the grid or increase the dispersion coefficient");
  }
}

}  // namespace

BgrwParams bgrw_params(double d1, double d2, double dt, const Lattice2D& lat, double divisor,
                       const ScalarField& U, const ScalarField& V, bool strict) {
  if (!(d1 > 0) || !(d2 > 0)) throw ConfigError("bgrw_params: dispersion coefficients must be positive");
  if (!(dt > 0) || !(divisor > 0)) throw ConfigError("bgrw_params: dt and divisor must be positive");
  BgrwParams p;
  p.dt = dt;
  p.divisor = divisor;
  p.strict = strict;
  p.rx = 2.0 * d1 * dt / (divisor * lat.dx * lat.dx);
  p.rz = 2.0 * d2 * dt / (divisor * lat.dz * lat.dz);
  p.u = ScalarField(lat);
  p.v = ScalarField(lat);
  for (int s = 0; s < lat.size(); ++s) {
    p.u.values[s] = dt * U.values[s] / (divisor * lat.dx);
    p.v.values[s] = dt * V.values[s] / (divisor * lat.dz);
  }
  check_bgrw_restrictions(p, lat, d1, d2);
  return p;
}

BgrwParams bgrw_params_variable_theta(double d1, double d2, double dt, const Lattice2D& lat,
                                      const ScalarField& theta, const ScalarField& U,
                                      const ScalarField& V) {
  BgrwParams p;
  p.dt = dt;
  p.theta_site = &theta;
  p.rx_site = ScalarField(lat);
  p.rz_site = ScalarField(lat);
  p.u = ScalarField(lat);
  p.v = ScalarField(lat);
  for (int s = 0; s < lat.size(); ++s) {
    double th = theta.values[s];
    if (!(th > 0)) throw ConfigError("bgrw_params: water content must be positive");
    p.rx_site->values[s] = 2.0 * d1 * dt / (th * lat.dx * lat.dx);
    p.rz_site->values[s] = 2.0 * d2 * dt / (th * lat.dz * lat.dz);
    p.u.values[s] = dt * U.values[s] / (th * lat.dx);
    p.v.values[s] = dt * V.values[s] / (th * lat.dz);
  }
  check_bgrw_restrictions(p, lat, d1, d2);
  return p;
}

GrwParams grw_params(double d1, double d2, double dt, const Lattice2D& lat, double theta, int d,
                     const ScalarField& U, const ScalarField& V) {
  if (d < 1) throw ConfigError("grw_params: jump amplitude d must be >= 1");
  if (!(dt > 0) || !(theta > 0)) throw ConfigError("grw_params: dt and theta must be positive");
  GrwParams p;
  p.lattice = lat;
  p.dt = dt;
  p.d = d;
  p.rx = 2.0 * d1 * dt / (theta * d * d * lat.dx * lat.dx);
  p.rz = 2.0 * d2 * dt / (theta * d * d * lat.dz * lat.dz);
  if (p.rx + p.rz > 1.0 + 1e-12)
    throw ContractError("GRW restriction broken: r_x+r_z = " + std::to_string(p.rx + p.rz) +
                        " > 1; increase the jump amplitude d or reduce dt");
  p.u.resize(static_cast<size_t>(lat.size()));
  p.v.resize(static_cast<size_t>(lat.size()));
  for (int s = 0; s < lat.size(); ++s) {
    p.u[s] = static_cast<int>(std::floor(dt * U.values[s] / (theta * lat.dx) + 0.5));
    p.v[s] = static_cast<int>(std::floor(dt * V.values[s] / (theta * lat.dz) + 0.5));
  }
  return p;
}

namespace {

// Splits n into four jump groups plus stay. Weight order and the remainder
// slots are [left, right, down, up]; groups are capped by the remaining
// budget so the five counts always sum exactly to n.
inline void allocate4(Count n, const double w[4], AllocMode mode, Rng& rng, double* rem,
                      Count out[5]) {
  Count allocated = 0;
  for (int k = 0; k < 4; ++k) {
    long double ideal = static_cast<long double>(n) * static_cast<long double>(w[k]);
    long double fl = std::floor(ideal);
    Count g = static_cast<Count>(fl);
    double frac = static_cast<double>(ideal - fl);
    if (mode == AllocMode::Deterministic) {
      rem[k] += frac;
      if (rem[k] >= 1.0) {
        rem[k] -= 1.0;
        ++g;
      }
    } else if (frac > 0.0) {
      if (rng.uniform() < frac) ++g;
    }
    Count budget = n - allocated;
    if (g > budget) g = budget;
    out[k] = g;
    allocated += g;
  }
  out[4] = n - allocated;
}

// Signed source group: floor plus remainder carry (deterministic) or a
// Bernoulli on the fractional part (randomized). Works for negative values
// since x - floor(x) lies in [0,1).
inline SignedCount allocate_source(long double ideal, AllocMode mode, Rng& rng, double& rem) {
  long double fl = std::floor(ideal);
  SignedCount g = static_cast<SignedCount>(fl);
  double frac = static_cast<double>(ideal - fl);
  if (mode == AllocMode::Deterministic) {
    rem += frac;
    if (rem >= 1.0) {
      rem -= 1.0;
      ++g;
    }
  } else if (frac > 0.0) {
    if (rng.uniform() < frac) ++g;
  }
  return g;
}

// Adds a signed delta to a site, clamping at zero; records the applied delta
// and any unapplied deficit.
inline void apply_signed(OccupationField& f, int s, SignedCount add, SignedCount& applied,
                         SignedCount& deficit) {
  if (add >= 0) {
    f.counts[static_cast<size_t>(s)] += static_cast<Count>(add);
    applied += add;
  } else {
    Count sub = static_cast<Count>(-add);
    Count have = f.counts[static_cast<size_t>(s)];
    if (sub > have) {
      deficit += static_cast<SignedCount>(sub - have);
      sub = have;
    }
    f.counts[static_cast<size_t>(s)] -= sub;
    applied -= static_cast<SignedCount>(sub);
  }
}

// Resolves a jump target against the domain walls. NoFlux walls reflect about
// the half-cell plane beyond the last site; every other kind removes the
// crossing group. Returns false when the group leaves the domain.
inline bool resolve_target(const Lattice2D& lat, const BoundaryTable& bc, int& ti, int& tj) {
  for (int guard = 0; guard < 64; ++guard) {
    if (ti < 0) {
      if (bc.kind_at_clamped(0, tj) != BcKind::NoFlux) return false;
      ti = -1 - ti;
    } else if (ti > lat.nx - 1) {
      if (bc.kind_at_clamped(lat.nx - 1, tj) != BcKind::NoFlux) return false;
      ti = 2 * lat.nx - 1 - ti;
    } else if (tj < 0) {
      if (bc.kind_at_clamped(ti, 0) != BcKind::NoFlux) return false;
      tj = -1 - tj;
    } else if (tj > lat.nz - 1) {
      if (bc.kind_at_clamped(ti, lat.nz - 1) != BcKind::NoFlux) return false;
      tj = 2 * lat.nz - 1 - tj;
    } else {
      return true;
    }
  }
  throw ContractError("jump target does not resolve against the domain walls");
}

inline void deposit(OccupationField& out, const BoundaryTable& bc, StepLedger& led, int ti,
                    int tj, Count g) {
  if (g == 0) return;
  const Lattice2D& lat = out.lattice;
  if (!lat.in_domain(ti, tj)) {
    if (!resolve_target(lat, bc, ti, tj)) {
      led.outflow -= static_cast<SignedCount>(g);
      return;
    }
  }
  out.counts[static_cast<size_t>(lat.index(ti, tj))] += g;
}

// Value-type boundary conditions, applied after the redistribution:
// zero-gradient sites copy the first interior neighbor's count (top/bottom
// edges first so the left/right corner copies see updated values), then
// Dirichlet sites reset to floor(N * c_D).
void apply_value_bcs(OccupationField& f, const BoundaryTable& bc, double t_new,
                     StepLedger& led) {
  const Lattice2D& lat = f.lattice;
  auto copy_from = [&](int s, int si, int sj) {
    Count src = f.counts[static_cast<size_t>(lat.index(si, sj))];
    Count& dst = f.counts[static_cast<size_t>(s)];
    led.zero_gradient += static_cast<SignedCount>(src) - static_cast<SignedCount>(dst);
    dst = src;
  };
  for (int pass = 0; pass < 2; ++pass) {
    for (int s : bc.boundary_sites) {
      if (bc.kind_at_site(s) != BcKind::ZeroGradient) continue;
      int i = s % lat.nx, j = s / lat.nx;
      bool horizontal_edge = (j == 0 || j == lat.nz - 1) && i > 0 && i < lat.nx - 1;
      if (pass == 0 && horizontal_edge)
        copy_from(s, i, j == 0 ? 1 : lat.nz - 2);
      else if (pass == 1 && !horizontal_edge)
        copy_from(s, i == 0 ? 1 : lat.nx - 2, j);
    }
  }
  for (int s : bc.boundary_sites) {
    if (bc.kind_at_site(s) != BcKind::Dirichlet) continue;
    int i = s % lat.nx, j = s / lat.nx;
    double c = bc.dirichlet_value(i, j, t_new);
    if (!(c >= 0))
      throw ContractError("Dirichlet concentration negative at site " + site_str(lat, s));
    Count target = count_from_moles(c, f.mole_scale);
    Count& dst = f.counts[static_cast<size_t>(s)];
    led.dirichlet += static_cast<SignedCount>(target) - static_cast<SignedCount>(dst);
    dst = target;
  }
}

// One biased redistribution sweep with an optional per-site source given in
// particles. Shared by the non-iterative step and the L-scheme iteration.
OccupationField bgrw_redistribute(const OccupationField& n, const BgrwParams& p,
                                  const std::function<long double(int)>* source_particles,
                                  const BoundaryTable& bc, double t_new, AllocMode mode,
                                  Rng& rng, StepLedger& led) {
  const Lattice2D& lat = n.lattice;
  OccupationField out(lat, n.mole_scale);
  out.remainders = n.remainders;
  double* rem = out.remainders.data();

  for (int j = 0; j < lat.nz; ++j) {
    for (int i = 0; i < lat.nx; ++i) {
      int s = lat.index(i, j);
      Count ns = n.counts[static_cast<size_t>(s)];
      if (ns == 0) continue;
      double rxs = p.rx_at(s), rzs = p.rz_at(s);
      double us = p.u.values[static_cast<size_t>(s)], vs = p.v.values[static_cast<size_t>(s)];
      double w[4] = {0.5 * (rxs - us), 0.5 * (rxs + us), 0.5 * (rzs - vs), 0.5 * (rzs + vs)};
      for (double& wk : w) {
        if (p.strict && wk < -1e-12)
          throw ContractError("BGRW jump probability negative at site " + site_str(lat, s));
        if (wk < 0) wk = 0;
      }
      Count g[5];
      allocate4(ns, w, mode, rng, rem, g);
      deposit(out, bc, led, i - 1, j, g[0]);
      deposit(out, bc, led, i + 1, j, g[1]);
      deposit(out, bc, led, i, j - 1, g[2]);
      deposit(out, bc, led, i, j + 1, g[3]);
      out.counts[static_cast<size_t>(s)] += g[4];
    }
  }

  if (source_particles) {
    for (int s = 0; s < lat.size(); ++s) {
      long double ideal = (*source_particles)(s);
      if (ideal == 0.0L) continue;
      SignedCount add = allocate_source(ideal, mode, rng, rem[kRemSource]);
      if (add != 0) apply_signed(out, s, add, led.source, led.clamp_deficit);
    }
  }

  apply_value_bcs(out, bc, t_new, led);
  return out;
}

}  // namespace

OccupationField bgrw_step(const OccupationField& n, const BgrwParams& p,
                          const ScalarField* source, const BoundaryTable& bc, double t_new,
                          AllocMode mode, Rng& rng, StepLedger* ledger) {
  StepLedger led;
  std::function<long double(int)> src;
  if (source) {
    if (!source->all_finite()) throw ConfigError("bgrw_step: source must be finite");
    long double scale_ld = static_cast<long double>(n.mole_scale);
    src = [&, scale_ld](int s) -> long double {
      return scale_ld * static_cast<long double>(source->values[static_cast<size_t>(s)]) *
             p.dt / p.divisor_at(s);
    };
  }
  OccupationField out =
      bgrw_redistribute(n, p, source ? &src : nullptr, bc, t_new, mode, rng, led);
  if (ledger) ledger->accumulate(led);
  return out;
}

// Inflow closure for the wide-reach unbiased scheme: sites within u+d cells
// of a Dirichlet wall expect arrivals from beyond the prescribed line, so
// ghost sites carrying the wall value scatter like interior sites and their
// in-domain arrivals are injected. Without it the near-wall rows run a mass
// deficit of order r/2 per step that does not vanish under refinement.
static void grw_dirichlet_ghost_inflow(OccupationField& out, const GrwParams& p,
                                       const BoundaryTable& bc, double t_old,
                                       StepLedger& led) {
  const Lattice2D& lat = out.lattice;
  const double w[5] = {0.5 * p.rx, 0.5 * p.rx, 0.5 * p.rz, 0.5 * p.rz,
                       1.0 - p.rx - p.rz};
  auto inject = [&](int ti, int tj, Count g) {
    if (g == 0 || !lat.in_domain(ti, tj)) return;
    out.counts[static_cast<size_t>(lat.index(ti, tj))] += g;
    led.dirichlet += static_cast<SignedCount>(g);
  };
  auto scatter_ghost = [&](int wall_i, int wall_j, int gi, int gj) {
    int s = lat.index(wall_i, wall_j);
    double c = bc.dirichlet_value(wall_i, wall_j, t_old);
    if (!(c > 0)) return;
    Count ghost = count_from_moles(c, out.mole_scale);
    int ai = gi + p.u[static_cast<size_t>(s)];
    int aj = gj + p.v[static_cast<size_t>(s)];
    long double ns = static_cast<long double>(ghost);
    inject(ai - p.d, aj, static_cast<Count>(std::floor(ns * w[0])));
    inject(ai + p.d, aj, static_cast<Count>(std::floor(ns * w[1])));
    inject(ai, aj - p.d, static_cast<Count>(std::floor(ns * w[2])));
    inject(ai, aj + p.d, static_cast<Count>(std::floor(ns * w[3])));
    inject(ai, aj, static_cast<Count>(std::floor(ns * w[4])));
  };
  for (int s : bc.boundary_sites) {
    if (bc.kind_at_site(s) != BcKind::Dirichlet) continue;
    int i = s % lat.nx, j = s / lat.nx;
    int reach_x = p.d + std::abs(p.u[static_cast<size_t>(s)]);
    int reach_z = p.d + std::abs(p.v[static_cast<size_t>(s)]);
    if (i == 0)
      for (int g = 1; g <= reach_x; ++g) scatter_ghost(i, j, -g, j);
    if (i == lat.nx - 1)
      for (int g = 1; g <= reach_x; ++g) scatter_ghost(i, j, lat.nx - 1 + g, j);
    if (j == 0)
      for (int g = 1; g <= reach_z; ++g) scatter_ghost(i, j, i, -g);
    if (j == lat.nz - 1)
      for (int g = 1; g <= reach_z; ++g) scatter_ghost(i, j, i, lat.nz - 1 + g);
  }
}

OccupationField grw_step(const OccupationField& n, const GrwParams& p,
                         const ScalarField* source, const BoundaryTable& bc, double t_new,
                         AllocMode mode, Rng& rng, StepLedger* ledger) {
  const Lattice2D& lat = n.lattice;
  StepLedger led;
  OccupationField out(lat, n.mole_scale);
  out.remainders = n.remainders;
  double* rem = out.remainders.data();
  const double w[4] = {0.5 * p.rx, 0.5 * p.rx, 0.5 * p.rz, 0.5 * p.rz};

  for (int j = 0; j < lat.nz; ++j) {
    for (int i = 0; i < lat.nx; ++i) {
      int s = lat.index(i, j);
      Count ns = n.counts[static_cast<size_t>(s)];
      if (ns == 0) continue;
      int ai = i + p.u[static_cast<size_t>(s)];
      int aj = j + p.v[static_cast<size_t>(s)];
      Count g[5];
      allocate4(ns, w, mode, rng, rem, g);
      deposit(out, bc, led, ai - p.d, aj, g[0]);
      deposit(out, bc, led, ai + p.d, aj, g[1]);
      deposit(out, bc, led, ai, aj - p.d, g[2]);
      deposit(out, bc, led, ai, aj + p.d, g[3]);
      deposit(out, bc, led, ai, aj, g[4]);
    }
  }

  grw_dirichlet_ghost_inflow(out, p, bc, t_new - p.dt, led);

  if (source) {
    if (!source->all_finite()) throw ConfigError("grw_step: source must be finite");
    long double scale_ld = static_cast<long double>(n.mole_scale);
    for (int s = 0; s < lat.size(); ++s) {
      long double ideal =
          scale_ld * static_cast<long double>(source->values[static_cast<size_t>(s)]) * p.dt;
      if (ideal == 0.0L) continue;
      SignedCount add = allocate_source(ideal, mode, rng, rem[kRemSource]);
      if (add != 0) apply_signed(out, s, add, led.source, led.clamp_deficit);
    }
  }

  apply_value_bcs(out, bc, t_new, led);
  if (ledger) ledger->accumulate(led);
  return out;
}

ReactionStats reaction_step_counts(const ReactionSystem& sys, OccupationField& n1,
                                   OccupationField& n2, const ScalarField& c3_prev,
                                   const ScalarField* theta_field, double theta_const,
                                   double dt, ScalarField* mu_out, StepLedger* led1,
                                   StepLedger* led2) {
  ReactionStats stats;
  if (sys.kind == ReactionKind::None) return stats;
  const Lattice2D& lat = n1.lattice;
  const long double scale_ld = static_cast<long double>(n1.mole_scale);
  StepLedger dummy;
  StepLedger& l1 = led1 ? *led1 : dummy;
  StepLedger& l2 = led2 ? *led2 : dummy;

  // Whole-particle consumption per species: the species-2 group is an exact
  // integer multiple of the species-1 group whenever the stoichiometric ratio
  // is integral, so invariants like 2 c1 - c2 hold as integer identities.
  long double ratio = sys.kind == ReactionKind::BimolecularTest
                          ? 2.0L
                          : static_cast<long double>(sys.monod.alpha2 / sys.monod.alpha1);
  SignedCount ratio_int = static_cast<SignedCount>(ratio);
  bool integral_ratio = std::abs(static_cast<double>(ratio - ratio_int)) < 1e-12;

  long double total1 = 0, total2 = 0, clamped1 = 0, clamped2 = 0;
  for (int s = 0; s < lat.size(); ++s) {
    Count raw1 = n1.counts[static_cast<size_t>(s)];
    Count raw2 = n2.counts[static_cast<size_t>(s)];
    total1 += static_cast<long double>(raw1);
    total2 += static_cast<long double>(raw2);
    double c1 = moles_from_count(raw1, n1.mole_scale);
    double c2 = moles_from_count(raw2, n2.mole_scale);
    double theta = theta_field ? theta_field->values[static_cast<size_t>(s)] : theta_const;

    long double consume1;  // particles of species 1 consumed, >= 0
    if (sys.kind == ReactionKind::BimolecularTest) {
      consume1 = static_cast<long double>(dt / theta * (c1 * c2 * c2)) * scale_ld;
    } else {
      double mu = monod_rate(sys.monod, c1, c2, c3_prev.values[static_cast<size_t>(s)]);
      if (mu_out) mu_out->values[static_cast<size_t>(s)] = mu;
      // Eq. form: c + (dt/theta)(-theta alpha mu); theta cancels.
      consume1 = static_cast<long double>(dt * sys.monod.alpha1 * mu) * scale_ld;
    }
    if (consume1 == 0.0L) continue;
    SignedCount a = static_cast<SignedCount>(std::floor(consume1 + 0.5L));
    SignedCount b = integral_ratio
                        ? ratio_int * a
                        : static_cast<SignedCount>(std::floor(consume1 * ratio + 0.5L));
    if (a > static_cast<SignedCount>(raw1)) {
      clamped1 += static_cast<long double>(a - static_cast<SignedCount>(raw1));
      a = static_cast<SignedCount>(raw1);
      ++stats.clamp_events;
    }
    if (b > static_cast<SignedCount>(raw2)) {
      clamped2 += static_cast<long double>(b - static_cast<SignedCount>(raw2));
      b = static_cast<SignedCount>(raw2);
      ++stats.clamp_events;
    }
    apply_signed(n1, s, -a, l1.reaction, l1.clamp_deficit);
    apply_signed(n2, s, -b, l2.reaction, l2.clamp_deficit);
  }
  stats.clamped_mass_c1 = static_cast<double>(clamped1 / scale_ld);
  stats.clamped_mass_c2 = static_cast<double>(clamped2 / scale_ld);
  if (clamped1 > 0.01L * total1 || clamped2 > 0.01L * total2) stats.stability_warning = true;
  return stats;
}

LschemeTransportResult bgrw_lscheme_solve(
    std::vector<OccupationField>& mobile, const ScalarField& theta_now,
    const ScalarField& theta_prev, const std::vector<BgrwParams>& params,
    const LSchemeConfig& cfg, const ReactionSystem& reaction, const ScalarField* c3_prev,
    const std::vector<const ScalarField*>& sources,
    const std::vector<const BoundaryTable*>& bcs, double t_new, AllocMode mode, Rng& rng,
    std::vector<StepLedger>* ledgers, const std::function<void(int)>& refresh_hook) {
  cfg.validate();
  const size_t nspecies = mobile.size();
  if (params.size() != nspecies || sources.size() != nspecies || bcs.size() != nspecies)
    throw ConfigError("bgrw_lscheme_solve: per-species argument count mismatch");
  if (reaction.kind != ReactionKind::None && nspecies != 2)
    throw ConfigError("bgrw_lscheme_solve: reactions couple exactly two mobile species");
  if (reaction.kind == ReactionKind::Monod && !c3_prev)
    throw ConfigError("bgrw_lscheme_solve: Monod reactions need the immobile field");

  const Lattice2D& lat = mobile[0].lattice;
  const long double scale_ld = static_cast<long double>(mobile[0].mole_scale);
  const double dt = params[0].dt;

  std::vector<OccupationField> n_prev = mobile;  // time level k-1
  std::vector<ScalarField> c_iter(nspecies);     // concentration iterates
  for (size_t nu = 0; nu < nspecies; ++nu) c_iter[nu] = mobile[nu].concentration_field();
  const ScalarField c3_fallback = c3_prev ? ScalarField() : ScalarField(lat, 1.0);
  const ScalarField& c3_ref = c3_prev ? *c3_prev : c3_fallback;

  LschemeTransportResult res;
  res.residuals.assign(nspecies, 0.0);
  std::vector<StepLedger> led(nspecies);

  for (int it = 1; it <= cfg.max_iter; ++it) {
    if (refresh_hook) refresh_hook(it);

    // Nonreactive transport redistribution of every species with the
    // stabilized source g^s.
    for (size_t nu = 0; nu < nspecies; ++nu) {
      const ScalarField* f = sources[nu];
      const OccupationField& cur = mobile[nu];
      const OccupationField& prev = n_prev[nu];
      std::function<long double(int)> g = [&](int s) -> long double {
        long double v = 0.0L;
        if (f)
          v += scale_ld * static_cast<long double>(f->values[static_cast<size_t>(s)]) * dt /
               cfg.L;
        long double bracket =
            static_cast<long double>(theta_now.values[static_cast<size_t>(s)]) *
                static_cast<long double>(cur.counts[static_cast<size_t>(s)]) -
            static_cast<long double>(theta_prev.values[static_cast<size_t>(s)]) *
                static_cast<long double>(prev.counts[static_cast<size_t>(s)]);
        return v - bracket / cfg.L;
      };
      mobile[nu] = bgrw_redistribute(cur, params[nu], &g, *bcs[nu], t_new, mode, rng, led[nu]);
    }

    // Reaction interleave on the freshest mobile iterates with the
    // time-level-(k-1) immobile field, applied as exact count deltas.
    if (reaction.kind != ReactionKind::None) {
      reaction_step_counts(reaction, mobile[0], mobile[1], c3_ref, &theta_now, 1.0, dt,
                           nullptr, &led[0], &led[1]);
      // Prescribed boundary values stay pinned through the reaction.
      for (size_t nu = 0; nu < nspecies; ++nu)
        apply_value_bcs(mobile[nu], *bcs[nu], t_new, led[nu]);
    }

    // Stopping criterion, per species, on the concentration iterates.
    bool all_converged = true;
    for (size_t nu = 0; nu < nspecies; ++nu) {
      ScalarField c_new = mobile[nu].concentration_field();
      // Stopping criterion on mesh-independent RMS norms.
      double diff = l2_diff_rms(c_new, c_iter[nu]);
      double norm = l2_norm_rms(c_new);
      res.residuals[nu] = diff;
      if (diff > cfg.eps_a + cfg.eps_r * norm) all_converged = false;
      c_iter[nu] = std::move(c_new);
    }
    res.iterations = it;
    if (all_converged) {
      res.converged = true;
      break;
    }
  }

  if (ledgers) {
    ledgers->resize(nspecies);
    for (size_t nu = 0; nu < nspecies; ++nu) (*ledgers)[nu].accumulate(led[nu]);
  }
  return res;
}

}  // namespace grw
