#pragma once

// The three particle transport schemes: non-iterative biased GRW, the
// non-iterative unbiased GRW, and the iterative BGRW L-scheme. Each advances
// mobile-species occupation fields one time step (or one time level of the
// fixed-point iteration).

#include <functional>
#include <optional>

#include "grw/flow.hpp"
#include "grw/lattice.hpp"
#include "grw/reactions.hpp"

namespace grw {

enum class SolverKind { Bgrw, Grw, BgrwLscheme };

// Exact bookkeeping of one transport/reaction step. All entries are net
// particle deltas actually applied, so
//   total_after = total_before + source + outflow + dirichlet
//                 + zero_gradient + reaction
// holds as an integer identity.
struct StepLedger {
  SignedCount source = 0;
  SignedCount outflow = 0;        // <= 0, particles removed across boundaries
  SignedCount dirichlet = 0;      // net change from Dirichlet resets
  SignedCount zero_gradient = 0;  // net change from zero-gradient copies
  SignedCount reaction = 0;       // net change from reaction steps
  SignedCount clamp_deficit = 0;  // magnitude of negative-source mass not applied

  void accumulate(const StepLedger& o) {
    source += o.source;
    outflow += o.outflow;
    dirichlet += o.dirichlet;
    zero_gradient += o.zero_gradient;
    reaction += o.reaction;
    clamp_deficit += o.clamp_deficit;
  }
};

// Dimensionless parameters of the biased scheme. Jump weights at a site are
// [ (rx-u)/2 to the left, (rx+u)/2 to the right, (rz-v)/2 down, (rz+v)/2 up ]
// with the stay fraction 1-(rx+rz); u, v are the site velocities scaled by
// dt/(divisor*step). The divisor is the water content (non-iterative scheme)
// or the stabilization parameter L (L-scheme); the adapted non-iterative
// scheme for variable water content carries per-site scales instead.
struct BgrwParams {
  double rx = 0, rz = 0;
  ScalarField u, v;
  std::optional<ScalarField> rx_site, rz_site;
  double dt = 0;
  double divisor = 1;                       // scalar theta or L
  const ScalarField* theta_site = nullptr;  // per-site divisor (variable theta)
  // strict = false drops the site-wise |u| <= r_x admissibility check and
  // clamps negative upstream weights at zero (locally upwind, no longer free
  // of numerical diffusion). Needed for heterogeneous-soil runs whose startup
  // transients exceed the Peclet bound.
  bool strict = true;

  double rx_at(int s) const { return rx_site ? rx_site->values[s] : rx; }
  double rz_at(int s) const { return rz_site ? rz_site->values[s] : rz; }
  double divisor_at(int s) const { return theta_site ? theta_site->values[s] : divisor; }
};

// Parameters of the unbiased scheme: advective displacements are the
// rounded dimensionless site velocities, diffusion happens in jumps of
// constant integer amplitude d with unbiased weights rx/2, rz/2.
struct GrwParams {
  Lattice2D lattice;
  double rx = 0, rz = 0;
  int d = 1;
  std::vector<int> u, v;
  double dt = 0;
};

// Builds and validates the biased-scheme parameters with a scalar divisor
// (water content for the non-iterative scheme, L for the L-scheme). Throws
// when r_x + r_z > 1 or a site velocity exceeds its r bound, naming the worst
// site and the largest admissible dt where one exists.
BgrwParams bgrw_params(double d1, double d2, double dt, const Lattice2D& lat, double divisor,
                       const ScalarField& U, const ScalarField& V, bool strict = true);

// Variable-water-content variant of the non-iterative scheme: per-site
// divisor theta(i,j).
BgrwParams bgrw_params_variable_theta(double d1, double d2, double dt, const Lattice2D& lat,
                                      const ScalarField& theta, const ScalarField& U,
                                      const ScalarField& V);

GrwParams grw_params(double d1, double d2, double dt, const Lattice2D& lat, double theta, int d,
                     const ScalarField& U, const ScalarField& V);

// Largest dt satisfying r_x + r_z <= 1 for the biased scheme.
double bgrw_max_dt(double d1, double d2, const Lattice2D& lat, double divisor);

// Largest dt for which the transport L-scheme sweep stays a contraction:
// the iteration matrix eigenvalue 1 - 2(r_x+r_z) - theta/L must not leave
// (-1, 1], giving r_x + r_z <= 1 - theta_max/(2 L).
double bgrw_lscheme_max_dt(double d1, double d2, const Lattice2D& lat, double L,
                           double theta_max);

// One step of the biased scheme: every site's particles split into
// stay/left/right/down/up groups, allocated with floor-plus-remainder carry
// (deterministic) or one Bernoulli per fractional part (randomized), swept in
// row-major order. The source adds floor(N*f*dt/theta) particles with
// remainder carry. Value-type boundary conditions are applied after the
// redistribution; source may be null.
OccupationField bgrw_step(const OccupationField& n, const BgrwParams& p,
                          const ScalarField* source, const BoundaryTable& bc, double t_new,
                          AllocMode mode, Rng& rng, StepLedger* ledger = nullptr);

// One step of the unbiased scheme: particles advect by (u,v) lattice cells,
// then split stay/+-d per axis. Particles landing outside the domain are
// removed (Outflow, ZeroGradient, Dirichlet walls) or reflected (NoFlux).
OccupationField grw_step(const OccupationField& n, const GrwParams& p,
                         const ScalarField* source, const BoundaryTable& bc, double t_new,
                         AllocMode mode, Rng& rng, StepLedger* ledger = nullptr);

// Deterministic reaction step applied to the particle-backed species as exact
// count deltas: rates are evaluated on the post-transport concentrations, the
// per-site change is rounded to whole particles, and untouched sites stay
// bit-identical. mu_out receives the Monod rate field when requested.
ReactionStats reaction_step_counts(const ReactionSystem& sys, OccupationField& n1,
                                   OccupationField& n2, const ScalarField& c3_prev,
                                   const ScalarField* theta_field, double theta_const,
                                   double dt, ScalarField* mu_out = nullptr,
                                   StepLedger* led1 = nullptr, StepLedger* led2 = nullptr);

struct LschemeTransportResult {
  int iterations = 0;
  bool converged = false;
  std::vector<double> residuals;  // per species at exit
};

// One time level of the iterative BGRW L-scheme for all mobile species,
// starting from c^1 = c_{k-1} and iterating the redistribution with the
// per-iteration source
//   g^s = N f dt/L - [theta(psi_k) n^s - theta(psi_{k-1}) n_{k-1}]/L,
// the deterministic reaction step interleaved after the transport
// redistribution of all species within each iteration, until
// ||c^s - c^{s-1}|| <= eps_a + eps_r ||c^s|| holds for every species.
// The immobile field is advanced by the caller once per time level.
// refresh_hook, when set, runs at the start of every iteration (velocity
// refresh for tighter flow coupling).
LschemeTransportResult bgrw_lscheme_solve(
    std::vector<OccupationField>& mobile, const ScalarField& theta_now,
    const ScalarField& theta_prev, const std::vector<BgrwParams>& params,
    const LSchemeConfig& cfg, const ReactionSystem& reaction, const ScalarField* c3_prev,
    const std::vector<const ScalarField*>& sources,
    const std::vector<const BoundaryTable*>& bcs, double t_new, AllocMode mode, Rng& rng,
    std::vector<StepLedger>* ledgers = nullptr,
    const std::function<void(int)>& refresh_hook = nullptr);

}  // namespace grw
