#pragma once

// Manufactured analytical solutions, closed-form source terms, discrete error
// norms and convergence-order estimation.

#include <map>
#include <string>
#include <vector>

#include "grw/constitutive.hpp"
#include "grw/lattice.hpp"
#include "grw/reactions.hpp"
#include "grw/transport.hpp"

namespace grw {

enum class CaseName {
  ConstVelBimolecular,        // constant velocity, bimolecular kinetics, D = 0.1
  ConstVelBimolecularAdvDom,  // same solutions, D = 1e-4 (unbiased-GRW regime)
  SatFlowMonod,               // unsteady saturated flow + Monod kinetics
  UnsatFlowMonod,             // strictly unsaturated flow + Monod kinetics
  DegenerateMonod             // saturated/unsaturated transition + Monod kinetics
};

CaseName case_from_string(const std::string& name);
std::string case_to_string(CaseName c);

enum class AnalyticField { C1, C2, Psi, U, V, Theta, SourceC1, SourceC2, SourcePsi };

// Everything a solver run needs to reproduce one verification problem.
struct ManufacturedCase {
  CaseName name;
  Lattice2D domain_template;  // extents only; dx/dz set per refinement level
  double final_time = 1.0;
  double d1 = 0.1, d2 = 0.1;
  bool has_flow = false;         // pressure equation part of the problem
  bool variable_theta = false;   // theta depends on psi
  double theta_const = 1.0;
  ConstitutiveLaw law;
  ReactionSystem reaction;
  double flow_L = 1.0;           // stabilization parameter of the flow solver
  double transport_L = 1.0;
  // Stopping tolerances and the time-step safety factor of the refinement
  // runs. The degenerate case needs a much deeper flow solve (its elliptic
  // zones relax at a rate proportional to dt, so an increment-based stop at
  // 1e-6 leaves an error floor masking the discretization order), a tighter
  // transport stop, and a smaller step so the backward-Euler component does
  // not dominate the coarse levels.
  double flow_eps = 1e-6;
  double transport_eps = 1e-6;
  double dt_safety = 0.95;
};

ManufacturedCase manufactured_case(CaseName name);

// Closed-form value of an analytic field at (x,z,t). Source terms are the
// governing operator applied to the analytic solution minus the reaction
// term, hand-derived per case.
double analytic_eval(const ManufacturedCase& c, AnalyticField f, double x, double z, double t);

// Samples an analytic field on a lattice.
ScalarField analytic_field(const ManufacturedCase& c, AnalyticField f, const Lattice2D& lat,
                           double t);

// Discrete L2 error against the analytic field at time t; volume-weighted by
// default, RMS selectable.
double l2_error(const ScalarField& numeric, const ManufacturedCase& c, AnalyticField f,
                double t, bool volume_weighted = true);

// log2 ratios of successive error norms under mesh halving.
std::vector<double> eoc_from_errors(const std::vector<double>& errors);

struct RefinementStudy {
  CaseName case_name;
  SolverKind solver;
  std::vector<double> dxs;
  // per field: error at every level, and the level-pair EOC values
  std::map<std::string, std::vector<double>> errors;
  std::map<std::string, std::vector<double>> eocs;
  // per level: worst-case solver iteration counts
  std::vector<int> flow_iter_max;
  std::vector<int> transport_iter_max;

  void write_csv(const std::string& path) const;
};

// Runs the case on `levels` grids starting from base_dx, halving each time,
// and assembles error norms and convergence orders. deterministic switches
// the particle allocation mode (default randomized, as in production runs).
RefinementStudy run_refinement_study(CaseName name, SolverKind solver, int levels,
                                     double base_dx = 0.2, std::uint64_t seed = 1234,
                                     bool deterministic = false);

}  // namespace grw
