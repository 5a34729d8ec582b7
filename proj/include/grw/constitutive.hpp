#pragma once

// Water-content and hydraulic-conductivity closure laws for all flow regimes:
// constant (saturated), the piecewise test law used in degenerate-flow
// verification, and van Genuchten-Mualem soils.

#include <optional>

#include "grw/lattice.hpp"

namespace grw {

enum class LawKind { Constant, TestUnsaturated, VanGenuchtenMualem };

struct ConstitutiveLaw {
  LawKind kind = LawKind::Constant;

  // Constant law.
  double theta_const = 1.0;
  double k_const = 1.0;

  // Test law: theta = 1/(a - psi) for psi < 0, theta_sat_test for psi >= 0;
  // K either constant or the step form K = k_base*(1 - (theta_sat_test - theta)).
  double a_test = 3.3333;
  double theta_sat_test = 0.3;
  double k_base = 0.05;
  bool step_conductivity = true;  // false: constant K = k_base (strictly unsaturated tests)

  // van Genuchten-Mualem parameters. m is always derived as 1 - 1/n.
  double theta_res = 0.0;
  double theta_sat = 1.0;
  double alpha = 1.0;
  double n = 2.0;
  double k_sat = 1.0;
  std::optional<ScalarField> k_sat_field;  // heterogeneous saturated conductivity

  static ConstitutiveLaw constant(double theta, double k);
  static ConstitutiveLaw test_unsaturated(bool step_conductivity = true);
  static ConstitutiveLaw van_genuchten(double theta_res, double theta_sat, double alpha,
                                       double n, double k_sat);

  double m() const { return 1.0 - 1.0 / n; }
  void validate() const;
  // Largest saturated conductivity over the lattice (stability bookkeeping).
  double max_conductivity() const;
  // True where theta and K are constant in psi for psi >= 0 (the elliptic
  // degeneracy regime).
  bool degenerate_at(double psi) const { return psi >= 0.0; }
};

// theta(psi); returns the saturated value exactly for psi >= 0.
double water_content(const ConstitutiveLaw& law, double psi);

// K(theta(psi)) at a lattice site (site index only matters for heterogeneous
// k_sat fields; pass -1 for homogeneous laws).
double hydraulic_conductivity(const ConstitutiveLaw& law, double psi, int site = -1);

// d(theta)/d(psi); zero for psi >= 0.
double water_content_derivative(const ConstitutiveLaw& law, double psi);

}  // namespace grw
