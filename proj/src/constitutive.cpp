#include "grw/constitutive.hpp"

#include <algorithm>
#include <cmath>

namespace grw {

ConstitutiveLaw ConstitutiveLaw::constant(double theta, double k) {
  ConstitutiveLaw law;
  law.kind = LawKind::Constant;
  law.theta_const = theta;
  law.k_const = k;
  law.validate();
  return law;
}

ConstitutiveLaw ConstitutiveLaw::test_unsaturated(bool step_conductivity) {
  ConstitutiveLaw law;
  law.kind = LawKind::TestUnsaturated;
  law.step_conductivity = step_conductivity;
  law.validate();
  return law;
}

ConstitutiveLaw ConstitutiveLaw::van_genuchten(double theta_res, double theta_sat, double alpha,
                                               double n, double k_sat) {
  ConstitutiveLaw law;
  law.kind = LawKind::VanGenuchtenMualem;
  law.theta_res = theta_res;
  law.theta_sat = theta_sat;
  law.alpha = alpha;
  law.n = n;
  law.k_sat = k_sat;
  law.validate();
  return law;
}

void ConstitutiveLaw::validate() const {
  switch (kind) {
    case LawKind::Constant:
      if (!(theta_const > 0) || !(k_const > 0))
        throw ConfigError("constant law: theta and K must be positive");
      break;
    case LawKind::TestUnsaturated:
      if (!(a_test > 0) || !(theta_sat_test > 0) || !(k_base > 0))
        throw ConfigError("test law: parameters must be positive");
      break;
    case LawKind::VanGenuchtenMualem:
      if (!(theta_res < theta_sat)) throw ConfigError("van Genuchten: theta_res < theta_sat required");
      if (!(alpha > 0)) throw ConfigError("van Genuchten: alpha > 0 required");
      if (!(n > 1)) throw ConfigError("van Genuchten: n > 1 required");
      if (!(k_sat > 0)) throw ConfigError("van Genuchten: K_sat > 0 required");
      if (k_sat_field) {
        for (double v : k_sat_field->values)
          if (!(v > 0)) throw ConfigError("van Genuchten: K_sat field must be positive everywhere");
      }
      break;
  }
}

double ConstitutiveLaw::max_conductivity() const {
  switch (kind) {
    case LawKind::Constant: return k_const;
    case LawKind::TestUnsaturated: return k_base;
    case LawKind::VanGenuchtenMualem:
      if (k_sat_field) return k_sat_field->max_value();
      return k_sat;
  }
  return 0;
}

double water_content(const ConstitutiveLaw& law, double psi) {
  switch (law.kind) {
    case LawKind::Constant:
      return law.theta_const;
    case LawKind::TestUnsaturated:
      if (psi >= 0) return law.theta_sat_test;
      return 1.0 / (law.a_test - psi);
    case LawKind::VanGenuchtenMualem: {
      if (psi >= 0) return law.theta_sat;
      double m = law.m();
      double s = std::pow(1.0 + std::pow(-law.alpha * psi, law.n), -m);
      return law.theta_res + (law.theta_sat - law.theta_res) * s;
    }
  }
  return 0;
}

double water_content_derivative(const ConstitutiveLaw& law, double psi) {
  switch (law.kind) {
    case LawKind::Constant:
      return 0.0;
    case LawKind::TestUnsaturated:
      if (psi >= 0) return 0.0;
      return 1.0 / ((law.a_test - psi) * (law.a_test - psi));
    case LawKind::VanGenuchtenMualem: {
      if (psi >= 0) return 0.0;
      double m = law.m();
      double ap = -law.alpha * psi;
      double apn = std::pow(ap, law.n);
      double inner = 1.0 + apn;
      // d/dpsi of (1+(-alpha psi)^n)^(-m)
      double ds = -m * std::pow(inner, -m - 1.0) * law.n * apn / psi;
      return (law.theta_sat - law.theta_res) * ds;
    }
  }
  return 0;
}

double hydraulic_conductivity(const ConstitutiveLaw& law, double psi, int site) {
  switch (law.kind) {
    case LawKind::Constant:
      return law.k_const;
    case LawKind::TestUnsaturated: {
      if (!law.step_conductivity) return law.k_base;
      if (psi >= 0) return law.k_base;
      double theta = water_content(law, psi);
      return law.k_base * (1.0 - (law.theta_sat_test - theta));
    }
    case LawKind::VanGenuchtenMualem: {
      double ks = law.k_sat;
      if (law.k_sat_field) {
        if (site < 0) throw ConfigError("hydraulic_conductivity: heterogeneous K_sat needs a site");
        ks = law.k_sat_field->values[static_cast<size_t>(site)];
      }
      if (psi >= 0) return ks;
      double m = law.m();
      double s = std::pow(1.0 + std::pow(-law.alpha * psi, law.n), -m);
      // Rounding near saturation can push s^(1/m) marginally out of [0,1].
      double sm = std::clamp(std::pow(s, 1.0 / m), 0.0, 1.0);
      double bracket = 1.0 - std::pow(1.0 - sm, m);
      return ks * std::sqrt(s) * bracket * bracket;
    }
  }
  return 0;
}

}  // namespace grw
