#pragma once

// Regular 2-D lattice geometry, per-site field storage, exact particle
// bookkeeping, and boundary-condition descriptors shared by all solvers.

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "grw/types.hpp"

namespace grw {

// Vertex-centered regular lattice: site (i,j) sits at (x0 + i*dx, z0 + j*dz),
// i in [0,nx), j in [0,nz). Fields are stored row-major, i fastest.
struct Lattice2D {
  double x0 = 0, x1 = 1, z0 = 0, z1 = 1;
  double dx = 0.1, dz = 0.1;
  int nx = 0, nz = 0;

  // Derives nx, nz from the extents and validates the geometry invariants.
  static Lattice2D make(double x0, double x1, double z0, double z1, double dx, double dz);

  int size() const { return nx * nz; }
  int index(int i, int j) const { return j * nx + i; }
  double x(int i) const { return x0 + i * dx; }
  double z(int j) const { return z0 + j * dz; }
  bool in_domain(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < nz; }
  bool interior(int i, int j) const { return i > 0 && i < nx - 1 && j > 0 && j < nz - 1; }
  bool boundary(int i, int j) const { return in_domain(i, j) && !interior(i, j); }
  bool same_geometry(const Lattice2D& o) const;
};

// Real-valued per-site data: pressure head, water content, velocity
// components, concentrations, source terms.
struct ScalarField {
  Lattice2D lattice;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const Lattice2D& lat, double fill_value = 0.0)
      : lattice(lat), values(static_cast<size_t>(lat.size()), fill_value) {}

  double& operator()(int i, int j) { return values[lattice.index(i, j)]; }
  double operator()(int i, int j) const { return values[lattice.index(i, j)]; }
  double& at_site(int s) { return values[s]; }
  double at_site(int s) const { return values[s]; }

  void fill(double v) { std::fill(values.begin(), values.end(), v); }
  double min_value() const;
  double max_value() const;
  double mean_value() const;
  bool all_finite() const;
};

// Discrete L2 norms. The volume-weighted form sqrt(dx*dz*sum v^2) is the
// default convention for error norms; the RMS form is selectable where a
// caller needs it. Estimated convergence orders are invariant to the choice.
double l2_norm_volume(const ScalarField& f);
double l2_norm_rms(const ScalarField& f);
double l2_diff_volume(const ScalarField& a, const ScalarField& b);
double l2_diff_rms(const ScalarField& a, const ScalarField& b);

// Lattice CSV dump: header row "i,j,x,z,value", one row per site, %.12e
// formatting, LF line endings.
void write_field_csv(const ScalarField& f, const std::string& path);
ScalarField read_field_csv(const std::string& path);

enum class AllocMode { Randomized, Deterministic };

// Destination-direction categories for remainder carry. Remainders are
// carried across sites in row-major sweep order (j outer, i inner) and across
// time steps. The stay group is computed as a difference and never carries.
enum RemainderSlot {
  kRemLeft = 0,
  kRemRight,
  kRemDown,
  kRemUp,
  kRemStay,
  kRemSource,
  kRemSlotCount
};

// Splits n particles into one group per jump weight plus a final stay group.
// The returned counts sum exactly to n. Group j receives floor(n*w_j)
// particles plus one more when the remainder accumulator reaches unity
// (deterministic mode) or with probability equal to the fractional part
// (randomized mode). remainders must have one slot per weight.
std::vector<Count> allocate_split(Count n, std::span<const double> weights, AllocMode mode,
                                  Rng& rng, std::span<double> remainders);

// floor(c * mole_scale) with c interpreted through its shortest round-trip
// decimal representation, so decimal-valued concentrations map to exact
// counts on power-of-ten mole scales (c = 0.1 at 10^24 gives exactly 10^23).
Count count_from_moles(double c, Count mole_scale);
double moles_from_count(Count n, Count mole_scale);

// Exact nonnegative integer particle counts per site with remainder
// accumulators and the particles-per-mole scale.
struct OccupationField {
  Lattice2D lattice;
  std::vector<Count> counts;
  std::array<double, kRemSlotCount> remainders{};
  Count mole_scale = kMoleScale;

  OccupationField() = default;
  OccupationField(const Lattice2D& lat, Count scale)
      : lattice(lat), counts(static_cast<size_t>(lat.size()), 0), mole_scale(scale) {}

  Count& operator()(int i, int j) { return counts[lattice.index(i, j)]; }
  Count operator()(int i, int j) const { return counts[lattice.index(i, j)]; }
  Count& at_site(int s) { return counts[s]; }
  Count at_site(int s) const { return counts[s]; }

  Count total() const;
  double concentration(int i, int j) const {
    return moles_from_count(counts[lattice.index(i, j)], mole_scale);
  }
  ScalarField concentration_field() const;
};

// counts(i) = floor(conc(i) * mole_scale); negative concentrations are a
// domain error naming the offending site.
void set_from_concentration(OccupationField& field, const ScalarField& conc);

enum class BcKind { Dirichlet, ZeroGradient, Outflow, NoFlux };
enum class Edge { Left, Right, Bottom, Top };

// One boundary condition on a contiguous stretch of a domain edge. lo/hi
// bound the tangential coordinate (x on top/bottom, z on left/right),
// inclusive. Corner sites belong to the left/right edges, not top/bottom.
struct BoundaryPatch {
  Edge edge = Edge::Left;
  double lo = -1e300;
  double hi = 1e300;
  BcKind kind = BcKind::NoFlux;
  std::function<double(double x, double z, double t)> value;  // Dirichlet data
};

// Boundary description for one field: explicit patches plus a default kind
// for uncovered boundary sites. A site matched by two patches is a
// configuration error.
struct BoundaryConditions {
  std::vector<BoundaryPatch> patches;
  BcKind default_kind = BcKind::NoFlux;

  static BoundaryConditions uniform(BcKind kind);
  static BoundaryConditions dirichlet(std::function<double(double, double, double)> fn);
  BoundaryConditions& add(Edge e, BcKind kind,
                          std::function<double(double, double, double)> fn = nullptr,
                          double lo = -1e300, double hi = 1e300);
};

// Boundary conditions resolved against a lattice: per-site patch assignment
// (or default) for the boundary ring. Owns a copy of the condition set.
struct BoundaryTable {
  BoundaryConditions bc;
  Lattice2D lattice;
  std::vector<std::int16_t> patch_of_site;  // -1 interior, patches.size() = default
  std::vector<int> boundary_sites;

  BcKind kind_at_site(int s) const;
  // Dirichlet value at a boundary site; requires kind_at_site == Dirichlet.
  double dirichlet_value(int i, int j, double t) const;
  // Kind governing a wall crossing in the given row/column: the kind of the
  // boundary site the particle would pass through.
  BcKind kind_at_clamped(int i, int j) const;
};

BoundaryTable compile_boundary(const BoundaryConditions& bc, const Lattice2D& lat);

}  // namespace grw
