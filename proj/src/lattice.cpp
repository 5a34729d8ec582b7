#include "grw/lattice.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace grw {

std::string count_to_string(Count n) {
  if (n == 0) return "0";
  std::string s;
  while (n > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(n % 10)));
    n /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

std::string count_to_string(SignedCount n) {
  if (n < 0) return "-" + count_to_string(static_cast<Count>(-n));
  return count_to_string(static_cast<Count>(n));
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log1p(-u1));
  double a = 6.283185307179586476925286766559 * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

Lattice2D Lattice2D::make(double x0, double x1, double z0, double z1, double dx, double dz) {
  if (!(dx > 0) || !(dz > 0)) throw ConfigError("lattice: dx and dz must be positive");
  if (!(x1 > x0) || !(z1 > z0)) throw ConfigError("lattice: empty domain");
  Lattice2D lat;
  lat.x0 = x0;
  lat.x1 = x1;
  lat.z0 = z0;
  lat.z1 = z1;
  lat.dx = dx;
  lat.dz = dz;
  lat.nx = static_cast<int>(std::lround((x1 - x0) / dx)) + 1;
  lat.nz = static_cast<int>(std::lround((z1 - z0) / dz)) + 1;
  if (lat.nx < 3 || lat.nz < 3)
    throw ConfigError("lattice: need at least 3 sites per axis for centered stencils");
  if (std::abs((lat.nx - 1) * dx - (x1 - x0)) > 1e-9 * std::abs(x1 - x0) ||
      std::abs((lat.nz - 1) * dz - (z1 - z0)) > 1e-9 * std::abs(z1 - z0))
    throw ConfigError("lattice: steps do not divide the domain extents");
  return lat;
}

bool Lattice2D::same_geometry(const Lattice2D& o) const {
  return nx == o.nx && nz == o.nz && x0 == o.x0 && z0 == o.z0 && dx == o.dx && dz == o.dz;
}

double ScalarField::min_value() const {
  return *std::min_element(values.begin(), values.end());
}

double ScalarField::max_value() const {
  return *std::max_element(values.begin(), values.end());
}

double ScalarField::mean_value() const {
  double s = 0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

bool ScalarField::all_finite() const {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

double l2_norm_volume(const ScalarField& f) {
  double s = 0;
  for (double v : f.values) s += v * v;
  return std::sqrt(f.lattice.dx * f.lattice.dz * s);
}

double l2_norm_rms(const ScalarField& f) {
  double s = 0;
  for (double v : f.values) s += v * v;
  return std::sqrt(s / static_cast<double>(f.values.size()));
}

static double diff_sumsq(const ScalarField& a, const ScalarField& b) {
  if (!a.lattice.same_geometry(b.lattice))
    throw ConfigError("l2 difference: lattice mismatch");
  double s = 0;
  for (size_t k = 0; k < a.values.size(); ++k) {
    double d = a.values[k] - b.values[k];
    s += d * d;
  }
  return s;
}

double l2_diff_volume(const ScalarField& a, const ScalarField& b) {
  return std::sqrt(a.lattice.dx * a.lattice.dz * diff_sumsq(a, b));
}

double l2_diff_rms(const ScalarField& a, const ScalarField& b) {
  return std::sqrt(diff_sumsq(a, b) / static_cast<double>(a.values.size()));
}

void write_field_csv(const ScalarField& f, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw ConfigError("cannot open for writing: " + path);
  std::fputs("i,j,x,z,value\n", fp);
  for (int j = 0; j < f.lattice.nz; ++j)
    for (int i = 0; i < f.lattice.nx; ++i)
      std::fprintf(fp, "%d,%d,%.12e,%.12e,%.12e\n", i, j, f.lattice.x(i), f.lattice.z(j), f(i, j));
  std::fclose(fp);
}

ScalarField read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open for reading: " + path);
  std::string line;
  std::getline(in, line);  // header
  struct Row {
    int i, j;
    double x, z, v;
  };
  std::vector<Row> rows;
  int max_i = 0, max_j = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Row r;
    if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf,%lf", &r.i, &r.j, &r.x, &r.z, &r.v) != 5)
      throw ConfigError("malformed field CSV row in " + path);
    max_i = std::max(max_i, r.i);
    max_j = std::max(max_j, r.j);
    rows.push_back(r);
  }
  if (rows.size() < 9) throw ConfigError("field CSV too small: " + path);
  // Reconstruct the lattice from the site coordinates.
  double dx = 0, dz = 0, x0 = 0, z0 = 0;
  for (const Row& r : rows) {
    if (r.i == 0 && r.j == 0) {
      x0 = r.x;
      z0 = r.z;
    }
    if (r.i == 1 && r.j == 0) dx = r.x;
    if (r.i == 0 && r.j == 1) dz = r.z;
  }
  Lattice2D lat = Lattice2D::make(x0, x0 + (dx - x0) * max_i, z0, z0 + (dz - z0) * max_j,
                                  dx - x0, dz - z0);
  ScalarField f(lat);
  for (const Row& r : rows) f(r.i, r.j) = r.v;
  return f;
}

// --- particle allocation -----------------------------------------------

std::vector<Count> allocate_split(Count n, std::span<const double> weights, AllocMode mode,
                                  Rng& rng, std::span<double> remainders) {
  if (remainders.size() < weights.size())
    throw ConfigError("allocate_split: one remainder slot per weight required");
  double wsum = 0;
  for (double w : weights) {
    if (!(w >= 0.0) || w > 1.0 + 1e-12)
      throw ContractError("allocate_split: weight outside [0,1]");
    wsum += w;
  }
  if (wsum > 1.0 + 1e-12)
    throw ContractError("allocate_split: jump probabilities sum to " + std::to_string(wsum) +
                        " > 1; stability restriction broken");

  std::vector<Count> out(weights.size() + 1, 0);
  Count allocated = 0;
  for (size_t k = 0; k < weights.size(); ++k) {
    long double ideal = static_cast<long double>(n) * static_cast<long double>(weights[k]);
    long double fl = std::floor(ideal);
    Count g = static_cast<Count>(fl);
    double frac = static_cast<double>(ideal - fl);
    if (mode == AllocMode::Deterministic) {
      remainders[k] += frac;
      if (remainders[k] >= 1.0) {
        remainders[k] -= 1.0;
        ++g;
      }
    } else {
      if (rng.uniform() < frac) ++g;
    }
    // Never allocate beyond the remaining budget; conservation is exact.
    Count budget = n - allocated;
    if (g > budget) g = budget;
    out[k] = g;
    allocated += g;
  }
  out[weights.size()] = n - allocated;  // stay group
  return out;
}

// --- decimal-faithful mole <-> count conversion -------------------------

namespace {

// Returns k if scale == 10^k, else -1.
int pow10_exponent(Count scale) {
  Count p = 1;
  for (int k = 0; k <= 38; ++k) {
    if (p == scale) return k;
    if (p > Count(-1) / 10) break;
    p *= 10;
  }
  return -1;
}

Count checked_mul10(Count v) {
  if (v > Count(-1) / 10) throw ContractError("count conversion overflows 128-bit range");
  return v * 10;
}

}  // namespace

Count count_from_moles(double c, Count mole_scale) {
  if (!(c >= 0.0) || !std::isfinite(c))
    throw ContractError("count_from_moles: concentration must be finite and nonnegative");
  if (mole_scale < 1) throw ConfigError("count_from_moles: mole scale must be >= 1");
  if (c == 0.0) return 0;

  int p = pow10_exponent(mole_scale);
  if (p < 0) {
    // Non-decimal scale: plain extended-precision floor.
    long double v = static_cast<long double>(c) * static_cast<long double>(mole_scale);
    return static_cast<Count>(std::floor(v));
  }

  // Shortest round-trip decimal of c, scaled by 10^p in exact integer
  // arithmetic. Decimal inputs land on exact counts.
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), c);
  *res.ptr = '\0';

  Count digits = 0;
  int frac_digits = 0;
  int exp10 = 0;
  bool seen_dot = false;
  const char* s = buf;
  for (; *s; ++s) {
    if (*s == '.') {
      seen_dot = true;
    } else if (*s == 'e' || *s == 'E') {
      exp10 = std::atoi(s + 1);
      break;
    } else {
      digits = checked_mul10(digits) + static_cast<Count>(*s - '0');
      if (seen_dot) ++frac_digits;
    }
  }
  int shift = exp10 - frac_digits + p;
  Count v = digits;
  if (shift >= 0) {
    for (int k = 0; k < shift; ++k) v = checked_mul10(v);
  } else {
    for (int k = 0; k < -shift && v > 0; ++k) v /= 10;  // sub-particle residue discarded
  }
  return v;
}

double moles_from_count(Count n, Count mole_scale) {
  return static_cast<double>(static_cast<long double>(n) / static_cast<long double>(mole_scale));
}

Count OccupationField::total() const {
  Count t = 0;
  for (Count c : counts) t += c;
  return t;
}

ScalarField OccupationField::concentration_field() const {
  ScalarField f(lattice);
  for (size_t k = 0; k < counts.size(); ++k)
    f.values[k] = moles_from_count(counts[k], mole_scale);
  return f;
}

void set_from_concentration(OccupationField& field, const ScalarField& conc) {
  if (!field.lattice.same_geometry(conc.lattice))
    throw ConfigError("set_from_concentration: lattice mismatch");
  for (int j = 0; j < field.lattice.nz; ++j)
    for (int i = 0; i < field.lattice.nx; ++i) {
      double c = conc(i, j);
      if (!(c >= 0.0))
        throw ContractError("set_from_concentration: negative concentration at site (" +
                            std::to_string(i) + "," + std::to_string(j) + ")");
      field(i, j) = count_from_moles(c, field.mole_scale);
    }
}

// --- boundary conditions -------------------------------------------------

BoundaryConditions BoundaryConditions::uniform(BcKind kind) {
  BoundaryConditions bc;
  bc.default_kind = kind;
  return bc;
}

BoundaryConditions BoundaryConditions::dirichlet(
    std::function<double(double, double, double)> fn) {
  BoundaryConditions bc;
  bc.default_kind = BcKind::Dirichlet;
  BoundaryPatch p;
  p.kind = BcKind::Dirichlet;
  p.value = std::move(fn);
  // One whole-ring patch per edge keeps the value function attached.
  for (Edge e : {Edge::Left, Edge::Right, Edge::Bottom, Edge::Top}) {
    p.edge = e;
    bc.patches.push_back(p);
  }
  return bc;
}

BoundaryConditions& BoundaryConditions::add(Edge e, BcKind kind,
                                            std::function<double(double, double, double)> fn,
                                            double lo, double hi) {
  BoundaryPatch p;
  p.edge = e;
  p.kind = kind;
  p.value = std::move(fn);
  p.lo = lo;
  p.hi = hi;
  patches.push_back(p);
  return *this;
}

namespace {

// Edge membership with corners owned by the vertical edges.
bool site_on_edge(const Lattice2D& lat, int i, int j, Edge e) {
  switch (e) {
    case Edge::Left: return i == 0;
    case Edge::Right: return i == lat.nx - 1;
    case Edge::Bottom: return j == 0 && i > 0 && i < lat.nx - 1;
    case Edge::Top: return j == lat.nz - 1 && i > 0 && i < lat.nx - 1;
  }
  return false;
}

double tangential(const Lattice2D& lat, int i, int j, Edge e) {
  return (e == Edge::Left || e == Edge::Right) ? lat.z(j) : lat.x(i);
}

}  // namespace

BoundaryTable compile_boundary(const BoundaryConditions& bc, const Lattice2D& lat) {
  BoundaryTable t;
  t.bc = bc;
  t.lattice = lat;
  t.patch_of_site.assign(static_cast<size_t>(lat.size()), -1);
  for (int j = 0; j < lat.nz; ++j)
    for (int i = 0; i < lat.nx; ++i) {
      if (!lat.boundary(i, j)) continue;
      int s = lat.index(i, j);
      int match = static_cast<int>(bc.patches.size());  // default slot
      bool found = false;
      for (size_t k = 0; k < bc.patches.size(); ++k) {
        const BoundaryPatch& p = bc.patches[k];
        if (!site_on_edge(lat, i, j, p.edge)) continue;
        double tau = tangential(lat, i, j, p.edge);
        if (tau < p.lo - 1e-12 || tau > p.hi + 1e-12) continue;
        if (found)
          throw ConfigError("boundary site (" + std::to_string(i) + "," + std::to_string(j) +
                            ") covered by more than one patch");
        match = static_cast<int>(k);
        found = true;
      }
      if ((found ? bc.patches[match].kind : bc.default_kind) == BcKind::Dirichlet &&
          (!found || !bc.patches[match].value))
        throw ConfigError("Dirichlet boundary without a value function at site (" +
                          std::to_string(i) + "," + std::to_string(j) + ")");
      t.patch_of_site[s] = static_cast<std::int16_t>(match);
      t.boundary_sites.push_back(s);
    }
  return t;
}

BcKind BoundaryTable::kind_at_site(int s) const {
  int k = patch_of_site[s];
  if (k < 0) throw ConfigError("kind_at_site called for interior site");
  if (k == static_cast<int>(bc.patches.size())) return bc.default_kind;
  return bc.patches[static_cast<size_t>(k)].kind;
}

double BoundaryTable::dirichlet_value(int i, int j, double t) const {
  int s = lattice.index(i, j);
  int k = patch_of_site[s];
  if (k < 0 || k == static_cast<int>(bc.patches.size()) ||
      bc.patches[static_cast<size_t>(k)].kind != BcKind::Dirichlet)
    throw ConfigError("dirichlet_value: site has no Dirichlet patch");
  return bc.patches[static_cast<size_t>(k)].value(lattice.x(i), lattice.z(j), t);
}

BcKind BoundaryTable::kind_at_clamped(int i, int j) const {
  int ci = std::clamp(i, 0, lattice.nx - 1);
  int cj = std::clamp(j, 0, lattice.nz - 1);
  return kind_at_site(lattice.index(ci, cj));
}

}  // namespace grw
