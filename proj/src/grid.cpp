#include "parlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

namespace parlab {

namespace {

uint64_t fnv1a(const void* data, std::size_t len, uint64_t seed = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

SpaceTimeGrid SpaceTimeGrid::make(int dim, std::array<double, 3> lo, std::array<double, 3> hi,
                                  double h, double T, double dt) {
  if (dim < 1 || dim > 3) throw validation_error("grid: dimension must be 1, 2 or 3");
  if (h <= 0) throw validation_error("grid: h must be positive");
  if (dt <= 0) throw validation_error("grid: dt must be positive");
  if (T <= 0) throw validation_error("grid: T must be positive");
  if (dt > T) throw validation_error("grid: dt exceeds T");

  SpaceTimeGrid g;
  g.dim_ = dim;
  g.lo_ = lo;
  g.hi_ = hi;
  g.h_ = h;
  g.T_ = T;
  g.dt_ = dt;
  g.total_cells_ = 1;
  for (int a = 0; a < dim; ++a) {
    const double extent = hi[a] - lo[a];
    if (extent <= 0) throw validation_error("grid: degenerate box on axis " + std::to_string(a));
    const double m = extent / h;
    const long mi = std::lround(m);
    if (mi < 1 || std::abs(m - double(mi)) > 1e-9 * std::max(1.0, m)) {
      std::ostringstream os;
      os << "grid: extent " << extent << " on axis " << a << " is not a multiple of h=" << h;
      throw validation_error(os.str());
    }
    g.cells_[a] = int(mi);
    g.total_cells_ *= mi;
  }
  for (int a = dim; a < 3; ++a) {
    g.cells_[a] = 1;
    g.lo_[a] = 0;
    g.hi_[a] = 0;
  }
  const double steps = T / dt;
  const long nt = std::lround(steps);
  if (nt < 1 || std::abs(steps - double(nt)) > 1e-9 * std::max(1.0, steps))
    throw validation_error("grid: T is not an integer multiple of dt");
  g.nt_ = int(nt);
  if (g.total_cells_ < 8) throw validation_error("grid: fewer than 8 cells (degenerate)");
  return g;
}

double SpaceTimeGrid::cell_volume() const {
  double v = 1;
  for (int a = 0; a < dim_; ++a) v *= h_;
  return v;
}

double SpaceTimeGrid::box_volume() const {
  double v = 1;
  for (int a = 0; a < dim_; ++a) v *= hi_[a] - lo_[a];
  return v;
}

long SpaceTimeGrid::flatten(const std::array<int, 3>& idx) const {
  long c = idx[0];
  for (int a = 1; a < dim_; ++a) c = c * cells_[a] + idx[a];
  return c;
}

std::array<int, 3> SpaceTimeGrid::unflatten(long cell) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = dim_ - 1; a >= 0; --a) {
    idx[a] = int(cell % cells_[a]);
    cell /= cells_[a];
  }
  return idx;
}

SpacePoint SpaceTimeGrid::cell_center(long cell) const {
  const auto idx = unflatten(cell);
  SpacePoint p;
  for (int a = 0; a < dim_; ++a) p.x[a] = center(a, idx[a]);
  return p;
}

long SpaceTimeGrid::nearest_cell(const SpacePoint& p) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    int i = int(std::floor((p.x[a] - lo_[a]) / h_));
    idx[a] = std::clamp(i, 0, cells_[a] - 1);
  }
  return flatten(idx);
}

bool SpaceTimeGrid::boundary_adjacent(long cell) const {
  const auto idx = unflatten(cell);
  for (int a = 0; a < dim_; ++a)
    if (idx[a] == 0 || idx[a] == cells_[a] - 1) return true;
  return false;
}

uint64_t SpaceTimeGrid::hash() const {
  uint64_t h = fnv1a(&dim_, sizeof dim_);
  h = fnv1a(lo_.data(), sizeof lo_, h);
  h = fnv1a(hi_.data(), sizeof hi_, h);
  h = fnv1a(&h_, sizeof h_, h);
  h = fnv1a(&T_, sizeof T_, h);
  h = fnv1a(&dt_, sizeof dt_, h);
  return h;
}

double Cylinder::half_width() const {
  return kind == CylinderKind::tripled ? 1.5 * rho : 0.5 * rho;
}

double Cylinder::t_lo() const {
  const double r2 = rho * rho;
  switch (kind) {
    case CylinderKind::standard: return center.t - r2;
    case CylinderKind::harnack_shifted: return center.t - 8 * r2;
    case CylinderKind::tripled: return center.t - 9 * r2;
  }
  return 0;
}

double Cylinder::t_hi() const {
  return kind == CylinderKind::harnack_shifted ? center.t - 7 * rho * rho : center.t;
}

CellSet::CellSet(const SpaceTimeGrid& grid)
    : grid_(&grid), mask_(std::size_t(grid.total_cells()) * std::size_t(grid.steps() + 1), 0) {}

std::size_t CellSet::index(long cell, int step) const {
  return std::size_t(step) * std::size_t(grid_->total_cells()) + std::size_t(cell);
}

long CellSet::count() const {
  long c = 0;
  for (auto m : mask_) c += m;
  return c;
}

void check_containment(const Cylinder& cyl, const SpaceTimeGrid& grid) {
  if (cyl.rho <= 0) throw validation_error("cylinder: rho must be positive");
  const double hw = cyl.half_width();
  for (int a = 0; a < grid.dim(); ++a) {
    if (cyl.center.x[a] - hw < grid.lo(a) - 1e-12)
      throw validation_error("cylinder escapes Q through the low face of axis " + std::to_string(a));
    if (cyl.center.x[a] + hw > grid.hi(a) + 1e-12)
      throw validation_error("cylinder escapes Q through the high face of axis " + std::to_string(a));
  }
  if (cyl.t_lo() < -1e-12)
    throw validation_error("cylinder escapes Q through the initial time face t=0");
  if (cyl.t_hi() > grid.T() + 1e-12)
    throw validation_error("cylinder escapes Q through the final time face t=T");
}

CellSet materialize(const Cylinder& cyl, const SpaceTimeGrid& grid) {
  check_containment(cyl, grid);
  CellSet set(grid);
  const double hw = cyl.half_width();
  const double tlo = cyl.t_lo(), thi = cyl.t_hi();
  std::array<int, 3> ilo{0, 0, 0}, ihi{0, 0, 0};
  for (int a = 0; a < grid.dim(); ++a) {
    ilo[a] = std::max(0, int(std::floor((cyl.center.x[a] - hw - grid.lo(a)) / grid.h())));
    ihi[a] = std::min(grid.cells(a) - 1,
                      int(std::ceil((cyl.center.x[a] + hw - grid.lo(a)) / grid.h())));
  }
  std::vector<long> cells;
  std::array<int, 3> idx{0, 0, 0};
  for (idx[0] = ilo[0]; idx[0] <= ihi[0]; ++idx[0])
    for (idx[1] = ilo[1]; idx[1] <= ihi[1]; ++idx[1])
      for (idx[2] = ilo[2]; idx[2] <= ihi[2]; ++idx[2]) {
        bool in = true;
        for (int a = 0; a < grid.dim(); ++a)
          if (std::abs(grid.center(a, idx[a]) - cyl.center.x[a]) >= hw) in = false;
        if (in) cells.push_back(grid.flatten(idx));
      }
  for (int k = 0; k <= grid.steps(); ++k) {
    const double t = grid.time(k);
    if (t > tlo && t <= thi + 1e-14)
      for (long c : cells) set.set(c, k, true);
  }
  return set;
}

double pseudo_distance(const SpaceTimePoint& X, const SpaceTimePoint& Y, int dim) {
  const double dt = Y.t - X.t;
  if (dt > 0) return std::numeric_limits<double>::infinity();
  double m = -dt / 4;
  for (int a = 0; a < dim; ++a) {
    const double dx = Y.x[a] - X.x[a];
    m = std::max(m, dx * dx);
  }
  return std::sqrt(m);
}

CellSet parabolic_boundary(const SpaceTimeGrid& grid) {
  CellSet set(grid);
  for (long c = 0; c < grid.total_cells(); ++c) {
    set.set(c, 0, true);
    if (grid.boundary_adjacent(c))
      for (int k = 0; k <= grid.steps(); ++k) set.set(c, k, true);
  }
  return set;
}

}  // namespace parlab
