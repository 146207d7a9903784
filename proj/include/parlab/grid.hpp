#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace parlab {

struct SpacePoint {
  std::array<double, 3> x{0.0, 0.0, 0.0};
};

struct SpaceTimePoint {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  double t = 0.0;
};

/// Thrown when an input fails validation (bad grid descriptor, cylinder
/// escaping the domain, malformed config, ...).
class validation_error : public std::runtime_error {
public:
  explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

/// Uniform tensor grid on a box Omega times the time interval (0,T).
/// Cell centers sit at lo + (i+1/2)h; solution time levels at k*dt, k=0..nt.
class SpaceTimeGrid {
public:
  static SpaceTimeGrid make(int dim, std::array<double, 3> lo, std::array<double, 3> hi,
                            double h, double T, double dt);

  int dim() const { return dim_; }
  double h() const { return h_; }
  double T() const { return T_; }
  double dt() const { return dt_; }
  int steps() const { return nt_; }
  int cells(int axis) const { return cells_[axis]; }
  long total_cells() const { return total_cells_; }
  double lo(int axis) const { return lo_[axis]; }
  double hi(int axis) const { return hi_[axis]; }
  double cell_volume() const;
  double box_volume() const;

  double center(int axis, int i) const { return lo_[axis] + (i + 0.5) * h_; }
  double time(int step) const { return step * dt_; }

  long flatten(const std::array<int, 3>& idx) const;
  std::array<int, 3> unflatten(long cell) const;
  SpacePoint cell_center(long cell) const;
  /// Nearest cell center to a point; clamps to the box.
  long nearest_cell(const SpacePoint& p) const;
  bool boundary_adjacent(long cell) const;

  uint64_t hash() const;

private:
  int dim_ = 0;
  std::array<double, 3> lo_{}, hi_{};
  double h_ = 0, T_ = 0, dt_ = 0;
  std::array<int, 3> cells_{1, 1, 1};
  int nt_ = 0;
  long total_cells_ = 0;
};

enum class CylinderKind { standard, harnack_shifted, tripled };

/// Space-time cylinder R(rho) x (time band]. The cube R(rho) has edge length
/// rho (half-width rho/2) centered at x'; "tripled" denotes Q(3 rho).
struct Cylinder {
  SpaceTimePoint center;
  double rho = 0;
  CylinderKind kind = CylinderKind::standard;

  double half_width() const;
  /// Half-open time band (t_lo, t_hi].
  double t_lo() const;
  double t_hi() const;
};

/// Membership mask over (cell, step) pairs of one grid.
class CellSet {
public:
  explicit CellSet(const SpaceTimeGrid& grid);

  const SpaceTimeGrid& grid() const { return *grid_; }
  bool contains(long cell, int step) const { return mask_[index(cell, step)] != 0; }
  void set(long cell, int step, bool on) { mask_[index(cell, step)] = on ? 1 : 0; }
  long count() const;
  bool empty() const { return count() == 0; }

private:
  std::size_t index(long cell, int step) const;
  const SpaceTimeGrid* grid_;
  std::vector<uint8_t> mask_;
};

/// Cells whose centers lie inside the cylinder, steps whose times lie in the
/// half-open band. Throws validation_error naming the violated face when the
/// cylinder is not fully contained in Q.
CellSet materialize(const Cylinder& cyl, const SpaceTimeGrid& grid);

/// Containment check without materialization.
void check_containment(const Cylinder& cyl, const SpaceTimeGrid& grid);

/// Parabolic pseudo-distance |Y - X|: with (dx, dt) = Y - X, the squared
/// distance is max(max_i dx_i^2, -dt/4) when dt <= 0 and +infinity otherwise.
double pseudo_distance(const SpaceTimePoint& X, const SpaceTimePoint& Y, int dim);

/// Gamma = {boundary-adjacent cells at all steps} union {all cells at step 0}.
CellSet parabolic_boundary(const SpaceTimeGrid& grid);

}  // namespace parlab
