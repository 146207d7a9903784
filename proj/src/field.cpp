#include "parlab/field.hpp"

#include <cmath>
#include <limits>
#include <random>

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

CoefficientField CoefficientField::constant(const SpaceTimeGrid& grid, double value,
                                            std::string name) {
  CoefficientField f;
  f.grid_ = &grid;
  f.ncells_ = grid.total_cells();
  f.name_ = std::move(name);
  f.values_.assign(std::size_t(f.ncells_), value);
  return f;
}

CoefficientField CoefficientField::from_function(
    const SpaceTimeGrid& grid, const std::function<double(const SpacePoint&, double)>& fn,
    std::string name, bool time_dependent) {
  CoefficientField f;
  f.grid_ = &grid;
  f.ncells_ = grid.total_cells();
  f.name_ = std::move(name);
  f.time_dependent_ = time_dependent;
  const int nslabs = time_dependent ? grid.steps() : 1;
  f.values_.resize(std::size_t(nslabs) * std::size_t(f.ncells_));
  for (int k = 0; k < nslabs; ++k) {
    const double t = grid.time(k + 1);
    for (long c = 0; c < f.ncells_; ++c)
      f.values_[std::size_t(k) * f.ncells_ + c] = fn(grid.cell_center(c), t);
  }
  return f;
}

double CoefficientField::min_value() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : values_) m = std::min(m, v);
  return m;
}

double CoefficientField::max_value() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : values_) m = std::max(m, v);
  return m;
}

void CoefficientField::validate(bool require_non_negative) const {
  for (double v : values_) {
    if (!std::isfinite(v))
      throw validation_error("coefficient field '" + name_ + "' has a non-finite value");
    if (require_non_negative && v < 0)
      throw validation_error("coefficient field '" + name_ + "' must be non-negative");
  }
}

uint64_t CoefficientField::hash() const {
  uint64_t h = fnv1a(name_.data(), name_.size());
  h = fnv1a(values_.data(), values_.size() * sizeof(double), h);
  return h;
}

namespace {

int block_index(double coord, double lo, double period) {
  return int(std::floor((coord - lo) / period + 1e-12));
}

}  // namespace

CoefficientField checkerboard_field(const SpaceTimeGrid& grid, double contrast, double period,
                                    std::string name) {
  if (period <= 0) throw validation_error("checkerboard: period must be positive");
  return CoefficientField::from_function(
      grid,
      [&grid, contrast, period](const SpacePoint& p, double) {
        int parity = 0;
        for (int a = 0; a < grid.dim(); ++a)
          parity += block_index(p.x[a], grid.lo(a), period);
        return (parity % 2 + 2) % 2 == 0 ? 1.0 : contrast;
      },
      std::move(name));
}

CoefficientField striped_field(const SpaceTimeGrid& grid, double contrast, double period,
                               std::string name) {
  if (period <= 0) throw validation_error("striped: period must be positive");
  return CoefficientField::from_function(
      grid,
      [&grid, contrast, period](const SpacePoint& p, double) {
        const int b = block_index(p.x[0], grid.lo(0), period);
        return (b % 2 + 2) % 2 == 0 ? 1.0 : contrast;
      },
      std::move(name));
}

CoefficientField random_piecewise_field(const SpaceTimeGrid& grid, uint64_t seed,
                                        double contrast, double period, std::string name) {
  if (period <= 0) throw validation_error("random_piecewise: period must be positive");
  if (contrast < 1) throw validation_error("random_piecewise: contrast must be >= 1");
  // Block values drawn log-uniformly in [1, contrast]; a block's value is
  // determined by hashing its integer coordinates with the seed, so the field
  // is resolution-independent and reproducible.
  return CoefficientField::from_function(
      grid,
      [&grid, seed, contrast, period](const SpacePoint& p, double) {
        uint64_t key = seed;
        for (int a = 0; a < grid.dim(); ++a) {
          const int64_t b = block_index(p.x[a], grid.lo(a), period);
          key = fnv1a(&b, sizeof b, key);
        }
        std::mt19937_64 rng(key);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        return std::exp(u(rng) * std::log(contrast));
      },
      std::move(name));
}

SolutionField::SolutionField(const SpaceTimeGrid& grid)
    : grid_(&grid),
      ncells_(grid.total_cells()),
      values_(std::size_t(grid.total_cells()) * std::size_t(grid.steps() + 1), 0.0) {}

double SolutionField::max_over(const CellSet& region) const {
  double m = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= grid_->steps(); ++k)
    for (long c = 0; c < ncells_; ++c)
      if (region.contains(c, k)) m = std::max(m, at(c, k));
  return m;
}

double SolutionField::min_over(const CellSet& region) const {
  double m = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= grid_->steps(); ++k)
    for (long c = 0; c < ncells_; ++c)
      if (region.contains(c, k)) m = std::min(m, at(c, k));
  return m;
}

double SolutionField::max_abs() const {
  double m = 0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

SolutionField SolutionField::from_function(
    const SpaceTimeGrid& grid, const std::function<double(const SpacePoint&, double)>& f) {
  SolutionField u(grid);
  for (int k = 0; k <= grid.steps(); ++k) {
    const double t = grid.time(k);
    for (long c = 0; c < grid.total_cells(); ++c) u.at(c, k) = f(grid.cell_center(c), t);
  }
  return u;
}

uint64_t SolutionField::hash() const {
  return fnv1a(values_.data(), values_.size() * sizeof(double));
}

}  // namespace parlab
