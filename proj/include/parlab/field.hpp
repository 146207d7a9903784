#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "parlab/grid.hpp"

namespace parlab {

/// Scalar samples over Q, one per cell per time slab. Slab k covers
/// (k*dt, (k+1)*dt] and is sampled at its right endpoint, so the implicit
/// step from level k to k+1 reads slab k. Time-independent fields store a
/// single slab.
class CoefficientField {
public:
  CoefficientField() = default;

  static CoefficientField constant(const SpaceTimeGrid& grid, double value,
                                   std::string name = "");
  static CoefficientField from_function(
      const SpaceTimeGrid& grid,
      const std::function<double(const SpacePoint&, double)>& f, std::string name = "",
      bool time_dependent = false);

  bool empty() const { return values_.empty(); }
  bool time_dependent() const { return time_dependent_; }
  const std::string& name() const { return name_; }
  const SpaceTimeGrid& grid() const { return *grid_; }

  double at(long cell, int slab) const {
    return values_[time_dependent_ ? std::size_t(slab) * std::size_t(ncells_) + cell
                                   : std::size_t(cell)];
  }
  double& at(long cell, int slab) {
    return values_[time_dependent_ ? std::size_t(slab) * std::size_t(ncells_) + cell
                                   : std::size_t(cell)];
  }
  std::vector<double>& data() { return values_; }
  const std::vector<double>& data() const { return values_; }

  double min_value() const;
  double max_value() const;
  /// Finite everywhere; non-negative when `require_non_negative`.
  void validate(bool require_non_negative) const;
  uint64_t hash() const;

private:
  const SpaceTimeGrid* grid_ = nullptr;
  long ncells_ = 0;
  bool time_dependent_ = false;
  std::string name_;
  std::vector<double> values_;
};

// Built-in rough coefficient families. `period` is the edge length of the
// constant blocks; values alternate between 1 and `contrast`.
CoefficientField checkerboard_field(const SpaceTimeGrid& grid, double contrast, double period,
                                    std::string name = "");
CoefficientField striped_field(const SpaceTimeGrid& grid, double contrast, double period,
                               std::string name = "");
CoefficientField random_piecewise_field(const SpaceTimeGrid& grid, uint64_t seed,
                                        double contrast, double period, std::string name = "");

/// Time-indexed scalar field u(x,t) on levels 0..nt.
class SolutionField {
public:
  SolutionField() = default;
  explicit SolutionField(const SpaceTimeGrid& grid);

  const SpaceTimeGrid& grid() const { return *grid_; }
  double at(long cell, int step) const {
    return values_[std::size_t(step) * std::size_t(ncells_) + cell];
  }
  double& at(long cell, int step) {
    return values_[std::size_t(step) * std::size_t(ncells_) + cell];
  }
  const double* level(int step) const { return values_.data() + std::size_t(step) * ncells_; }
  double* level(int step) { return values_.data() + std::size_t(step) * ncells_; }

  std::vector<double>& data() { return values_; }
  const std::vector<double>& data() const { return values_; }

  double max_over(const CellSet& region) const;
  double min_over(const CellSet& region) const;
  double max_abs() const;

  /// Sample from a closed-form function (used by certifier tests and oracles).
  static SolutionField from_function(const SpaceTimeGrid& grid,
                                     const std::function<double(const SpacePoint&, double)>& f);

  uint64_t hash() const;

  uint64_t problem_hash = 0;
  uint64_t config_hash = 0;

private:
  const SpaceTimeGrid* grid_ = nullptr;
  long ncells_ = 0;
  std::vector<double> values_;
};

}  // namespace parlab
