#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "crystal/energy.hpp"
#include "crystal/profile.hpp"

namespace crystal {

/// u(x, t) = Σ_k b_k exp(-k²π²t) sin(kπx), with coeffs[k-1] = b_k.
struct FourierSolution {
  std::vector<double> coeffs;

  double u(double x, double t) const;
  double ux(double x, double t) const;
  double ut(double x, double t) const;
  double uxx(double x, double t) const;
  double uxxx(double x, double t) const;
  /// Σ_k |b_k| (kπ)³ exp(-k²π²t), an upper bound for sup_x |u_xxx| that is exact for one mode.
  double uxxx_bound(double t) const;
};

struct FdBoundary {
  BoundaryKind kind = BoundaryKind::HomogeneousDirichlet;
  double a = 0.0;  // Neumann slopes
  double b = 0.0;
};

/// Method-of-lines solution of u_t = mobility(u_x) W''(u_x) u_xx on a uniform grid.
class FdSolution {
 public:
  FdSolution(double dx, double dt, std::vector<double> times, std::vector<std::vector<double>> values);

  std::span<const double> times() const { return times_; }
  std::size_t nx() const { return values_.front().size() - 1; }
  double dx() const { return dx_; }
  double dt() const { return dt_; }
  const std::vector<double>& values(std::size_t snapshot) const { return values_[snapshot]; }

  /// Cubic B-spline interpolants of the snapshot values.
  double u(std::size_t snapshot, double x) const;
  double ux(std::size_t snapshot, double x) const;

 private:
  struct Splines;
  double dx_, dt_;
  std::vector<double> times_;
  std::vector<std::vector<double>> values_;
  std::shared_ptr<const Splines> splines_;
};

/// Integrates to every time in `times` (sorted, nonnegative); the step is
/// 0.2 dx² / max(mobility W'') over the slopes the data can reach.
FdSolution fd_reference(const SmoothEnergy& energy, Mobility mode, const InitialData& u0, const FdBoundary& bc,
                        std::size_t nx, std::vector<double> times);

}  // namespace crystal
