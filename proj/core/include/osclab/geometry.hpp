#pragma once

#include <array>

namespace osclab {

struct Point {
  double x1 = 0.0;
  double x2 = 0.0;
};

enum class Profile {
  Paper,   ///< phi(x2, eps) = x2 * eps^(2 - x2)
  Linear,  ///< phi(x2, eps) = x2 * eps
};

/// Boundary segments of the unit square.
enum class Side {
  I1,  ///< top, (x1, 1)
  I2,  ///< right, (1, x2)
  I3,  ///< bottom, (x1, 0)
  I4,  ///< left, (0, x2)
};

const char* to_string(Side side) noexcept;
const char* to_string(Profile profile) noexcept;

/// Row-major 2x2 matrix.
using Mat2 = std::array<std::array<double, 2>, 2>;

/// Entries of (Jh)^{-T}; b11 == 1 and b21 == 0 for every member of the family.
struct InvTransposeJacobian {
  double b11 = 1.0;
  double b12 = 0.0;
  double b21 = 0.0;
  double b22 = 1.0;

  /// B * g for a reference gradient g.
  std::array<double, 2> apply(std::array<double, 2> g) const noexcept {
    return {b11 * g[0] + b12 * g[1], b21 * g[0] + b22 * g[1]};
  }
};

/// Minimum of |Jh_eps| required by the admissibility scan at construction.
inline constexpr double kMinAdmissibleJacobian = 0.05;
/// Resolution of the admissibility scan.
inline constexpr int kAdmissibilityScan = 512;

/// The perturbation h_eps(x1, x2) = (x1, x2 + phi(x2, eps) sin(x1 / eps)).
///
/// epsilon == 0 is a tagged limit case (identity map, homogenized boundary
/// weight) and never enters the closed-form expressions.
class DiffeoFamily {
 public:
  /// The eps = 0 limit.
  static DiffeoFamily identity(Profile profile = Profile::Paper) noexcept;

  /// Perturbed member. Throws NonPositiveJacobian when eps <= 0 or when the
  /// sampled |Jh_eps| falls below kMinAdmissibleJacobian.
  static DiffeoFamily perturbed(double epsilon, Profile profile = Profile::Paper);

  /// identity() for eps == 0, perturbed(eps) otherwise.
  static DiffeoFamily make(double epsilon, Profile profile = Profile::Paper);

  double epsilon() const noexcept { return epsilon_; }
  Profile profile() const noexcept { return profile_; }
  bool is_limit() const noexcept { return epsilon_ == 0.0; }

  double phi(double x2) const noexcept;
  double dphi_dx2(double x2) const noexcept;

  Point map_point(Point x) const noexcept;
  Mat2 jacobian(Point x) const noexcept;

  /// |Jh_eps(x)|; throws NonPositiveJacobian if not positive.
  double jacobian_det(Point x) const;
  InvTransposeJacobian inv_transpose_jacobian(Point x) const;

  /// |J_{dOmega} h_eps| on the given side at arclength parameter s in [0, 1]
  /// (s = x1 on I1/I3 and s = x2 on I2/I4). At eps = 0 this is the
  /// homogenized weight: M_pi(p) on I1, 1 elsewhere.
  double boundary_jacobian(Side side, double s) const;

  /// Minimum of |Jh_eps| over an (n+1)^2 lattice; no throwing.
  double min_jacobian_on_grid(int n) const noexcept;

 private:
  DiffeoFamily(double epsilon, Profile profile) noexcept
      : epsilon_(epsilon), profile_(profile) {}

  double raw_det(Point x) const noexcept;

  double epsilon_;
  Profile profile_;
  double log_eps_ = 0.0;
};

/// M_pi(p) = (1/pi) int_0^pi sqrt(1 + cos^2 y) dy by adaptive Gauss-Legendre
/// quadrature (absolute tolerance 1e-12). Computed once.
double boundary_average_limit();

}  // namespace osclab
