#pragma once

// Gauges (Minkowski functionals of compact convex bodies containing the
// origin), their duals and asymmetry constants, plus sampled certification
// of set strong convexity and of the scaling inequality.

#include <cstdint>
#include <string>
#include <variant>

#include "affw/common.hpp"

namespace affw {

/// Minimal access to a compact convex set needed by the sampling oracles.
class ConvexBody {
 public:
  virtual ~ConvexBody() = default;

  virtual Eigen::Index dim() const = 0;
  /// Membership with a relative tolerance on the set's own scale.
  virtual bool contains(const Vector& x, double tol) const = 0;
  /// A point in the interior; boundary samples are rays cast from it.
  virtual Vector interior_point() const = 0;
  /// Boundary point on the ray interior_point() + t·direction, t > 0.
  virtual Vector boundary_point(const Vector& direction) const;
  /// argmax over the set of ⟨phi, v⟩.
  virtual Vector argmax_linear(const Vector& phi) const = 0;
};

struct NormBallBody {
  double radius;
};

/// Q = {x : xᵀAx ≤ 1}.
struct EllipsoidBody {
  Matrix shape;
};

/// Q = {x : ‖x − center‖ ≤ radius}, ‖center‖ < radius.
struct ShiftedBallBody {
  Vector center;
  double radius;
};

class Gauge {
 public:
  static Gauge norm_ball(Eigen::Index dim, double radius = 1.0);
  static Gauge ellipsoid(const Matrix& shape);
  static Gauge shifted_ball(const Vector& center, double radius);

  Eigen::Index dim() const { return dim_; }
  const std::variant<NormBallBody, EllipsoidBody, ShiftedBallBody>& body()
      const {
    return body_;
  }
  std::string id() const;
  bool is_symmetric() const;

  /// Smallest τ ≥ 0 with x ∈ τQ.
  double eval(const Vector& x) const;
  double operator()(const Vector& x) const { return eval(x); }

  /// Support function of Q: max over ω(x) ≤ 1 of ⟨v, x⟩.
  double dual(const Vector& v) const;

  /// Closed-form sup of ω(x)/ω(−x).
  double analytic_asymmetry() const;

  /// u rescaled onto the unit level set {ω = 1}.
  Vector unit_level_point(const Vector& u) const;

  /// Smallest and largest Euclidean norm on {ω = 1}. They convert
  /// Euclidean constants: μ_ω = μ·inner², L_ω = L·outer².
  struct Radii {
    double inner;
    double outer;
  };
  Radii euclidean_radii() const;

 private:
  Gauge(Eigen::Index dim,
        std::variant<NormBallBody, EllipsoidBody, ShiftedBallBody> body);

  Eigen::Index dim_;
  std::variant<NormBallBody, EllipsoidBody, ShiftedBallBody> body_;
  Eigen::LLT<Matrix> llt_;  // ellipsoid only
};

// Relative width at which the shifted-ball bisection stops.
inline constexpr double kGaugeBisectionTol = 1e-12;

struct AsymmetryEstimate {
  double analytic;
  double sampled;
};

/// Analytic κ_ω together with the maximum of ω(u)/ω(−u) over `samples`
/// random directions. Throws InvariantError if the sample exceeds the
/// analytic value by more than 1e-9.
AsymmetryEstimate asymmetry_constant(const Gauge& gauge, int samples,
                                     std::uint64_t seed = 0);

/// Which inset the strong-convexity test demands around chord points:
///   plain: γ(1−γ)·ω²(x−y)
///   asymmetric: γ(1−γ)·((1−γ)ω²(x−y) + γω²(y−x))/2
enum class ConvexityVariant { plain, asymmetric };

std::string to_string(ConvexityVariant v);

enum class CertificateStatus { analytic, sampled };

struct StrongConvexityCertificate {
  double alpha = 0.0;
  std::string gauge_id;
  ConvexityVariant variant = ConvexityVariant::asymmetric;
  int sample_budget = 0;
  std::uint64_t seed = 0;
  CertificateStatus status = CertificateStatus::sampled;
};

struct AlphaCheck {
  bool passed = true;
  int tested = 0;
  int failures = 0;
};

/// Runs the sampled containment tests of the chosen variant at a fixed
/// alpha. x, y are boundary samples, γ ~ U(0,1), z on {ω = 1}.
AlphaCheck check_strong_convexity(const ConvexBody& set, const Gauge& gauge,
                                  ConvexityVariant variant, double alpha,
                                  int budget, std::uint64_t seed);

/// Largest alpha for which every sampled containment holds (bisection over
/// alpha on a fixed seeded sample). This over-estimates the true constant
/// and is recorded as `sampled`. Throws DataError if a chord point itself
/// leaves the set.
StrongConvexityCertificate strong_convexity_oracle(const ConvexBody& set,
                                                   const Gauge& gauge,
                                                   ConvexityVariant variant,
                                                   int budget,
                                                   std::uint64_t seed);

/// Constant usable in ⟨φ, v − x⟩ ≥ α ω_*(φ) ω²(v − x). A plain
/// certificate carries over unchanged; an asymmetric one only yields
/// α/(2κ²) because its inset halves and swaps the chord orientation.
double scaling_alpha(const StrongConvexityCertificate& cert, double kappa);

struct ScalingCheck {
  bool holds;
  double slack;
};

/// Evaluates ⟨φ, v − x⟩ − α·ω_*(φ)·ω²(v − x) with v = argmax_C ⟨φ, v⟩.
ScalingCheck scaling_inequality_check(const ConvexBody& set,
                                      const Gauge& gauge, double alpha,
                                      const Vector& x, const Vector& phi,
                                      double tol = 1e-12);

/// Strong-convexity constant of the level set {f − f* ≤ R} of an L-smooth,
/// μ-strongly convex function: μ / (κ √(2 L R)).
double level_set_alpha(double L, double mu, double R, double kappa);

}  // namespace affw
