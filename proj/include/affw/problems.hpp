#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "affw/common.hpp"
#include "affw/dataset.hpp"
#include "affw/geometry.hpp"

namespace affw {

/// Smooth objective with value/gradient oracles and call counters.
///
/// Known constants are optional: `known_L` / `known_mu` are Euclidean
/// smoothness / strong-convexity moduli in the objective's own coordinates,
/// `known_fstar` is the optimal value over the problem's feasible set when
/// it is available in closed form.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual Eigen::Index dim() const = 0;

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;

  /// dᵀHd when the objective is quadratic with constant Hessian H.
  virtual std::optional<double> curvature(const Vector& d) const {
    (void)d;
    return std::nullopt;
  }

  std::uint64_t value_calls() const { return value_calls_; }
  std::uint64_t gradient_calls() const { return gradient_calls_; }
  void reset_counters() const {
    value_calls_ = 0;
    gradient_calls_ = 0;
  }

  std::optional<double> known_L;
  std::optional<double> known_mu;
  std::optional<double> known_fstar;

 protected:
  virtual double compute_value(const Vector& x) const = 0;
  virtual Vector compute_gradient(const Vector& x) const = 0;

 private:
  mutable std::uint64_t value_calls_ = 0;
  mutable std::uint64_t gradient_calls_ = 0;
};

using ObjectivePtr = std::shared_ptr<const Objective>;

/// f(x) = ½(x − x̄)ᵀH(x − x̄) + offset.
class QuadraticObjective : public Objective {
 public:
  QuadraticObjective(Matrix hessian, Vector minimizer, double offset = 0.0);

  Eigen::Index dim() const override { return minimizer_.size(); }
  std::optional<double> curvature(const Vector& d) const override;

  const Matrix& hessian() const { return hessian_; }
  /// Unconstrained minimizer and minimum value.
  const Vector& minimizer() const { return minimizer_; }
  double offset() const { return offset_; }

 protected:
  double compute_value(const Vector& x) const override;
  Vector compute_gradient(const Vector& x) const override;

 private:
  Matrix hessian_;
  Vector minimizer_;
  double offset_;
};

/// Euclidean projection objective ½‖x − x̄‖² (L = μ = 1).
class ProjectionObjective : public Objective {
 public:
  explicit ProjectionObjective(Vector target);

  Eigen::Index dim() const override { return target_.size(); }
  std::optional<double> curvature(const Vector& d) const override {
    return d.squaredNorm();
  }
  const Vector& target() const { return target_; }

 protected:
  double compute_value(const Vector& x) const override;
  Vector compute_gradient(const Vector& x) const override;

 private:
  Vector target_;
};

struct BallMinimum {
  Vector x;
  double value;
};

/// Exact minimizer of a quadratic with positive definite Hessian over
/// {x : ‖x − center‖ ≤ radius}, via the secular equation ‖u(λ)‖ = radius.
BallMinimum minimize_quadratic_on_ball(const QuadraticObjective& f,
                                       double radius, const Vector& center);

enum class Loss { quadratic, logistic };

std::string to_string(Loss loss);

/// Empirical risk (1/n) Σ l(a_iᵀx, y_i).
class ErmObjective : public Objective {
 public:
  ErmObjective(std::shared_ptr<const Dataset> data, Loss loss);

  Eigen::Index dim() const override { return data_->features.cols(); }
  std::optional<double> curvature(const Vector& d) const override;
  Loss loss() const { return loss_; }
  const Dataset& data() const { return *data_; }

 protected:
  double compute_value(const Vector& x) const override;
  Vector compute_gradient(const Vector& x) const override;

 private:
  std::shared_ptr<const Dataset> data_;
  Loss loss_;
};

/// Per-sample logistic loss log(1 + exp(−y s)), stable for large |ys|.
double logistic_loss(double s, double y);

/// f̃(y) = f(By + b), ∇f̃(y) = Bᵀ∇f(By + b).
class AffineObjective : public Objective {
 public:
  AffineObjective(ObjectivePtr inner, Matrix B, Vector b);

  Eigen::Index dim() const override { return B_.cols(); }
  std::optional<double> curvature(const Vector& d) const override;
  const Objective& inner() const { return *inner_; }

 protected:
  double compute_value(const Vector& x) const override;
  Vector compute_gradient(const Vector& x) const override;

 private:
  ObjectivePtr inner_;
  Matrix B_;
  Vector b_;
};

/// Projection objective ½‖x − x̄‖²; L = μ = 1.
std::shared_ptr<ProjectionObjective> make_projection_objective(
    const Vector& xbar);
/// As above, with known_fstar filled in for the ball ‖x‖ ≤ radius.
std::shared_ptr<ProjectionObjective> make_projection_objective(
    const Vector& xbar, double ball_radius);
std::shared_ptr<ErmObjective> make_erm_objective(
    std::shared_ptr<const Dataset> data, Loss loss);

/// Linear minimizer over the Euclidean ball: center − radius·g/‖g‖.
/// Throws DegenerateGradient when g = 0.
Vector lmo_ball(double radius, const Vector& center, const Vector& g);

/// Linear minimizer over {x : (x−c)ᵀA(x−c) ≤ r²}:
/// c − r·A⁻¹g/√(gᵀA⁻¹g).
Vector lmo_ellipsoid(const Matrix& shape, double level_sq, const Vector& g,
                     const Vector& center);

/// Raised by linear minimization oracles for a zero gradient.
class DegenerateGradient : public Error {
 public:
  DegenerateGradient() : Error("linear minimization oracle: zero gradient") {}
};

/// {x : ‖F(x − c)‖₂ ≤ r}. F = I is the Euclidean ball; otherwise the
/// ellipsoid with shape matrix A = FᵀF and level r².
class FeasibleSet : public ConvexBody {
 public:
  static FeasibleSet ball(double radius, const Vector& center);
  static FeasibleSet ball(double radius, Eigen::Index dim);
  /// {x : (x−c)ᵀA(x−c) ≤ level_sq}, A symmetric positive definite.
  static FeasibleSet ellipsoid(const Matrix& shape, double level_sq,
                               const Vector& center);
  /// {x : ‖F(x − c)‖ ≤ radius} for an invertible factor F.
  static FeasibleSet from_factor(const Matrix& factor, double radius,
                                 const Vector& center);

  bool is_ball() const { return !factor_.has_value(); }
  double radius() const { return radius_; }
  const Vector& center() const { return center_; }
  /// A = FᵀF (identity for balls).
  Matrix shape_matrix() const;
  const std::optional<Matrix>& factor() const { return factor_; }

  /// ‖F(x − c)‖ / r, the set's own gauge around its center.
  double scaled_distance(const Vector& x) const;

  Eigen::Index dim() const override { return center_.size(); }
  bool contains(const Vector& x, double tol) const override;
  Vector interior_point() const override { return center_; }
  Vector boundary_point(const Vector& direction) const override;
  Vector argmax_linear(const Vector& phi) const override { return lmo(-phi); }

  /// argmin over the set of ⟨g, v⟩; counts calls.
  Vector lmo(const Vector& g) const;
  std::uint64_t lmo_calls() const { return lmo_calls_; }
  void reset_counters() const { lmo_calls_ = 0; }

  /// Volume-uniform random member.
  Vector random_member(Rng& rng) const;

  /// B⁻¹(C − b): the image of this set under y = B⁻¹(x − b).
  FeasibleSet pulled_back(const Matrix& B, const Vector& b) const;

  static constexpr double kMembershipTol = 1e-9;

 private:
  FeasibleSet(double radius, Vector center, std::optional<Matrix> factor);

  double radius_;
  Vector center_;
  std::optional<Matrix> factor_;
  std::optional<Eigen::PartialPivLU<Matrix>> factor_lu_;
  mutable std::uint64_t lmo_calls_ = 0;
};

/// x = B y + b with B invertible.
class AffineMap {
 public:
  AffineMap(Matrix B, Vector b);

  static AffineMap identity(Eigen::Index dim);
  /// B = U diag(σ) Vᵀ with random orthogonal U, V and σ log-spaced in
  /// [1, condition_number]; b standard normal.
  static AffineMap random(Eigen::Index dim, double condition_number,
                          std::uint64_t seed);

  const Matrix& matrix() const { return B_; }
  const Vector& offset() const { return b_; }
  double condition_number() const { return condition_; }
  double sigma_max() const { return sigma_max_; }
  double sigma_min() const { return sigma_min_; }
  Eigen::Index dim() const { return B_.rows(); }

  /// Original coordinates from transformed ones: By + b.
  Vector forward(const Vector& y) const;
  /// Transformed coordinates from original ones: B⁻¹(x − b).
  Vector inverse(const Vector& x) const;

 private:
  Matrix B_;
  Vector b_;
  Eigen::PartialPivLU<Matrix> lu_;
  double condition_;
  double sigma_max_;
  double sigma_min_;
};

enum class FstarSource { none, analytic, reference_run };

struct Problem {
  ObjectivePtr objective;
  FeasibleSet set;
  Vector x0;
  std::string label;
  std::optional<double> fstar;
  FstarSource fstar_source = FstarSource::none;

  /// Validates that x0 is feasible and dimensions agree; takes f* from the
  /// objective's known_fstar when present.
  Problem(ObjectivePtr objective, FeasibleSet set, Vector x0,
          std::string label);
};

/// min over C̃ = B⁻¹(C − b) of f̃(y) = f(By + b), started from B⁻¹(x0 − b).
/// Iterates map back to the original problem via x = By + b.
Problem transform_problem(const Problem& p, const AffineMap& map);

/// Triples of constants for the projection onto {½‖x‖² ≤ 1} seen through
/// f(By): textbook closed forms and sampled oracles.
struct ProjectionConstants {
  double L_closed_form;
  double alpha_closed_form;
  double c_closed_form;
  double L_oracle;
  double alpha_oracle;
  double c_oracle;
};

ProjectionConstants example_projection_constants(const Matrix& B,
                                                 const Vector& xbar,
                                                 int samples = 20000,
                                                 std::uint64_t seed = 0);

}  // namespace affw
