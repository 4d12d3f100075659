#include "affw/problems.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace affw {

double Objective::value(const Vector& x) const {
  require_dim(x, dim(), "Objective::value");
  ++value_calls_;
  return compute_value(x);
}

Vector Objective::gradient(const Vector& x) const {
  require_dim(x, dim(), "Objective::gradient");
  ++gradient_calls_;
  return compute_gradient(x);
}

// --- quadratic -------------------------------------------------------------

QuadraticObjective::QuadraticObjective(Matrix hessian, Vector minimizer,
                                       double offset)
    : hessian_(std::move(hessian)),
      minimizer_(std::move(minimizer)),
      offset_(offset) {
  if (hessian_.rows() != hessian_.cols() ||
      hessian_.rows() != minimizer_.size()) {
    throw InputError("QuadraticObjective: Hessian/minimizer size mismatch");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(hessian_);
  known_L = eig.eigenvalues().maxCoeff();
  known_mu = eig.eigenvalues().minCoeff();
}

std::optional<double> QuadraticObjective::curvature(const Vector& d) const {
  return d.dot(hessian_ * d);
}

double QuadraticObjective::compute_value(const Vector& x) const {
  const Vector e = x - minimizer_;
  return 0.5 * e.dot(hessian_ * e) + offset_;
}

Vector QuadraticObjective::compute_gradient(const Vector& x) const {
  return hessian_ * (x - minimizer_);
}

BallMinimum minimize_quadratic_on_ball(const QuadraticObjective& f,
                                       double radius, const Vector& center) {
  require_dim(center, f.dim(), "minimize_quadratic_on_ball");
  if (!(radius > 0.0)) {
    throw InputError("minimize_quadratic_on_ball: radius must be > 0");
  }
  if (!(*f.known_mu > 0.0)) {
    throw InputError("minimize_quadratic_on_ball: Hessian must be positive "
                     "definite");
  }
  const Vector a = f.minimizer() - center;
  if (a.norm() <= radius) return {f.minimizer(), f.offset()};

  // (H + λI)u = Ha with ‖u‖ = radius; ‖u(λ)‖ decreases in λ.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(f.hessian());
  const Vector h = eig.eigenvalues();
  const Vector a_rot = eig.eigenvectors().transpose() * a;
  auto u_of = [&](double lambda) {
    return Vector(h.array() * a_rot.array() / (h.array() + lambda));
  };
  double lo = 0.0;
  double hi = (h.array() * a_rot.array()).matrix().norm() / radius;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (u_of(mid).norm() > radius ? lo : hi) = mid;
  }
  Vector u = eig.eigenvectors() * u_of(hi);
  u *= radius / u.norm();
  const Vector x = center + u;
  return {x, f.value(x)};
}

// --- projection ------------------------------------------------------------

ProjectionObjective::ProjectionObjective(Vector target)
    : target_(std::move(target)) {
  known_L = 1.0;
  known_mu = 1.0;
}

double ProjectionObjective::compute_value(const Vector& x) const {
  return 0.5 * (x - target_).squaredNorm();
}

Vector ProjectionObjective::compute_gradient(const Vector& x) const {
  return x - target_;
}

std::shared_ptr<ProjectionObjective> make_projection_objective(
    const Vector& xbar) {
  return std::make_shared<ProjectionObjective>(xbar);
}

std::shared_ptr<ProjectionObjective> make_projection_objective(
    const Vector& xbar, double ball_radius) {
  if (!(ball_radius > 0.0)) {
    throw InputError("make_projection_objective: radius must be > 0");
  }
  auto f = make_projection_objective(xbar);
  const double excess = xbar.norm() - ball_radius;
  f->known_fstar = excess > 0.0 ? 0.5 * excess * excess : 0.0;
  return f;
}

// --- empirical risk --------------------------------------------------------

std::string to_string(Loss loss) {
  return loss == Loss::quadratic ? "quadratic" : "logistic";
}

double logistic_loss(double s, double y) {
  const double z = -y * s;
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

namespace {

// σ(t) = 1/(1 + e^{−t}) without overflow.
double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

ErmObjective::ErmObjective(std::shared_ptr<const Dataset> data, Loss loss)
    : data_(std::move(data)), loss_(loss) {
  if (!data_ || data_->size() == 0) {
    throw DataError("ErmObjective: dataset is empty");
  }
  if (loss_ == Loss::logistic) {
    for (Eigen::Index i = 0; i < data_->labels.size(); ++i) {
      const double y = data_->labels[i];
      if (y != 1.0 && y != -1.0) {
        throw DataError("ErmObjective: logistic loss needs labels in "
                        "{-1, +1}; row " + std::to_string(i + 1) + " has " +
                        std::to_string(y));
      }
    }
  }
  const double n = static_cast<double>(data_->size());
  const Matrix gram = data_->features.transpose() * data_->features;
  const double top = Eigen::SelfAdjointEigenSolver<Matrix>(gram, Eigen::EigenvaluesOnly)
                         .eigenvalues()
                         .maxCoeff();
  known_L = loss_ == Loss::quadratic ? top / n : top / (4.0 * n);
}

std::optional<double> ErmObjective::curvature(const Vector& d) const {
  if (loss_ != Loss::quadratic) return std::nullopt;
  return (data_->features * d).squaredNorm() /
         static_cast<double>(data_->size());
}

double ErmObjective::compute_value(const Vector& x) const {
  const Vector s = data_->features * x;
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double y = data_->labels[i];
    if (loss_ == Loss::quadratic) {
      total += 0.5 * (s[i] - y) * (s[i] - y);
    } else {
      total += logistic_loss(s[i], y);
    }
  }
  return total / static_cast<double>(s.size());
}

Vector ErmObjective::compute_gradient(const Vector& x) const {
  const Vector s = data_->features * x;
  Vector r(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double y = data_->labels[i];
    r[i] = loss_ == Loss::quadratic ? s[i] - y : -y * sigmoid(-y * s[i]);
  }
  return data_->features.transpose() * r / static_cast<double>(s.size());
}

std::shared_ptr<ErmObjective> make_erm_objective(
    std::shared_ptr<const Dataset> data, Loss loss) {
  return std::make_shared<ErmObjective>(std::move(data), loss);
}

// --- affine wrapper --------------------------------------------------------

AffineObjective::AffineObjective(ObjectivePtr inner, Matrix B, Vector b)
    : inner_(std::move(inner)), B_(std::move(B)), b_(std::move(b)) {
  if (!inner_ || B_.rows() != inner_->dim() || b_.size() != B_.rows()) {
    throw InputError("AffineObjective: dimension mismatch");
  }
}

namespace {

using LongVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

// By + b accumulated in extended precision: for ill-conditioned B the
// double-precision product loses about log10 κ(B) digits to cancellation.
Vector affine_image(const Matrix& B, const Vector& b, const Vector& y) {
  const LongVector yl = y.cast<long double>();
  LongVector out = b.cast<long double>();
  for (Eigen::Index j = 0; j < B.cols(); ++j) {
    out += B.col(j).cast<long double>() * yl[j];
  }
  return out.cast<double>();
}

}  // namespace

std::optional<double> AffineObjective::curvature(const Vector& d) const {
  return inner_->curvature(affine_image(B_, Vector::Zero(B_.rows()), d));
}

double AffineObjective::compute_value(const Vector& y) const {
  return inner_->value(affine_image(B_, b_, y));
}

Vector AffineObjective::compute_gradient(const Vector& y) const {
  return B_.transpose() * inner_->gradient(affine_image(B_, b_, y));
}

// --- linear minimization oracles -------------------------------------------

Vector lmo_ball(double radius, const Vector& center, const Vector& g) {
  require_dim(g, center.size(), "lmo_ball");
  const double n = g.norm();
  if (n == 0.0) throw DegenerateGradient();
  return center - (radius / n) * g;
}

Vector lmo_ellipsoid(const Matrix& shape, double level_sq, const Vector& g,
                     const Vector& center) {
  require_dim(g, shape.rows(), "lmo_ellipsoid");
  require_dim(center, shape.rows(), "lmo_ellipsoid");
  Eigen::LLT<Matrix> llt(shape);
  if (llt.info() != Eigen::Success) {
    throw InputError("lmo_ellipsoid: shape matrix is not positive definite");
  }
  const Vector Ainv_g = llt.solve(g);
  const double q = g.dot(Ainv_g);
  if (!(q > 0.0)) throw DegenerateGradient();
  return center - std::sqrt(level_sq) * Ainv_g / std::sqrt(q);
}

// --- feasible sets ---------------------------------------------------------

FeasibleSet::FeasibleSet(double radius, Vector center,
                         std::optional<Matrix> factor)
    : radius_(radius), center_(std::move(center)), factor_(std::move(factor)) {
  if (!(radius_ > 0.0)) throw InputError("FeasibleSet: radius must be > 0");
  if (center_.size() < 1) throw InputError("FeasibleSet: empty center");
  if (factor_) {
    if (factor_->rows() != center_.size() || factor_->cols() != center_.size()) {
      throw InputError("FeasibleSet: factor dimension mismatch");
    }
    factor_lu_.emplace(*factor_);
    if (!(std::abs(factor_lu_->determinant()) > 0.0)) {
      throw InputError("FeasibleSet: factor is singular");
    }
  }
}

FeasibleSet FeasibleSet::ball(double radius, const Vector& center) {
  return FeasibleSet(radius, center, std::nullopt);
}

FeasibleSet FeasibleSet::ball(double radius, Eigen::Index dim) {
  return ball(radius, Vector::Zero(dim));
}

FeasibleSet FeasibleSet::ellipsoid(const Matrix& shape, double level_sq,
                                   const Vector& center) {
  if (shape.rows() != shape.cols() || shape.rows() != center.size()) {
    throw InputError("FeasibleSet::ellipsoid: dimension mismatch");
  }
  if (!(level_sq > 0.0)) {
    throw InputError("FeasibleSet::ellipsoid: level must be > 0");
  }
  Eigen::LLT<Matrix> llt(shape);
  if (llt.info() != Eigen::Success) {
    throw InputError(
        "FeasibleSet::ellipsoid: shape matrix is not positive definite");
  }
  Matrix F = llt.matrixU();
  return FeasibleSet(std::sqrt(level_sq), center, std::move(F));
}

FeasibleSet FeasibleSet::from_factor(const Matrix& factor, double radius,
                                     const Vector& center) {
  return FeasibleSet(radius, center, factor);
}

Matrix FeasibleSet::shape_matrix() const {
  if (!factor_) return Matrix::Identity(dim(), dim());
  return factor_->transpose() * *factor_;
}

double FeasibleSet::scaled_distance(const Vector& x) const {
  require_dim(x, dim(), "FeasibleSet");
  if (!factor_) return (x - center_).norm() / radius_;
  return (*factor_ * (x - center_)).norm() / radius_;
}

bool FeasibleSet::contains(const Vector& x, double tol) const {
  return scaled_distance(x) <= 1.0 + tol;
}

Vector FeasibleSet::boundary_point(const Vector& direction) const {
  const double s = scaled_distance(center_ + direction);
  if (!(s > 0.0)) throw InputError("FeasibleSet::boundary_point: zero direction");
  return center_ + direction / s;
}

Vector FeasibleSet::lmo(const Vector& g) const {
  require_dim(g, dim(), "FeasibleSet::lmo");
  ++lmo_calls_;
  if (!factor_) return lmo_ball(radius_, center_, g);
  // v = c − r F⁻¹w/‖w‖ with w = F⁻ᵀg.
  const Vector w = factor_lu_->transpose().solve(g);
  const double n = w.norm();
  if (n == 0.0) throw DegenerateGradient();
  return center_ - (radius_ / n) * factor_lu_->solve(w);
}

Vector FeasibleSet::random_member(Rng& rng) const {
  const Vector u = random_unit_vector(rng, dim());
  const double t =
      std::pow(uniform01(rng), 1.0 / static_cast<double>(dim()));
  const Vector step = radius_ * t * u;
  if (!factor_) return center_ + step;
  return center_ + factor_lu_->solve(step);
}

FeasibleSet FeasibleSet::pulled_back(const Matrix& B, const Vector& b) const {
  if (B.rows() != dim() || B.cols() != dim() || b.size() != dim()) {
    throw InputError("FeasibleSet::pulled_back: dimension mismatch");
  }
  Eigen::PartialPivLU<Matrix> lu(B);
  Matrix F = factor_ ? Matrix(*factor_ * B) : B;
  return FeasibleSet(radius_, lu.solve(center_ - b), std::move(F));
}

// --- affine maps -----------------------------------------------------------

AffineMap::AffineMap(Matrix B, Vector b) : B_(std::move(B)), b_(std::move(b)) {
  if (B_.rows() != B_.cols() || B_.rows() != b_.size() || B_.rows() < 1) {
    throw InputError("AffineMap: B must be square and match b");
  }
  Eigen::JacobiSVD<Matrix> svd(B_);
  const auto& s = svd.singularValues();
  sigma_max_ = s.maxCoeff();
  sigma_min_ = s.minCoeff();
  if (!(sigma_min_ > 0.0) || sigma_max_ / sigma_min_ > 1e15) {
    throw InputError("AffineMap: B is not invertible");
  }
  condition_ = sigma_max_ / sigma_min_;
  lu_.compute(B_);
}

AffineMap AffineMap::identity(Eigen::Index dim) {
  return AffineMap(Matrix::Identity(dim, dim), Vector::Zero(dim));
}

AffineMap AffineMap::random(Eigen::Index dim, double condition_number,
                            std::uint64_t seed) {
  if (dim < 1 || !(condition_number >= 1.0)) {
    throw InputError("AffineMap::random: need dim >= 1 and condition >= 1");
  }
  Rng rng(seed);
  auto orthogonal = [&]() {
    Matrix G(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) G.col(j) = random_gaussian(rng, dim);
    Eigen::HouseholderQR<Matrix> qr(G);
    return Matrix(qr.householderQ());
  };
  const Matrix U = orthogonal();
  const Matrix V = orthogonal();
  Vector sigma(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double t = dim == 1 ? 0.0 : static_cast<double>(i) / (dim - 1);
    sigma[i] = std::pow(condition_number, t);
  }
  if (dim == 1) sigma[0] = 1.0;
  Matrix B = U * sigma.asDiagonal() * V.transpose();
  Vector b = random_gaussian(rng, dim);
  return AffineMap(std::move(B), std::move(b));
}

Vector AffineMap::forward(const Vector& y) const {
  require_dim(y, dim(), "AffineMap::forward");
  return B_ * y + b_;
}

Vector AffineMap::inverse(const Vector& x) const {
  require_dim(x, dim(), "AffineMap::inverse");
  return lu_.solve(x - b_);
}

// --- problems --------------------------------------------------------------

Problem::Problem(ObjectivePtr objective_, FeasibleSet set_, Vector x0_,
                 std::string label_)
    : objective(std::move(objective_)),
      set(std::move(set_)),
      x0(std::move(x0_)),
      label(std::move(label_)) {
  if (!objective) throw InputError("Problem: null objective");
  if (objective->dim() != set.dim()) {
    throw InputError("Problem: objective/set dimension mismatch");
  }
  require_dim(x0, set.dim(), "Problem x0");
  if (!set.contains(x0, FeasibleSet::kMembershipTol)) {
    throw InputError("Problem: x0 is not a member of the feasible set");
  }
  if (objective->known_fstar) {
    fstar = objective->known_fstar;
    fstar_source = FstarSource::analytic;
  }
}

Problem transform_problem(const Problem& p, const AffineMap& map) {
  if (map.dim() != p.set.dim()) {
    throw InputError("transform_problem: map/problem dimension mismatch");
  }
  auto f = std::make_shared<AffineObjective>(p.objective, map.matrix(),
                                             map.offset());
  if (p.objective->known_L) {
    f->known_L = *p.objective->known_L * map.sigma_max() * map.sigma_max();
  }
  if (p.objective->known_mu) {
    f->known_mu = *p.objective->known_mu * map.sigma_min() * map.sigma_min();
  }
  f->known_fstar = p.objective->known_fstar;

  std::ostringstream label;
  label.precision(3);
  label << p.label << "|kappa=" << map.condition_number();
  Problem out(f, p.set.pulled_back(map.matrix(), map.offset()),
              map.inverse(p.x0), label.str());
  out.fstar = p.fstar;
  out.fstar_source = p.fstar_source;
  return out;
}

ProjectionConstants example_projection_constants(const Matrix& B,
                                                 const Vector& xbar,
                                                 int samples,
                                                 std::uint64_t seed) {
  const AffineMap map(B, Vector::Zero(B.rows()));
  require_dim(xbar, map.dim(), "example_projection_constants");
  const double radius = std::sqrt(2.0);  // ½‖x‖² ≤ 1

  ProjectionConstants out{};
  out.L_closed_form = map.sigma_max();
  out.alpha_closed_form = map.sigma_min() / (std::sqrt(2.0) * map.sigma_max());
  out.c_closed_form = map.sigma_max() * (1.0 - xbar.norm());

  const FeasibleSet set =
      FeasibleSet::ball(radius, map.dim()).pulled_back(B, map.offset());
  out.L_oracle = map.sigma_max() * map.sigma_max();
  out.alpha_oracle =
      strong_convexity_oracle(set, Gauge::norm_ball(map.dim()),
                              ConvexityVariant::asymmetric,
                              std::max(100, std::min(samples, 4000)), seed)
          .alpha;

  const AffineObjective f(make_projection_objective(xbar), B, map.offset());
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  double c = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const Vector y = (i % 2 == 0)
                         ? set.boundary_point(random_unit_vector(rng, map.dim()))
                         : set.random_member(rng);
    c = std::min(c, f.gradient(y).norm());
  }
  out.c_oracle = c;
  return out;
}

}  // namespace affw
