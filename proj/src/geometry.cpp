#include "affw/geometry.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace affw {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Membership in the membership tests of the sampling oracles.
constexpr double kOracleTol = 1e-12;

}  // namespace

Vector ConvexBody::boundary_point(const Vector& direction) const {
  const Vector c = interior_point();
  double lo = 0.0;
  double hi = 1.0;
  while (contains(c + hi * direction, 0.0)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw InputError("boundary_point: set is unbounded");
  }
  while (hi - lo > 1e-15 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (contains(c + mid * direction, 0.0)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return c + lo * direction;
}

Gauge::Gauge(Eigen::Index dim,
             std::variant<NormBallBody, EllipsoidBody, ShiftedBallBody> body)
    : dim_(dim), body_(std::move(body)) {}

Gauge Gauge::norm_ball(Eigen::Index dim, double radius) {
  if (dim < 1) throw InputError("Gauge::norm_ball: dimension must be >= 1");
  if (!(radius > 0.0)) throw InputError("Gauge::norm_ball: radius must be > 0");
  return Gauge(dim, NormBallBody{radius});
}

Gauge Gauge::ellipsoid(const Matrix& shape) {
  if (shape.rows() != shape.cols() || shape.rows() < 1) {
    throw InputError("Gauge::ellipsoid: shape matrix must be square");
  }
  if (!shape.isApprox(shape.transpose(), 1e-12)) {
    throw InputError("Gauge::ellipsoid: shape matrix must be symmetric");
  }
  Gauge g(shape.rows(), EllipsoidBody{shape});
  g.llt_.compute(shape);
  if (g.llt_.info() != Eigen::Success) {
    throw InputError("Gauge::ellipsoid: shape matrix must be positive definite");
  }
  return g;
}

Gauge Gauge::shifted_ball(const Vector& center, double radius) {
  if (center.size() < 1) throw InputError("Gauge::shifted_ball: empty center");
  if (!(radius > 0.0) || !(center.norm() < radius)) {
    throw InputError(
        "Gauge::shifted_ball: need radius > 0 and ||center|| < radius");
  }
  return Gauge(center.size(), ShiftedBallBody{center, radius});
}

std::string Gauge::id() const {
  std::ostringstream os;
  os.precision(6);
  std::visit(Overloaded{
                 [&](const NormBallBody& b) {
                   os << "l2_ball(d=" << dim_ << ",r=" << b.radius << ")";
                 },
                 [&](const EllipsoidBody&) { os << "ellipsoid(d=" << dim_ << ")"; },
                 [&](const ShiftedBallBody& b) {
                   os << "shifted_ball(d=" << dim_ << ",|c|=" << b.center.norm()
                      << ",r=" << b.radius << ")";
                 },
             },
             body_);
  return os.str();
}

bool Gauge::is_symmetric() const {
  return !std::holds_alternative<ShiftedBallBody>(body_);
}

double Gauge::eval(const Vector& x) const {
  require_dim(x, dim_, "Gauge::eval");
  return std::visit(
      Overloaded{
          [&](const NormBallBody& b) { return x.norm() / b.radius; },
          [&](const EllipsoidBody& b) {
            return std::sqrt(std::max(0.0, x.dot(b.shape * x)));
          },
          [&](const ShiftedBallBody& b) {
            if (x.squaredNorm() == 0.0) return 0.0;
            // x ∈ τQ  ⇔  ‖x − τc‖ ≤ τr; membership is monotone in τ.
            auto member = [&](double tau) {
              return (x - tau * b.center).norm() <= tau * b.radius;
            };
            double hi = 1.0;
            double lo = 0.0;
            if (member(hi)) {
              while (member(0.5 * hi)) hi *= 0.5;
              lo = 0.5 * hi;
            } else {
              lo = hi;
              hi *= 2.0;
              while (!member(hi)) {
                lo = hi;
                hi *= 2.0;
              }
            }
            while (hi - lo > kGaugeBisectionTol * hi) {
              const double mid = 0.5 * (lo + hi);
              if (member(mid)) {
                hi = mid;
              } else {
                lo = mid;
              }
            }
            return 0.5 * (lo + hi);
          },
      },
      body_);
}

double Gauge::dual(const Vector& v) const {
  require_dim(v, dim_, "Gauge::dual");
  return std::visit(
      Overloaded{
          [&](const NormBallBody& b) { return b.radius * v.norm(); },
          [&](const EllipsoidBody&) {
            return std::sqrt(std::max(0.0, v.dot(llt_.solve(v))));
          },
          [&](const ShiftedBallBody& b) {
            return v.dot(b.center) + b.radius * v.norm();
          },
      },
      body_);
}

double Gauge::analytic_asymmetry() const {
  if (const auto* b = std::get_if<ShiftedBallBody>(&body_)) {
    const double c = b->center.norm();
    return (b->radius + c) / (b->radius - c);
  }
  return 1.0;
}

Gauge::Radii Gauge::euclidean_radii() const {
  return std::visit(
      Overloaded{
          [](const NormBallBody& b) { return Radii{b.radius, b.radius}; },
          [](const EllipsoidBody& e) {
            Eigen::SelfAdjointEigenSolver<Matrix> eig(e.shape,
                                                      Eigen::EigenvaluesOnly);
            return Radii{1.0 / std::sqrt(eig.eigenvalues().maxCoeff()),
                         1.0 / std::sqrt(eig.eigenvalues().minCoeff())};
          },
          [](const ShiftedBallBody& b) {
            const double c = b.center.norm();
            return Radii{b.radius - c, b.radius + c};
          },
      },
      body_);
}

Vector Gauge::unit_level_point(const Vector& u) const {
  const double w = eval(u);
  if (!(w > 0.0)) throw InputError("Gauge::unit_level_point: zero direction");
  return u / w;
}

AsymmetryEstimate asymmetry_constant(const Gauge& gauge, int samples,
                                     std::uint64_t seed) {
  if (samples < 1) throw InputError("asymmetry_constant: samples must be >= 1");
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Vector u = random_unit_vector(rng, gauge.dim());
    worst = std::max(worst, gauge.eval(u) / gauge.eval(-u));
  }
  AsymmetryEstimate est{gauge.analytic_asymmetry(), worst};
  if (est.sampled > est.analytic + 1e-9) {
    throw InvariantError("asymmetry_constant: sampled ratio " +
                         std::to_string(est.sampled) +
                         " exceeds analytic bound " +
                         std::to_string(est.analytic));
  }
  return est;
}

std::string to_string(ConvexityVariant v) {
  return v == ConvexityVariant::plain ? "plain" : "asymmetric";
}

namespace {

struct ChordSample {
  Vector chord_point;  // γx + (1−γ)y
  Vector z;            // ω(z) = 1
  double inset;        // multiplier of α in front of z
};

std::vector<ChordSample> draw_chord_samples(const ConvexBody& set,
                                            const Gauge& gauge,
                                            ConvexityVariant variant,
                                            int budget, std::uint64_t seed) {
  if (set.dim() != gauge.dim()) {
    throw InputError("strong convexity oracle: set/gauge dimension mismatch");
  }
  Rng rng(seed);
  std::vector<ChordSample> out;
  out.reserve(static_cast<std::size_t>(budget));
  const Vector center = set.interior_point();
  for (int i = 0; i < budget; ++i) {
    // Odd samples pair x with a nearly opposite boundary point (the long
    // chords where insets are tightest); even samples are independent.
    const Vector u = random_unit_vector(rng, set.dim());
    Vector w = random_unit_vector(rng, set.dim());
    if (i % 2 == 1) w = -u + 0.5 * uniform01(rng) * w;
    const Vector x = set.boundary_point(u);
    const Vector y = set.boundary_point(w);
    double gamma = uniform01(rng);
    while (gamma <= 0.0) gamma = uniform01(rng);
    if (i % 2 == 1) {
      // Log-uniform in [1e-6, 1], mirrored: insets bind near the endpoints.
      gamma = std::exp(std::log(1e-6) * gamma);
      if (uniform01(rng) < 0.5) gamma = 1.0 - gamma;
      if (gamma <= 0.0 || gamma >= 1.0) gamma = 0.5;
    }
    Vector zg = gamma * x + (1.0 - gamma) * y;

    // Every other z points outward from the interior point through the
    // chord point, the direction that leaves the set soonest on a ball.
    Vector dir = random_unit_vector(rng, set.dim());
    if ((i / 2) % 2 == 1 && (zg - center).norm() > 0.0) dir = zg - center;
    const Vector z = gauge.unit_level_point(dir);

    const double wxy = gauge.eval(x - y);
    double inset = 0.0;
    if (variant == ConvexityVariant::plain) {
      inset = gamma * (1.0 - gamma) * wxy * wxy;
    } else {
      const double wyx = gauge.eval(y - x);
      inset = gamma * (1.0 - gamma) *
              ((1.0 - gamma) * wxy * wxy + gamma * wyx * wyx) / 2.0;
    }
    if (!set.contains(zg, 1e-9)) {
      throw DataError("strong convexity oracle: chord point left the set "
                      "(membership oracle is not convex)");
    }
    out.push_back({std::move(zg), z, inset});
  }
  return out;
}

bool all_contained(const ConvexBody& set, const std::vector<ChordSample>& s,
                   double alpha, int* failures = nullptr) {
  int bad = 0;
  for (const auto& c : s) {
    if (!set.contains(c.chord_point + alpha * c.inset * c.z, kOracleTol)) {
      ++bad;
      if (failures == nullptr) return false;
    }
  }
  if (failures != nullptr) *failures = bad;
  return bad == 0;
}

}  // namespace

AlphaCheck check_strong_convexity(const ConvexBody& set, const Gauge& gauge,
                                  ConvexityVariant variant, double alpha,
                                  int budget, std::uint64_t seed) {
  const auto samples = draw_chord_samples(set, gauge, variant, budget, seed);
  AlphaCheck out;
  out.tested = budget;
  all_contained(set, samples, alpha, &out.failures);
  out.passed = out.failures == 0;
  return out;
}

StrongConvexityCertificate strong_convexity_oracle(const ConvexBody& set,
                                                   const Gauge& gauge,
                                                   ConvexityVariant variant,
                                                   int budget,
                                                   std::uint64_t seed) {
  if (budget < 100) {
    throw InputError("strong_convexity_oracle: budget must be >= 100");
  }
  const auto samples = draw_chord_samples(set, gauge, variant, budget, seed);

  double lo = 0.0;
  double hi = 1.0;
  while (all_contained(set, samples, hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) break;
  }
  while (hi - lo > 1e-9 * hi && hi > 1e-14) {
    const double mid = 0.5 * (lo + hi);
    if (all_contained(set, samples, mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  StrongConvexityCertificate cert;
  cert.alpha = lo;
  cert.gauge_id = gauge.id();
  cert.variant = variant;
  cert.sample_budget = budget;
  cert.seed = seed;
  cert.status = CertificateStatus::sampled;
  return cert;
}

double scaling_alpha(const StrongConvexityCertificate& cert, double kappa) {
  if (cert.variant == ConvexityVariant::plain) return cert.alpha;
  return cert.alpha / (2.0 * kappa * kappa);
}

ScalingCheck scaling_inequality_check(const ConvexBody& set,
                                      const Gauge& gauge, double alpha,
                                      const Vector& x, const Vector& phi,
                                      double tol) {
  require_dim(x, set.dim(), "scaling_inequality_check");
  require_dim(phi, set.dim(), "scaling_inequality_check");
  if (!set.contains(x, 1e-9)) {
    throw InputError("scaling_inequality_check: x is outside the set");
  }
  if (phi.squaredNorm() == 0.0) {
    throw InputError("scaling_inequality_check: phi must be nonzero");
  }
  const Vector v = set.argmax_linear(phi);
  const double w = gauge.eval(v - x);
  const double slack = phi.dot(v - x) - alpha * gauge.dual(phi) * w * w;
  return {slack >= -tol, slack};
}

double level_set_alpha(double L, double mu, double R, double kappa) {
  if (!(mu > 0.0) || !(L >= mu) || !(R > 0.0) || !(kappa >= 1.0)) {
    throw InputError(
        "level_set_alpha: need L >= mu > 0, R > 0 and kappa >= 1");
  }
  return mu / (kappa * std::sqrt(2.0 * L * R));
}

}  // namespace affw
