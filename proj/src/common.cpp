#include "affw/common.hpp"

namespace affw {

Vector random_gaussian(Rng& rng, Eigen::Index dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = normal(rng);
  return v;
}

Vector random_unit_vector(Rng& rng, Eigen::Index dim) {
  for (;;) {
    Vector v = random_gaussian(rng, dim);
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace affw
