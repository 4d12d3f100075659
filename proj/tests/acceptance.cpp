// Acceptance suite: one pass/fail line per criterion, seed 0.

#include <cstdio>
#include <functional>

#include "affw/verify.hpp"

namespace {

struct Criterion {
  int id;
  const char* tolerance;
  std::function<affw::CheckResult(const affw::VerifyOptions&)> check;
};

}  // namespace

int main() {
  using namespace affw;
  const Criterion criteria[] = {
      {1, "iterates 1e-8 (kappa 1e2), 1e-3 (kappa 1e6), < 1 s",
       check_affine_covariance},
      {2, "steps and constants 1e-6 rel, equal max constant, < 1 s",
       check_backtracking_invariance},
      {3, "L_k < 2 L_hat + 1e-6 after warm-up", check_backtracking_constant},
      {4, "L_hat <= 1.02 L/(c alpha) on >= 5 problems",
       check_directional_bound},
      {5, "rho <= theory + 0.02, gap 1e-10 in 200, fixed 1/L >= 1e4x slower",
       check_linear_rate},
      {6, "gamma >= min{1, 1/(2 L_hat)}, step ratio <= 2 after 5 iters",
       check_norm_backtracking_steps},
      {7, "recurrence slack 1e-10, C/(k+2)^2 bound, 500 iters",
       check_accelerated_sublinear},
      {8, "axioms 1e-10, dual 1%, scaling, level set, asymmetry 3 +- 1e-3",
       check_geometry},
      {9, "three inequalities, slack 1e-9, 1e4 samples", check_inequalities},
      {10, "hand traces exact", check_hand_traces},
  };
  const VerifyOptions opt;  // seed 0
  int failed = 0;
  double total = 0.0;
  for (const auto& c : criteria) {
    CheckResult r;
    try {
      r = c.check(opt);
    } catch (const Error& e) {
      r.name = "error";
      r.passed = false;
      r.detail = e.what();
    }
    total += r.seconds;
    if (!r.passed) ++failed;
    std::printf("[%s] %2d %-52s (%.2fs) tol: %s\n     %s\n",
                r.passed ? "PASS" : "FAIL", c.id, r.name.c_str(), r.seconds,
                c.tolerance, r.detail.c_str());
  }
  std::printf("%d/10 criteria passed in %.2fs\n", 10 - failed, total);
  return failed == 0 ? 0 : 1;
}
