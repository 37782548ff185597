// Shared scalar/matrix aliases and small numeric helpers.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

namespace loewner {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// Default relative threshold separating "numerically zero" singular values.
inline constexpr double kRankTol = 1e-10;

// Rank of a singular value list under a relative cutoff (relative to sv[0]).
inline int sv_rank(const RVec& sv, double tol = kRankTol) {
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * sv(0)) ++r;
  return r;
}

// 1-norm reciprocal condition estimate of a square matrix via its LU.
// Returns 0 for an exactly singular factorization.
double rcond_lu(const Mat& m);

// Orthonormal basis of the null space of m (columns), relative tol on sv.
Mat null_basis(const Mat& m, double tol = kRankTol);

// n points logarithmically spaced in [lo, hi]; requires lo, hi > 0.
std::vector<double> log_space(double lo, double hi, int n);

// Deterministic 64-bit generator (splitmix-seeded xoshiro-style PCG step).
// Used everywhere randomness is needed so runs are byte reproducible.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  std::uint64_t next_u64() {
    // splitmix64: small state, passes BigCrush, fully deterministic.
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // Uniform in [0, 1).
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }
  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Standard normal via Box-Muller (always consumes two uniforms).
  double normal();

private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Log verbosity from the LOEWNER_LOG environment variable.
// Unset/empty or "quiet" -> 0, "info" -> 1, "debug" -> 2.
int log_level();
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace loewner
