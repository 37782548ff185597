// Shared model representations, transfer evaluation, and time simulation.
#pragma once

#include <optional>
#include <vector>

#include "loewner/errors.hpp"
#include "loewner/types.hpp"

namespace loewner {

enum class Field { Real, Complex };

// Descriptor realization E x' = A x + B u, y = C x + D u.
// E may be singular (improper transfer parts live in the pencil at infinity).
// step empty: continuous time; step = h: discrete with sample period h.
struct DescriptorModel {
  Mat E, A, B, C, D;
  Field field = Field::Complex;
  std::optional<double> step;

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index m() const { return B.cols(); }
  Eigen::Index p() const { return C.rows(); }
  bool discrete() const { return step.has_value(); }

  // Shape invariants; throws Precondition on violation.
  void validate() const;
  // True when every entry has negligible imaginary part (tol relative).
  bool effectively_real(double tol = 1e-12) const;
  // Drops imaginary parts and marks the field real. Precondition: effectively_real.
  DescriptorModel to_real(double tol = 1e-9) const;
};

// Single-input single-output bilinear system E x' = A x + N x u + B u, y = C x.
struct BilinearModel {
  Mat E, A, N, B, C;
  Field field = Field::Complex;

  Eigen::Index n() const { return A.rows(); }
  void validate() const;
  bool effectively_real(double tol = 1e-12) const;
  BilinearModel to_real(double tol = 1e-9) const;
};

// One frequency-domain measurement: response is p×m.
struct FrequencySample {
  Cplx point;
  Mat response;
};

// Uniformly sampled input/output record. u is N×m, y (optional) N×p.
struct TimeSeries {
  double step = 0.0;
  RMat u;
  RMat y;
  bool has_y = false;
  long start_index = 0;

  Eigen::Index length() const { return u.rows(); }
  void validate() const;
};

// C(ξE−A)⁻¹B + D. Throws SingularPencil when ξ is numerically a pole
// (reciprocal condition estimate < 1e-13).
Mat eval_transfer(const DescriptorModel& model, Cplx xi);

// Recursion E x_{k+1} = A x_k + B u_k, y_k = C x_k + D u_k, x(0) = x0.
// Throws SingularE when E is not invertible.
TimeSeries simulate_discrete(const DescriptorModel& model,
                             const TimeSeries& input, const Vec& x0);

// Fixed-step integration of E x' = A x + N x u + B u, y = C x, x(0)=0.
// scheme: "rk4" (default). The step is input.step; internal sub-stepping
// keeps the explicit scheme inside its stability region.
TimeSeries simulate_bilinear(const BilinearModel& model,
                             const TimeSeries& input,
                             const std::string& scheme = "rk4");

// Closure under conjugation: for every (z, Φ) the result also holds (z̄, Φ̄).
// Output sorted by (imag, real); idempotent. Throws ConflictingData when both
// (z, Φ₁) and (z̄, Φ₂) are present with Φ₂ inconsistent with conj(Φ₁).
std::vector<FrequencySample> conjugate_close(
    const std::vector<FrequencySample>& samples);

// Generalized eigenvalues of (A, E); infinite eigenvalues reported as
// Cplx(inf, 0). Detection via the reversed pencil with a relative threshold.
std::vector<Cplx> pencil_eigenvalues(const Mat& A, const Mat& E,
                                     double inf_tol = 1e-7);

}  // namespace loewner
