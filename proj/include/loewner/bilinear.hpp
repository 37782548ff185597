// Bilinear system identification from generalized transfer-function data:
// Carleman lifting of quadratic-bilinear systems, kernel evaluation, the
// generalized Loewner quintet, realization, and projection-based reduction.
#pragma once

#include <functional>
#include <vector>

#include "loewner/model.hpp"

namespace loewner {

// Quadratic-bilinear system x' = F1 x + F2 (x⊗x) + (G0 + G1 x) u, y = c x.
struct QuadraticBilinearSpec {
  RMat F1;  // n×n
  RMat F2;  // n×n²
  RMat G0;  // n×1
  RMat G1;  // n×n
  RMat c;   // 1×n

  Eigen::Index n() const { return F1.rows(); }
  void validate() const;
};

// Bilinear lift of the quadratic system on the state [x, x⊗x]. Only the
// quadratic truncation level is supported.
BilinearModel carleman(const QuadraticBilinearSpec& spec, int level = 2);

// Kernel value H_l(s_1..s_l) = C Φ(s_1) N Φ(s_2) N ... N Φ(s_l) B with
// Φ(s) = (sE−A)⁻¹. l = 1 is the linear transfer without feed-through.
Cplx eval_generalized_tf(const BilinearModel& model,
                         const std::vector<Cplx>& points);

// Interpolation chains. Right tuples grow by prepending the newest point,
// left tuples by appending it; a chain restarts every `chain_depth` points
// (0 means one full-length chain per side). Kernel orders stay bounded by
// twice the chain depth.
struct InterpolationTuples {
  std::vector<Cplx> lambda_points;
  std::vector<Cplx> mu_points;
  Eigen::Index chain_depth = 0;

  Eigen::Index k() const { return Eigen::Index(lambda_points.size()); }
  std::vector<Cplx> right_tuple(Eigen::Index i) const;
  std::vector<Cplx> left_tuple(Eigen::Index j) const;
  void validate() const;
};

InterpolationTuples make_tuples(const std::vector<Cplx>& right,
                                const std::vector<Cplx>& left,
                                Eigen::Index chain_depth = 0);

// The five data matrices of the generalized framework.
struct BilinearLoewnerSet {
  Mat L;   // k×k, equals −O E R for model-backed data
  Mat Ms;  // k×k, equals −O A R
  Mat T;   // k×k, equals  O N R
  Mat V;   // k×1, equals  O B
  Mat W;   // 1×k, equals  C R
};

using KernelOracle = std::function<Cplx(const std::vector<Cplx>&)>;

// Assembles the quintet from kernel values alone via the seam divided
// differences. The oracle is consulted once per distinct tuple.
BilinearLoewnerSet build_bilinear_set(const KernelOracle& oracle,
                                      const InterpolationTuples& tuples);

// Same quintet through the factored observability/controllability products;
// the independent computation path used to cross-check the assembly.
BilinearLoewnerSet factored_loewner_set(const BilinearModel& model,
                                        const InterpolationTuples& tuples);

// Order-k realization (−L, −Ms, T, V, W); L must be well conditioned.
BilinearModel realize_bilinear(const BilinearLoewnerSet& set);

// Projection onto the r dominant directions of [L, Ms] / [L; Ms].
BilinearModel reduce_bilinear(const BilinearLoewnerSet& set, Eigen::Index r);

}  // namespace loewner
