// Two-variable Loewner interpolation: frequency × one real parameter.
// Orders are detected per axis from one-variable slice Loewner matrices, the
// coefficients come from the null space of the stacked 2-D Loewner matrix,
// and evaluation is barycentric (ratio form) or via a structured resolvent.
#pragma once

#include <utility>
#include <vector>

#include "loewner/model.hpp"

namespace loewner {

// Scalar response surface sampled on a tensor grid. Rows follow the frequency
// split (lambda block above mu block), columns the parameter split (pi block
// before nu block).
struct ParamGrid {
  Vec lambda, mu;  // frequency points, n̄ + n̲
  RVec pi, nu;     // parameter points, m̄ + m̲
  Mat phi;         // (n̄+n̲) × (m̄+m̲)

  Eigen::Index n_bar() const { return lambda.size(); }
  Eigen::Index n_low() const { return mu.size(); }
  Eigen::Index m_bar() const { return pi.size(); }
  Eigen::Index m_low() const { return nu.size(); }
  void validate() const;
};

// Build a grid from raw axis lists and an N×M value table (row k = freq k).
// Each axis is sorted, then alternates between its two blocks so both blocks
// span the whole range.
ParamGrid make_grid(const std::vector<Cplx>& freq,
                    const std::vector<double>& par, const Mat& values);

// Re-split the same data so that n̄ = r+1 and m̄ = q+1: the leading points of
// each sorted axis become the support blocks.
ParamGrid repartition(const ParamGrid& grid, int r, int q);

enum class GridAxis { Frequency, Parameter };

// One-variable Loewner matrix of a single row/column of the table.
// Frequency axis: divided differences along the frequency points at the
// index-th parameter (n̲×n̄). Parameter axis: along the parameters at the
// index-th frequency (m̲×m̄).
Mat slice_loewner(const ParamGrid& grid, GridAxis axis, Eigen::Index index);

// (r, q): maxima of the slice Loewner ranks over all parameters / frequencies.
std::pair<int, int> detect_orders(const ParamGrid& grid, double tol = kRankTol);

// Stacked 2-D Loewner matrix of a grid re-partitioned to n̄=r+1, m̄=q+1:
// rows e_i ⊗ L_{λᵢ}, rows L_{πⱼ} ⊗ e_j, then the product divided differences;
// (n̄m̲ + n̲m̄ + n̲m̲) × n̄m̄. For exact data of these orders the rank is n̄m̄−1.
Mat assemble_2d(const ParamGrid& grid, int r, int q);

// Null vector of the stacked matrix reshaped to (r+1)×(q+1), unit norm,
// first nonzero entry rotated real-positive. Deficiency 0 returns the
// smallest singular direction with a warning; deficiency > 1 throws.
Mat barycentric_coeffs(const Mat& l2hat, int r, int q, double tol = kRankTol);

struct ParametricBarycentricModel {
  Vec lambda_support;  // r+1
  RVec pi_support;     // q+1
  Mat c;               // (r+1)×(q+1) coefficients, unit norm
  Mat w;               // (r+1)×(q+1) interpolated values
  int r = 0, q = 0;
};

// Ratio form: Σ cᵢⱼ wᵢⱼ/((ξ−λᵢ)(ρ−πⱼ)) / Σ cᵢⱼ/((ξ−λᵢ)(ρ−πⱼ)); support
// points are handled by the limit convention (single-axis barycentric / wᵢⱼ).
Cplx eval_parametric(const ParametricBarycentricModel& model, Cplx xi, double rho);

// Structured-resolvent evaluation of the same function; agrees with the
// ratio form wherever both are defined.
Cplx eval_parametric_block(const ParametricBarycentricModel& model, Cplx xi,
                           double rho);

// Symmetrizes the coefficients so H(ξ̄,ρ) = H̄(ξ,ρ); requires the frequency
// support to be closed under conjugation.
ParametricBarycentricModel realify_coeffs(const ParametricBarycentricModel& model);

// Composite: grid, order detection, re-partition, null-space coefficients.
ParametricBarycentricModel fit_parametric(const std::vector<Cplx>& freq,
                                          const std::vector<double>& par,
                                          const Mat& values,
                                          double tol = kRankTol);

}  // namespace loewner
