// Loewner pencil construction from tangential frequency data, order
// detection, projection to a reduced descriptor realization, realification,
// and feed-through extraction.
#pragma once

#include <utility>
#include <vector>

#include "loewner/model.hpp"

namespace loewner {

// Tangential data: right triples (λᵢ, rᵢ, wᵢ) and left triples (μⱼ, lⱼ, vⱼ)
// stored in stacked form. R (m×n̄) and Wm (p×n̄) hold rᵢ/wᵢ as columns;
// Lt (n̲×p) and V (n̲×m) hold lⱼᵀ/vⱼᵀ as rows.
//
// After realify the point diagonals become 2×2 rotation blocks; they are then
// carried in Lambda_blk/M_blk and lambda/mu keep the original points purely
// for bookkeeping.
struct TangentialDataSet {
  Vec lambda;
  Mat R, Wm;
  Vec mu;
  Mat Lt, V;
  bool real_structured = false;
  Mat Lambda_blk, M_blk;

  Eigen::Index n_right() const { return R.cols(); }
  Eigen::Index n_left() const { return V.rows(); }
  Eigen::Index m() const { return R.rows(); }
  Eigen::Index p() const { return Wm.rows(); }
  Mat Lambda() const {
    return real_structured ? Lambda_blk : Mat(lambda.asDiagonal());
  }
  Mat Mmat() const { return real_structured ? M_blk : Mat(mu.asDiagonal()); }
  void validate() const;
};

struct LoewnerPencil {
  Mat L, Ms;  // n̲×n̄ Loewner and shifted Loewner
  Mat V;      // n̲×m
  Mat W;      // p×n̄
  TangentialDataSet data;
  bool real_structured = false;
};

enum class PartitionPolicy {
  SortedAlternate,  // sort by (imag, real), alternate, pairs stay together
  AsGiven,          // first half of the given order right, second half left
};

// Split frequency samples into right/left tangential data. SISO directions
// are 1; MIMO uses cyclic unit vectors shared within a conjugate pair.
TangentialDataSet partition_data(
    const std::vector<FrequencySample>& samples,
    PartitionPolicy policy = PartitionPolicy::SortedAlternate);

// 𝕃(j,i) = (vⱼᵀrᵢ − lⱼᵀwᵢ)/(μⱼ−λᵢ), 𝕄(j,i) = (μⱼvⱼᵀrᵢ − λᵢlⱼᵀwᵢ)/(μⱼ−λᵢ).
LoewnerPencil build_pencil(const TangentialDataSet& data);

// Relative Frobenius residuals of the two Sylvester identities the pencil
// satisfies by construction.
std::pair<double, double> sylvester_residual(const LoewnerPencil& pencil);

struct OrderReport {
  int r = 0;   // rank [𝕃, 𝕄]
  int nu = 0;  // rank 𝕃 (minimal order)
  RVec sv_rowcat, sv_colcat, sv_L;       // normalized singular values
  std::vector<Cplx> rank_violations;     // points where rank(z𝕃−𝕄) ≠ r
};
OrderReport detect_order(const LoewnerPencil& pencil, double tol = kRankTol);

// E=−Yᴴ𝕃X, A=−Yᴴ𝕄X, B=Yᴴ𝕍, C=𝕎X, D=0 with Y/X leading r singular vectors
// of [𝕃,𝕄] / [𝕃;𝕄].
DescriptorModel project_reduce(const LoewnerPencil& pencil, int r);

// Real-arithmetic transform: per conjugate pair the unitary
// J = (1/√2)[[1,1],[−i,i]] (pair ordered +imag first), identity on real
// points. Requires each side closed under conjugation.
TangentialDataSet realify(const TangentialDataSet& data);
LoewnerPencil realify_pencil(const LoewnerPencil& pencil);

struct PolynomialPart {
  Mat D;                       // p×m feed-through (zero when improper)
  bool improper = false;       // polynomial degree ≥ 1 detected
  TangentialDataSet corrected; // responses minus D (equals input when improper)
};
// Feed-through / polynomial-part analysis of a pencil with detected orders
// (r, ν), r > ν. Distinguishes a constant feed-through (one simple infinite
// pencil eigenvalue) from genuinely improper dynamics.
PolynomialPart extract_polynomial_part(const LoewnerPencil& pencil, int r, int nu);

// Subtract a feed-through from the responses: wᵢ ← wᵢ − D rᵢ, vⱼᵀ ← vⱼᵀ − lⱼᵀD.
// Valid on both point-form and realified data.
TangentialDataSet subtract_feedthrough(const TangentialDataSet& data, const Mat& D);

struct InterpolationReport {
  double max_violation = 0.0;
  std::vector<double> right_residuals, left_residuals;
  bool pass = false;
  double tol = 0.0;
};
// Verifies H(λᵢ)rᵢ = wᵢ and lⱼᵀH(μⱼ) = vⱼᵀ (point-form data only).
InterpolationReport check_interpolation(const DescriptorModel& model,
                                        const TangentialDataSet& data,
                                        double tol);

struct FitOptions {
  double tol = kRankTol;
  int order = -1;  // -1: rank of [𝕃,𝕄] from detect_order
  PartitionPolicy policy = PartitionPolicy::SortedAlternate;
  bool close_conjugates = true;
  bool realify = true;
  bool extract_feedthrough = true;
};

struct LtiFit {
  DescriptorModel model;
  OrderReport orders;       // of the initial pencil
  Mat D;                    // extracted feed-through (p×m, zero if none)
  bool improper = false;
  bool realified = false;
  TangentialDataSet data;   // point-form partitioned data
  LoewnerPencil pencil;     // pencil that was projected (possibly refit)
};

// Composite pipeline: close conjugates, partition, build, realify when the
// sides allow it, detect order, extract feed-through when the pencil shows a
// single simple infinite eigenvalue, refit, project.
LtiFit fit_lti(const std::vector<FrequencySample>& samples,
               const FitOptions& opt = {});

}  // namespace loewner
