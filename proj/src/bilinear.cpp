#include "loewner/bilinear.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <string>
#include <utility>

namespace loewner {

namespace {

struct TupleLess {
  bool operator()(const std::vector<Cplx>& a,
                  const std::vector<Cplx>& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    for (size_t i = 0; i < a.size(); ++i) {
      if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
      if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
    }
    return false;
  }
};

std::vector<Cplx> concat(std::vector<Cplx> head, const std::vector<Cplx>& tail,
                         size_t skip_head_last, size_t skip_tail_first) {
  if (skip_head_last) head.pop_back();
  head.insert(head.end(), tail.begin() + long(skip_tail_first), tail.end());
  return head;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

void QuadraticBilinearSpec::validate() const {
  const Eigen::Index nn = F1.rows();
  if (F1.cols() != nn || F2.rows() != nn || F2.cols() != nn * nn ||
      G0.rows() != nn || G0.cols() != 1 || G1.rows() != nn ||
      G1.cols() != nn || c.rows() != 1 || c.cols() != nn)
    throw_precondition("ShapeMismatch",
                       "quadratic-bilinear blocks are dimensionally inconsistent");
}

BilinearModel carleman(const QuadraticBilinearSpec& spec, int level) {
  spec.validate();
  if (level != 2)
    throw_precondition("UnsupportedTruncation",
                       "only the quadratic truncation level is supported");
  const Eigen::Index n = spec.n();
  const Eigen::Index nn = n + n * n;
  const Mat f1 = spec.F1.cast<Cplx>();
  const Mat g0 = spec.G0.cast<Cplx>();
  const Mat g1 = spec.G1.cast<Cplx>();
  const Mat id = Mat::Identity(n, n);

  BilinearModel bm;
  bm.E = Mat::Identity(nn, nn);
  bm.A = Mat::Zero(nn, nn);
  bm.A.topLeftCorner(n, n) = f1;
  bm.A.topRightCorner(n, n * n) = spec.F2.cast<Cplx>();
  bm.A.bottomRightCorner(n * n, n * n) = kron(f1, id) + kron(id, f1);
  bm.N = Mat::Zero(nn, nn);
  bm.N.topLeftCorner(n, n) = g1;
  bm.N.bottomLeftCorner(n * n, n) = kron(g0, id) + kron(id, g0);
  bm.N.bottomRightCorner(n * n, n * n) = kron(g1, id) + kron(id, g1);
  bm.B = Mat::Zero(nn, 1);
  bm.B.topRows(n) = g0;
  bm.C = Mat::Zero(1, nn);
  bm.C.leftCols(n) = spec.c.cast<Cplx>();
  bm.field = Field::Real;
  return bm;
}

Cplx eval_generalized_tf(const BilinearModel& model,
                         const std::vector<Cplx>& points) {
  model.validate();
  if (points.empty())
    throw_precondition("EmptyTuple", "kernel order must be at least one");
  Mat v = model.B;
  for (size_t idx = points.size(); idx-- > 0;) {
    if (idx + 1 < points.size()) v = model.N * v;
    const Mat pencil = points[idx] * model.E - model.A;
    if (rcond_lu(pencil) < 1e-13)
      throw_numerical("SingularPencil",
                      "kernel argument is numerically a pole");
    v = Eigen::PartialPivLU<Mat>(pencil).solve(v);
  }
  return (model.C * v)(0, 0);
}

std::vector<Cplx> InterpolationTuples::right_tuple(Eigen::Index i) const {
  const Eigen::Index d = chain_depth > 0 ? chain_depth : k();
  const Eigen::Index root = i - i % d;
  std::vector<Cplx> out;
  for (Eigen::Index t = i; t >= root; --t) out.push_back(lambda_points[size_t(t)]);
  return out;
}

std::vector<Cplx> InterpolationTuples::left_tuple(Eigen::Index j) const {
  const Eigen::Index d = chain_depth > 0 ? chain_depth : k();
  const Eigen::Index root = j - j % d;
  std::vector<Cplx> out;
  for (Eigen::Index t = root; t <= j; ++t) out.push_back(mu_points[size_t(t)]);
  return out;
}

void InterpolationTuples::validate() const {
  if (lambda_points.empty() || lambda_points.size() != mu_points.size())
    throw_precondition("ShapeMismatch",
                       "need equally many left and right points, at least one each");
  if (chain_depth < 0)
    throw_precondition("BadDepth", "chain depth must be nonnegative");
  std::vector<Cplx> all = lambda_points;
  all.insert(all.end(), mu_points.begin(), mu_points.end());
  for (size_t a = 0; a < all.size(); ++a)
    for (size_t b = a + 1; b < all.size(); ++b)
      if (std::abs(all[a] - all[b]) <
          1e-12 * std::max(1.0, std::abs(all[a])))
        throw_precondition("CoincidentPoints",
                           "interpolation points must be pairwise distinct");
}

InterpolationTuples make_tuples(const std::vector<Cplx>& right,
                                const std::vector<Cplx>& left,
                                Eigen::Index chain_depth) {
  InterpolationTuples t;
  t.lambda_points = right;
  t.mu_points = left;
  t.chain_depth = chain_depth;
  t.validate();
  return t;
}

BilinearLoewnerSet build_bilinear_set(const KernelOracle& oracle,
                                      const InterpolationTuples& tuples) {
  tuples.validate();
  const Eigen::Index k = tuples.k();
  std::map<std::vector<Cplx>, Cplx, TupleLess> memo;
  auto eval = [&](const std::vector<Cplx>& pts) {
    auto it = memo.find(pts);
    if (it != memo.end()) return it->second;
    const Cplx val = oracle(pts);
    memo.emplace(pts, val);
    return val;
  };

  BilinearLoewnerSet set;
  set.L.resize(k, k);
  set.Ms.resize(k, k);
  set.T.resize(k, k);
  set.V.resize(k, 1);
  set.W.resize(1, k);
  for (Eigen::Index j = 0; j < k; ++j)
    set.V(j, 0) = eval(tuples.left_tuple(j));
  for (Eigen::Index i = 0; i < k; ++i)
    set.W(0, i) = eval(tuples.right_tuple(i));
  for (Eigen::Index j = 0; j < k; ++j) {
    const std::vector<Cplx> lt = tuples.left_tuple(j);
    const Cplx mu = lt.back();
    for (Eigen::Index i = 0; i < k; ++i) {
      const std::vector<Cplx> rt = tuples.right_tuple(i);
      const Cplx la = rt.front();
      // seam divided differences: drop the seam point on one side or the other
      const Cplx left_heavy = eval(concat(lt, rt, 0, 1));
      const Cplx right_heavy = eval(concat(lt, rt, 1, 0));
      set.L(j, i) = (left_heavy - right_heavy) / (mu - la);
      set.Ms(j, i) = (mu * left_heavy - la * right_heavy) / (mu - la);
      set.T(j, i) = eval(concat(lt, rt, 0, 0));
    }
  }
  return set;
}

BilinearLoewnerSet factored_loewner_set(const BilinearModel& model,
                                        const InterpolationTuples& tuples) {
  model.validate();
  tuples.validate();
  const Eigen::Index k = tuples.k();
  const Eigen::Index d = tuples.chain_depth > 0 ? tuples.chain_depth : k;
  const Eigen::Index n = model.n();

  auto lu_at = [&](Cplx s) {
    const Mat pencil = s * model.E - model.A;
    if (rcond_lu(pencil) < 1e-13)
      throw_numerical("SingularPencil", "tuple point is numerically a pole");
    return Eigen::PartialPivLU<Mat>(pencil);
  };

  // controllability columns: R_i = Φ(λ_i) N R_{i-1}, restart at chain roots
  Mat r(n, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Mat rhs = (i % d == 0) ? model.B : Mat(model.N * r.col(i - 1));
    r.col(i) = lu_at(tuples.lambda_points[size_t(i)]).solve(rhs);
  }
  // observability rows: O_j = O_{j-1} N Φ(μ_j), via the transposed pencil
  Mat o(k, n);
  for (Eigen::Index j = 0; j < k; ++j) {
    const Mat rhs = (j % d == 0)
                        ? Mat(model.C.transpose())
                        : Mat(model.N.transpose() * o.row(j - 1).transpose());
    const Mat pencil =
        (tuples.mu_points[size_t(j)] * model.E - model.A).transpose();
    if (rcond_lu(pencil) < 1e-13)
      throw_numerical("SingularPencil", "tuple point is numerically a pole");
    o.row(j) = Eigen::PartialPivLU<Mat>(pencil).solve(rhs).transpose();
  }

  BilinearLoewnerSet set;
  set.L = -(o * model.E * r);
  set.Ms = -(o * model.A * r);
  set.T = o * model.N * r;
  set.V = o * model.B;
  set.W = model.C * r;
  return set;
}

BilinearModel realize_bilinear(const BilinearLoewnerSet& set) {
  if (set.L.rows() != set.L.cols() || set.L.rows() == 0)
    throw_precondition("ShapeMismatch", "Loewner matrix must be square");
  if (rcond_lu(set.L) < 1e-13)
    throw_numerical("SingularLoewner",
                    "Loewner matrix is numerically singular; reduce instead");
  BilinearModel bm;
  bm.E = -set.L;
  bm.A = -set.Ms;
  bm.N = set.T;
  bm.B = set.V;
  bm.C = set.W;
  bm.field = Field::Complex;
  bm.validate();
  return bm;
}

BilinearModel reduce_bilinear(const BilinearLoewnerSet& set, Eigen::Index r) {
  const Eigen::Index k = set.L.rows();
  if (r < 1 || r > k)
    throw_precondition("RankTooLarge", "target order " + std::to_string(r) +
                                           " outside [1, " + std::to_string(k) +
                                           "]");
  Mat rowcat(k, 2 * k), colcat(2 * k, k);
  rowcat << set.L, set.Ms;
  colcat << set.L, set.Ms;
  Eigen::JacobiSVD<Mat> rsvd(rowcat, Eigen::ComputeThinU);
  Eigen::JacobiSVD<Mat> csvd(colcat, Eigen::ComputeThinV);
  const Mat y = rsvd.matrixU().leftCols(r);
  const Mat x = csvd.matrixV().leftCols(r);
  BilinearModel bm;
  bm.E = -(y.adjoint() * set.L * x);
  bm.A = -(y.adjoint() * set.Ms * x);
  bm.N = y.adjoint() * set.T * x;
  bm.B = y.adjoint() * set.V;
  bm.C = set.W * x;
  bm.field = Field::Complex;
  if (rcond_lu(bm.E) < 1e-13)
    throw_numerical("SingularLoewner",
                    "projected Loewner matrix is numerically singular");
  return bm;
}

}  // namespace loewner
