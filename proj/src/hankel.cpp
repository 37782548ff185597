#include "loewner/hankel.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace loewner {

namespace {

void require_scalar_markov(const MarkovSequence& markov) {
  for (const RMat& hk : markov.h)
    if (hk.rows() != 1 || hk.cols() != 1)
      throw_precondition("ScalarDataRequired",
                         "realization needs scalar Markov parameters");
}

RMat hankel_from(const MarkovSequence& markov, Eigen::Index first,
                 Eigen::Index n) {
  RMat out(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) out(a, b) = markov.h[first + a + b](0, 0);
  return out;
}

// Pencil regularity probe: det(alpha*E - beta*A) vanishes identically for a
// singular pencil, so a few generic directions suffice.
bool pencil_regular(const RMat& e, const RMat& a) {
  constexpr double dirs[3][2] = {
      {0.8442, 0.5360}, {0.3126, -0.9499}, {-0.6397, 0.7686}};
  for (const auto& d : dirs) {
    const Mat probe = (d[0] * e - d[1] * a).cast<Cplx>();
    if (rcond_lu(probe) > 1e-13) return true;
  }
  return false;
}

}  // namespace

HankelPair build_hankel(const TimeSeries& series, Eigen::Index start,
                        Eigen::Index rows, Eigen::Index cols) {
  series.validate();
  if (series.u.cols() != 1)
    throw_precondition("MultiInputUnsupported", "Hankel slices need one input");
  if (!series.has_y || series.y.cols() != 1)
    throw_precondition("MissingOutput", "Hankel slices need one output column");
  if (start < 0 || rows < 1 || cols < 1 ||
      start + rows + cols > series.length())
    throw_precondition("OutOfRange",
                       "Hankel window exceeds the record: start " +
                           std::to_string(start) + ", " + std::to_string(rows) +
                           "x" + std::to_string(cols) + " of " +
                           std::to_string(series.length()) + " samples");
  HankelPair hp;
  hp.U0.resize(rows, cols);
  hp.U1.resize(rows, cols);
  hp.Y0.resize(rows, cols);
  hp.Y1.resize(rows, cols);
  for (Eigen::Index a = 0; a < rows; ++a)
    for (Eigen::Index b = 0; b < cols; ++b) {
      const Eigen::Index k = start + a + b;
      hp.U0(a, b) = series.u(k, 0);
      hp.U1(a, b) = series.u(k + 1, 0);
      hp.Y0(a, b) = series.y(k, 0);
      hp.Y1(a, b) = series.y(k + 1, 0);
    }
  return hp;
}

MarkovSequence recover_markov(const TimeSeries& series, Eigen::Index last) {
  series.validate();
  if (!series.has_y)
    throw_precondition("MissingOutput", "Markov recovery needs outputs");
  if (series.u.cols() != 1)
    throw_precondition("MultiInputUnsupported",
                       "Markov recovery from one record needs a single input");
  if (last < 0 || last + 1 > series.length())
    throw_precondition("OutOfRange",
                       "asked for " + std::to_string(last + 1) +
                           " Markov parameters from " +
                           std::to_string(series.length()) + " samples");
  const double u0 = series.u(0, 0);
  if (u0 == 0.0)
    throw_precondition("ZeroLeadingInput",
                       "triangular system needs u(0) != 0");
  MarkovSequence markov;
  markov.h.reserve(size_t(last + 1));
  for (Eigen::Index k = 0; k <= last; ++k) {
    RVec acc = series.y.row(k).transpose();
    for (Eigen::Index j = 0; j < k; ++j)
      acc -= series.u(k - j, 0) * markov.h[size_t(j)].col(0);
    markov.h.push_back(RMat(acc / u0));
  }
  return markov;
}

RVec hankel_singular_values(const MarkovSequence& markov, Eigen::Index n) {
  require_scalar_markov(markov);
  if (n < 0) throw_precondition("OutOfRange", "order must be nonnegative");
  if (n == 0) return RVec(0);
  if (markov.count() < 2 * n)
    throw_precondition("InsufficientData",
                       "need h_0..h_" + std::to_string(2 * n - 1) + ", have " +
                           std::to_string(markov.count()));
  Eigen::BDCSVD<RMat> svd(hankel_from(markov, 1, n));
  return svd.singularValues();
}

DescriptorModel realize_from_impulse(const MarkovSequence& markov,
                                     Eigen::Index n, double step) {
  require_scalar_markov(markov);
  if (n < 0) throw_precondition("OutOfRange", "order must be nonnegative");
  if (step <= 0) throw_precondition("BadStep", "sample period must be positive");
  if (markov.count() < 2 * n + 1)
    throw_precondition("InsufficientData",
                       "order " + std::to_string(n) + " needs " +
                           std::to_string(2 * n + 1) + " Markov parameters, have " +
                           std::to_string(markov.count()));
  DescriptorModel md;
  md.field = Field::Real;
  md.step = step;
  md.D = Mat::Constant(1, 1, markov.h[0](0, 0));
  if (n == 0) {
    md.E = Mat(0, 0);
    md.A = Mat(0, 0);
    md.B = Mat(0, 1);
    md.C = Mat(1, 0);
    return md;
  }
  md.E = hankel_from(markov, 1, n).cast<Cplx>();
  md.A = hankel_from(markov, 2, n).cast<Cplx>();
  RMat c(1, n);
  for (Eigen::Index j = 0; j < n; ++j) c(0, j) = markov.h[size_t(1 + j)](0, 0);
  md.C = c.cast<Cplx>();
  md.B = c.transpose().cast<Cplx>();
  return md;
}

DescriptorModel reduce_hankel(const MarkovSequence& markov, Eigen::Index n,
                              Eigen::Index r, double step) {
  require_scalar_markov(markov);
  if (r < 0 || n < 0) throw_precondition("OutOfRange", "orders must be nonnegative");
  if (r > n)
    throw_precondition("RankTooLarge", "target order " + std::to_string(r) +
                                           " exceeds Hankel order " +
                                           std::to_string(n));
  if (step <= 0) throw_precondition("BadStep", "sample period must be positive");
  if (markov.count() < 2 * n + 1)
    throw_precondition("InsufficientData",
                       "order " + std::to_string(n) + " needs " +
                           std::to_string(2 * n + 1) + " Markov parameters, have " +
                           std::to_string(markov.count()));
  DescriptorModel md;
  md.field = Field::Real;
  md.step = step;
  md.D = Mat::Constant(1, 1, markov.h[0](0, 0));
  if (r == 0 || n == 0) {
    md.E = Mat(0, 0);
    md.A = Mat(0, 0);
    md.B = Mat(0, 1);
    md.C = Mat(1, 0);
    return md;
  }
  const RMat e = hankel_from(markov, 1, n);
  const RMat a = hankel_from(markov, 2, n);
  RMat c(1, n);
  for (Eigen::Index j = 0; j < n; ++j) c(0, j) = markov.h[size_t(1 + j)](0, 0);
  Eigen::BDCSVD<RMat> svd(e, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RMat y = svd.matrixU().leftCols(r);
  const RMat x = svd.matrixV().leftCols(r);
  md.E = (y.transpose() * e * x).cast<Cplx>();
  md.A = (y.transpose() * a * x).cast<Cplx>();
  md.B = (y.transpose() * c.transpose()).cast<Cplx>();
  md.C = (c * x).cast<Cplx>();
  return md;
}

DescriptorModel realize_from_io(const TimeSeries& series, Eigen::Index n) {
  series.validate();
  if (!series.has_y)
    throw_precondition("MissingOutput", "identification needs outputs");
  if (series.u.cols() != 1 || series.y.cols() != 1)
    throw_precondition("ScalarDataRequired",
                       "state-space read-off handles single-input single-output records");
  if (n < 0) throw_precondition("OutOfRange", "order must be nonnegative");

  const MarkovSequence markov = recover_markov(series, n);
  DescriptorModel md;
  md.field = Field::Real;
  md.step = series.step;
  md.D = Mat::Constant(1, 1, markov.h[0](0, 0));
  if (n == 0) {
    md.E = Mat(0, 0);
    md.A = Mat(0, 0);
    md.B = Mat(0, 1);
    md.C = Mat(1, 0);
    return md;
  }

  const Eigen::Index len = series.length();
  const Eigen::Index rows =
      std::max<Eigen::Index>(n + 2, std::min<Eigen::Index>((len - n) / 2, 3 * n + 10));
  const Eigen::Index cols = len - rows;
  if (cols < n + 2)
    throw_precondition("InsufficientData",
                       "record of " + std::to_string(len) +
                           " samples is too short for order " + std::to_string(n));
  const HankelPair hp = build_hankel(series, 0, rows, cols);

  // Project the output Hankels off the input row space.
  Eigen::BDCSVD<RMat> usvd(hp.U0, Eigen::ComputeThinV);
  const RVec usv = usvd.singularValues();
  Eigen::Index u_rank = 0;
  while (u_rank < usv.size() && usv(u_rank) > 1e-12 * usv(0)) ++u_rank;
  const RMat vr = usvd.matrixV().leftCols(u_rank);
  const RMat q0 = hp.Y0 - (hp.Y0 * vr) * vr.transpose();
  const RMat q1 = hp.Y1 - (hp.Y1 * vr) * vr.transpose();

  RMat both(rows, 2 * cols);
  both << q0, q1;
  Eigen::BDCSVD<RMat> qsvd(both, Eigen::ComputeThinU);
  if (sv_rank(qsvd.singularValues(), 1e-10) < n)
    throw_numerical("InsufficientExcitation",
                    "projected output Hankel has rank " +
                        std::to_string(sv_rank(qsvd.singularValues(), 1e-10)) +
                        " < " + std::to_string(n));

  Rng rng(0);
  RMat qh0, qh1;
  bool found = false;
  for (int attempt = 0; attempt < 4 && !found; ++attempt) {
    RMat yc;
    if (attempt == 0) {
      yc = qsvd.matrixU().leftCols(n);
    } else {
      RMat g(rows, n);
      for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = rng.normal();
      Eigen::HouseholderQR<RMat> oqr(g);
      yc = oqr.householderQ() * RMat::Identity(rows, n);
    }
    const RMat z0 = yc.transpose() * q0;
    const RMat z1 = yc.transpose() * q1;
    Eigen::ColPivHouseholderQR<RMat> cqr(z0);
    if (cqr.rank() < n) continue;
    std::vector<Eigen::Index> sel(static_cast<size_t>(n));
    const auto& perm = cqr.colsPermutation().indices();
    for (Eigen::Index j = 0; j < n; ++j) sel[size_t(j)] = perm(j);
    std::sort(sel.begin(), sel.end());
    RMat c0(n, n), c1(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      c0.col(j) = z0.col(sel[size_t(j)]);
      c1.col(j) = z1.col(sel[size_t(j)]);
    }
    if (pencil_regular(c0, c1)) {
      qh0 = c0;
      qh1 = c1;
      found = true;
    }
  }
  if (!found)
    throw_numerical("PencilNotRegular",
                    "no regular pencil compression found at order " +
                        std::to_string(n));

  double tail = 0.0;
  for (Eigen::Index k = 1; k < len; ++k)
    tail = std::max(tail, std::abs(series.u(k, 0)));
  if (tail > 1e-12 * std::abs(series.u(0, 0)))
    log_info("input is not an impulse; the read-off model recovers poles but B is input-dependent");

  md.E = qh0.cast<Cplx>();
  md.A = qh1.cast<Cplx>();
  md.B = qh0.col(0).cast<Cplx>();
  RMat c(1, n);
  for (Eigen::Index j = 0; j < n; ++j) c(0, j) = markov.h[size_t(1 + j)](0, 0);
  md.C = c.cast<Cplx>();
  return md;
}

std::vector<Cplx> pole_pencil(const TimeSeries& series, Eigen::Index n) {
  const DescriptorModel md = realize_from_io(series, n);
  if (md.n() == 0) return {};
  std::vector<Cplx> finite;
  for (Cplx z : pencil_eigenvalues(md.A, md.E))
    if (std::isfinite(z.real()) && std::isfinite(z.imag())) finite.push_back(z);
  return finite;
}

DescriptorModel discretize_backward_euler(const DescriptorModel& model,
                                          double step) {
  model.validate();
  if (model.discrete())
    throw_precondition("ContinuousModelRequired",
                       "model is already discrete");
  if (step <= 0) throw_precondition("BadStep", "step must be positive");
  if (model.n() == 0) {
    DescriptorModel out = model;
    out.step = step;
    return out;
  }
  const Mat s = model.E - step * model.A;
  if (rcond_lu(s) < 1e-14)
    throw_numerical("SingularStep",
                    "E - h*A is singular at h = " + std::to_string(step));
  Eigen::PartialPivLU<Mat> lu(s);
  const Mat sb = lu.solve(model.B);
  DescriptorModel out;
  out.E = s;
  out.A = model.E;
  out.B = step * (model.E * sb);
  out.C = model.C;
  out.D = model.D + step * (model.C * sb);
  out.field = model.field;
  out.step = step;
  return out;
}

DescriptorModel to_continuous_bilinear(const DescriptorModel& model,
                                       double step) {
  model.validate();
  if (!model.discrete())
    throw_precondition("DiscreteModelRequired", "model is already continuous");
  if (step <= 0) throw_precondition("BadStep", "step must be positive");
  if (std::abs(*model.step - step) > 1e-12 * step)
    throw_precondition("StepMismatch",
                       "model was sampled at " + std::to_string(*model.step) +
                           ", not " + std::to_string(step));
  if (model.n() == 0) {
    DescriptorModel out = model;
    out.step.reset();
    return out;
  }
  if (rcond_lu(model.A) < 1e-14)
    throw_numerical("SingularTransform",
                    "discrete A is singular; no continuous preimage");
  Eigen::PartialPivLU<Mat> lu(model.A);
  const Mat ab = lu.solve(model.B);
  DescriptorModel out;
  out.E = model.A;
  out.A = (model.A - model.E) / step;
  out.B = (model.E * ab) / step;
  out.C = model.C;
  out.D = model.D - model.C * ab;
  out.field = model.field;
  out.step.reset();
  return out;
}

}  // namespace loewner
