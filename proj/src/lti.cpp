#include "loewner/lti.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace loewner {

namespace {

constexpr double kPointMatchTol = 1e-12;

bool is_real_point(Cplx z) {
  return std::abs(z.imag()) <= kPointMatchTol * std::max(1.0, std::abs(z));
}

bool same_point(Cplx a, Cplx b) {
  return std::abs(a - b) <= kPointMatchTol * std::max({std::abs(a), std::abs(b), 1.0});
}

struct SvdThin {
  Mat U, V;
  RVec S;
};

SvdThin svd_thin(const Mat& m) {
  SvdThin out;
  if (std::max(m.rows(), m.cols()) <= 256) {
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.U = svd.matrixU();
    out.V = svd.matrixV();
    out.S = svd.singularValues();
  } else {
    Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.U = svd.matrixU();
    out.V = svd.matrixV();
    out.S = svd.singularValues();
  }
  return out;
}

RVec sv_only(const Mat& m) {
  if (m.size() == 0) return RVec();
  if (std::max(m.rows(), m.cols()) <= 256)
    return Eigen::JacobiSVD<Mat>(m).singularValues();
  return Eigen::BDCSVD<Mat>(m).singularValues();
}

// Real-arithmetic thin SVD; used for realified pencils so that projections
// stay exactly real (complex SVD introduces arbitrary per-vector phases).
struct SvdThinReal {
  RMat U, V;
  RVec S;
};

SvdThinReal svd_thin_real(const RMat& m) {
  SvdThinReal out;
  if (std::max(m.rows(), m.cols()) <= 256) {
    Eigen::JacobiSVD<RMat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.U = svd.matrixU();
    out.V = svd.matrixV();
    out.S = svd.singularValues();
  } else {
    Eigen::BDCSVD<RMat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.U = svd.matrixU();
    out.V = svd.matrixV();
    out.S = svd.singularValues();
  }
  return out;
}

// Conjugate-pair layout of one data side: index order with each pair
// normalized +imag first, and the block unitary J for that order.
struct SideTransform {
  std::vector<int> idx;
  Mat J;  // n×n block diagonal
};

SideTransform side_transform(const Vec& points) {
  const int n = int(points.size());
  std::vector<bool> used(n, false);
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < n; ++i) {
    if (used[i]) continue;
    used[i] = true;
    if (is_real_point(points(i))) {
      groups.push_back({i});
      continue;
    }
    int partner = -1;
    for (int j = i + 1; j < n; ++j)
      if (!used[j] && same_point(std::conj(points(i)), points(j))) {
        partner = j;
        break;
      }
    if (partner < 0)
      throw_precondition("NotConjugateClosed",
                         "complex point without its conjugate on the same side");
    used[partner] = true;
    const int plus = points(i).imag() > 0 ? i : partner;
    const int minus = plus == i ? partner : i;
    groups.push_back({plus, minus});
  }
  SideTransform t;
  t.J = Mat::Zero(n, n);
  int pos = 0;
  const double isq = 1.0 / std::sqrt(2.0);
  for (const auto& g : groups) {
    if (g.size() == 1) {
      t.idx.push_back(g[0]);
      t.J(pos, pos) = 1.0;
      pos += 1;
    } else {
      t.idx.push_back(g[0]);
      t.idx.push_back(g[1]);
      t.J(pos, pos) = isq;
      t.J(pos, pos + 1) = isq;
      t.J(pos + 1, pos) = Cplx(0, -isq);
      t.J(pos + 1, pos + 1) = Cplx(0, isq);
      pos += 2;
    }
  }
  return t;
}

Mat gather_cols(const Mat& m, const std::vector<int>& idx) {
  Mat out(m.rows(), Eigen::Index(idx.size()));
  for (size_t k = 0; k < idx.size(); ++k) out.col(Eigen::Index(k)) = m.col(idx[k]);
  return out;
}

Mat gather_rows(const Mat& m, const std::vector<int>& idx) {
  Mat out(Eigen::Index(idx.size()), m.cols());
  for (size_t k = 0; k < idx.size(); ++k) out.row(Eigen::Index(k)) = m.row(idx[k]);
  return out;
}

Vec gather(const Vec& v, const std::vector<int>& idx) {
  Vec out(Eigen::Index(idx.size()));
  for (size_t k = 0; k < idx.size(); ++k) out(Eigen::Index(k)) = v(idx[k]);
  return out;
}

double imag_residue(std::initializer_list<const Mat*> mats) {
  double scale = 0.0, res = 0.0;
  for (const Mat* m : mats)
    if (m->size() > 0) {
      scale = std::max(scale, m->cwiseAbs().maxCoeff());
      res = std::max(res, m->imag().cwiseAbs().maxCoeff());
    }
  return scale > 0 ? res / scale : 0.0;
}

void truncate_imag(std::initializer_list<Mat*> mats) {
  for (Mat* m : mats) *m = m->real().cast<Cplx>();
}

}  // namespace

void TangentialDataSet::validate() const {
  if (R.cols() != Wm.cols() || (!real_structured && R.cols() != lambda.size()))
    throw_precondition("ShapeMismatch", "right data sizes inconsistent");
  if (Lt.rows() != V.rows() || (!real_structured && V.rows() != mu.size()))
    throw_precondition("ShapeMismatch", "left data sizes inconsistent");
  if (Lt.cols() != Wm.rows() || V.cols() != R.rows())
    throw_precondition("ShapeMismatch", "direction/response dimensions conflict");
}

TangentialDataSet partition_data(const std::vector<FrequencySample>& samples,
                                 PartitionPolicy policy) {
  if (samples.size() < 2) throw_precondition("TooFewPoints", "need at least 2 samples");
  const Eigen::Index p = samples[0].response.rows();
  const Eigen::Index m = samples[0].response.cols();
  for (const auto& s : samples)
    if (s.response.rows() != p || s.response.cols() != m)
      throw_precondition("ShapeMismatch", "inconsistent response dimensions");
  for (size_t i = 0; i < samples.size(); ++i)
    for (size_t j = i + 1; j < samples.size(); ++j)
      if (same_point(samples[i].point, samples[j].point))
        throw_precondition("DuplicatePoints", "sample points must be distinct");

  // Group indices into conjugate pairs (pairs never split across sides).
  const int n = int(samples.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (policy == PartitionPolicy::SortedAlternate) {
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const Cplx za = samples[a].point, zb = samples[b].point;
      if (za.imag() != zb.imag()) return za.imag() < zb.imag();
      return za.real() < zb.real();
    });
  }
  std::vector<int> group_of(n, -1);
  std::vector<std::vector<int>> groups;
  for (int oi = 0; oi < n; ++oi) {
    const int i = order[oi];
    if (group_of[i] >= 0) continue;
    std::vector<int> g{i};
    group_of[i] = int(groups.size());
    if (!is_real_point(samples[i].point)) {
      for (int oj = oi + 1; oj < n; ++oj) {
        const int j = order[oj];
        if (group_of[j] < 0 &&
            same_point(std::conj(samples[i].point), samples[j].point)) {
          g.push_back(j);
          group_of[j] = group_of[i];
          break;
        }
      }
    }
    groups.push_back(std::move(g));
  }

  std::vector<int> right_groups, left_groups;
  if (policy == PartitionPolicy::AsGiven) {
    const size_t cut = (groups.size() + 1) / 2;
    for (size_t g = 0; g < groups.size(); ++g)
      (g < cut ? right_groups : left_groups).push_back(int(g));
  } else {
    bool to_right = true;
    for (size_t g = 0; g < groups.size(); ++g) {
      (to_right ? right_groups : left_groups).push_back(int(g));
      to_right = !to_right;
    }
  }
  if (right_groups.empty() || left_groups.empty())
    throw_precondition("TooFewPoints", "partition produced an empty side");

  auto layout = [&](const std::vector<int>& gs) {
    std::vector<int> idx;
    for (int g : gs) {
      std::vector<int> members = groups[g];
      std::sort(members.begin(), members.end(), [&](int a, int b) {
        return samples[a].point.imag() < samples[b].point.imag();
      });
      for (int i : members) idx.push_back(i);
    }
    return idx;
  };
  const std::vector<int> ridx = layout(right_groups);
  const std::vector<int> lidx = layout(left_groups);

  TangentialDataSet data;
  data.lambda.resize(Eigen::Index(ridx.size()));
  data.R.resize(m, Eigen::Index(ridx.size()));
  data.Wm.resize(p, Eigen::Index(ridx.size()));
  data.mu.resize(Eigen::Index(lidx.size()));
  data.Lt.resize(Eigen::Index(lidx.size()), p);
  data.V.resize(Eigen::Index(lidx.size()), m);

  // Cyclic unit directions, shared inside a conjugate pair.
  for (size_t k = 0; k < ridx.size(); ++k) {
    const int i = ridx[k];
    const int g_rank = int(std::find(right_groups.begin(), right_groups.end(),
                                     group_of[i]) -
                           right_groups.begin());
    Vec r = Vec::Zero(m);
    r(g_rank % m) = 1.0;
    data.lambda(Eigen::Index(k)) = samples[i].point;
    data.R.col(Eigen::Index(k)) = r;
    data.Wm.col(Eigen::Index(k)) = samples[i].response * r;
  }
  for (size_t k = 0; k < lidx.size(); ++k) {
    const int j = lidx[k];
    const int g_rank = int(std::find(left_groups.begin(), left_groups.end(),
                                     group_of[j]) -
                           left_groups.begin());
    Vec l = Vec::Zero(p);
    l(g_rank % p) = 1.0;
    data.mu(Eigen::Index(k)) = samples[j].point;
    data.Lt.row(Eigen::Index(k)) = l.transpose();
    data.V.row(Eigen::Index(k)) = l.transpose() * samples[j].response;
  }
  return data;
}

LoewnerPencil build_pencil(const TangentialDataSet& data) {
  data.validate();
  if (data.real_structured)
    throw_precondition("RealStructuredData", "build_pencil needs point-form data");
  const Eigen::Index nr = data.n_right(), nl = data.n_left();
  LoewnerPencil out;
  out.L.resize(nl, nr);
  out.Ms.resize(nl, nr);
  for (Eigen::Index j = 0; j < nl; ++j)
    for (Eigen::Index i = 0; i < nr; ++i) {
      const Cplx mu = data.mu(j), la = data.lambda(i);
      if (same_point(mu, la))
        throw_precondition("CoincidentPoints", "left point equals a right point");
      const Cplx vr = (data.V.row(j) * data.R.col(i))(0, 0);
      const Cplx lw = (data.Lt.row(j) * data.Wm.col(i))(0, 0);
      out.L(j, i) = (vr - lw) / (mu - la);
      out.Ms(j, i) = (mu * vr - la * lw) / (mu - la);
    }
  out.V = data.V;
  out.W = data.Wm;
  out.data = data;
  return out;
}

std::pair<double, double> sylvester_residual(const LoewnerPencil& pencil) {
  const auto& d = pencil.data;
  const Mat La = d.Lambda();
  const Mat Mu = d.Mmat();
  auto rel = [](const Mat& lhs_a, const Mat& lhs_b, const Mat& rhs_a,
                const Mat& rhs_b) {
    const double denom = lhs_a.norm() + lhs_b.norm() + rhs_a.norm() +
                         rhs_b.norm() + 1e-300;
    return (lhs_a - lhs_b - (rhs_a - rhs_b)).norm() / denom;
  };
  const double r1 = rel(Mu * pencil.L, pencil.L * La, Mat(pencil.V * d.R),
                        Mat(d.Lt * pencil.W));
  const double r2 = rel(Mu * pencil.Ms, pencil.Ms * La, Mat(Mu * pencil.V * d.R),
                        Mat(d.Lt * pencil.W * La));
  return {r1, r2};
}

OrderReport detect_order(const LoewnerPencil& pencil, double tol) {
  if (!(tol > 0.0 && tol < 1.0))
    throw_precondition("BadTolerance", "tolerance must lie in (0,1)");
  const Eigen::Index nl = pencil.L.rows(), nr = pencil.L.cols();
  Mat rowcat(nl, 2 * nr), colcat(2 * nl, nr);
  rowcat << pencil.L, pencil.Ms;
  colcat << pencil.L, pencil.Ms;
  OrderReport rep;
  RVec s_row = sv_only(rowcat), s_col = sv_only(colcat), s_l = sv_only(pencil.L);
  rep.r = sv_rank(s_row, tol);
  // An L that is pure roundoff (constant responses) must read as rank zero;
  // judged against its own largest singular value it would read as rank one.
  const bool l_negligible =
      s_l.size() == 0 || s_row.size() == 0 || s_l(0) <= tol * s_row(0);
  rep.nu = l_negligible ? 0 : sv_rank(s_l, tol);
  auto normed = [](RVec s) {
    if (s.size() > 0 && s(0) > 0) s /= s(0);
    return s;
  };
  rep.sv_rowcat = normed(s_row);
  rep.sv_colcat = normed(s_col);
  rep.sv_L = normed(s_l);

  auto check_point = [&](Cplx z) {
    const RVec s = sv_only(z * pencil.L - pencil.Ms);
    if (sv_rank(s, tol) != rep.r) rep.rank_violations.push_back(z);
  };
  for (Eigen::Index i = 0; i < pencil.data.lambda.size(); ++i)
    check_point(pencil.data.lambda(i));
  for (Eigen::Index j = 0; j < pencil.data.mu.size(); ++j)
    check_point(pencil.data.mu(j));
  return rep;
}

DescriptorModel project_reduce(const LoewnerPencil& pencil, int r) {
  const Eigen::Index nl = pencil.L.rows(), nr = pencil.L.cols();
  if (r < 1) throw_precondition("RankTooSmall", "projection order must be >= 1");
  if (r > std::min(nl, nr))
    throw_precondition("RankTooLarge", "projection order exceeds pencil size");

  DescriptorModel model;
  if (pencil.real_structured) {
    RMat rowcat(nl, 2 * nr), colcat(2 * nl, nr);
    rowcat << pencil.L.real(), pencil.Ms.real();
    colcat << pencil.L.real(), pencil.Ms.real();
    const RMat Y = svd_thin_real(rowcat).U.leftCols(r);
    const RMat X = svd_thin_real(colcat).V.leftCols(r);
    model.E = (-(Y.transpose() * pencil.L.real() * X)).cast<Cplx>();
    model.A = (-(Y.transpose() * pencil.Ms.real() * X)).cast<Cplx>();
    model.B = (Y.transpose() * pencil.V.real()).cast<Cplx>();
    model.C = (pencil.W.real() * X).cast<Cplx>();
    model.field = Field::Real;
  } else {
    Mat rowcat(nl, 2 * nr), colcat(2 * nl, nr);
    rowcat << pencil.L, pencil.Ms;
    colcat << pencil.L, pencil.Ms;
    const Mat Y = svd_thin(rowcat).U.leftCols(r);
    const Mat X = svd_thin(colcat).V.leftCols(r);
    model.E = -(Y.adjoint() * pencil.L * X);
    model.A = -(Y.adjoint() * pencil.Ms * X);
    model.B = Y.adjoint() * pencil.V;
    model.C = pencil.W * X;
    model.field = Field::Complex;
  }
  model.D = Mat::Zero(model.C.rows(), model.B.cols());
  return model;
}

TangentialDataSet realify(const TangentialDataSet& data) {
  data.validate();
  if (data.real_structured) return data;
  const SideTransform tr = side_transform(data.lambda);
  const SideTransform tl = side_transform(data.mu);

  TangentialDataSet out;
  out.lambda = gather(data.lambda, tr.idx);
  out.mu = gather(data.mu, tl.idx);
  out.Lambda_blk = tr.J * Mat(out.lambda.asDiagonal()) * tr.J.adjoint();
  out.M_blk = tl.J * Mat(out.mu.asDiagonal()) * tl.J.adjoint();
  out.R = gather_cols(data.R, tr.idx) * tr.J.adjoint();
  out.Wm = gather_cols(data.Wm, tr.idx) * tr.J.adjoint();
  out.Lt = tl.J * gather_rows(data.Lt, tl.idx);
  out.V = tl.J * gather_rows(data.V, tl.idx);
  out.real_structured = true;

  const double res = imag_residue(
      {&out.Lambda_blk, &out.M_blk, &out.R, &out.Wm, &out.Lt, &out.V});
  if (res > 1e-6)
    throw_precondition("NotConjugateClosed",
                       "responses are not conjugate-symmetric");
  truncate_imag({&out.Lambda_blk, &out.M_blk, &out.R, &out.Wm, &out.Lt, &out.V});
  return out;
}

LoewnerPencil realify_pencil(const LoewnerPencil& pencil) {
  if (pencil.real_structured) return pencil;
  const SideTransform tr = side_transform(pencil.data.lambda);
  const SideTransform tl = side_transform(pencil.data.mu);

  LoewnerPencil out;
  out.L = tl.J * gather_cols(gather_rows(pencil.L, tl.idx), tr.idx) * tr.J.adjoint();
  out.Ms =
      tl.J * gather_cols(gather_rows(pencil.Ms, tl.idx), tr.idx) * tr.J.adjoint();
  out.V = tl.J * gather_rows(pencil.V, tl.idx);
  out.W = gather_cols(pencil.W, tr.idx) * tr.J.adjoint();
  const double res = imag_residue({&out.L, &out.Ms, &out.V, &out.W});
  if (res > 1e-6)
    throw_precondition("NotConjugateClosed",
                       "pencil is not conjugate-symmetric");
  truncate_imag({&out.L, &out.Ms, &out.V, &out.W});
  out.data = realify(pencil.data);
  out.real_structured = true;
  return out;
}

TangentialDataSet subtract_feedthrough(const TangentialDataSet& data,
                                       const Mat& D) {
  TangentialDataSet out = data;
  out.Wm = data.Wm - D * data.R;
  out.V = data.V - data.Lt * D;
  return out;
}

PolynomialPart extract_polynomial_part(const LoewnerPencil& pencil, int r,
                                       int nu) {
  PolynomialPart out;
  const Eigen::Index p = pencil.W.rows(), m = pencil.V.cols();
  out.D = Mat::Zero(p, m);
  out.corrected = pencil.data;
  if (r <= nu) return out;

  // rank [L,Ms] = r against rank L = nu puts exactly r - nu modes of the
  // projected pencil at infinity. Read their directions off the trailing
  // singular vectors of E (a scale-relative null_basis would miss them when
  // all of E sits at roundoff level). Index >= 2, i.e. a polynomial part of
  // degree >= 1, shows as a singular core; index 1 is plain feed-through.
  const DescriptorModel proj = project_reduce(pencil, r);
  Eigen::JacobiSVD<Mat> esvd(proj.E, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Index gap = Eigen::Index(r - nu);
  // True modes at infinity leave roundoff-dead trailing singular values in
  // the projected E. A trailing value merely below the rank tolerance means
  // the gap was a grading artifact, and extracting would corrupt the fit.
  // The A-based floor keeps the test meaningful when all of E is roundoff.
  const RVec esv = esvd.singularValues();
  const double floor_scale =
      std::max(esv(0), 1e-2 * std::max(proj.A.cwiseAbs().maxCoeff(), 1e-300));
  if (esv(Eigen::Index(nu)) > 1e-13 * floor_scale) return out;
  const Mat U0 = esvd.matrixU().rightCols(gap);
  const Mat V0 = esvd.matrixV().rightCols(gap);
  const Mat core = U0.adjoint() * proj.A * V0;
  // judged against the full A: the core of an impulsive chain is roundoff
  Eigen::JacobiSVD<Mat> csvd(core);
  const double a_scale = std::max(proj.A.cwiseAbs().maxCoeff(), 1e-300);
  if (csvd.singularValues().minCoeff() < 1e-12 * a_scale) {
    out.improper = true;
    return out;
  }
  Eigen::PartialPivLU<Mat> lu(core);
  out.D = -proj.C * V0 * lu.solve(U0.adjoint() * proj.B);
  if (pencil.real_structured) out.D = out.D.real().cast<Cplx>();
  out.corrected = subtract_feedthrough(pencil.data, out.D);
  return out;
}

InterpolationReport check_interpolation(const DescriptorModel& model,
                                        const TangentialDataSet& data,
                                        double tol) {
  if (data.real_structured)
    throw_precondition("RealStructuredData",
                       "interpolation check needs point-form data");
  InterpolationReport rep;
  rep.tol = tol;
  double scale = 1e-300;
  for (Eigen::Index i = 0; i < data.Wm.cols(); ++i)
    scale = std::max(scale, data.Wm.col(i).norm());
  for (Eigen::Index j = 0; j < data.V.rows(); ++j)
    scale = std::max(scale, data.V.row(j).norm());

  for (Eigen::Index i = 0; i < data.lambda.size(); ++i) {
    double res;
    try {
      res = (eval_transfer(model, data.lambda(i)) * data.R.col(i) - data.Wm.col(i))
                .norm() /
            scale;
    } catch (const Error&) {
      res = std::numeric_limits<double>::infinity();
    }
    rep.right_residuals.push_back(res);
    rep.max_violation = std::max(rep.max_violation, res);
  }
  for (Eigen::Index j = 0; j < data.mu.size(); ++j) {
    double res;
    try {
      res = (data.Lt.row(j) * eval_transfer(model, data.mu(j)) - data.V.row(j))
                .norm() /
            scale;
    } catch (const Error&) {
      res = std::numeric_limits<double>::infinity();
    }
    rep.left_residuals.push_back(res);
    rep.max_violation = std::max(rep.max_violation, res);
  }
  rep.pass = rep.max_violation <= tol;
  return rep;
}

LtiFit fit_lti(const std::vector<FrequencySample>& samples,
               const FitOptions& opt) {
  const std::vector<FrequencySample> closed =
      opt.close_conjugates ? conjugate_close(samples) : samples;
  TangentialDataSet data = partition_data(closed, opt.policy);
  LoewnerPencil pencil = build_pencil(data);

  LtiFit fit;
  fit.data = data;
  LoewnerPencil work = pencil;
  if (opt.realify) {
    try {
      work = realify_pencil(pencil);
      fit.realified = true;
    } catch (const Error& e) {
      if (e.name() != "NotConjugateClosed") throw;
      log_info("realification skipped: " + std::string(e.what()));
    }
  }
  fit.orders = detect_order(work, opt.tol);
  const Eigen::Index p = work.W.rows(), m = work.V.cols();
  fit.D = Mat::Zero(p, m);

  int r = opt.order >= 0 ? opt.order : fit.orders.r;
  LoewnerPencil proj = work;
  if (opt.extract_feedthrough && opt.order < 0 && fit.orders.r > fit.orders.nu) {
    PolynomialPart pp = extract_polynomial_part(work, fit.orders.r, fit.orders.nu);
    fit.improper = pp.improper;
    if (!pp.improper && pp.D.cwiseAbs().maxCoeff() > 0) {
      fit.D = pp.D;
      TangentialDataSet corrected = subtract_feedthrough(data, pp.D);
      // Static case: nothing dynamic left after removing the feed-through.
      const double resp_scale =
          std::max(corrected.Wm.cwiseAbs().maxCoeff(), corrected.V.cwiseAbs().maxCoeff());
      const double orig_scale =
          std::max(data.Wm.cwiseAbs().maxCoeff(), data.V.cwiseAbs().maxCoeff());
      if (resp_scale <= 1e-12 * std::max(orig_scale, 1e-300)) {
        fit.model.E = fit.model.A = Mat::Zero(0, 0);
        fit.model.B = Mat::Zero(0, m);
        fit.model.C = Mat::Zero(p, 0);
        fit.model.D = fit.D;
        fit.model.field =
            fit.D.imag().cwiseAbs().maxCoeff() <= 1e-12 ? Field::Real : Field::Complex;
        fit.pencil = work;
        return fit;
      }
      proj = build_pencil(corrected);
      if (fit.realified) proj = realify_pencil(proj);
      r = detect_order(proj, opt.tol).r;
    }
  }
  fit.model = project_reduce(proj, r);
  fit.model.D = fit.D;
  if (proj.real_structured && fit.model.effectively_real(1e-9))
    fit.model = fit.model.to_real();
  fit.pencil = proj;
  return fit;
}

}  // namespace loewner
