#include "loewner/model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>

namespace loewner {

double rcond_lu(const Mat& m) {
  if (m.rows() != m.cols()) throw_precondition("NotSquare", "rcond needs a square matrix");
  if (m.rows() == 0) return 1.0;
  Eigen::PartialPivLU<Mat> lu(m);
  // 1-norm estimate: ||M||_1 * ||M^-1 e||_1 on a few probe vectors.
  const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
  if (!(norm1 > 0)) return 0.0;
  const Eigen::Index n = m.rows();
  double inv_norm = 0.0;
  Vec probe = Vec::Ones(n) / double(n);
  for (int pass = 0; pass < 2; ++pass) {
    Vec x = lu.solve(probe);
    const double xn = x.cwiseAbs().sum();
    if (!std::isfinite(xn)) return 0.0;
    inv_norm = std::max(inv_norm, xn);
    // Refine the probe toward the maximizing sign pattern.
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = std::abs(x(i));
      probe(i) = a > 0 ? x(i) / a : Cplx(1.0, 0.0);
    }
    probe /= double(n);
  }
  if (inv_norm == 0.0) return 0.0;
  return 1.0 / (norm1 * inv_norm);
}

Mat null_basis(const Mat& m, double tol) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  const RVec sv = svd.singularValues();
  const int r = sv_rank(sv, tol);
  return svd.matrixV().rightCols(m.cols() - r);
}

std::vector<double> log_space(double lo, double hi, int n) {
  if (!(lo > 0) || !(hi > 0)) throw_precondition("LogSpaceDomain", "log grid needs positive endpoints");
  if (n < 2) throw_precondition("LogSpaceCount", "need at least two points");
  std::vector<double> out(n);
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < n; ++i)
    out[i] = std::pow(10.0, a + (b - a) * double(i) / double(n - 1));
  return out;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform(), u2 = uniform();
  if (u1 < 1e-300) u1 = 1e-300;
  const double r = std::sqrt(-2.0 * std::log(u1));
  have_spare_ = true;
  spare_ = r * std::sin(2.0 * M_PI * u2);
  return r * std::cos(2.0 * M_PI * u2);
}

int log_level() {
  static int level = [] {
    const char* v = std::getenv("LOEWNER_LOG");
    if (!v) return 0;
    const std::string s(v);
    if (s == "debug") return 2;
    if (s == "info") return 1;
    return 0;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[info] " << msg << "\n";
}
void log_debug(const std::string& msg) {
  if (log_level() >= 2) std::cerr << "[debug] " << msg << "\n";
}

void DescriptorModel::validate() const {
  if (E.rows() != E.cols() || A.rows() != A.cols() || E.rows() != A.rows())
    throw_precondition("ShapeMismatch", "E and A must be square of equal size");
  if (B.rows() != A.rows() || C.cols() != A.cols())
    throw_precondition("ShapeMismatch", "B/C not conformable with A");
  if (D.rows() != C.rows() || D.cols() != B.cols())
    throw_precondition("ShapeMismatch", "D not conformable with B/C");
  if (discrete() && !(*step > 0))
    throw_precondition("BadStep", "discrete step must be positive");
}

static bool mat_effectively_real(const Mat& m, double tol, double scale) {
  if (m.size() == 0) return true;
  return m.imag().cwiseAbs().maxCoeff() <= tol * std::max(scale, 1e-300);
}

bool DescriptorModel::effectively_real(double tol) const {
  double scale = 0.0;
  for (const Mat* m : {&E, &A, &B, &C, &D})
    if (m->size() > 0) scale = std::max(scale, m->cwiseAbs().maxCoeff());
  for (const Mat* m : {&E, &A, &B, &C, &D})
    if (!mat_effectively_real(*m, tol, scale)) return false;
  return true;
}

DescriptorModel DescriptorModel::to_real(double tol) const {
  if (!effectively_real(tol))
    throw_precondition("NotRealizableAsReal", "imaginary parts exceed tolerance");
  DescriptorModel out = *this;
  for (Mat* m : {&out.E, &out.A, &out.B, &out.C, &out.D})
    *m = m->real().cast<Cplx>();
  out.field = Field::Real;
  return out;
}

void BilinearModel::validate() const {
  if (E.rows() != E.cols() || A.rows() != A.cols() || N.rows() != N.cols())
    throw_precondition("ShapeMismatch", "E, A, N must be square");
  if (E.rows() != A.rows() || E.rows() != N.rows())
    throw_precondition("ShapeMismatch", "E, A, N sizes differ");
  if (B.rows() != E.rows() || B.cols() != 1 || C.rows() != 1 || C.cols() != E.cols())
    throw_precondition("ShapeMismatch", "B must be n×1 and C 1×n");
}

bool BilinearModel::effectively_real(double tol) const {
  double scale = 0.0;
  for (const Mat* m : {&E, &A, &N, &B, &C})
    if (m->size() > 0) scale = std::max(scale, m->cwiseAbs().maxCoeff());
  for (const Mat* m : {&E, &A, &N, &B, &C})
    if (!mat_effectively_real(*m, tol, scale)) return false;
  return true;
}

BilinearModel BilinearModel::to_real(double tol) const {
  if (!effectively_real(tol))
    throw_precondition("NotRealizableAsReal", "imaginary parts exceed tolerance");
  BilinearModel out = *this;
  for (Mat* m : {&out.E, &out.A, &out.N, &out.B, &out.C})
    *m = m->real().cast<Cplx>();
  out.field = Field::Real;
  return out;
}

void TimeSeries::validate() const {
  if (!(step > 0)) throw_precondition("BadStep", "time step must be positive");
  if (has_y && y.rows() != u.rows())
    throw_precondition("LengthMismatch", "u and y must have equal length");
}

Mat eval_transfer(const DescriptorModel& model, Cplx xi) {
  model.validate();
  if (model.n() == 0) return model.D;
  const Mat pencil = xi * model.E - model.A;
  if (rcond_lu(pencil) < 1e-13)
    throw_numerical("SingularPencil", "evaluation point is numerically a pole");
  Eigen::PartialPivLU<Mat> lu(pencil);
  return model.C * lu.solve(model.B) + model.D;
}

TimeSeries simulate_discrete(const DescriptorModel& model,
                             const TimeSeries& input, const Vec& x0) {
  model.validate();
  input.validate();
  if (!model.discrete())
    throw_precondition("NotDiscrete", "simulate_discrete needs a discrete model");
  if (input.has_y)
    throw_precondition("OutputAlreadyPresent", "input series must not carry y");
  if (input.u.cols() != model.m())
    throw_precondition("ShapeMismatch", "input width does not match model");
  if (x0.size() != model.n())
    throw_precondition("ShapeMismatch", "x0 size does not match state dimension");

  const Eigen::Index N = input.length();
  TimeSeries out = input;
  out.has_y = true;
  out.y.resize(N, model.p());
  if (model.n() == 0) {
    for (Eigen::Index k = 0; k < N; ++k)
      out.y.row(k) = (model.D * input.u.row(k).transpose().cast<Cplx>()).real().transpose();
    return out;
  }
  if (rcond_lu(model.E) < 1e-14)
    throw_numerical("SingularE", "E is not invertible");
  Eigen::PartialPivLU<Mat> lu(model.E);
  Vec x = x0;
  for (Eigen::Index k = 0; k < N; ++k) {
    const Vec uk = input.u.row(k).transpose().cast<Cplx>();
    out.y.row(k) = (model.C * x + model.D * uk).real().transpose();
    x = lu.solve(model.A * x + model.B * uk);
  }
  return out;
}

TimeSeries simulate_bilinear(const BilinearModel& model, const TimeSeries& input,
                             const std::string& scheme) {
  model.validate();
  input.validate();
  if (input.has_y)
    throw_precondition("OutputAlreadyPresent", "input series must not carry y");
  if (input.u.cols() != 1)
    throw_precondition("ShapeMismatch", "bilinear simulation is single-input");
  if (scheme != "rk4")
    throw_precondition("UnknownScheme", "unsupported integrator tag: " + scheme);
  if (rcond_lu(model.E) < 1e-14) throw_numerical("SingularE", "E is not invertible");

  Eigen::PartialPivLU<Mat> lu(model.E);
  const Mat Ai = lu.solve(model.A);
  const Mat Ni = lu.solve(model.N);
  const Mat Bi = lu.solve(model.B);

  // Sub-step so the fastest linearized mode stays inside the RK4 region.
  double rad = 0.0;
  {
    Eigen::ComplexEigenSolver<Mat> es(Ai, false);
    if (es.info() == Eigen::Success && Ai.rows() > 0)
      rad = es.eigenvalues().cwiseAbs().maxCoeff();
  }
  const double h0 = input.step;
  const int sub = std::max(1, int(std::ceil(rad * h0 / 2.0)));
  const double h = h0 / sub;

  const Eigen::Index N = input.length();
  TimeSeries out = input;
  out.has_y = true;
  out.y.resize(N, 1);
  Vec x = Vec::Zero(model.n());
  auto deriv = [&](const Vec& xs, double u) -> Vec {
    return Ai * xs + (Ni * xs) * u + Bi * u;
  };
  for (Eigen::Index k = 0; k < N; ++k) {
    out.y(k, 0) = (model.C * x)(0, 0).real();
    if (k + 1 == N) break;
    const double u0 = input.u(k, 0), u1 = input.u(k + 1, 0);
    for (int s = 0; s < sub; ++s) {
      // Input interpolated linearly inside the macro step.
      const double t0 = double(s) / sub, tm = (double(s) + 0.5) / sub,
                   t1 = double(s + 1) / sub;
      const double ua = u0 + (u1 - u0) * t0, um = u0 + (u1 - u0) * tm,
                   ub = u0 + (u1 - u0) * t1;
      const Vec k1 = deriv(x, ua);
      const Vec k2 = deriv(x + 0.5 * h * k1, um);
      const Vec k3 = deriv(x + 0.5 * h * k2, um);
      const Vec k4 = deriv(x + h * k3, ub);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return out;
}

std::vector<FrequencySample> conjugate_close(
    const std::vector<FrequencySample>& samples) {
  std::vector<FrequencySample> pool = samples;
  double scale = 0.0;
  for (const auto& s : pool)
    if (s.response.size() > 0)
      scale = std::max(scale, s.response.cwiseAbs().maxCoeff());
  if (scale == 0.0) scale = 1.0;

  std::vector<FrequencySample> out;
  auto same_point = [](Cplx a, Cplx b) {
    const double s = std::max({std::abs(a), std::abs(b), 1.0});
    return std::abs(a - b) <= 1e-12 * s;
  };
  for (const auto& s : pool) {
    bool dup = false;
    for (const auto& t : out)
      if (same_point(s.point, t.point)) {
        if ((s.response - t.response).cwiseAbs().maxCoeff() > 1e-9 * scale)
          throw_precondition("ConflictingData", "same point with differing responses");
        dup = true;
        break;
      }
    if (!dup) out.push_back(s);
  }
  const size_t base = out.size();
  for (size_t i = 0; i < base; ++i) {
    const Cplx zc = std::conj(out[i].point);
    bool found = false;
    for (const auto& t : out)
      if (same_point(zc, t.point)) {
        if ((t.response - out[i].response.conjugate()).cwiseAbs().maxCoeff() >
            1e-9 * scale)
          throw_precondition("ConflictingData",
                             "conjugate point present with inconsistent response");
        found = true;
        break;
      }
    if (!found) out.push_back({zc, out[i].response.conjugate()});
  }
  std::sort(out.begin(), out.end(), [](const FrequencySample& a,
                                       const FrequencySample& b) {
    if (a.point.imag() != b.point.imag()) return a.point.imag() < b.point.imag();
    return a.point.real() < b.point.real();
  });
  return out;
}

std::vector<Cplx> pencil_eigenvalues(const Mat& A, const Mat& E, double inf_tol) {
  if (A.rows() != A.cols() || E.rows() != E.cols() || A.rows() != E.rows())
    throw_precondition("ShapeMismatch", "pencil needs square matrices of equal size");
  const Eigen::Index n = A.rows();
  std::vector<Cplx> eigs;
  if (n == 0) return eigs;

  // Joint two-sided power-of-two equilibration. Multiplying rows and columns
  // of (βA − αE) by nonzero scales preserves the generalized spectrum
  // exactly, and it stops a badly scaled E (SVD projections of wide-band
  // data produce them) from hiding finite eigenvalues behind the shift.
  Mat Ab = A, Eb = E;
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double m = std::max(Ab.row(i).cwiseAbs().maxCoeff(),
                                Eb.row(i).cwiseAbs().maxCoeff());
      if (m > 0) {
        const double s = std::exp2(-std::round(std::log2(m)));
        Ab.row(i) *= s;
        Eb.row(i) *= s;
      }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      const double m = std::max(Ab.col(j).cwiseAbs().maxCoeff(),
                                Eb.col(j).cwiseAbs().maxCoeff());
      if (m > 0) {
        const double s = std::exp2(-std::round(std::log2(m)));
        Ab.col(j) *= s;
        Eb.col(j) *= s;
      }
    }
  }

  // Shift so that (σE − A) is well conditioned, then read the pencil spectrum
  // off M = (σE−A)⁻¹E: eigenvalue ζ of M maps to θ = σ − 1/ζ; ζ ≈ 0 is θ = ∞.
  const double scaleA = std::max(Ab.cwiseAbs().maxCoeff(), 1e-300);
  const double scaleE = std::max(Eb.cwiseAbs().maxCoeff(), 1e-300);
  double sigma0 = scaleA / scaleE;
  Cplx sigma;
  double best_rc = -1.0;
  for (double cand : {0.0, 1.0, -1.0, sigma0, -sigma0, 2.5 * sigma0, 0.731 * sigma0}) {
    const Cplx s(cand, 0.37 * std::abs(cand) + 0.11 * sigma0);
    const double rc = rcond_lu(s * Eb - Ab);
    if (rc > best_rc) {
      best_rc = rc;
      sigma = s;
    }
    if (best_rc > 1e-3) break;
  }
  if (best_rc < 1e-14)
    throw_numerical("SingularPencil", "could not find a regular shift for the pencil");

  Eigen::PartialPivLU<Mat> lu(sigma * Eb - Ab);
  const Mat M = lu.solve(Eb);
  Eigen::ComplexEigenSolver<Mat> es(M);
  if (es.info() != Eigen::Success)
    throw_numerical("EigenFailure", "eigenvalue iteration did not converge");
  const Vec zeta = es.eigenvalues();
  const double zmax = std::max(zeta.cwiseAbs().maxCoeff(), 1e-300);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(zeta(i)) < inf_tol * zmax)
      eigs.push_back(Cplx(std::numeric_limits<double>::infinity(), 0.0));
    else
      eigs.push_back(sigma - 1.0 / zeta(i));
  }
  std::sort(eigs.begin(), eigs.end(), [](Cplx a, Cplx b) {
    const bool ia = std::isinf(a.real()), ib = std::isinf(b.real());
    if (ia != ib) return ib;
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return eigs;
}

}  // namespace loewner
