#include "loewner/parametric.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace loewner {

namespace {

constexpr double kPointMatchTol = 1e-12;

bool same_point(Cplx a, Cplx b) {
  return std::abs(a - b) <= kPointMatchTol * std::max({std::abs(a), std::abs(b), 1.0});
}

bool freq_less(Cplx a, Cplx b) {
  if (a.imag() != b.imag()) return a.imag() < b.imag();
  return a.real() < b.real();
}

RVec sv_of(const Mat& m) {
  if (m.size() == 0) return RVec();
  if (std::max(m.rows(), m.cols()) <= 256)
    return Eigen::JacobiSVD<Mat>(m).singularValues();
  return Eigen::BDCSVD<Mat>(m).singularValues();
}

Cplx freq_at(const ParamGrid& g, Eigen::Index k) {
  return k < g.n_bar() ? g.lambda(k) : g.mu(k - g.n_bar());
}

double par_at(const ParamGrid& g, Eigen::Index l) {
  return l < g.m_bar() ? g.pi(l) : g.nu(l - g.m_bar());
}

// Raw sorted axis lists + table in that sorted order, recovered from a grid.
struct SortedAxes {
  std::vector<Cplx> freq;
  std::vector<double> par;
  Mat values;
};

SortedAxes to_sorted(const ParamGrid& g) {
  const Eigen::Index N = g.n_bar() + g.n_low(), M = g.m_bar() + g.m_low();
  std::vector<Eigen::Index> fi(N), pi(M);
  std::iota(fi.begin(), fi.end(), 0);
  std::iota(pi.begin(), pi.end(), 0);
  std::sort(fi.begin(), fi.end(),
            [&](Eigen::Index a, Eigen::Index b) { return freq_less(freq_at(g, a), freq_at(g, b)); });
  std::sort(pi.begin(), pi.end(),
            [&](Eigen::Index a, Eigen::Index b) { return par_at(g, a) < par_at(g, b); });
  SortedAxes out;
  out.values.resize(N, M);
  for (Eigen::Index a = 0; a < N; ++a) {
    out.freq.push_back(freq_at(g, fi[a]));
    for (Eigen::Index b = 0; b < M; ++b) out.values(a, b) = g.phi(fi[a], pi[b]);
  }
  for (Eigen::Index b = 0; b < M; ++b) out.par.push_back(par_at(g, pi[b]));
  return out;
}

ParamGrid from_split(const SortedAxes& ax, const std::vector<int>& freq_side,
                     const std::vector<int>& par_side) {
  // side flag: 0 = bar block, 1 = low block; order within a block preserved
  const Eigen::Index N = Eigen::Index(ax.freq.size()), M = Eigen::Index(ax.par.size());
  std::vector<Eigen::Index> frow, prow;
  ParamGrid g;
  std::vector<Cplx> lam, mu;
  std::vector<double> pi, nu;
  for (Eigen::Index a = 0; a < N; ++a)
    if (freq_side[a] == 0) {
      lam.push_back(ax.freq[a]);
      frow.push_back(a);
    }
  for (Eigen::Index a = 0; a < N; ++a)
    if (freq_side[a] == 1) {
      mu.push_back(ax.freq[a]);
      frow.push_back(a);
    }
  for (Eigen::Index b = 0; b < M; ++b)
    if (par_side[b] == 0) {
      pi.push_back(ax.par[b]);
      prow.push_back(b);
    }
  for (Eigen::Index b = 0; b < M; ++b)
    if (par_side[b] == 1) {
      nu.push_back(ax.par[b]);
      prow.push_back(b);
    }
  g.lambda = Eigen::Map<const Vec>(lam.data(), Eigen::Index(lam.size()));
  g.mu = Eigen::Map<const Vec>(mu.data(), Eigen::Index(mu.size()));
  g.pi = Eigen::Map<const RVec>(pi.data(), Eigen::Index(pi.size()));
  g.nu = Eigen::Map<const RVec>(nu.data(), Eigen::Index(nu.size()));
  g.phi.resize(N, M);
  for (Eigen::Index a = 0; a < N; ++a)
    for (Eigen::Index b = 0; b < M; ++b) g.phi(a, b) = ax.values(frow[a], prow[b]);
  return g;
}

}  // namespace

void ParamGrid::validate() const {
  const Eigen::Index N = n_bar() + n_low(), M = m_bar() + m_low();
  if (phi.rows() != N || phi.cols() != M)
    throw_precondition("DimensionMismatch", "value table does not match the splits");
  if (n_bar() < 1 || n_low() < 1 || m_bar() < 1 || m_low() < 1)
    throw_precondition("DimensionMismatch", "every grid block needs at least one point");
  for (Eigen::Index a = 0; a < N; ++a)
    for (Eigen::Index b = a + 1; b < N; ++b)
      if (same_point(freq_at(*this, a), freq_at(*this, b)))
        throw_precondition("DuplicatePoints", "frequency points must be distinct");
  for (Eigen::Index a = 0; a < M; ++a)
    for (Eigen::Index b = a + 1; b < M; ++b)
      if (same_point(par_at(*this, a), par_at(*this, b)))
        throw_precondition("DuplicatePoints", "parameter points must be distinct");
}

ParamGrid make_grid(const std::vector<Cplx>& freq, const std::vector<double>& par,
                    const Mat& values) {
  if (values.rows() != Eigen::Index(freq.size()) ||
      values.cols() != Eigen::Index(par.size()))
    throw_precondition("DimensionMismatch", "value table must be N_freq × N_par");
  if (freq.size() < 2 || par.size() < 2)
    throw_precondition("TooFewPoints", "need at least 2 points per axis");

  SortedAxes ax;
  ax.freq = freq;
  ax.par = par;
  std::vector<Eigen::Index> fi(freq.size()), pi(par.size());
  std::iota(fi.begin(), fi.end(), 0);
  std::iota(pi.begin(), pi.end(), 0);
  std::sort(fi.begin(), fi.end(),
            [&](Eigen::Index a, Eigen::Index b) { return freq_less(freq[a], freq[b]); });
  std::sort(pi.begin(), pi.end(),
            [&](Eigen::Index a, Eigen::Index b) { return par[a] < par[b]; });
  ax.values.resize(values.rows(), values.cols());
  for (Eigen::Index a = 0; a < values.rows(); ++a)
    for (Eigen::Index b = 0; b < values.cols(); ++b)
      ax.values(a, b) = values(fi[a], pi[b]);
  for (size_t a = 0; a < fi.size(); ++a) ax.freq[a] = freq[fi[a]];
  for (size_t b = 0; b < pi.size(); ++b) ax.par[b] = par[pi[b]];

  std::vector<int> fs(freq.size()), ps(par.size());
  for (size_t a = 0; a < fs.size(); ++a) fs[a] = int(a % 2);
  for (size_t b = 0; b < ps.size(); ++b) ps[b] = int(b % 2);
  ParamGrid g = from_split(ax, fs, ps);
  g.validate();
  return g;
}

ParamGrid repartition(const ParamGrid& grid, int r, int q) {
  grid.validate();
  const Eigen::Index N = grid.n_bar() + grid.n_low();
  const Eigen::Index M = grid.m_bar() + grid.m_low();
  if (r < 0 || q < 0 || r + 2 > N || q + 2 > M)
    throw_precondition("DimensionMismatch",
                       "need r+2 frequency and q+2 parameter points");
  SortedAxes ax = to_sorted(grid);
  std::vector<int> fs(N), ps(M);
  for (Eigen::Index a = 0; a < N; ++a) fs[a] = a < r + 1 ? 0 : 1;
  for (Eigen::Index b = 0; b < M; ++b) ps[b] = b < q + 1 ? 0 : 1;
  return from_split(ax, fs, ps);
}

Mat slice_loewner(const ParamGrid& grid, GridAxis axis, Eigen::Index index) {
  grid.validate();
  if (axis == GridAxis::Frequency) {
    if (index < 0 || index >= grid.m_bar() + grid.m_low())
      throw_precondition("IndexOutOfRange", "parameter column index out of range");
    Mat out(grid.n_low(), grid.n_bar());
    for (Eigen::Index j = 0; j < grid.n_low(); ++j)
      for (Eigen::Index i = 0; i < grid.n_bar(); ++i)
        out(j, i) = (grid.phi(grid.n_bar() + j, index) - grid.phi(i, index)) /
                    (grid.mu(j) - grid.lambda(i));
    return out;
  }
  if (index < 0 || index >= grid.n_bar() + grid.n_low())
    throw_precondition("IndexOutOfRange", "frequency row index out of range");
  Mat out(grid.m_low(), grid.m_bar());
  for (Eigen::Index b = 0; b < grid.m_low(); ++b)
    for (Eigen::Index a = 0; a < grid.m_bar(); ++a)
      out(b, a) = (grid.phi(index, grid.m_bar() + b) - grid.phi(index, a)) /
                  (grid.nu(b) - grid.pi(a));
  return out;
}

std::pair<int, int> detect_orders(const ParamGrid& grid, double tol) {
  grid.validate();
  int r = 0, q = 0;
  for (Eigen::Index l = 0; l < grid.m_bar() + grid.m_low(); ++l)
    r = std::max(r, sv_rank(sv_of(slice_loewner(grid, GridAxis::Frequency, l)), tol));
  for (Eigen::Index k = 0; k < grid.n_bar() + grid.n_low(); ++k)
    q = std::max(q, sv_rank(sv_of(slice_loewner(grid, GridAxis::Parameter, k)), tol));
  return {r, q};
}

Mat assemble_2d(const ParamGrid& grid, int r, int q) {
  grid.validate();
  const Eigen::Index nb = grid.n_bar(), nl = grid.n_low();
  const Eigen::Index mb = grid.m_bar(), ml = grid.m_low();
  if (nb != r + 1 || mb != q + 1)
    throw_precondition("DimensionMismatch",
                       "grid must be re-partitioned to n̄=r+1, m̄=q+1");
  const Eigen::Index cols = nb * mb;
  Mat out = Mat::Zero(nb * ml + nl * mb + nl * ml, cols);

  // rows e_i ⊗ L_{λᵢ}: parameter-direction slice at each support frequency
  for (Eigen::Index i = 0; i < nb; ++i) {
    const Mat s = slice_loewner(grid, GridAxis::Parameter, i);
    for (Eigen::Index b = 0; b < ml; ++b)
      for (Eigen::Index j = 0; j < mb; ++j) out(i * ml + b, i * mb + j) = s(b, j);
  }
  // rows L_{πⱼ} ⊗ e_j: frequency-direction slice at each support parameter
  const Eigen::Index off1 = nb * ml;
  for (Eigen::Index j = 0; j < mb; ++j) {
    const Mat s = slice_loewner(grid, GridAxis::Frequency, j);
    for (Eigen::Index a = 0; a < nl; ++a)
      for (Eigen::Index i = 0; i < nb; ++i) out(off1 + j * nl + a, i * mb + j) = s(a, i);
  }
  // product divided differences over (μ_a, ν_b) against every support pair
  const Eigen::Index off2 = off1 + nl * mb;
  for (Eigen::Index a = 0; a < nl; ++a)
    for (Eigen::Index b = 0; b < ml; ++b)
      for (Eigen::Index i = 0; i < nb; ++i)
        for (Eigen::Index j = 0; j < mb; ++j)
          out(off2 + a * ml + b, i * mb + j) =
              (grid.phi(i, j) - grid.phi(nb + a, j) - grid.phi(i, mb + b) +
               grid.phi(nb + a, mb + b)) /
              ((grid.mu(a) - grid.lambda(i)) * (grid.nu(b) - grid.pi(j)));
  return out;
}

Mat barycentric_coeffs(const Mat& l2hat, int r, int q, double tol) {
  const Eigen::Index cols = Eigen::Index(r + 1) * Eigen::Index(q + 1);
  if (l2hat.cols() != cols)
    throw_precondition("DimensionMismatch", "column count must be (r+1)(q+1)");
  Eigen::JacobiSVD<Mat> svd(l2hat, Eigen::ComputeThinV);
  const RVec sv = svd.singularValues();
  // Deficiency is read off the spectrum gap: a unique null direction shows as
  // one singular value far below its neighbor. A flat relative cutoff would
  // misread the ill-conditioned (but regular) tail of larger problems.
  if (cols > 1 && sv(0) > 0) {
    const double smallest = sv(cols - 1), next = sv(cols - 2);
    if (smallest > tol * sv(0)) {
      log_info("no exact null vector at tolerance; using the smallest singular direction");
    } else if (next <= tol * sv(0) && next < 1e3 * std::max(smallest, 1e-300)) {
      const int deficiency = int(cols) - sv_rank(sv, tol);
      throw_numerical("NullSpaceDimension",
                      "null space dimension " + std::to_string(deficiency) +
                          ", expected 1 (orders too high for the data)");
    }
  }
  Vec v = svd.matrixV().col(cols - 1);

  v /= v.norm();
  for (Eigen::Index k = 0; k < cols; ++k)
    if (std::abs(v(k)) > 1e-12) {
      v *= std::conj(v(k)) / std::abs(v(k));
      break;
    }
  Mat c(r + 1, q + 1);
  for (Eigen::Index i = 0; i <= r; ++i)
    for (Eigen::Index j = 0; j <= q; ++j) c(i, j) = v(i * (q + 1) + j);
  return c;
}

Cplx eval_parametric(const ParametricBarycentricModel& model, Cplx xi, double rho) {
  const Eigen::Index R = model.lambda_support.size(), Q = model.pi_support.size();
  Eigen::Index hit_i = -1, hit_j = -1;
  for (Eigen::Index i = 0; i < R; ++i)
    if (same_point(xi, model.lambda_support(i))) hit_i = i;
  for (Eigen::Index j = 0; j < Q; ++j)
    if (same_point(Cplx(rho, 0), Cplx(model.pi_support(j), 0))) hit_j = j;

  if (hit_i >= 0 && hit_j >= 0) return model.w(hit_i, hit_j);
  Cplx num = 0, den = 0;
  double mag = 0;
  auto accumulate = [&](Cplx coeff, Cplx value, Cplx weight) {
    num += coeff * value * weight;
    den += coeff * weight;
    mag += std::abs(coeff * weight);
  };
  if (hit_i >= 0) {
    // limit along the frequency axis: one-variable barycentric in ρ on row i
    for (Eigen::Index j = 0; j < Q; ++j)
      accumulate(model.c(hit_i, j), model.w(hit_i, j),
                 1.0 / (rho - model.pi_support(j)));
  } else if (hit_j >= 0) {
    for (Eigen::Index i = 0; i < R; ++i)
      accumulate(model.c(i, hit_j), model.w(i, hit_j),
                 1.0 / (xi - model.lambda_support(i)));
  } else {
    for (Eigen::Index i = 0; i < R; ++i)
      for (Eigen::Index j = 0; j < Q; ++j)
        accumulate(model.c(i, j), model.w(i, j),
                   1.0 / ((xi - model.lambda_support(i)) * (rho - model.pi_support(j))));
  }
  if (std::abs(den) < 1e-15 * std::max(mag, 1e-300))
    throw_numerical("DenominatorZero", "barycentric denominator vanished (pole)");
  return num / den;
}

Cplx eval_parametric_block(const ParametricBarycentricModel& model, Cplx xi,
                           double rho) {
  const int r = model.r, q = model.q;
  const Eigen::Index N = r + 2 * q + 2;
  // two-band interpolation block: row k has x−η₀ in column 0 and η_{k+1}−x
  // in column k+1
  auto band = [](const Vec& eta, Cplx x) {
    const Eigen::Index t = eta.size() - 1;
    Mat j = Mat::Zero(t, t + 1);
    for (Eigen::Index k = 0; k < t; ++k) {
      j(k, 0) = x - eta(0);
      j(k, k + 1) = eta(k + 1) - x;
    }
    return j;
  };
  Vec pis = model.pi_support.cast<Cplx>();
  Vec tau(q + 1);
  for (int k = 0; k <= q; ++k) {
    Cplx prod = 1.0;
    for (int l = 0; l <= q; ++l)
      if (l != k) prod *= pis(k) - pis(l);
    tau(k) = 1.0 / prod;
  }
  const Mat cw = model.c.cwiseProduct(model.w);

  Mat P = Mat::Zero(N, N);
  P.block(0, 0, r, r + 1) = band(model.lambda_support, xi);
  P.block(r, 0, q + 1, r + 1) = model.c.transpose();
  if (q > 0) P.block(r, r + 1, q + 1, q) = band(pis, Cplx(rho, 0)).transpose();
  for (int k = 0; k < q; ++k)
    for (int j = 0; j <= r; ++j)
      P(r + q + 1 + k, j) = -((pis(0) - pis(q)) / tau(0) * cw(j, 0) -
                              (pis(k + 1) - pis(q)) / tau(k + 1) * cw(j, k + 1));
  for (int j = 0; j <= r; ++j) P(r + 2 * q + 1, j) = cw.row(j).sum();
  if (q > 0) P.block(r + q + 1, r + q + 1, q, q + 1) = band(pis, Cplx(rho, 0));
  P.block(r + 2 * q + 1, r + q + 1, 1, q + 1) = tau.transpose();

  Vec B = Vec::Zero(N), C = Vec::Zero(N);
  B.segment(r, q + 1) = tau;
  C(N - 1) = -1.0;

  Eigen::PartialPivLU<Mat> lu(P);
  if (rcond_lu(P) < 1e-14)
    throw_numerical("DenominatorZero", "evaluation system singular (pole)");
  return C.transpose() * lu.solve(B);
}

ParametricBarycentricModel realify_coeffs(const ParametricBarycentricModel& model) {
  const Eigen::Index R = model.lambda_support.size();
  std::vector<Eigen::Index> conj_of(R, -1);
  for (Eigen::Index i = 0; i < R; ++i) {
    for (Eigen::Index k = 0; k < R; ++k)
      if (same_point(std::conj(model.lambda_support(i)), model.lambda_support(k)))
        conj_of[i] = k;
    if (conj_of[i] < 0)
      throw_precondition("NotConjugateClosed",
                         "frequency support not closed under conjugation");
  }
  ParametricBarycentricModel out = model;
  for (Eigen::Index i = 0; i < R; ++i)
    for (Eigen::Index j = 0; j < out.c.cols(); ++j)
      out.c(i, j) = 0.5 * (model.c(i, j) + std::conj(model.c(conj_of[i], j)));
  out.c /= out.c.norm();
  for (Eigen::Index i = 0; i < out.c.size(); ++i)
    if (std::abs(out.c(i)) > 1e-12) {
      out.c *= std::conj(out.c(i)) / std::abs(out.c(i));
      break;
    }
  return out;
}

ParametricBarycentricModel fit_parametric(const std::vector<Cplx>& freq,
                                          const std::vector<double>& par,
                                          const Mat& values, double tol) {
  ParamGrid g0 = make_grid(freq, par, values);
  auto [r, q] = detect_orders(g0, tol);
  if (Eigen::Index(freq.size()) < r + 2 || Eigen::Index(par.size()) < q + 2)
    throw_precondition("DimensionMismatch",
                       "need at least r+2 frequencies and q+2 parameters");
  ParamGrid g = repartition(g0, r, q);
  ParametricBarycentricModel model;
  model.r = r;
  model.q = q;
  model.lambda_support = g.lambda;
  model.pi_support = g.pi;
  model.c = barycentric_coeffs(assemble_2d(g, r, q), r, q, tol);
  model.w = g.phi.topLeftCorner(r + 1, q + 1);
  return model;
}

}  // namespace loewner
