#include "loewner/benchmarks.hpp"

#include <cmath>

#include <Eigen/LU>

namespace loewner {

Cplx transport_tf(double x, Cplx s, double omega0, double damping) {
  if (std::abs(s) < 1e-300)
    throw_precondition("BranchPoint", "transport transfer has a branch point at s = 0");
  const Cplx actuator = omega0 * omega0 /
                        (s * s + damping * omega0 * s + omega0 * omega0);
  return std::sqrt(M_PI) / std::sqrt(s) * std::exp(-x * x * s) * actuator;
}

IrrationalTF transport_system(double x, double omega0, double damping) {
  IrrationalTF tf;
  tf.description = "transport line at x = " + std::to_string(x);
  tf.evaluator = [x, omega0, damping](Cplx s) {
    Mat h(1, 1);
    h(0, 0) = transport_tf(x, s, omega0, damping);
    return h;
  };
  return tf;
}

void GustModel::validate() const {
  const Eigen::Index nn = A0.rows();
  if (A0.cols() != nn || E.rows() != nn || E.cols() != nn || A1.rows() != nn ||
      A1.cols() != nn || A2.rows() != nn || A2.cols() != nn || B.rows() != nn ||
      C0.cols() != nn || C1.cols() != nn || C0.rows() != C1.rows())
    throw_precondition("ShapeMismatch", "delay model blocks disagree in size");
}

Mat gust_delay_tf(const GustModel& model, Cplx s) {
  model.validate();
  const Mat pencil = s * model.E - model.A0 - std::exp(model.tau1 * s) * model.A1 -
                     std::exp(model.tau2 * s) * model.A2;
  Eigen::PartialPivLU<Mat> lu(pencil);
  if (lu.rcond() < 1e-13)
    throw_numerical("SingularResolvent", "delay resolvent is singular at the requested point");
  const Mat state = lu.solve(model.B);
  return (model.C0 + std::exp(-model.tau_m * s) * model.C1) * state;
}

GustModel gust_fixture(std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::Index n = 12;
  RMat e = RMat::Identity(n, n), a0(n, n), a1(n, n), a2(n, n);
  RMat b(n, 1), c0(1, n), c1(1, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      e(i, j) += 0.03 * rng.normal();
      a0(i, j) = 0.4 * rng.normal();
      a1(i, j) = 0.05 * rng.normal();
      a2(i, j) = 0.05 * rng.normal();
    }
    // strong negative diagonal keeps the delay-free part stable and the
    // delay terms a mild perturbation on the imaginary axis
    a0(i, i) -= 4.0 + 0.5 * rng.uniform();
    b(i, 0) = rng.normal();
    c0(0, i) = rng.normal();
    c1(0, i) = 0.3 * rng.normal();
  }
  GustModel g;
  g.E = e.cast<Cplx>();
  g.A0 = a0.cast<Cplx>();
  g.A1 = a1.cast<Cplx>();
  g.A2 = a2.cast<Cplx>();
  g.B = b.cast<Cplx>();
  g.C0 = c0.cast<Cplx>();
  g.C1 = c1.cast<Cplx>();
  g.tau1 = 0.1;
  g.tau2 = 0.05;
  g.tau_m = 0.2;
  return g;
}

IrrationalTF gust_system(const GustModel& model) {
  IrrationalTF tf;
  tf.description = "delay model, n = " + std::to_string(model.n());
  tf.evaluator = [model](Cplx s) { return gust_delay_tf(model, s); };
  return tf;
}

SpectralWeight default_shift_weight() {
  return [](Cplx s) { return s / ((s + 1e-2) * (s + 1e-3)); };
}

SpectralWeight delay_weight(double tau) {
  return [tau](Cplx s) { return std::exp(s * tau); };
}

std::vector<FrequencySample> spectral_shift(
    const std::vector<FrequencySample>& samples, const SpectralWeight& weight) {
  std::vector<FrequencySample> out;
  out.reserve(samples.size());
  for (const FrequencySample& sample : samples) {
    const Cplx w = weight(sample.point);
    if (!(std::abs(w) > 1e-300) || !std::isfinite(std::abs(w)))
      throw_precondition("WeightZeroAtPoint",
                         "shift weight vanishes or blows up at a sample point");
    out.push_back({sample.point, sample.response * w});
  }
  return out;
}

std::function<Mat(Cplx)> spectral_unshift(const DescriptorModel& model,
                                          const SpectralWeight& weight) {
  return [model, weight](Cplx s) {
    const Cplx w = weight(s);
    if (!(std::abs(w) > 1e-300) || !std::isfinite(std::abs(w)))
      throw_precondition("WeightZeroAtPoint",
                         "shift weight vanishes or blows up at the requested point");
    return Mat(eval_transfer(model, s) / w);
  };
}

DescriptorModel structural_chain(int floors, double scaling, double alpha,
                                 double beta) {
  if (floors < 1)
    throw_precondition("BadFloorCount", "need at least one floor");
  const Eigen::Index nm = 3 * Eigen::Index(floors);
  RMat k = RMat::Zero(nm, nm);
  for (Eigen::Index i = 0; i < nm; ++i) {
    const double ki = 900.0 * std::pow(0.9, double(i));
    k(i, i) += ki;
    if (i + 1 < nm) {
      const double kn = 900.0 * std::pow(0.9, double(i + 1));
      k(i, i) += kn;
      k(i, i + 1) -= kn;
      k(i + 1, i) -= kn;
    }
  }
  const RMat damp = alpha * RMat::Identity(nm, nm) + beta * k;
  RMat a = RMat::Zero(2 * nm, 2 * nm);
  a.topRightCorner(nm, nm) = RMat::Identity(nm, nm);
  a.bottomLeftCorner(nm, nm) = -k;
  a.bottomRightCorner(nm, nm) = -damp;
  RMat b = RMat::Zero(2 * nm, 1);
  b(nm, 0) = scaling;
  RMat c = RMat::Zero(1, 2 * nm);
  c(0, nm - 1) = 1.0;
  DescriptorModel md;
  md.E = Mat::Identity(2 * nm, 2 * nm);
  md.A = a.cast<Cplx>();
  md.B = b.cast<Cplx>();
  md.C = c.cast<Cplx>();
  md.D = Mat::Zero(1, 1);
  md.field = Field::Real;
  return md;
}

QuadraticBilinearSpec burgers_spec(Eigen::Index n, double viscosity) {
  if (n < 2) throw_precondition("GridTooSmall", "need at least two interior nodes");
  if (!(viscosity > 0)) throw_precondition("BadViscosity", "viscosity must be positive");
  const double h = 1.0 / double(n + 1);
  QuadraticBilinearSpec spec;
  spec.F1 = RMat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    spec.F1(i, i) = -2.0 * viscosity / (h * h);
    if (i > 0) spec.F1(i, i - 1) = viscosity / (h * h);
    if (i + 1 < n) spec.F1(i, i + 1) = viscosity / (h * h);
  }
  // upwind quadratic convection -(v_i^2 - v_i v_{i-1})/h; the i = 0 neighbor
  // is the driven boundary, which turns into the bilinear input terms
  spec.F2 = RMat::Zero(n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    spec.F2(i, i * n + i) -= 1.0 / h;
    if (i > 0) spec.F2(i, i * n + (i - 1)) += 1.0 / h;
  }
  spec.G0 = RMat::Zero(n, 1);
  spec.G0(0, 0) = viscosity / (h * h);
  spec.G1 = RMat::Zero(n, n);
  spec.G1(0, 0) = 1.0 / h;
  spec.c = RMat::Constant(1, n, 1.0 / double(n));
  return spec;
}

double building_input(double t) {
  return (std::cos(50.0 * t) + 2.0 * std::cos(20.0 * t) +
          3.0 * std::cos(10.0 * t)) /
         10.0;
}

double burgers_input(double t) {
  const double pi = M_PI;
  return (std::cos(2.0 * pi * t) +
          std::sin(20.0 * pi * t) * std::exp(-t / 5.0)) /
         5.0;
}

namespace {
TimeSeries sampled(double (*signal)(double), double step, Eigen::Index samples) {
  if (!(step > 0)) throw_precondition("BadStep", "sample period must be positive");
  if (samples < 1) throw_precondition("BadSampleCount", "need at least one sample");
  TimeSeries ts;
  ts.step = step;
  ts.u.resize(samples, 1);
  for (Eigen::Index k = 0; k < samples; ++k) ts.u(k, 0) = signal(double(k) * step);
  return ts;
}
}  // namespace

TimeSeries building_series(double step, Eigen::Index samples) {
  return sampled(&building_input, step, samples);
}

TimeSeries burgers_series(double step, Eigen::Index samples) {
  return sampled(&burgers_input, step, samples);
}

}  // namespace loewner
