// Desk-scale test-system generators: irrational transfer functions, a delay
// model, a structural chain, the viscous-convection quadratic-bilinear spec,
// input signal fixtures, and the spectral-shift preprocessing trick.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "loewner/bilinear.hpp"
#include "loewner/model.hpp"

namespace loewner {

// Matrix-valued frequency evaluator with a deterministic closed form.
// Points outside the domain make the evaluator throw.
struct IrrationalTF {
  std::function<Mat(Cplx)> evaluator;
  std::string description;
};

// Transport line measured at position x behind a second-order actuator:
// G(x,s) = (sqrt(pi)/sqrt(s)) e^{-x^2 s} w0^2/(s^2 + d*w0*s + w0^2),
// principal branch of sqrt. s = 0 is a branch point.
Cplx transport_tf(double x, Cplx s, double omega0 = 3.0, double damping = 0.5);
IrrationalTF transport_system(double x, double omega0 = 3.0,
                              double damping = 0.5);

// Delay model H(s) = (C0 + C1 e^{-tau_m s}) (sE - A0 - A1 e^{tau1 s}
// - A2 e^{tau2 s})^{-1} B.
struct GustModel {
  Mat E, A0, A1, A2, B, C0, C1;
  double tau1 = 0.0, tau2 = 0.0, tau_m = 0.0;

  Eigen::Index n() const { return A0.rows(); }
  void validate() const;
};
Mat gust_delay_tf(const GustModel& model, Cplx s);
// Seeded stable synthetic fixture (n = 12, SISO, short delays).
GustModel gust_fixture(std::uint64_t seed = 0);
IrrationalTF gust_system(const GustModel& model);

// Pointwise frequency weight used to tame integrators or delays before a
// rational fit; inverted afterwards on the fitted model.
using SpectralWeight = std::function<Cplx(Cplx)>;
SpectralWeight default_shift_weight();    // s / ((s+1e-2)(s+1e-3))
SpectralWeight delay_weight(double tau);  // e^{s tau}
std::vector<FrequencySample> spectral_shift(
    const std::vector<FrequencySample>& samples, const SpectralWeight& weight);
// Composes the fitted model with the inverse weight. Evaluator form only;
// the weight is not folded into the realization.
std::function<Mat(Cplx)> spectral_unshift(const DescriptorModel& model,
                                          const SpectralWeight& weight);

// Mass-spring-damper chain, three unit masses per floor, springs stiffening
// toward the ground, Rayleigh damping alpha*I + beta*K. First-order form of
// dimension 6*floors; input forces the ground-side mass (scaled), output is
// the top-mass displacement.
DescriptorModel structural_chain(int floors, double scaling = 1e4,
                                 double alpha = 1.0, double beta = 0.02);

// Viscous convection-diffusion on (0,1), n interior nodes, h = 1/(n+1),
// upwind quadratic convection, left-boundary input, right Dirichlet wall,
// output = spatial mean of the state.
QuadraticBilinearSpec burgers_spec(Eigen::Index n, double viscosity);

// Paper-fixed input signals.
double building_input(double t);  // (cos 50t + 2 cos 20t + 3 cos 10t)/10
double burgers_input(double t);   // (cos 2*pi*t + sin 20*pi*t e^{-t/5})/5
TimeSeries building_series(double step = 4e-3, Eigen::Index samples = 1251);
TimeSeries burgers_series(double step = 5e-3, Eigen::Index samples = 2001);

}  // namespace loewner
