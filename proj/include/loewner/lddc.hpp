// Data-driven controller synthesis: ideal-controller samples from plant
// frequency data and a reference model, rational identification of the
// controller, and closed-loop evaluation against the reference.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "loewner/lti.hpp"
#include "loewner/model.hpp"

namespace loewner {

// SISO reference closed loop M. Either a direct evaluator, or the closed
// loop formed pointwise from the plant data and a known controller
// (loop_controller set); the latter needs no plant model.
struct ReferenceModel {
  std::function<Cplx(Cplx)> evaluator;
  std::optional<DescriptorModel> loop_controller;
  std::string description;

  // M at a point given the plant value there.
  Cplx value(Cplx z, Cplx plant) const;
};

// M(s) = num(s)/den(s), coefficients in ascending powers of s.
ReferenceModel rational_reference(const std::vector<double>& num,
                                  const std::vector<double>& den);
// M(z) = H(z)K0(z) / (1 + H(z)K0(z)), H read from the plant data pointwise.
ReferenceModel closed_loop_reference(const DescriptorModel& controller);

struct ControllerSamples {
  std::vector<FrequencySample> samples;  // 1x1 responses
  std::vector<Cplx> dropped;             // points where M was numerically 1
  void validate() const;
};

// K*(z_k) = M(z_k) / (H(z_k) (1 - M(z_k))) per plant sample. Points where
// |1 - M| < 1e-12 are dropped with a warning; if every point drops, that is
// an error.
ControllerSamples ideal_controller_samples(
    const std::vector<FrequencySample>& plant, const ReferenceModel& reference);

// Rational fit of the ideal samples; order detection and reduction follow
// the frequency-domain pipeline. Needs at least 4 samples.
LtiFit identify_controller(const ControllerSamples& samples,
                           const FitOptions& options = FitOptions());

struct ClosedLoopReport {
  std::vector<Cplx> points;
  std::vector<Cplx> achieved;  // H K / (1 + H K)
  std::vector<Cplx> target;    // M at the same points
  double max_abs_error = 0.0;
  double mean_abs_error = 0.0;
};

// Pointwise closed loop of the plant data with controller K, compared
// against the reference.
ClosedLoopReport closed_loop_eval(const std::vector<FrequencySample>& plant,
                                  const DescriptorModel& controller,
                                  const ReferenceModel& reference);

}  // namespace loewner
