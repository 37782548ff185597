#include "loewner/lddc.hpp"

#include <cmath>

namespace loewner {

namespace {

Cplx scalar_response(const FrequencySample& sample) {
  if (sample.response.rows() != 1 || sample.response.cols() != 1)
    throw_precondition("SisoRequired", "controller synthesis needs scalar plant data");
  return sample.response(0, 0);
}

Cplx horner(const std::vector<double>& coeffs, Cplx s) {
  Cplx acc(0, 0);
  for (size_t i = coeffs.size(); i > 0; --i) acc = acc * s + coeffs[i - 1];
  return acc;
}

}  // namespace

Cplx ReferenceModel::value(Cplx z, Cplx plant) const {
  if (loop_controller) {
    const Cplx k0 = eval_transfer(*loop_controller, z)(0, 0);
    const Cplx open = plant * k0;
    if (std::abs(1.0 + open) < 1e-12)
      throw_numerical("ClosedLoopSingularAtPoint",
                      "reference loop 1 + H K0 vanishes at a data point");
    return open / (1.0 + open);
  }
  if (!evaluator)
    throw_precondition("MissingEvaluator", "reference model has no evaluator");
  return evaluator(z);
}

ReferenceModel rational_reference(const std::vector<double>& num,
                                  const std::vector<double>& den) {
  if (num.empty() || den.empty())
    throw_precondition("EmptyPolynomial", "rational reference needs coefficients");
  ReferenceModel m;
  m.description = "rational reference";
  m.evaluator = [num, den](Cplx s) {
    const Cplx d = horner(den, s);
    if (std::abs(d) < 1e-300)
      throw_numerical("ReferencePoleAtPoint", "reference denominator vanishes");
    return horner(num, s) / d;
  };
  return m;
}

ReferenceModel closed_loop_reference(const DescriptorModel& controller) {
  controller.validate();
  if (controller.m() != 1 || controller.p() != 1)
    throw_precondition("SisoRequired", "loop controller must be scalar");
  ReferenceModel m;
  m.description = "closed loop of a fixed controller";
  m.loop_controller = controller;
  return m;
}

void ControllerSamples::validate() const {
  for (size_t i = 0; i < samples.size(); ++i)
    for (size_t j = i + 1; j < samples.size(); ++j)
      if (samples[i].point == samples[j].point)
        throw_precondition("DuplicatePoint", "controller samples share a point");
}

ControllerSamples ideal_controller_samples(
    const std::vector<FrequencySample>& plant, const ReferenceModel& reference) {
  if (plant.empty())
    throw_precondition("EmptyData", "no plant samples");
  log_info("reference-model achievability is assumed, not checked");
  ControllerSamples out;
  for (const FrequencySample& sample : plant) {
    const Cplx h = scalar_response(sample);
    if (std::abs(h) < 1e-300)
      throw_precondition("PlantZeroAtPoint",
                         "plant response vanishes; ideal controller undefined");
    const Cplx m = reference.value(sample.point, h);
    if (std::abs(1.0 - m) < 1e-12) {
      log_info("reference is numerically 1 at a data point; dropping it");
      out.dropped.push_back(sample.point);
      continue;
    }
    Mat k(1, 1);
    k(0, 0) = m / (h * (1.0 - m));
    out.samples.push_back({sample.point, k});
  }
  if (out.samples.empty())
    throw_precondition("ReferenceUnityAtPoint",
                       "reference equals 1 at every data point");
  return out;
}

LtiFit identify_controller(const ControllerSamples& samples,
                           const FitOptions& options) {
  if (samples.samples.size() < 4)
    throw_precondition("TooFewSamples", "need at least 4 controller samples");
  samples.validate();
  return fit_lti(samples.samples, options);
}

ClosedLoopReport closed_loop_eval(const std::vector<FrequencySample>& plant,
                                  const DescriptorModel& controller,
                                  const ReferenceModel& reference) {
  controller.validate();
  ClosedLoopReport report;
  double sum = 0.0;
  for (const FrequencySample& sample : plant) {
    const Cplx h = scalar_response(sample);
    const Cplx k = eval_transfer(controller, sample.point)(0, 0);
    const Cplx open = h * k;
    if (std::abs(1.0 + open) < 1e-12)
      throw_numerical("ClosedLoopSingularAtPoint",
                      "1 + H K vanishes at a data point");
    const Cplx achieved = open / (1.0 + open);
    const Cplx target = reference.value(sample.point, h);
    report.points.push_back(sample.point);
    report.achieved.push_back(achieved);
    report.target.push_back(target);
    const double err = std::abs(achieved - target);
    report.max_abs_error = std::max(report.max_abs_error, err);
    sum += err;
  }
  if (!report.points.empty())
    report.mean_abs_error = sum / double(report.points.size());
  return report;
}

}  // namespace loewner
