// Python module exposing the main operations: LTI fitting and evaluation,
// the two-variable fit, time-domain realization, bilinear fitting from a
// kernel callback, controller identification, and the benchmark generators.
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "loewner/benchmarks.hpp"
#include "loewner/hankel.hpp"
#include "loewner/io.hpp"
#include "loewner/lddc.hpp"
#include "loewner/lti.hpp"
#include "loewner/parametric.hpp"

namespace py = pybind11;
using namespace loewner;

namespace {

std::vector<FrequencySample> to_samples(const Vec& points,
                                        const py::object& values) {
  std::vector<FrequencySample> samples(size_t(points.size()));
  bool scalar = false;
  Vec flat;
  try {
    flat = values.cast<Vec>();
    scalar = true;
  } catch (const py::cast_error&) {
  }
  if (scalar) {
    if (flat.size() != points.size())
      throw_precondition("ShapeMismatch", "one value per point");
    for (Eigen::Index k = 0; k < points.size(); ++k) {
      samples[size_t(k)].point = points(k);
      samples[size_t(k)].response = Mat::Constant(1, 1, flat(k));
    }
    return samples;
  }
  const py::sequence seq = values.cast<py::sequence>();
  if (Eigen::Index(py::len(seq)) != points.size())
    throw_precondition("ShapeMismatch", "one response matrix per point");
  for (Eigen::Index k = 0; k < points.size(); ++k) {
    samples[size_t(k)].point = points(k);
    samples[size_t(k)].response = seq[size_t(k)].cast<Mat>();
  }
  return samples;
}

py::dict fit_dict(const LtiFit& fit) {
  py::dict out;
  out["model"] = fit.model;
  out["order"] = fit.model.n();
  out["rank_stack"] = fit.orders.r;
  out["rank_loewner"] = fit.orders.nu;
  out["sv_stack"] = fit.orders.sv_rowcat;
  out["sv_loewner"] = fit.orders.sv_L;
  out["improper"] = fit.improper;
  out["feedthrough"] = fit.D;
  return out;
}

}  // namespace

PYBIND11_MODULE(_loewner, m) {
  m.doc() = "Loewner-framework modeling toolkit";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Numerical)
        PyErr_SetString(PyExc_ArithmeticError, e.what());
      else
        PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<DescriptorModel>(m, "DescriptorModel")
      .def(py::init<>())
      .def_readwrite("E", &DescriptorModel::E)
      .def_readwrite("A", &DescriptorModel::A)
      .def_readwrite("B", &DescriptorModel::B)
      .def_readwrite("C", &DescriptorModel::C)
      .def_readwrite("D", &DescriptorModel::D)
      .def_readwrite("step", &DescriptorModel::step)
      .def_property(
          "real",
          [](const DescriptorModel& s) { return s.field == Field::Real; },
          [](DescriptorModel& s, bool real) {
            s.field = real ? Field::Real : Field::Complex;
          })
      .def_property_readonly("n", &DescriptorModel::n)
      .def_property_readonly("m", &DescriptorModel::m)
      .def_property_readonly("p", &DescriptorModel::p)
      .def_property_readonly("discrete", &DescriptorModel::discrete)
      .def("__repr__", [](const DescriptorModel& s) {
        return "<DescriptorModel n=" + std::to_string(s.n()) +
               (s.discrete() ? " discrete>" : " continuous>");
      });

  py::class_<BilinearModel>(m, "BilinearModel")
      .def(py::init<>())
      .def_readwrite("E", &BilinearModel::E)
      .def_readwrite("A", &BilinearModel::A)
      .def_readwrite("N", &BilinearModel::N)
      .def_readwrite("B", &BilinearModel::B)
      .def_readwrite("C", &BilinearModel::C)
      .def_property_readonly("n", &BilinearModel::n);

  py::class_<ParametricBarycentricModel>(m, "ParametricModel")
      .def_readonly("lambda_support", &ParametricBarycentricModel::lambda_support)
      .def_readonly("pi_support", &ParametricBarycentricModel::pi_support)
      .def_readonly("c", &ParametricBarycentricModel::c)
      .def_readonly("w", &ParametricBarycentricModel::w)
      .def_readonly("r", &ParametricBarycentricModel::r)
      .def_readonly("q", &ParametricBarycentricModel::q);

  m.def(
      "fit_lti",
      [](const Vec& points, const py::object& values, double tol, int order) {
        FitOptions opt;
        opt.tol = tol;
        opt.order = order;
        return fit_dict(fit_lti(to_samples(points, values), opt));
      },
      py::arg("points"), py::arg("values"), py::arg("tol") = kRankTol,
      py::arg("order") = -1,
      "Fit a descriptor model to frequency samples. values: one complex "
      "number per point (SISO) or one p x m matrix per point.");

  m.def(
      "eval_transfer",
      [](const DescriptorModel& model, Cplx xi) {
        return eval_transfer(model, xi);
      },
      py::arg("model"), py::arg("point"));

  m.def(
      "simulate",
      [](const DescriptorModel& model, const RMat& u, double step) {
        TimeSeries input;
        input.step = step;
        input.u = u;
        DescriptorModel sys = model;
        if (!sys.discrete()) sys = discretize_backward_euler(sys, step);
        return simulate_discrete(sys, input, Vec::Zero(sys.n())).y;
      },
      py::arg("model"), py::arg("u"), py::arg("step"),
      "Drive the model from rest; continuous models are discretized with "
      "the backward Euler map at the given step. Returns the outputs.");

  m.def(
      "fit_time",
      [](const RMat& u, const RMat& y, double step, Eigen::Index order,
         Eigen::Index reduce) {
        TimeSeries series;
        series.step = step;
        series.u = u;
        series.y = y;
        series.has_y = true;
        const MarkovSequence markov = recover_markov(series, 2 * order);
        return reduce > 0 ? reduce_hankel(markov, order, reduce, step)
                          : realize_from_impulse(markov, order, step);
      },
      py::arg("u"), py::arg("y"), py::arg("step"), py::arg("order"),
      py::arg("reduce") = 0,
      "Discrete realization from one input/output record (zero initial "
      "state).");

  m.def(
      "fit_parametric",
      [](const std::vector<Cplx>& freq, const std::vector<double>& par,
         const Mat& values, double tol) {
        return fit_parametric(freq, par, values, tol);
      },
      py::arg("freq"), py::arg("par"), py::arg("values"),
      py::arg("tol") = kRankTol,
      "Two-variable barycentric fit of a value table values[i, j] = "
      "H(freq[i], par[j]).");

  m.def(
      "eval_parametric",
      [](const ParametricBarycentricModel& model, Cplx xi, double rho) {
        return eval_parametric(model, xi, rho);
      },
      py::arg("model"), py::arg("point"), py::arg("param"));

  m.def(
      "fit_bilinear",
      [](const std::function<Cplx(std::vector<Cplx>)>& kernel,
         const std::vector<Cplx>& right, const std::vector<Cplx>& left,
         Eigen::Index chain_depth, Eigen::Index order) {
        const auto tuples = make_tuples(right, left, chain_depth);
        const KernelOracle oracle = [&kernel](const std::vector<Cplx>& pts) {
          return kernel(pts);
        };
        const auto set = build_bilinear_set(oracle, tuples);
        BilinearModel model =
            order > 0 ? reduce_bilinear(set, order) : realize_bilinear(set);
        if (model.effectively_real(1e-9)) model = model.to_real(1e-9);
        return model;
      },
      py::arg("kernel"), py::arg("right"), py::arg("left"),
      py::arg("chain_depth") = 0, py::arg("order") = 0,
      "Bilinear fit from a kernel callback taking a tuple of complex points.");

  m.def(
      "eval_kernel",
      [](const BilinearModel& model, const std::vector<Cplx>& points) {
        return eval_generalized_tf(model, points);
      },
      py::arg("model"), py::arg("points"));

  m.def(
      "identify_controller",
      [](const Vec& points, const py::object& plant_values,
         const std::vector<double>& ref_num, const std::vector<double>& ref_den,
         double tol, int order) {
        const auto plant = to_samples(points, plant_values);
        const ReferenceModel reference = rational_reference(ref_num, ref_den);
        const auto ideal = ideal_controller_samples(plant, reference);
        FitOptions opt;
        opt.tol = tol;
        opt.order = order;
        const LtiFit fit = identify_controller(ideal, opt);
        const ClosedLoopReport report =
            closed_loop_eval(plant, fit.model, reference);
        py::dict out = fit_dict(fit);
        out["max_abs_error"] = report.max_abs_error;
        out["mean_abs_error"] = report.mean_abs_error;
        out["dropped"] = ideal.dropped;
        return out;
      },
      py::arg("points"), py::arg("plant_values"), py::arg("ref_num"),
      py::arg("ref_den"), py::arg("tol") = kRankTol, py::arg("order") = -1,
      "Identify a controller so the closed loop tracks num/den (ascending "
      "coefficients) from plant frequency data alone.");

  m.def("transport_tf", &transport_tf, py::arg("x"), py::arg("s"),
        py::arg("omega0") = 3.0, py::arg("damping") = 0.5);
  m.def("structural_chain", &structural_chain, py::arg("floors"),
        py::arg("scaling") = 1e4, py::arg("alpha") = 1.0,
        py::arg("beta") = 0.02);
  m.def("log_space", &log_space, py::arg("lo"), py::arg("hi"), py::arg("n"));

  m.def(
      "save_model",
      [](const DescriptorModel& model, const std::string& path) {
        write_text_file(path, descriptor_to_json(model));
      },
      py::arg("model"), py::arg("path"));
  m.def(
      "load_model",
      [](const std::string& path) {
        return descriptor_from_json(read_text_file(path));
      },
      py::arg("path"));
}
