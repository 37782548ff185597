// Command-line front end. Subcommands: fit-lti, fit-param, fit-time,
// fit-bilinear, lddc, freqresp, simulate, bench. All file formats live in
// loewner/io.hpp. Exit codes: 0 ok, 2 parse/schema, 3 numerical,
// 4 precondition; the error name goes to standard error. Verbosity comes
// from the LOEWNER_LOG environment variable (quiet | info | debug).
#include <charconv>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "loewner/benchmarks.hpp"
#include "loewner/hankel.hpp"
#include "loewner/io.hpp"
#include "loewner/lddc.hpp"
#include "loewner/lti.hpp"
#include "loewner/parametric.hpp"

using namespace loewner;
using nlohmann::json;

namespace {

double parse_num(const std::string& text, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw_parse("ParseError", std::string("bad ") + what + ": '" + text + "'");
  return v;
}

std::vector<double> parse_coeff_list(const std::string& text, const char* what) {
  std::vector<double> out;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t comma = std::min(text.find(',', pos), text.size());
    out.push_back(parse_num(text.substr(pos, comma - pos), what));
    pos = comma + 1;
  }
  return out;
}

// Evaluation points for freqresp: s = i w for continuous models, e^{i w h}
// for discrete ones, with w on the requested grid.
std::vector<double> grid_points(const std::vector<std::string>& spec) {
  if (spec.size() != 4)
    throw_parse("ParseError", "--grid wants: {log|lin} LO HI N");
  const double lo = parse_num(spec[1], "grid bound");
  const double hi = parse_num(spec[2], "grid bound");
  const double nd = parse_num(spec[3], "grid count");
  const int n = int(nd);
  if (double(n) != nd || n < 1)
    throw_parse("ParseError", "grid count must be a positive integer");
  if (spec[0] == "log") return log_space(lo, hi, n);
  if (spec[0] != "lin")
    throw_parse("ParseError", "grid type must be log or lin");
  std::vector<double> out;
  for (int k = 0; k < n; ++k)
    out.push_back(n == 1 ? lo : lo + (hi - lo) * double(k) / double(n - 1));
  return out;
}

std::vector<FrequencySample> scalar_samples(const std::vector<Cplx>& pts,
                                            const std::vector<Cplx>& vals) {
  std::vector<FrequencySample> out(pts.size());
  for (size_t k = 0; k < pts.size(); ++k) {
    out[k].point = pts[k];
    out[k].response = Mat::Constant(1, 1, vals[k]);
  }
  return out;
}

json sv_list(const RVec& sv) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < sv.size(); ++i) arr.push_back(sv(i));
  return arr;
}

int run(CLI::App& app, int argc, char** argv) {
  // ---- fit-lti -------------------------------------------------------------
  auto* fit_cmd = app.add_subcommand(
      "fit-lti", "Fit a descriptor model to frequency samples");
  std::string fit_in, fit_out = "model.json", fit_sv, fit_report;
  FitOptions fit_opt;
  std::string fit_policy = "sorted";
  fit_cmd->add_option("data", fit_in, "frequency CSV")->required();
  fit_cmd->add_option("--tol", fit_opt.tol, "rank tolerance in (0,1)");
  fit_cmd->add_option("--order", fit_opt.order, "fixed reduced order");
  fit_cmd->add_option("--policy", fit_policy, "partition policy: sorted|given");
  fit_cmd->add_flag_callback("--no-realify",
                             [&] { fit_opt.realify = false; });
  fit_cmd->add_flag_callback("--no-feedthrough",
                             [&] { fit_opt.extract_feedthrough = false; });
  fit_cmd->add_flag_callback("--no-conjugate-close",
                             [&] { fit_opt.close_conjugates = false; });
  fit_cmd->add_option("-o,--output", fit_out, "model JSON path");
  fit_cmd->add_option("--sv-out", fit_sv, "singular value CSV path");
  fit_cmd->add_option("--report", fit_report, "fit report JSON path");

  // ---- fit-param -----------------------------------------------------------
  auto* par_cmd = app.add_subcommand(
      "fit-param", "Fit a two-variable barycentric model to a grid");
  std::string par_in, par_out = "model.json";
  double par_tol = kRankTol;
  par_cmd->add_option("data", par_in, "parameter grid CSV")->required();
  par_cmd->add_option("--tol", par_tol, "rank tolerance in (0,1)");
  par_cmd->add_option("-o,--output", par_out, "model JSON path");

  // ---- fit-time ------------------------------------------------------------
  auto* time_cmd = app.add_subcommand(
      "fit-time", "Realize a discrete model from input/output records");
  std::string time_in, time_out = "model.json";
  long time_order = 0, time_markov = 0, time_reduce = 0;
  bool time_continuous = false;
  time_cmd->add_option("data", time_in, "time series CSV")->required();
  time_cmd->add_option("--order", time_order, "Hankel realization order")
      ->required();
  time_cmd->add_option("--markov", time_markov,
                       "Markov parameters to recover (default 2*order)");
  time_cmd->add_option("--reduce", time_reduce,
                       "project onto this many Hankel directions");
  time_cmd->add_flag("--continuous", time_continuous,
                     "map the realization back to continuous time");
  time_cmd->add_option("-o,--output", time_out, "model JSON path");

  // ---- fit-bilinear ----------------------------------------------------------
  auto* bil_cmd = app.add_subcommand(
      "fit-bilinear", "Fit a bilinear model to generalized kernel data");
  std::string bil_in, bil_out = "model.json", bil_emit;
  long bil_order = 0;
  bil_cmd->add_option("data", bil_in,
                      "kernel table JSON or bilinear-source JSON")
      ->required();
  bil_cmd->add_option("--order", bil_order,
                      "reduced order (default: full realization)");
  bil_cmd->add_option("--emit-kernels", bil_emit,
                      "also write the consulted kernel values here");
  bil_cmd->add_option("-o,--output", bil_out, "model JSON path");

  // ---- lddc ------------------------------------------------------------------
  auto* lddc_cmd = app.add_subcommand(
      "lddc", "Identify a controller from plant data and a reference model");
  std::string lddc_in, lddc_out = "controller.json", lddc_report;
  std::string lddc_num, lddc_den, lddc_loop;
  FitOptions lddc_opt;
  lddc_cmd->add_option("plant", lddc_in, "plant frequency CSV")->required();
  lddc_cmd->add_option("--ref-num", lddc_num,
                       "reference numerator coefficients, ascending powers");
  lddc_cmd->add_option("--ref-den", lddc_den,
                       "reference denominator coefficients, ascending powers");
  lddc_cmd->add_option("--ref-loop", lddc_loop,
                       "controller JSON whose closed loop is the reference");
  lddc_cmd->add_option("--tol", lddc_opt.tol, "rank tolerance in (0,1)");
  lddc_cmd->add_option("--order", lddc_opt.order, "fixed controller order");
  lddc_cmd->add_option("-o,--output", lddc_out, "controller JSON path");
  lddc_cmd->add_option("--report", lddc_report, "closed-loop report JSON path");

  // ---- freqresp ----------------------------------------------------------------
  auto* resp_cmd = app.add_subcommand(
      "freqresp", "Tabulate a model's frequency response");
  std::string resp_in, resp_out = "response.csv";
  std::vector<std::string> resp_grid;
  double resp_param = 0.0;
  bool resp_has_param = false;
  resp_cmd->add_option("model", resp_in, "model JSON")->required();
  resp_cmd->add_option("--grid", resp_grid, "{log|lin} LO HI N")
      ->expected(4)
      ->required();
  resp_cmd->add_option("--param", resp_param,
                       "parameter value (parametric models)");
  resp_cmd->add_option("-o,--output", resp_out, "response CSV path");

  // ---- simulate -----------------------------------------------------------------
  auto* sim_cmd = app.add_subcommand(
      "simulate", "Drive a model with a recorded input");
  std::string sim_model, sim_in, sim_out = "simulated.csv";
  sim_cmd->add_option("model", sim_model, "model JSON")->required();
  sim_cmd->add_option("--input", sim_in, "time series CSV")->required();
  sim_cmd->add_option("-o,--output", sim_out, "time series CSV path");

  // ---- bench --------------------------------------------------------------------
  auto* bench_cmd = app.add_subcommand(
      "bench", "Emit data from a built-in benchmark generator");
  std::string bench_name, bench_out = "bench.csv";
  double bench_xm = 1.9592, bench_omega0 = 3.0, bench_damping = 0.5;
  double bench_wmin = 1e-2, bench_wmax = 1e2;
  long bench_points = 300;
  int bench_floors = 8;
  double bench_scaling = 1e4, bench_step = 0.0;
  long bench_samples = 0, bench_grid_n = 10;
  double bench_viscosity = 0.5;
  bench_cmd->add_option("name", bench_name,
                        "transport | gust | building | burgers")
      ->required();
  bench_cmd->add_option("--xm", bench_xm, "transport: measurement position");
  bench_cmd->add_option("--omega0", bench_omega0, "transport: actuator frequency");
  bench_cmd->add_option("--damping", bench_damping, "transport: actuator damping");
  bench_cmd->add_option("--points", bench_points, "frequency sample count");
  bench_cmd->add_option("--wmin", bench_wmin, "lowest frequency");
  bench_cmd->add_option("--wmax", bench_wmax, "highest frequency");
  bench_cmd->add_option("--floors", bench_floors, "building: floor count");
  bench_cmd->add_option("--scaling", bench_scaling, "building: input scaling");
  bench_cmd->add_option("--step", bench_step, "time step override");
  bench_cmd->add_option("--samples", bench_samples, "sample count override");
  bench_cmd->add_option("--n", bench_grid_n, "burgers: interior grid points");
  bench_cmd->add_option("--viscosity", bench_viscosity, "burgers: viscosity");
  bench_cmd->add_option("-o,--output", bench_out, "output CSV path");

  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "seed for every seeded fixture (default 0)");
  app.require_subcommand(1);
  for (CLI::App* sub : {fit_cmd, par_cmd, time_cmd, bil_cmd, lddc_cmd,
                        resp_cmd, sim_cmd, bench_cmd})
    sub->fallthrough();

  app.parse(argc, argv);
  resp_has_param = resp_cmd->count("--param") > 0;

  // ---- dispatch -------------------------------------------------------------

  if (*fit_cmd) {
    if (fit_policy == "given")
      fit_opt.policy = PartitionPolicy::AsGiven;
    else if (fit_policy != "sorted")
      throw_parse("ParseError", "--policy must be sorted or given");
    if (!(fit_opt.tol > 0.0 && fit_opt.tol < 1.0))
      throw_precondition("BadTolerance", "tolerance must lie in (0,1)");
    const auto samples = read_frequency_csv(fit_in);
    const LtiFit fit = fit_lti(samples, fit_opt);
    write_text_file(fit_out, descriptor_to_json(fit.model));
    if (!fit_sv.empty()) {
      std::string text = "index,sv_rowcat,sv_colcat,sv_L\n";
      const Eigen::Index rows = fit.orders.sv_rowcat.size();
      for (Eigen::Index i = 0; i < rows; ++i) {
        text += std::to_string(i) + "," + fmt_double(fit.orders.sv_rowcat(i)) +
                "," + fmt_double(fit.orders.sv_colcat(i)) + ",";
        text += (i < fit.orders.sv_L.size() ? fmt_double(fit.orders.sv_L(i))
                                            : std::string("0")) +
                "\n";
      }
      write_text_file(fit_sv, text);
    }
    const InterpolationReport check =
        check_interpolation(fit.model, fit.data, 1e-8);
    if (!fit_report.empty()) {
      json rep;
      rep["order"] = fit.model.n();
      rep["rank_stack"] = fit.orders.r;
      rep["rank_loewner"] = fit.orders.nu;
      rep["improper"] = fit.improper;
      rep["realified"] = fit.realified;
      rep["feedthrough_norm"] = fit.D.size() ? fit.D.norm() : 0.0;
      rep["max_interpolation_violation"] = check.max_violation;
      rep["sv_rowcat"] = sv_list(fit.orders.sv_rowcat);
      rep["sv_L"] = sv_list(fit.orders.sv_L);
      write_text_file(fit_report, rep.dump(2) + "\n");
    }
    std::cout << "fit-lti: order " << fit.model.n() << " (rank " << fit.orders.r
              << ", minimal " << fit.orders.nu << "), max interpolation violation "
              << fmt_double(check.max_violation) << "\n";
    return 0;
  }

  if (*par_cmd) {
    if (!(par_tol > 0.0 && par_tol < 1.0))
      throw_precondition("BadTolerance", "tolerance must lie in (0,1)");
    const ParamTable table = read_param_csv(par_in);
    const auto model =
        fit_parametric(table.freq, table.par, table.values, par_tol);
    write_text_file(par_out, parametric_to_json(model));
    std::cout << "fit-param: orders (" << model.r << ", " << model.q << ")\n";
    return 0;
  }

  if (*time_cmd) {
    const TimeSeries series = read_time_csv(time_in);
    if (time_order < 1)
      throw_precondition("BadOrder", "order must be at least 1");
    const Eigen::Index last =
        time_markov > 0 ? Eigen::Index(time_markov) : Eigen::Index(2 * time_order);
    const MarkovSequence markov = recover_markov(series, last);
    DescriptorModel model =
        time_reduce > 0
            ? reduce_hankel(markov, time_order, time_reduce, series.step)
            : realize_from_impulse(markov, time_order, series.step);
    if (time_continuous) model = to_continuous_bilinear(model, series.step);
    write_text_file(time_out, descriptor_to_json(model));
    std::cout << "fit-time: order " << model.n()
              << (model.discrete() ? " discrete\n" : " continuous\n");
    return 0;
  }

  if (*bil_cmd) {
    const std::string text = read_text_file(bil_in);
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw_parse("ParseError", "malformed JSON");
    if (!j.contains("type") || !j["type"].is_string())
      throw_parse("SchemaError", "missing key 'type'");
    const std::string type = j["type"].get<std::string>();
    InterpolationTuples tuples;
    KernelOracle oracle;
    BilinearModel source;  // keeps the model alive behind the oracle
    if (type == "kernel-table") {
      KernelTable table = kernel_table_from_json(text);
      tuples = table.tuples;
      oracle = table.oracle;
    } else if (type == "bilinear-source") {
      source = bilinear_from_json(j.at("model").dump());
      std::vector<Cplx> right, left;
      for (const auto& e : j.at("right_points"))
        right.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
      for (const auto& e : j.at("left_points"))
        left.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
      tuples = make_tuples(right, left,
                           Eigen::Index(j.value("chain_depth", 0)));
      oracle = [&source](const std::vector<Cplx>& pts) {
        return eval_generalized_tf(source, pts);
      };
    } else {
      throw_parse("SchemaError", "expected kernel-table or bilinear-source");
    }
    if (!bil_emit.empty())
      write_text_file(bil_emit, kernel_table_to_json(tuples, oracle));
    const BilinearLoewnerSet set = build_bilinear_set(oracle, tuples);
    BilinearModel model = bil_order > 0
                              ? reduce_bilinear(set, Eigen::Index(bil_order))
                              : realize_bilinear(set);
    if (model.effectively_real(1e-9)) model = model.to_real(1e-9);
    write_text_file(bil_out, bilinear_to_json(model));
    std::cout << "fit-bilinear: order " << model.n() << "\n";
    return 0;
  }

  if (*lddc_cmd) {
    const auto plant = read_frequency_csv(lddc_in);
    const bool rational = !lddc_num.empty() || !lddc_den.empty();
    if (rational == !lddc_loop.empty())
      throw_precondition("BadReference",
                         "give either --ref-num/--ref-den or --ref-loop");
    ReferenceModel reference;
    if (rational) {
      if (lddc_num.empty() || lddc_den.empty())
        throw_precondition("BadReference",
                           "--ref-num and --ref-den go together");
      reference = rational_reference(parse_coeff_list(lddc_num, "coefficient"),
                                     parse_coeff_list(lddc_den, "coefficient"));
    } else {
      reference = closed_loop_reference(
          descriptor_from_json(read_text_file(lddc_loop)));
    }
    const ControllerSamples samples =
        ideal_controller_samples(plant, reference);
    const LtiFit fit = identify_controller(samples, lddc_opt);
    write_text_file(lddc_out, descriptor_to_json(fit.model));
    const ClosedLoopReport report =
        closed_loop_eval(plant, fit.model, reference);
    if (!lddc_report.empty()) {
      json rep;
      rep["controller_order"] = fit.model.n();
      rep["dropped_points"] = samples.dropped.size();
      rep["evaluated_points"] = report.points.size();
      rep["max_abs_error"] = report.max_abs_error;
      rep["mean_abs_error"] = report.mean_abs_error;
      write_text_file(lddc_report, rep.dump(2) + "\n");
    }
    std::cout << "lddc: controller order " << fit.model.n()
              << ", closed-loop max error " << fmt_double(report.max_abs_error)
              << "\n";
    return 0;
  }

  if (*resp_cmd) {
    const std::string text = read_text_file(resp_in);
    const std::vector<double> w = grid_points(resp_grid);
    const ModelKind kind = peek_model_kind(text);
    std::vector<Cplx> pts(w.size());
    std::vector<Cplx> vals(w.size());
    if (kind == ModelKind::Parametric) {
      if (!resp_has_param)
        throw_precondition("MissingParameter",
                           "parametric models need --param");
      const auto model = parametric_from_json(text);
      for (size_t k = 0; k < w.size(); ++k) {
        pts[k] = Cplx(0.0, w[k]);
        vals[k] = eval_parametric(model, pts[k], resp_param);
      }
      write_frequency_csv(resp_out, scalar_samples(pts, vals));
    } else if (kind == ModelKind::Bilinear) {
      const auto model = bilinear_from_json(text);
      for (size_t k = 0; k < w.size(); ++k) {
        pts[k] = Cplx(0.0, w[k]);
        vals[k] = eval_generalized_tf(model, {pts[k]});
      }
      write_frequency_csv(resp_out, scalar_samples(pts, vals));
    } else {
      const auto model = descriptor_from_json(text);
      std::vector<FrequencySample> rows(w.size());
      for (size_t k = 0; k < w.size(); ++k) {
        const Cplx xi = model.discrete()
                            ? std::exp(Cplx(0.0, w[k] * *model.step))
                            : Cplx(0.0, w[k]);
        rows[k].point = xi;
        rows[k].response = eval_transfer(model, xi);
      }
      write_frequency_csv(resp_out, rows);
    }
    std::cout << "freqresp: " << w.size() << " points -> " << resp_out << "\n";
    return 0;
  }

  if (*sim_cmd) {
    const std::string text = read_text_file(sim_model);
    TimeSeries input = read_time_csv(sim_in);
    // recorded outputs in the file are reference data, not part of the drive
    input.has_y = false;
    input.y.resize(input.length(), 0);
    TimeSeries out;
    if (peek_model_kind(text) == ModelKind::Bilinear) {
      out = simulate_bilinear(bilinear_from_json(text), input);
    } else {
      DescriptorModel model = descriptor_from_json(text);
      if (!model.discrete()) {
        model = discretize_backward_euler(model, input.step);
      } else if (std::abs(*model.step - input.step) >
                 1e-9 * std::max(*model.step, input.step)) {
        throw_precondition("StepMismatch",
                           "model and input use different sample periods");
      }
      out = simulate_discrete(model, input, Vec::Zero(model.n()));
    }
    write_time_csv(sim_out, out);
    std::cout << "simulate: " << out.length() << " samples -> " << sim_out
              << "\n";
    return 0;
  }

  if (*bench_cmd) {
    if (bench_name == "transport" || bench_name == "gust") {
      const IrrationalTF sys =
          bench_name == "transport"
              ? transport_system(bench_xm, bench_omega0, bench_damping)
              : gust_system(gust_fixture(seed));
      const auto grid =
          log_space(bench_wmin, bench_wmax, int(bench_points));
      std::vector<FrequencySample> rows(grid.size());
      for (size_t k = 0; k < grid.size(); ++k) {
        rows[k].point = Cplx(0.0, grid[k]);
        rows[k].response = sys.evaluator(rows[k].point);
      }
      write_frequency_csv(bench_out, rows);
      std::cout << "bench " << bench_name << ": " << rows.size()
                << " samples -> " << bench_out << "\n";
      return 0;
    }
    if (bench_name == "building") {
      const double step = bench_step > 0.0 ? bench_step : 4e-3;
      const Eigen::Index samples =
          bench_samples > 0 ? Eigen::Index(bench_samples) : Eigen::Index(1251);
      const DescriptorModel chain =
          structural_chain(bench_floors, bench_scaling);
      const DescriptorModel disc = discretize_backward_euler(chain, step);
      const TimeSeries input = building_series(step, samples);
      const TimeSeries out =
          simulate_discrete(disc, input, Vec::Zero(disc.n()));
      write_time_csv(bench_out, out);
      std::cout << "bench building: " << out.length() << " samples -> "
                << bench_out << "\n";
      return 0;
    }
    if (bench_name == "burgers") {
      const double step = bench_step > 0.0 ? bench_step : 5e-3;
      const Eigen::Index samples =
          bench_samples > 0 ? Eigen::Index(bench_samples) : Eigen::Index(2001);
      const QuadraticBilinearSpec spec =
          burgers_spec(Eigen::Index(bench_grid_n), bench_viscosity);
      const BilinearModel lifted = carleman(spec);
      const TimeSeries out = simulate_bilinear(lifted, burgers_series(step, samples));
      write_time_csv(bench_out, out);
      std::cout << "bench burgers: " << out.length() << " samples -> "
                << bench_out << "\n";
      return 0;
    }
    throw_parse("ParseError", "unknown benchmark '" + bench_name +
                                  "'; expected transport, gust, building, or "
                                  "burgers");
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Loewner-framework modeling toolkit"};
  try {
    return run(app, argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "InternalError: " << e.what() << "\n";
    return 1;
  }
}
