#include "loewner/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <tuple>

#include "json.hpp"

namespace loewner {
namespace {

using nlohmann::json;

// --- CSV plumbing ---------------------------------------------------------

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != ' ' && ch != '\t' && ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& field, long line_no) {
  double v = 0.0;
  const char* b = field.data();
  const char* e = b + field.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e)
    throw_parse("ParseError", "line " + std::to_string(line_no) +
                                  ": not a number: '" + field + "'");
  return v;
}

// Non-empty lines with their 1-based numbers; the first is the header.
std::vector<std::pair<long, std::string>> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_parse("ParseError", "cannot open '" + path + "'");
  std::vector<std::pair<long, std::string>> lines;
  std::string line;
  long no = 0;
  while (std::getline(in, line)) {
    ++no;
    std::string body = line;
    while (!body.empty() && (body.back() == '\r' || body.back() == ' '))
      body.pop_back();
    if (!body.empty()) lines.emplace_back(no, body);
  }
  if (lines.empty()) throw_parse("ParseError", "'" + path + "' is empty");
  return lines;
}

void expect_fields(const std::vector<std::string>& fields, size_t want,
                   long line_no) {
  if (fields.size() != want)
    throw_parse("ParseError",
                "line " + std::to_string(line_no) + ": expected " +
                    std::to_string(want) + " fields, got " +
                    std::to_string(fields.size()));
}

std::string fmt_cplx(Cplx z) {
  return "(" + fmt_double(z.real()) + ", " + fmt_double(z.imag()) + ")";
}

// --- JSON plumbing --------------------------------------------------------

json cplx_out(Cplx z, bool real_field) {
  if (real_field) return json(z.real());
  return json::array({z.real(), z.imag()});
}

Cplx cplx_in(const json& j) {
  if (j.is_number()) return Cplx(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Cplx(j[0].get<double>(), j[1].get<double>());
  throw_parse("ParseError", "matrix entry is neither a number nor [re, im]");
}

json mat_out(const Mat& m, bool real_field) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(cplx_out(m(i, j), real_field));
    rows.push_back(row);
  }
  return rows;
}

Mat mat_in(const json& j, const std::string& name) {
  if (!j.is_array())
    throw_parse("ParseError", "'" + name + "' must be an array of rows");
  const Eigen::Index rows = Eigen::Index(j.size());
  Eigen::Index cols = -1;
  for (const auto& row : j) {
    if (!row.is_array())
      throw_parse("ParseError", "'" + name + "' rows must be arrays");
    if (cols < 0)
      cols = Eigen::Index(row.size());
    else if (Eigen::Index(row.size()) != cols)
      throw_parse("SchemaError", "'" + name + "' rows have unequal lengths");
  }
  Mat m(rows, cols < 0 ? 0 : cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = cplx_in(j[i][c]);
  return m;
}

json parse_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw_parse("ParseError", "malformed JSON");
  return j;
}

const json& need(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end())
    throw_parse("SchemaError", std::string("missing key '") + key + "'");
  return *it;
}

}  // namespace

std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_parse("ParseError", "cannot open '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_precondition("FileWrite", "cannot write '" + path + "'");
  out << text;
  if (!out) throw_precondition("FileWrite", "short write to '" + path + "'");
}

// --- frequency CSV ---------------------------------------------------------

std::vector<FrequencySample> read_frequency_csv(const std::string& path) {
  const auto lines = read_lines(path);
  const auto head = split_fields(lines[0].second);
  if (head.size() < 4 || head[0] != "point_re" || head[1] != "point_im" ||
      head.size() % 2 != 0)
    throw_parse("SchemaError",
                "header must be point_re,point_im,H_i_j_re,H_i_j_im,...");
  // The H columns fix (p, m); they must appear in canonical row-major order.
  Eigen::Index p = 0, m = 0;
  const size_t entries = (head.size() - 2) / 2;
  for (size_t k = 0; k < entries; ++k) {
    long i = 0, j = 0;
    if (std::sscanf(head[2 + 2 * k].c_str(), "H_%ld_%ld_re", &i, &j) != 2 ||
        head[3 + 2 * k] != "H_" + std::to_string(i) + "_" + std::to_string(j) +
                               "_im")
      throw_parse("SchemaError",
                  "bad response column pair at '" + head[2 + 2 * k] + "'");
    p = std::max<Eigen::Index>(p, i);
    m = std::max<Eigen::Index>(m, j);
  }
  if (size_t(p * m) != entries)
    throw_parse("SchemaError", "response columns do not cover a p x m block");
  for (size_t k = 0; k < entries; ++k) {
    const long i = long(k) / m + 1, j = long(k) % m + 1;
    const std::string want =
        "H_" + std::to_string(i) + "_" + std::to_string(j) + "_re";
    if (head[2 + 2 * k] != want)
      throw_parse("SchemaError", "response columns must be row-major; found '" +
                                     head[2 + 2 * k] + "' where '" + want +
                                     "' belongs");
  }

  std::vector<FrequencySample> out;
  for (size_t li = 1; li < lines.size(); ++li) {
    const auto fields = split_fields(lines[li].second);
    expect_fields(fields, head.size(), lines[li].first);
    FrequencySample s;
    s.point = Cplx(parse_double(fields[0], lines[li].first),
                   parse_double(fields[1], lines[li].first));
    s.response.resize(p, m);
    for (Eigen::Index k = 0; k < p * m; ++k)
      s.response(k / m, k % m) =
          Cplx(parse_double(fields[2 + 2 * k], lines[li].first),
               parse_double(fields[3 + 2 * k], lines[li].first));
    for (const auto& prev : out)
      if (prev.point == s.point)
        throw_parse("SchemaError", "duplicate point " + fmt_cplx(s.point));
    out.push_back(std::move(s));
  }
  if (out.empty()) throw_parse("SchemaError", "no data rows");
  return out;
}

void write_frequency_csv(const std::string& path,
                         const std::vector<FrequencySample>& samples) {
  if (samples.empty())
    throw_precondition("EmptyData", "nothing to write");
  const Eigen::Index p = samples[0].response.rows();
  const Eigen::Index m = samples[0].response.cols();
  std::string text = "point_re,point_im";
  for (Eigen::Index i = 1; i <= p; ++i)
    for (Eigen::Index j = 1; j <= m; ++j) {
      const std::string tag = "H_" + std::to_string(i) + "_" + std::to_string(j);
      text += "," + tag + "_re," + tag + "_im";
    }
  text += "\n";
  for (const auto& s : samples) {
    if (s.response.rows() != p || s.response.cols() != m)
      throw_precondition("ShapeMismatch", "samples have mixed response shapes");
    text += fmt_double(s.point.real()) + "," + fmt_double(s.point.imag());
    for (Eigen::Index k = 0; k < p * m; ++k) {
      const Cplx v = s.response(k / m, k % m);
      text += "," + fmt_double(v.real()) + "," + fmt_double(v.imag());
    }
    text += "\n";
  }
  write_text_file(path, text);
}

// --- time CSV ---------------------------------------------------------------

TimeSeries read_time_csv(const std::string& path) {
  const auto lines = read_lines(path);
  const auto head = split_fields(lines[0].second);
  if (head.empty() || head[0] != "t")
    throw_parse("SchemaError", "header must start with t");
  Eigen::Index m = 0, p = 0;
  size_t k = 1;
  for (; k < head.size(); ++k) {
    if (head[k] != "u_" + std::to_string(m + 1)) break;
    ++m;
  }
  for (; k < head.size(); ++k) {
    if (head[k] != "y_" + std::to_string(p + 1)) break;
    ++p;
  }
  if (k != head.size() || m == 0)
    throw_parse("SchemaError", "header must be t,u_1..u_m[,y_1..y_p]");

  const Eigen::Index rows = Eigen::Index(lines.size()) - 1;
  if (rows < 2)
    throw_parse("SchemaError", "need at least two data rows to fix the step");
  RVec t(rows);
  TimeSeries ts;
  ts.u.resize(rows, m);
  ts.has_y = p > 0;
  ts.y.resize(rows, p);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const long line_no = lines[size_t(r) + 1].first;
    const auto fields = split_fields(lines[size_t(r) + 1].second);
    expect_fields(fields, head.size(), line_no);
    t(r) = parse_double(fields[0], line_no);
    for (Eigen::Index c = 0; c < m; ++c)
      ts.u(r, c) = parse_double(fields[1 + c], line_no);
    for (Eigen::Index c = 0; c < p; ++c)
      ts.y(r, c) = parse_double(fields[1 + m + c], line_no);
  }
  const double step = t(1) - t(0);
  if (!(step > 0.0))
    throw_parse("SchemaError", "time column must strictly increase");
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double expected = t(0) + double(r) * step;
    if (std::abs(t(r) - expected) > 1e-9 * std::max(std::abs(expected), step))
      throw_parse("SchemaError",
                  "time grid jitter at t=" + fmt_double(t(r)) +
                      " exceeds 1e-9 relative");
  }
  const double k0 = t(0) / step;
  if (std::abs(k0 - std::round(k0)) > 1e-6)
    throw_parse("SchemaError", "time origin is not a multiple of the step");
  ts.step = step;
  ts.start_index = long(std::llround(k0));
  ts.validate();
  return ts;
}

void write_time_csv(const std::string& path, const TimeSeries& series) {
  series.validate();
  const Eigen::Index m = series.u.cols();
  const Eigen::Index p = series.has_y ? series.y.cols() : 0;
  std::string text = "t";
  for (Eigen::Index c = 1; c <= m; ++c) text += ",u_" + std::to_string(c);
  for (Eigen::Index c = 1; c <= p; ++c) text += ",y_" + std::to_string(c);
  text += "\n";
  for (Eigen::Index r = 0; r < series.length(); ++r) {
    text += fmt_double(double(series.start_index + r) * series.step);
    for (Eigen::Index c = 0; c < m; ++c)
      text += "," + fmt_double(series.u(r, c));
    for (Eigen::Index c = 0; c < p; ++c)
      text += "," + fmt_double(series.y(r, c));
    text += "\n";
  }
  write_text_file(path, text);
}

// --- parameter grid CSV -----------------------------------------------------

ParamTable read_param_csv(const std::string& path) {
  const auto lines = read_lines(path);
  const auto head = split_fields(lines[0].second);
  const std::vector<std::string> want = {"freq_re", "freq_im", "param",
                                         "value_re", "value_im"};
  if (std::vector<std::string>(head.begin(), head.end()) != want)
    throw_parse("SchemaError",
                "header must be freq_re,freq_im,param,value_re,value_im");

  ParamTable table;
  std::vector<std::tuple<Cplx, double, Cplx>> rows;
  for (size_t li = 1; li < lines.size(); ++li) {
    const long line_no = lines[li].first;
    const auto fields = split_fields(lines[li].second);
    expect_fields(fields, 5, line_no);
    const Cplx f(parse_double(fields[0], line_no),
                 parse_double(fields[1], line_no));
    const double par = parse_double(fields[2], line_no);
    const Cplx v(parse_double(fields[3], line_no),
                 parse_double(fields[4], line_no));
    rows.emplace_back(f, par, v);
    if (std::find(table.freq.begin(), table.freq.end(), f) == table.freq.end())
      table.freq.push_back(f);
    if (std::find(table.par.begin(), table.par.end(), par) == table.par.end())
      table.par.push_back(par);
  }
  const Eigen::Index F = Eigen::Index(table.freq.size());
  const Eigen::Index P = Eigen::Index(table.par.size());
  if (Eigen::Index(rows.size()) != F * P)
    throw_parse("SchemaError",
                "grid is not a full tensor product: " +
                    std::to_string(rows.size()) + " rows for " +
                    std::to_string(F) + " x " + std::to_string(P) + " points");
  table.values.resize(F, P);
  Eigen::MatrixXi seen = Eigen::MatrixXi::Zero(F, P);
  for (const auto& [f, par, v] : rows) {
    const auto fi = std::find(table.freq.begin(), table.freq.end(), f);
    const auto pi = std::find(table.par.begin(), table.par.end(), par);
    const Eigen::Index i = fi - table.freq.begin();
    const Eigen::Index j = pi - table.par.begin();
    if (seen(i, j)++)
      throw_parse("SchemaError", "duplicate grid entry at freq " +
                                     fmt_cplx(f) + ", param " +
                                     fmt_double(par));
    table.values(i, j) = v;
  }
  return table;
}

void write_param_csv(const std::string& path, const ParamTable& table) {
  if (table.values.rows() != Eigen::Index(table.freq.size()) ||
      table.values.cols() != Eigen::Index(table.par.size()))
    throw_precondition("ShapeMismatch", "value table does not match the axes");
  std::string text = "freq_re,freq_im,param,value_re,value_im\n";
  for (size_t i = 0; i < table.freq.size(); ++i)
    for (size_t j = 0; j < table.par.size(); ++j) {
      const Cplx v = table.values(Eigen::Index(i), Eigen::Index(j));
      text += fmt_double(table.freq[i].real()) + "," +
              fmt_double(table.freq[i].imag()) + "," +
              fmt_double(table.par[j]) + "," + fmt_double(v.real()) + "," +
              fmt_double(v.imag()) + "\n";
    }
  write_text_file(path, text);
}

// --- model JSON -------------------------------------------------------------

ModelKind peek_model_kind(const std::string& text) {
  const json j = parse_json(text);
  const std::string type = need(j, "type").get<std::string>();
  if (type == "descriptor") return ModelKind::Descriptor;
  if (type == "bilinear") return ModelKind::Bilinear;
  if (type == "parametric") return ModelKind::Parametric;
  throw_parse("SchemaError", "unknown model type '" + type + "'");
}

std::string descriptor_to_json(const DescriptorModel& model) {
  model.validate();
  const bool real = model.field == Field::Real;
  json j;
  j["type"] = "descriptor";
  j["field"] = real ? "real" : "complex";
  if (model.step)
    j["step"] = *model.step;
  else
    j["step"] = nullptr;
  j["E"] = mat_out(model.E, real);
  j["A"] = mat_out(model.A, real);
  j["B"] = mat_out(model.B, real);
  j["C"] = mat_out(model.C, real);
  j["D"] = mat_out(model.D, real);
  return j.dump(2) + "\n";
}

DescriptorModel descriptor_from_json(const std::string& text) {
  const json j = parse_json(text);
  if (need(j, "type").get<std::string>() != "descriptor")
    throw_parse("SchemaError", "not a descriptor model file");
  DescriptorModel m;
  const std::string field = need(j, "field").get<std::string>();
  if (field != "real" && field != "complex")
    throw_parse("SchemaError", "field must be 'real' or 'complex'");
  m.field = field == "real" ? Field::Real : Field::Complex;
  const json& step = need(j, "step");
  if (!step.is_null()) m.step = step.get<double>();
  m.E = mat_in(need(j, "E"), "E");
  m.A = mat_in(need(j, "A"), "A");
  m.B = mat_in(need(j, "B"), "B");
  m.C = mat_in(need(j, "C"), "C");
  m.D = mat_in(need(j, "D"), "D");
  try {
    m.validate();
  } catch (const Error& e) {
    throw_parse("SchemaError", std::string("inconsistent shapes: ") + e.what());
  }
  return m;
}

std::string bilinear_to_json(const BilinearModel& model) {
  model.validate();
  const bool real = model.field == Field::Real;
  json j;
  j["type"] = "bilinear";
  j["field"] = real ? "real" : "complex";
  j["E"] = mat_out(model.E, real);
  j["A"] = mat_out(model.A, real);
  j["N"] = mat_out(model.N, real);
  j["B"] = mat_out(model.B, real);
  j["C"] = mat_out(model.C, real);
  return j.dump(2) + "\n";
}

BilinearModel bilinear_from_json(const std::string& text) {
  const json j = parse_json(text);
  if (need(j, "type").get<std::string>() != "bilinear")
    throw_parse("SchemaError", "not a bilinear model file");
  BilinearModel m;
  const std::string field = need(j, "field").get<std::string>();
  if (field != "real" && field != "complex")
    throw_parse("SchemaError", "field must be 'real' or 'complex'");
  m.field = field == "real" ? Field::Real : Field::Complex;
  m.E = mat_in(need(j, "E"), "E");
  m.A = mat_in(need(j, "A"), "A");
  m.N = mat_in(need(j, "N"), "N");
  m.B = mat_in(need(j, "B"), "B");
  m.C = mat_in(need(j, "C"), "C");
  try {
    m.validate();
  } catch (const Error& e) {
    throw_parse("SchemaError", std::string("inconsistent shapes: ") + e.what());
  }
  return m;
}

std::string parametric_to_json(const ParametricBarycentricModel& model) {
  json j;
  j["type"] = "parametric";
  j["r"] = model.r;
  j["q"] = model.q;
  json ls = json::array();
  for (Eigen::Index i = 0; i < model.lambda_support.size(); ++i)
    ls.push_back(cplx_out(model.lambda_support(i), false));
  j["lambda_support"] = ls;
  json ps = json::array();
  for (Eigen::Index i = 0; i < model.pi_support.size(); ++i)
    ps.push_back(model.pi_support(i));
  j["pi_support"] = ps;
  j["c"] = mat_out(model.c, false);
  j["w"] = mat_out(model.w, false);
  return j.dump(2) + "\n";
}

ParametricBarycentricModel parametric_from_json(const std::string& text) {
  const json j = parse_json(text);
  if (need(j, "type").get<std::string>() != "parametric")
    throw_parse("SchemaError", "not a parametric model file");
  ParametricBarycentricModel m;
  m.r = need(j, "r").get<int>();
  m.q = need(j, "q").get<int>();
  const json& ls = need(j, "lambda_support");
  m.lambda_support.resize(Eigen::Index(ls.size()));
  for (size_t i = 0; i < ls.size(); ++i)
    m.lambda_support(Eigen::Index(i)) = cplx_in(ls[i]);
  const json& ps = need(j, "pi_support");
  m.pi_support.resize(Eigen::Index(ps.size()));
  for (size_t i = 0; i < ps.size(); ++i)
    m.pi_support(Eigen::Index(i)) = ps[i].get<double>();
  m.c = mat_in(need(j, "c"), "c");
  m.w = mat_in(need(j, "w"), "w");
  if (m.lambda_support.size() != m.r + 1 || m.pi_support.size() != m.q + 1 ||
      m.c.rows() != m.r + 1 || m.c.cols() != m.q + 1 ||
      m.w.rows() != m.r + 1 || m.w.cols() != m.q + 1)
    throw_parse("SchemaError", "support/coefficient sizes disagree with r, q");
  return m;
}

// --- kernel table -----------------------------------------------------------

namespace {

json points_out(const std::vector<Cplx>& pts) {
  json arr = json::array();
  for (Cplx z : pts) arr.push_back(json::array({z.real(), z.imag()}));
  return arr;
}

std::vector<Cplx> points_in(const json& j, const char* name) {
  if (!j.is_array())
    throw_parse("SchemaError", std::string("'") + name + "' must be an array");
  std::vector<Cplx> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(cplx_in(e));
  return out;
}

struct TupleKeyLess {
  bool operator()(const std::vector<Cplx>& a,
                  const std::vector<Cplx>& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    for (size_t i = 0; i < a.size(); ++i) {
      if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
      if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
    }
    return false;
  }
};

}  // namespace

std::string kernel_table_to_json(const InterpolationTuples& tuples,
                                 const KernelOracle& oracle) {
  // Run the assembly against a recording wrapper; the recorded map is the
  // complete demand set of build_bilinear_set for these tuples.
  std::map<std::vector<Cplx>, Cplx, TupleKeyLess> values;
  const KernelOracle recorder = [&](const std::vector<Cplx>& pts) {
    const Cplx v = oracle(pts);
    values.emplace(pts, v);
    return v;
  };
  (void)build_bilinear_set(recorder, tuples);

  json j;
  j["type"] = "kernel-table";
  j["chain_depth"] = tuples.chain_depth;
  j["right_points"] = points_out(tuples.lambda_points);
  j["left_points"] = points_out(tuples.mu_points);
  json vals = json::array();
  for (const auto& [tuple, v] : values) {
    json entry;
    entry["t"] = points_out(tuple);
    entry["v"] = json::array({v.real(), v.imag()});
    vals.push_back(entry);
  }
  j["values"] = vals;
  return j.dump(2) + "\n";
}

KernelTable kernel_table_from_json(const std::string& text) {
  const json j = parse_json(text);
  if (need(j, "type").get<std::string>() != "kernel-table")
    throw_parse("SchemaError", "not a kernel table file");
  KernelTable table;
  table.tuples = make_tuples(points_in(need(j, "right_points"), "right_points"),
                             points_in(need(j, "left_points"), "left_points"),
                             need(j, "chain_depth").get<Eigen::Index>());
  auto values =
      std::make_shared<std::map<std::vector<Cplx>, Cplx, TupleKeyLess>>();
  for (const auto& entry : need(j, "values")) {
    const std::vector<Cplx> tuple = points_in(need(entry, "t"), "t");
    (*values)[tuple] = cplx_in(need(entry, "v"));
  }
  table.oracle = [values](const std::vector<Cplx>& pts) -> Cplx {
    const auto it = values->find(pts);
    if (it == values->end())
      throw_parse("SchemaError",
                  "kernel table has no value for a tuple of length " +
                      std::to_string(pts.size()));
    return it->second;
  };
  return table;
}

}  // namespace loewner
