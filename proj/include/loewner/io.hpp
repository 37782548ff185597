// File formats shared by the CLI, the bindings, and the tests: CSV for
// frequency samples, time series, and parameter grids; JSON for models and
// bilinear kernel tables. Readers throw ParseError (malformed text, with the
// line number) or SchemaError (well-formed text violating a format rule).
#pragma once

#include <string>
#include <vector>

#include "loewner/bilinear.hpp"
#include "loewner/model.hpp"
#include "loewner/parametric.hpp"

namespace loewner {

// Shortest round-trip decimal rendering. Every writer uses it so identical
// data produces byte-identical files.
std::string fmt_double(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Frequency CSV. Header: point_re,point_im,H_1_1_re,H_1_1_im,...,H_p_m_re,
// H_p_m_im with the response entries in row-major order. One sample per row.
// Duplicate points are a SchemaError naming the point.
std::vector<FrequencySample> read_frequency_csv(const std::string& path);
void write_frequency_csv(const std::string& path,
                         const std::vector<FrequencySample>& samples);

// Time CSV. Header: t,u_1,...,u_m[,y_1,...,y_p]; the time column must sit on
// a uniform grid (relative jitter above 1e-9 is a SchemaError) whose origin
// is an integer multiple of the step.
TimeSeries read_time_csv(const std::string& path);
void write_time_csv(const std::string& path, const TimeSeries& series);

// Parameter grid CSV, long form. Header: freq_re,freq_im,param,value_re,
// value_im. Every (frequency, parameter) pair must appear exactly once and
// the rows must cover the full tensor grid.
struct ParamTable {
  std::vector<Cplx> freq;
  std::vector<double> par;
  Mat values;  // values(i, j) = H(freq[i], par[j])
};
ParamTable read_param_csv(const std::string& path);
void write_param_csv(const std::string& path, const ParamTable& table);

// JSON model files carry a "type" tag: "descriptor", "bilinear", or
// "parametric". Real-field matrices are written as plain numbers, complex
// ones as [re, im] pairs; readers accept either entry form.
enum class ModelKind { Descriptor, Bilinear, Parametric };
ModelKind peek_model_kind(const std::string& text);

std::string descriptor_to_json(const DescriptorModel& model);
DescriptorModel descriptor_from_json(const std::string& text);

std::string bilinear_to_json(const BilinearModel& model);
BilinearModel bilinear_from_json(const std::string& text);

std::string parametric_to_json(const ParametricBarycentricModel& model);
ParametricBarycentricModel parametric_from_json(const std::string& text);

// Kernel table: the interpolation tuples plus the value of every kernel the
// quintet assembly consults (recorded by running the assembly once against
// the given oracle). The loaded table's oracle replays those values and
// throws SchemaError for any tuple outside the recording.
std::string kernel_table_to_json(const InterpolationTuples& tuples,
                                 const KernelOracle& oracle);
struct KernelTable {
  InterpolationTuples tuples;
  KernelOracle oracle;
};
KernelTable kernel_table_from_json(const std::string& text);

}  // namespace loewner
