// Time-domain identification of discrete LTI models: Markov-parameter
// recovery, Hankel realization, pencil pole extraction, SVD reduction, and
// the Backward Euler conversions between continuous and discrete form.
#pragma once

#include <vector>

#include "loewner/model.hpp"

namespace loewner {

// Shift-aligned Hankel slices of one scalar record: entry (a,b) of U0 is
// u[k+a+b]; U1/Y1 start one sample later.
struct HankelPair {
  RMat U0, U1, Y0, Y1;
};

// Markov parameters h_0..h_K, each p×m.
struct MarkovSequence {
  std::vector<RMat> h;

  Eigen::Index count() const { return Eigen::Index(h.size()); }
};

HankelPair build_hankel(const TimeSeries& series, Eigen::Index start,
                        Eigen::Index rows, Eigen::Index cols);

// h_0..h_last from zero-initial-state data by forward substitution on the
// lower-triangular Toeplitz system in u. Single input, any output count.
MarkovSequence recover_markov(const TimeSeries& series, Eigen::Index last);

// Singular values of the n×n Hankel matrix built from h_1..h_{2n-1}.
RVec hankel_singular_values(const MarkovSequence& markov, Eigen::Index n);

// Direct Hankel realization at order n (scalar Markov parameters only):
// E from h_1..h_{2n-1}, A from the shift, C = [h_1..h_n], B = Cᵀ, D = h_0.
// The result carries `step` as its sample period.
DescriptorModel realize_from_impulse(const MarkovSequence& markov,
                                     Eigen::Index n, double step = 1.0);

// Hankel realization at order n projected onto its r dominant singular
// directions.
DescriptorModel reduce_hankel(const MarkovSequence& markov, Eigen::Index n,
                              Eigen::Index r, double step = 1.0);

// State-space read-off from input/output data: output Hankels are projected
// off the input row space, compressed to a regular n×n pencil, and B, C, D
// attached from the Markov parameters. Exact for impulse inputs; other
// inputs recover the poles and are flagged with a warning.
DescriptorModel realize_from_io(const TimeSeries& series, Eigen::Index n);

// Finite generalized eigenvalues of the compressed output pencil; the system
// poles when the data is exciting enough.
std::vector<Cplx> pole_pencil(const TimeSeries& series, Eigen::Index n);

// Backward Euler image of a continuous-time model, folded so the causal
// recursion E x_{k+1} = A x_k + B u_k reproduces the implicit scheme.
DescriptorModel discretize_backward_euler(const DescriptorModel& model,
                                          double step);

// Exact inverse of discretize_backward_euler.
DescriptorModel to_continuous_bilinear(const DescriptorModel& model,
                                       double step);

}  // namespace loewner
