#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace eoq {

using cxd = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;
using rvec = Eigen::VectorXd;

struct EigResult {
  rvec eigenvalues;   // ascending
  cmat eigenvectors;  // columns, unitary
};

// eigendecomposition of a hermitian matrix; throws std::invalid_argument if
// max |a[i][j] - conj(a[j][i])| > 1e-12 * ||a||
EigResult herm_eig(const cmat& a);

// exp(-i h t) for hermitian h, via eigendecomposition
cmat expm_unitary(const cmat& h, double t = 1.0);

// min over alpha of ||u - e^{i alpha} v||_F, closed form
double unitary_distance_up_to_phase(const cmat& u, const cmat& v);

// standard average gate fidelity on the rank-d block selected by the
// projector; leakage out of the block shows up as infidelity because the
// restricted map is then non-unitary
double avg_gate_fidelity(const cmat& actual, const cmat& target,
                         const cmat& computational_projector);

struct FitResult {
  double amplitude = 0.0;
  double frequency = 0.0;   // cycles per ns
  double decay_time = 0.0;  // ns
  double phase = 0.0;       // rad
  double offset = 0.0;
  double residual = 0.0;    // rms misfit
  bool oscillating = true;  // false for a flat signal, fit fields then hold the mean
};

// least-squares fit of a e^{-t/T} cos(2 pi f t + phi) + b; initial frequency
// from the discrete spectrum peak, refined by levenberg-marquardt
FitResult fit_damped_sinusoid(const std::vector<std::pair<double, double>>& samples);

// splittable seeding: mixes (seed, stream) into one well-distributed value so
// independent streams can be derived from a single master seed
std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t stream = 0);

// standard normal via explicit box-muller on the engine's raw output, so
// sampled values are identical across standard library implementations
double standard_normal(std::mt19937_64& rng);

}  // namespace eoq
