#include "eoq/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace eoq {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void check_square(const cmat& a, const char* who) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw std::invalid_argument(std::string(who) + ": square matrix required");
}

}  // namespace

EigResult herm_eig(const cmat& a) {
  check_square(a, "herm_eig");
  const double scale = std::max(1.0, a.norm());
  const double dev = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (dev > 1e-12 * scale)
    throw std::invalid_argument("herm_eig: matrix is not hermitian");
  Eigen::SelfAdjointEigenSolver<cmat> es(a);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("herm_eig: eigensolver failed to converge");
  return EigResult{es.eigenvalues(), es.eigenvectors()};
}

cmat expm_unitary(const cmat& h, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("expm_unitary: time must be finite");
  EigResult eig = herm_eig(h);
  const Eigen::Index n = h.rows();
  cvec ph(n);
  for (Eigen::Index k = 0; k < n; ++k)
    ph(k) = std::exp(cxd(0.0, -eig.eigenvalues(k) * t));
  return eig.eigenvectors * ph.asDiagonal() * eig.eigenvectors.adjoint();
}

double unitary_distance_up_to_phase(const cmat& u, const cmat& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols())
    throw std::invalid_argument("unitary_distance_up_to_phase: dimension mismatch");
  check_square(u, "unitary_distance_up_to_phase");
  // ||u - e^{i a} v||_F^2 minimized at a = arg tr(v^dag u)
  const double n = static_cast<double>(u.rows());
  const double overlap = std::abs((v.adjoint() * u).trace());
  return std::sqrt(std::max(0.0, 2.0 * n - 2.0 * overlap));
}

double avg_gate_fidelity(const cmat& actual, const cmat& target,
                         const cmat& computational_projector) {
  const cmat& p = computational_projector;
  check_square(p, "avg_gate_fidelity");
  if (actual.rows() != p.rows() || target.rows() != p.rows() ||
      actual.cols() != p.cols() || target.cols() != p.cols())
    throw std::invalid_argument("avg_gate_fidelity: dimension mismatch");
  const double scale = std::max(1.0, p.norm());
  if ((p - p.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale ||
      (p * p - p).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("avg_gate_fidelity: projector must be hermitian idempotent");
  const double tr = p.trace().real();
  const auto d = static_cast<Eigen::Index>(std::llround(tr));
  if (d < 1 || std::abs(tr - static_cast<double>(d)) > 1e-9)
    throw std::invalid_argument("avg_gate_fidelity: projector rank is not a positive integer");

  // isometry onto the block: eigenvectors of p with eigenvalue 1
  EigResult eig = herm_eig(p);
  cmat w(p.rows(), d);
  Eigen::Index col = 0;
  for (Eigen::Index k = 0; k < p.rows(); ++k)
    if (eig.eigenvalues(k) > 0.5) w.col(col++) = eig.eigenvectors.col(k);
  if (col != d) throw std::invalid_argument("avg_gate_fidelity: projector spectrum is not 0/1");

  const cmat m = w.adjoint() * target.adjoint() * actual * w;
  const double dd = static_cast<double>(d);
  const double f = ((m * m.adjoint()).trace().real() + std::norm(m.trace())) / (dd * (dd + 1.0));
  return std::clamp(f, 0.0, 1.0);
}

// ---- damped sinusoid fit -------------------------------------------------

namespace {

struct SinModel {
  // y = a exp(-g t) cos(2 pi f t + phi) + b
  double a, f, g, phi, b;
};

double model_eval(const SinModel& m, double t) {
  return m.a * std::exp(-m.g * t) * std::cos(two_pi * m.f * t + m.phi) + m.b;
}

double rms_misfit(const SinModel& m, const std::vector<std::pair<double, double>>& s) {
  double acc = 0.0;
  for (const auto& [t, y] : s) {
    const double r = y - model_eval(m, t);
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(s.size()));
}

// levenberg-marquardt with the analytic jacobian; g is kept nonnegative
SinModel lm_refine(SinModel m, const std::vector<std::pair<double, double>>& s) {
  const auto n = static_cast<Eigen::Index>(s.size());
  double lambda = 1e-3;
  double cost = rms_misfit(m, s);
  for (int iter = 0; iter < 200; ++iter) {
    Eigen::MatrixXd jac(n, 5);
    Eigen::VectorXd res(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& [t, y] = s[i];
      const double e = std::exp(-m.g * t);
      const double arg = two_pi * m.f * t + m.phi;
      const double c = std::cos(arg), sn = std::sin(arg);
      jac(i, 0) = e * c;
      jac(i, 1) = -m.a * e * sn * two_pi * t;
      jac(i, 2) = -m.a * t * e * c;
      jac(i, 3) = -m.a * e * sn;
      jac(i, 4) = 1.0;
      res(i) = y - model_eval(m, t);
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * res;
    bool stepped = false;
    for (int tries = 0; tries < 8; ++tries) {
      Eigen::MatrixXd damped = jtj;
      for (int k = 0; k < 5; ++k)
        damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);
      const Eigen::VectorXd step = damped.ldlt().solve(jtr);
      SinModel trial = m;
      trial.a += step(0);
      trial.f += step(1);
      trial.g = std::max(0.0, trial.g + step(2));
      trial.phi += step(3);
      trial.b += step(4);
      const double trial_cost = rms_misfit(trial, s);
      if (std::isfinite(trial_cost) && trial_cost < cost) {
        m = trial;
        cost = trial_cost;
        lambda = std::max(lambda * 0.3, 1e-12);
        stepped = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!stepped) break;
    if (cost < 1e-14) break;
  }
  return m;
}

}  // namespace

FitResult fit_damped_sinusoid(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 8)
    throw std::invalid_argument("fit_damped_sinusoid: at least 8 samples required");
  for (size_t i = 1; i < samples.size(); ++i)
    if (!(samples[i].first > samples[i - 1].first))
      throw std::invalid_argument("fit_damped_sinusoid: times must be strictly increasing");

  const auto n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (const auto& [t, y] : samples) mean += y;
  mean /= n;
  double var = 0.0;
  for (const auto& [t, y] : samples) var += (y - mean) * (y - mean);
  const double sdev = std::sqrt(var / n);

  FitResult out;
  if (sdev <= 1e-9 * std::max(1.0, std::abs(mean))) {
    // flat signal, nothing to fit
    out.oscillating = false;
    out.offset = mean;
    out.amplitude = 0.0;
    out.frequency = 0.0;
    out.decay_time = 1e12;
    out.phase = 0.0;
    out.residual = sdev;
    return out;
  }

  const double t0 = samples.front().first;
  const double span = samples.back().first - t0;

  // periodogram over the resolvable band picks the starting frequency
  double best_f = 1.0 / span, best_pow = -1.0;
  const int half = static_cast<int>(samples.size()) / 2;
  for (int k = 1; k <= 4 * half; ++k) {
    const double f = static_cast<double>(k) / (4.0 * span);
    cxd acc(0.0, 0.0);
    for (const auto& [t, y] : samples)
      acc += (y - mean) * std::exp(cxd(0.0, -two_pi * f * (t - t0)));
    const double pw = std::norm(acc);
    if (pw > best_pow) {
      best_pow = pw;
      best_f = f;
    }
  }

  SinModel best{};
  double best_cost = std::numeric_limits<double>::infinity();
  const double a0 = std::numbers::sqrt2 * sdev;
  for (int p = 0; p < 4; ++p) {
    SinModel m{a0, best_f, 1.0 / (4.0 * span), std::numbers::pi * 0.5 * p, mean};
    m = lm_refine(m, samples);
    const double c = rms_misfit(m, samples);
    if (c < best_cost) {
      best_cost = c;
      best = m;
    }
  }

  // canonical form: a >= 0, f >= 0, phase in (-pi, pi]
  if (best.f < 0.0) {
    best.f = -best.f;
    best.phi = -best.phi;
  }
  if (best.a < 0.0) {
    best.a = -best.a;
    best.phi += std::numbers::pi;
  }
  best.phi = std::remainder(best.phi, two_pi);

  out.amplitude = best.a;
  out.frequency = best.f;
  out.decay_time = 1.0 / std::max(best.g, 1e-12);
  out.phase = best.phi;
  out.offset = best.b;
  out.residual = best_cost;
  out.oscillating = true;
  return out;
}

std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + stream * 0x9E3779B97F4A7C15ULL;
  for (int round = 0; round < 2; ++round) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
  }
  return z;
}

double standard_normal(std::mt19937_64& rng) {
  // 53-bit mantissas shifted into (0, 1)
  const double u1 = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace eoq
