#include "eoq/pulsekit.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eoq/spinspace.hpp"

namespace eoq {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double four_pi = 4.0 * std::numbers::pi;

void validate(const Schedule& s) {
  if (s.n_spins < 2 || s.n_spins > 6)
    throw std::invalid_argument("schedule: n_spins must be between 2 and 6");
  if (!(s.J_max > 0.0))
    throw std::invalid_argument("schedule: J_max must be positive");
  if (s.tau_idle < 0.0)
    throw std::invalid_argument("schedule: tau_idle must be nonnegative");
  for (const PulseSegment& seg : s.segments) {
    if (!(seg.duration > 0.0))
      throw std::invalid_argument("schedule: segment duration must be positive");
    for (const auto& [bond, J] : seg.J_values) {
      if (bond.first < 1 || bond.first >= bond.second || bond.second > s.n_spins)
        throw std::invalid_argument("schedule: bond sites must satisfy 1 <= i < j <= n");
      if (J < 0.0 || J > s.J_max * (1.0 + 1e-9))
        throw std::invalid_argument("schedule: amplitude outside [0, J_max]");
    }
  }
}

cmat segment_h(int n_spins, const PulseSegment& seg) {
  std::vector<Bond> bonds;
  for (const auto& [bond, J] : seg.J_values)
    bonds.push_back(Bond{bond.first, bond.second, J});
  return heisenberg_h(make_bond_set(n_spins, bonds));
}

double segment_J(const PulseSegment& seg, int i, int j) {
  const auto it = seg.J_values.find({i, j});
  return it == seg.J_values.end() ? 0.0 : it->second;
}

GateWithSchedule one_bond_rotation(double theta, double J_max, double tau_idle,
                                   int i, int j, const Eigen::Vector3d& axis,
                                   const char* who) {
  if (theta < 0.0 || theta >= four_pi)
    throw std::invalid_argument(std::string(who) + ": angle must lie in [0, 4 pi)");
  if (!(J_max > 0.0)) throw std::invalid_argument(std::string(who) + ": J_max must be positive");
  GateWithSchedule out;
  out.schedule.n_spins = 3;
  out.schedule.J_max = J_max;
  out.schedule.tau_idle = tau_idle;
  if (theta == 0.0) return out;
  PulseSegment seg;
  seg.J_values[{i, j}] = J_max;
  seg.duration = theta / J_max;
  out.schedule.segments.push_back(seg);
  out.gate.su2 = su2_rotation(axis, theta);
  out.gate.leakage_phase = theta / 2.0;
  return out;
}

}  // namespace

cmat evolve_full(const Schedule& schedule) {
  validate(schedule);
  const Eigen::Index dim = Eigen::Index(1) << schedule.n_spins;
  cmat u = cmat::Identity(dim, dim);
  for (const PulseSegment& seg : schedule.segments)
    u = expm_unitary(segment_h(schedule.n_spins, seg), seg.duration) * u;
  return u;
}

EffectiveGate effective_gate(const Schedule& schedule) {
  validate(schedule);
  if (schedule.n_spins != 3)
    throw std::invalid_argument("effective_gate: single-qubit schedules have 3 spins");
  EffectiveGate g;
  for (const PulseSegment& seg : schedule.segments) {
    const double J12 = segment_J(seg, 1, 2);
    const double J23 = segment_J(seg, 2, 3);
    const double J13 = segment_J(seg, 1, 3);
    const EffectiveSingleQubitH h = effective_h(J12, J23, J13, Connectivity::all_to_all);
    const double hn = std::hypot(h.hx, h.hz);
    EffectiveGate step;
    if (hn > 0.0)
      step.su2 = su2_rotation(Eigen::Vector3d(h.hx / hn, 0.0, h.hz / hn),
                              2.0 * hn * seg.duration);
    step.leakage_phase = h.identity_shift * seg.duration;
    g = compose(step, g);
  }
  return g;
}

EffectiveGate compose(const EffectiveGate& later, const EffectiveGate& earlier) {
  EffectiveGate out;
  out.su2 = later.su2 * earlier.su2;
  out.leakage_phase = later.leakage_phase + earlier.leakage_phase;
  return out;
}

Eigen::Matrix2cd su2_rotation(const Eigen::Vector3d& axis, double angle) {
  const Eigen::Vector3d a = axis.normalized();
  const double c = std::cos(angle / 2.0), s = std::sin(angle / 2.0);
  Eigen::Matrix2cd u;
  u << cxd(c, -s * a.z()), cxd(-s * a.y(), -s * a.x()),
       cxd(s * a.y(), -s * a.x()), cxd(c, s * a.z());
  return u;
}

GateWithSchedule rot_z(double theta, double J_max, double tau_idle) {
  return one_bond_rotation(theta, J_max, tau_idle, 1, 2, {0.0, 0.0, -1.0}, "rot_z");
}

GateWithSchedule rot_n(double theta, double J_max, double tau_idle) {
  return one_bond_rotation(theta, J_max, tau_idle, 2, 3,
                           {std::numbers::sqrt3 / 2.0, 0.0, 0.5}, "rot_n");
}

GateWithSchedule rot_m(double theta, double J_max, double tau_idle) {
  return one_bond_rotation(theta, J_max, tau_idle, 1, 3,
                           {-std::numbers::sqrt3 / 2.0, 0.0, 0.5}, "rot_m");
}

GateWithSchedule rot_x_simultaneous(double theta, double J_max, double tau_idle) {
  if (!(theta > 0.0) || !(theta < 2.0 * pi))
    throw std::invalid_argument("rot_x_simultaneous: angle must lie in (0, 2 pi)");
  if (!(J_max > 0.0))
    throw std::invalid_argument("rot_x_simultaneous: J_max must be positive");
  GateWithSchedule out;
  out.schedule.n_spins = 3;
  out.schedule.J_max = J_max;
  out.schedule.tau_idle = tau_idle;
  PulseSegment seg;
  seg.J_values[{1, 2}] = J_max / 2.0;
  seg.J_values[{2, 3}] = J_max;
  seg.duration = 2.0 * (2.0 * pi - theta) / (std::numbers::sqrt3 * J_max);
  out.schedule.segments.push_back(seg);
  out.gate.su2 = su2_rotation({1.0, 0.0, 0.0}, 2.0 * pi - theta);
  out.gate.leakage_phase = 0.75 * J_max * seg.duration;
  return out;
}

double wall_clock(const Schedule& schedule) {
  double total = 0.0;
  for (const PulseSegment& seg : schedule.segments) total += seg.duration;
  return total + static_cast<double>(schedule.segments.size()) * schedule.tau_idle;
}

std::string schedule_to_json(const Schedule& schedule) {
  nlohmann::json j;
  j["n_spins"] = schedule.n_spins;
  j["J_max"] = schedule.J_max;
  j["tau_idle"] = schedule.tau_idle;
  j["segments"] = nlohmann::json::array();
  for (const PulseSegment& seg : schedule.segments) {
    nlohmann::json js;
    js["bonds"] = nlohmann::json::object();
    for (const auto& [bond, J] : seg.J_values)
      js["bonds"][std::to_string(bond.first) + "-" + std::to_string(bond.second)] = J;
    js["duration"] = seg.duration;
    j["segments"].push_back(js);
  }
  return j.dump(2);
}

Schedule schedule_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("schedule_from_json: ") + e.what());
  }
  Schedule s;
  try {
    s.n_spins = j.at("n_spins").get<int>();
    s.J_max = j.at("J_max").get<double>();
    s.tau_idle = j.at("tau_idle").get<double>();
    for (const auto& js : j.at("segments")) {
      PulseSegment seg;
      seg.duration = js.at("duration").get<double>();
      for (const auto& [key, val] : js.at("bonds").items()) {
        const auto dash = key.find('-');
        if (dash == std::string::npos)
          throw std::invalid_argument("schedule_from_json: bond key must look like \"1-2\"");
        seg.J_values[{std::stoi(key.substr(0, dash)), std::stoi(key.substr(dash + 1))}] =
            val.get<double>();
      }
      s.segments.push_back(std::move(seg));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("schedule_from_json: ") + e.what());
  }
  validate(s);
  return s;
}

}  // namespace eoq
