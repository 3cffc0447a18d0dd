#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "eoq/model.hpp"
#include "eoq/numkit.hpp"

namespace eoq {

struct PulseSegment {
  // bond (i,j), 1-based with i < j, to amplitude in rad/ns
  std::map<std::pair<int, int>, double> J_values;
  double duration = 0.0;  // ns, > 0
};

struct Schedule {
  int n_spins = 3;
  std::vector<PulseSegment> segments;
  double tau_idle = 0.0;  // ns of dead time after every segment
  double J_max = 0.1;     // rad/ns amplitude ceiling
};

struct EffectiveGate {
  Eigen::Matrix2cd su2 = Eigen::Matrix2cd::Identity();  // det-normalized
  // integral of (J12+J23+J13)/2 dt; the computational block of the full
  // evolution equals e^{+i leakage_phase} su2 against zero-energy leakage
  double leakage_phase = 0.0;
};

struct GateWithSchedule {
  EffectiveGate gate;
  Schedule schedule;
};

// ordered product over segments, rightmost factor first in time; idle gaps
// are identity since all couplings are off between segments
cmat evolve_full(const Schedule& schedule);

// analytic composed (su2, leakage phase) of a 3-spin schedule
EffectiveGate effective_gate(const Schedule& schedule);

EffectiveGate compose(const EffectiveGate& later, const EffectiveGate& earlier);

// closed-form exp(-i angle/2 axis.sigma) for a unit axis
Eigen::Matrix2cd su2_rotation(const Eigen::Vector3d& axis, double angle);

// one J12 segment; su2 = exp(+i theta sz / 2); 0 <= theta < 4 pi
GateWithSchedule rot_z(double theta, double J_max, double tau_idle = 0.0);
// one J23 segment; su2 = exp(-i theta (sqrt3 sx + sz) / 4)
GateWithSchedule rot_n(double theta, double J_max, double tau_idle = 0.0);
// one J13 segment; su2 = exp(+i theta (sqrt3 sx - sz) / 4)
GateWithSchedule rot_m(double theta, double J_max, double tau_idle = 0.0);

// one segment with J23 = 2 J12 = J_max and duration solving
// theta = 2 pi - sqrt3 (J_max/2) tau; su2 = exp(-i (2 pi - theta) sx / 2),
// which matches exp(-i theta sx / 2) up to global phase for the x-type
// catalog targets; 0 < theta < 2 pi
GateWithSchedule rot_x_simultaneous(double theta, double J_max, double tau_idle = 0.0);

// sum of durations plus one tau_idle per segment
double wall_clock(const Schedule& schedule);

// {n_spins, J_max, tau_idle, segments:[{bonds:{"1-2": J, ...}, duration}]};
// durations in ns, amplitudes in rad/ns
std::string schedule_to_json(const Schedule& schedule);
Schedule schedule_from_json(const std::string& text);

// recurring rotation angles of the discrete gate constructions; the last two
// are tabulated at printed precision
inline const double angle_theta1 = std::atan(std::sqrt(8.0));
inline const double angle_theta2 = std::numbers::pi - std::atan(std::sqrt(5.0) / 2.0);
inline const double angle_theta3 = 1.305;
inline const double angle_theta4 = 3.519;

}  // namespace eoq
