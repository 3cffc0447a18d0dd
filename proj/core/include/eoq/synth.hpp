#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eoq/model.hpp"
#include "eoq/numkit.hpp"
#include "eoq/pulsekit.hpp"

namespace eoq {

struct GateSpec {
  std::string name;
  Eigen::Matrix2cd target_su2 = Eigen::Matrix2cd::Identity();
  // set when a schedule must also hit an exact phase against leakage
  // (two-qubit subsequence use); absent for pure single-qubit use
  std::optional<double> requires_leakage_phase;
};

struct SynthResult {
  bool feasible = false;
  std::string note;
  Schedule schedule;
  double achieved_fidelity = 0.0;
  int pulse_count = 0;
  double wall_clock = 0.0;     // ns, includes tau_idle per segment
  double leakage_phase = 0.0;  // accumulated (J12+J23+J13)/2 integral, rad
};

struct AxisRate {
  Eigen::Vector3d axis;  // unit, y component 0
  double rate = 0.0;     // rad/ns of rotation angle accumulation, 2|h|
};

// rotation axis and angular rate produced by holding (J12, J23, J13); throws
// on a zero traceless part (degenerate axis)
AxisRate reachable_axis(double J12, double J23, double J13, Connectivity conn);

// schedule of at most max_pulses simultaneous segments matching target up to
// global phase with fidelity >= 1 - 1e-6; single-pulse feasibility is decided
// analytically (both angle windings), two-pulse by seeded multistart numeric
// search; infeasibility is reported in the result, not thrown
SynthResult synthesize(const GateSpec& target, Connectivity connectivity, int max_pulses,
                       double J_max, double tau_idle, std::uint64_t seed = 20260821ULL);

// the ten-gate working set: I, Z, S, Sdg, X, Y, H, Xp, Xm, YH
std::vector<GateSpec> standard_gate_set();

struct CatalogRow {
  GateSpec gate;
  Schedule sequential;
  int sequential_pulses = 0;
  SynthResult linear;
  SynthResult all_to_all;
};

// per-gate discrete z/n trains next to simultaneous-pulse constructions for
// both connectivities, every row re-simulated in the full spin space
std::vector<CatalogRow> gate_catalog(double J_max, double tau_idle);

// averages over the catalog excluding the identity row
double catalog_average_sequential(const std::vector<CatalogRow>& rows);
double catalog_average_linear(const std::vector<CatalogRow>& rows);
double catalog_average_all_to_all(const std::vector<CatalogRow>& rows);

std::string catalog_csv(const std::vector<CatalogRow>& rows);
std::string catalog_json(const std::vector<CatalogRow>& rows);

enum class QubitSite { A, B };

struct PhaseCorrection {
  Schedule schedule;  // 6 spins, one segment on the chosen qubit's bonds
  double phi = 0.0;   // (sum J) tau / 2, rad
  // phase between computational and leakage entries folded to [0, pi] for the
  // two-bond drive; reported over [0, 2 pi) for the three-bond drive
  double relative_phase = 0.0;
};

// one drive of duration 2 pi / sqrt(J1^2 - J1 J2 + J2^2) on the qubit's two
// bonds; acts as a phase on the qubit's computational states relative to its
// leakage states
PhaseCorrection phase_correction_linear(QubitSite qubit, double J_first, double J_second);

// one drive of duration 2 pi / sqrt(sum J^2 - sum_{pairs} J J') on all three
// bonds of qubit A; requires a nondegenerate configuration (not all equal)
PhaseCorrection phase_correction_all_to_all(double J12, double J13, double J23);

// exchange triple whose three-bond correction drive realizes phi_target
// modulo 2 pi, with the largest amplitude equal to J_max
ExchangeTriple phase_correction_solve(double phi_target, double J_max);

enum class SeqPattern { nzn, znz };

struct ReplacementResult {
  SynthResult replacement;        // 6-spin schedule acting on qubit A
  double sequential_time = 0.0;   // ns, three pulses plus idle times
  double break_even_tau_idle = 0.0;  // ns at which the replacement starts winning
};

// replace the three-pulse train (theta1, theta2, theta3) on qubit A by a
// matching-pulse-plus-correction pair (linear) or a single segment
// (all-to-all) that reproduces the full 6-spin action up to global phase;
// requires theta3 = theta1
ReplacementResult replace_three_pulse(double theta1, double theta2, double theta3,
                                      SeqPattern pattern, Connectivity connectivity,
                                      double J_max, double tau_idle);

// average gate fidelity of a schedule's full evolution against a target su2
// on the computational block (3-spin schedules), or against a full-space
// reference unitary (6-spin schedules, identity projector)
double computational_fidelity(const Schedule& schedule, const Eigen::Matrix2cd& target_su2);
double full_space_fidelity(const Schedule& schedule, const cmat& reference);

}  // namespace eoq
