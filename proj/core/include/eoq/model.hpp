#pragma once

#include <vector>

#include "eoq/numkit.hpp"

namespace eoq {

enum class Connectivity { linear, all_to_all };

struct Bond {
  int i = 0;  // 1-based sites, i < j
  int j = 0;
  double J = 0.0;  // rad/ns, >= 0
};

struct BondSet {
  int n_spins = 0;
  std::vector<Bond> bonds;
};

// validates site ranges, i < j, J >= 0, no duplicate bonds
BondSet make_bond_set(int n_spins, const std::vector<Bond>& bonds);

// H = sum_ij J_ij (S_i . S_j - 1/4); hermitian, negative semidefinite
cmat heisenberg_h(const BondSet& bonds);

struct EffectiveSingleQubitH {
  double hx = 0.0;              // sigma_x coefficient, rad/ns
  double hz = 0.0;              // sigma_z coefficient, rad/ns
  double identity_shift = 0.0;  // identity coefficient, rad/ns
};

// computational-block coefficients of the 3-spin hamiltonian; each S=1/2
// block equals hx sx + hz sz - identity_shift * I while the S=3/2 block
// stays at zero energy, so identity_shift sets the phase the computational
// states pick up relative to leakage
EffectiveSingleQubitH effective_h(double J12, double J23, double J13, Connectivity conn);

struct HubbardParams {
  double eps1 = 0.0, eps2 = 0.0, eps3 = 0.0;
  double U1 = 0.0, U2 = 0.0, U3 = 0.0;
  double V12 = 0.0, V23 = 0.0, V13 = 0.0;
  double t12 = 0.0, t23 = 0.0, t13 = 0.0;
};

struct ExchangeTriple {
  double J12 = 0.0, J23 = 0.0, J13 = 0.0;
};

// closed-form exchange amplitudes from the hubbard parameters; throws
// std::domain_error when a denominator is singular
ExchangeTriple hubbard_exchange(const HubbardParams& p);

struct SweetSpot {
  double eps2_minus_eps1 = 0.0;
  double eps3_minus_eps1 = 0.0;
};

// detunings at which all three J are first-order insensitive to eps noise
SweetSpot sweet_spot(const HubbardParams& p);

}  // namespace eoq
