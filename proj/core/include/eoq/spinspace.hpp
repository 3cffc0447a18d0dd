#pragma once

#include <string>
#include <vector>

#include "eoq/numkit.hpp"

namespace eoq {

// product-basis convention: basis index bits with MSB = spin 1; bit value 0
// means up (+1/2), 1 means down

struct CoupledState {
  double S_tot = 0.0;
  double Sz_tot = 0.0;
  // 3 spins: {S_12}; 6 spins: {S_A, S_B, S_A12, S_B56}; 2 spins: empty
  std::vector<double> intermediate_labels;
};

struct SpinBasis {
  int n_spins = 0;
  std::vector<CoupledState> states;
  cmat to_product;  // column k is states[k] expressed in the product basis
};

// (S_i . S_j - 1/4) = (SWAP_ij - I)/2 on the 2^n product space; sites 1-based
cmat pauli_exchange_term(int n_spins, int i, int j);

cmat total_spin_squared(int n_spins);
cmat total_spin_z(int n_spins);

// supported coupling trees:
//   n=2: "(1,2)"
//   n=3: "((1,2),3)"
//   n=6: "((1,2),3)|((5,6),4)"   (two qubits, legs relabeled to 1..6)
// states are sorted by (S_tot, Sz_tot, intermediates) ascending, which places
// the computational quartet first inside each 6-spin (S_tot, Sz) block
SpinBasis build_coupled_basis(int n_spins, const std::string& coupling_order);
SpinBasis build_coupled_basis(int n_spins);

// positions of the (S_tot, Sz_tot) block inside the sorted state list
std::vector<int> block_indices(const SpinBasis& basis, double S_tot, double Sz_tot);

// sub-block of an operator (given in the product basis) on one (S_tot, Sz)
// block of the coupled basis; throws if the operator couples that block to
// the rest of the space beyond 1e-9 * ||op||
cmat block_project(const SpinBasis& basis, const cmat& op, double S_tot, double Sz_tot);

}  // namespace eoq
