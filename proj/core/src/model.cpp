#include "eoq/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "eoq/spinspace.hpp"

namespace eoq {

BondSet make_bond_set(int n_spins, const std::vector<Bond>& bonds) {
  if (n_spins < 2)
    throw std::invalid_argument("make_bond_set: need at least two spins");
  for (size_t a = 0; a < bonds.size(); ++a) {
    const Bond& b = bonds[a];
    if (b.i < 1 || b.j < 1 || b.i >= b.j || b.j > n_spins)
      throw std::invalid_argument("make_bond_set: bond sites must satisfy 1 <= i < j <= n");
    if (b.J < 0.0)
      throw std::invalid_argument("make_bond_set: exchange amplitudes must be nonnegative");
    for (size_t c = a + 1; c < bonds.size(); ++c)
      if (bonds[c].i == b.i && bonds[c].j == b.j)
        throw std::invalid_argument("make_bond_set: duplicate bond");
  }
  return BondSet{n_spins, bonds};
}

cmat heisenberg_h(const BondSet& bonds) {
  const Eigen::Index dim = Eigen::Index(1) << bonds.n_spins;
  cmat h = cmat::Zero(dim, dim);
  for (const Bond& b : bonds.bonds)
    if (b.J != 0.0) h += b.J * pauli_exchange_term(bonds.n_spins, b.i, b.j);
  return h;
}

EffectiveSingleQubitH effective_h(double J12, double J23, double J13, Connectivity conn) {
  if (J12 < 0.0 || J23 < 0.0 || J13 < 0.0)
    throw std::invalid_argument("effective_h: exchange amplitudes must be nonnegative");
  if (conn == Connectivity::linear && J13 != 0.0)
    throw std::invalid_argument("effective_h: linear connectivity requires J13 = 0");
  const double s3 = std::numbers::sqrt3;
  EffectiveSingleQubitH h;
  h.hx = s3 * (J23 - J13) / 4.0;
  h.hz = (-2.0 * J12 + J23 + J13) / 4.0;
  h.identity_shift = (J12 + J23 + J13) / 2.0;
  return h;
}

namespace {

double checked_div(double num, double d1, double d2, double scale) {
  if (std::abs(d1) < 1e-12 * scale || std::abs(d2) < 1e-12 * scale)
    throw std::domain_error("hubbard_exchange: singular denominator, exchange diverges");
  return num / (d1 * d2);
}

}  // namespace

ExchangeTriple hubbard_exchange(const HubbardParams& p) {
  const double v12 = (p.V12 - p.V23 - p.V13) / 2.0;
  const double v23 = (-p.V12 + p.V23 - p.V13) / 2.0;
  const double v13 = (-p.V12 - p.V23 + p.V13) / 2.0;
  const double scale = std::max({1e-300, std::abs(p.U1), std::abs(p.U2), std::abs(p.U3),
                                 std::abs(p.eps1), std::abs(p.eps2), std::abs(p.eps3)});
  ExchangeTriple out;
  out.J12 = checked_div(p.t12 * p.t12 * (p.U1 + p.U2 + v13 + v23),
                        p.U1 + v13 + p.eps1 - p.eps2, p.U2 + v23 - p.eps1 + p.eps2, scale);
  out.J23 = checked_div(p.t23 * p.t23 * (p.U2 + p.U3 + v12 + v13),
                        p.U2 + v12 + p.eps2 - p.eps3, p.U3 + v13 - p.eps2 + p.eps3, scale);
  out.J13 = checked_div(p.t13 * p.t13 * (p.U1 + p.U3 + v12 + v23),
                        p.U1 + v12 + p.eps1 - p.eps3, p.U3 + v23 - p.eps1 + p.eps3, scale);
  return out;
}

SweetSpot sweet_spot(const HubbardParams& p) {
  const double v12 = (p.V12 - p.V23 - p.V13) / 2.0;
  const double v23 = (-p.V12 + p.V23 - p.V13) / 2.0;
  const double v13 = (-p.V12 - p.V23 + p.V13) / 2.0;
  SweetSpot s;
  s.eps2_minus_eps1 = (p.U1 - p.U2 + v13 - v23) / 2.0;
  s.eps3_minus_eps1 = (p.U1 - p.U3 + v12 - v23) / 2.0;
  return s;
}

}  // namespace eoq
