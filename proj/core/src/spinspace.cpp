#include "eoq/spinspace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace eoq {

namespace {

cvec kron_vec(const cvec& a, const cvec& b) {
  cvec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    for (Eigen::Index j = 0; j < b.size(); ++j)
      out(i * b.size() + j) = a(i) * b(j);
  return out;
}

// total S- on a product-basis vector of n spin-1/2 sites
cvec sminus(const cvec& v, int n) {
  cvec out = cvec::Zero(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) < 1e-15) continue;
    for (int i = 0; i < n; ++i) {
      const Eigen::Index mask = Eigen::Index(1) << (n - 1 - i);
      if ((k & mask) == 0) out(k | mask) += v(k);  // up -> down
    }
  }
  return out;
}

struct Multiplet {
  double S = 0.5;
  std::vector<cvec> vecs;  // M = S down to -S
  std::vector<double> tag;
};

Multiplet leaf() {
  Multiplet m;
  m.S = 0.5;
  cvec up(2), dn(2);
  up << 1.0, 0.0;
  dn << 0.0, 1.0;
  m.vecs = {up, dn};
  return m;
}

// couple two multiplets over n = na + nb sites; M-sector construction with
// higher-S tops projected out, condon-shortley sign on the max-m1 component
std::vector<Multiplet> couple_pair(const Multiplet& a, const Multiplet& b, int na, int nb) {
  const int n = na + nb;
  std::vector<Multiplet> out;
  std::vector<std::pair<double, cvec>> prev_tops;  // (S', top) for S' > current S
  const double s_max = a.S + b.S;
  const double s_min = std::abs(a.S - b.S);
  for (double s = s_max; s >= s_min - 1e-9; s -= 1.0) {
    // all |a,m1> x |b,m2> with m1 + m2 = s
    std::vector<cvec> sector;
    for (size_t ia = 0; ia < a.vecs.size(); ++ia) {
      const double m1 = a.S - static_cast<double>(ia);
      const double m2 = s - m1;
      if (m2 < -b.S - 1e-9 || m2 > b.S + 1e-9) continue;
      const auto ib = static_cast<size_t>(std::llround(b.S - m2));
      sector.push_back(kron_vec(a.vecs[ia], b.vecs[ib]));
    }
    cmat mx(sector[0].size(), static_cast<Eigen::Index>(sector.size()));
    for (size_t c = 0; c < sector.size(); ++c) mx.col(static_cast<Eigen::Index>(c)) = sector[c];
    if (!prev_tops.empty()) {
      cmat vh(mx.rows(), static_cast<Eigen::Index>(prev_tops.size()));
      for (size_t c = 0; c < prev_tops.size(); ++c) {
        cvec v = prev_tops[c].second;
        const auto steps = static_cast<int>(std::llround(prev_tops[c].first - s));
        for (int t = 0; t < steps; ++t) {
          v = sminus(v, n);
          v /= v.norm();
        }
        vh.col(static_cast<Eigen::Index>(c)) = v;
      }
      mx -= vh * (vh.adjoint() * mx);
    }
    Eigen::JacobiSVD<cmat> svd(mx, Eigen::ComputeThinU);
    if (svd.singularValues()(0) < 1e-10)
      throw std::runtime_error("couple_pair: degenerate sector");
    cvec top = svd.matrixU().col(0);
    // sign convention: coefficient of the max-m1 product component real positive
    const double m1max = std::min(a.S, s + b.S);
    const auto ia = static_cast<size_t>(std::llround(a.S - m1max));
    const auto ib = static_cast<size_t>(std::llround(b.S - (s - m1max)));
    const cxd ov = kron_vec(a.vecs[ia], b.vecs[ib]).dot(top);
    if (std::abs(ov) < 1e-12)
      throw std::runtime_error("couple_pair: vanishing reference component");
    top *= std::abs(ov) / ov;
    prev_tops.emplace_back(s, top);

    Multiplet m;
    m.S = s;
    m.vecs.push_back(top);
    cvec v = top;
    const auto nlower = static_cast<int>(std::llround(2.0 * s));
    for (int t = 0; t < nlower; ++t) {
      v = sminus(v, n);
      v /= v.norm();
      m.vecs.push_back(v);
    }
    out.push_back(std::move(m));
  }
  return out;
}

// relabel tensor legs of an 8-dim vector: source legs (5,6,4) -> output (4,5,6)
cvec permute_legs_564_to_456(const cvec& v) {
  cvec out(8);
  for (int r0 = 0; r0 < 2; ++r0)
    for (int r1 = 0; r1 < 2; ++r1)
      for (int r2 = 0; r2 < 2; ++r2)
        out((r0 << 2) | (r1 << 1) | r2) = v((r1 << 2) | (r2 << 1) | r0);
  return out;
}

std::string strip_spaces(const std::string& s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  return out;
}

struct RawState {
  double S, Sz;
  std::vector<double> labels;
  cvec vec;
};

SpinBasis assemble(int n_spins, std::vector<RawState> raw) {
  std::sort(raw.begin(), raw.end(), [](const RawState& x, const RawState& y) {
    return std::tie(x.S, x.Sz, x.labels) < std::tie(y.S, y.Sz, y.labels);
  });
  SpinBasis basis;
  basis.n_spins = n_spins;
  const Eigen::Index dim = Eigen::Index(1) << n_spins;
  basis.to_product = cmat(dim, dim);
  for (size_t k = 0; k < raw.size(); ++k) {
    basis.states.push_back(CoupledState{raw[k].S, raw[k].Sz, raw[k].labels});
    basis.to_product.col(static_cast<Eigen::Index>(k)) = raw[k].vec;
  }
  return basis;
}

// qubit tree ((1x2),3); returns multiplets tagged with {S, S12}
std::vector<Multiplet> three_spin_multiplets() {
  std::vector<Multiplet> out;
  for (const Multiplet& m12 : couple_pair(leaf(), leaf(), 1, 1)) {
    for (Multiplet& r : couple_pair(m12, leaf(), 2, 1)) {
      r.tag = {m12.S};
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace

cmat pauli_exchange_term(int n_spins, int i, int j) {
  if (n_spins < 2 || n_spins > 10)
    throw std::invalid_argument("pauli_exchange_term: unsupported spin count");
  if (i < 1 || j < 1 || i >= j || j > n_spins)
    throw std::invalid_argument("pauli_exchange_term: sites must satisfy 1 <= i < j <= n");
  const int a = i - 1, b = j - 1;
  const Eigen::Index dim = Eigen::Index(1) << n_spins;
  const Eigen::Index ma = Eigen::Index(1) << (n_spins - 1 - a);
  const Eigen::Index mb = Eigen::Index(1) << (n_spins - 1 - b);
  cmat m = cmat::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const bool bi = (k & ma) != 0, bj = (k & mb) != 0;
    if (bi != bj) {
      m(k, k) -= 0.5;
      m(k ^ ma ^ mb, k) += 0.5;
    }
  }
  return m;
}

cmat total_spin_z(int n_spins) {
  const Eigen::Index dim = Eigen::Index(1) << n_spins;
  cmat m = cmat::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    int down = 0;
    for (int i = 0; i < n_spins; ++i)
      if (k & (Eigen::Index(1) << i)) ++down;
    m(k, k) = 0.5 * (n_spins - 2 * down);
  }
  return m;
}

cmat total_spin_squared(int n_spins) {
  const Eigen::Index dim = Eigen::Index(1) << n_spins;
  // S^2 = (3n/4) I + sum_{i<j} (2 (S_i.S_j - 1/4) + 1/2)
  cmat m = cmat::Identity(dim, dim) * (0.75 * n_spins);
  for (int i = 1; i <= n_spins; ++i)
    for (int j = i + 1; j <= n_spins; ++j)
      m += 2.0 * pauli_exchange_term(n_spins, i, j) + 0.5 * cmat::Identity(dim, dim);
  return m;
}

SpinBasis build_coupled_basis(int n_spins, const std::string& coupling_order) {
  const std::string tree = strip_spaces(coupling_order);
  if (n_spins == 2 && tree == "(1,2)") {
    std::vector<RawState> raw;
    for (const Multiplet& m : couple_pair(leaf(), leaf(), 1, 1))
      for (size_t k = 0; k < m.vecs.size(); ++k)
        raw.push_back({m.S, m.S - static_cast<double>(k), {}, m.vecs[k]});
    return assemble(2, std::move(raw));
  }
  if (n_spins == 3 && tree == "((1,2),3)") {
    std::vector<RawState> raw;
    for (const Multiplet& m : three_spin_multiplets())
      for (size_t k = 0; k < m.vecs.size(); ++k)
        raw.push_back({m.S, m.S - static_cast<double>(k), {m.tag[0]}, m.vecs[k]});
    return assemble(3, std::move(raw));
  }
  if (n_spins == 6 && tree == "((1,2),3)|((5,6),4)") {
    const std::vector<Multiplet> qa = three_spin_multiplets();
    // qubit B couples (5,6) then spin 4; built in leg order (5,6,4) and the
    // legs are then relabeled so the final tensor order is (4,5,6)
    std::vector<Multiplet> qb;
    for (Multiplet m : three_spin_multiplets()) {
      for (cvec& v : m.vecs) v = permute_legs_564_to_456(v);
      qb.push_back(std::move(m));
    }
    std::vector<RawState> raw;
    for (const Multiplet& ma : qa)
      for (const Multiplet& mb : qb)
        for (const Multiplet& r : couple_pair(ma, mb, 3, 3))
          for (size_t k = 0; k < r.vecs.size(); ++k)
            raw.push_back({r.S, r.S - static_cast<double>(k),
                           {ma.S, mb.S, ma.tag[0], mb.tag[0]}, r.vecs[k]});
    return assemble(6, std::move(raw));
  }
  throw std::invalid_argument("build_coupled_basis: unsupported coupling tree");
}

SpinBasis build_coupled_basis(int n_spins) {
  switch (n_spins) {
    case 2: return build_coupled_basis(2, "(1,2)");
    case 3: return build_coupled_basis(3, "((1,2),3)");
    case 6: return build_coupled_basis(6, "((1,2),3)|((5,6),4)");
    default: throw std::invalid_argument("build_coupled_basis: n_spins must be 2, 3, or 6");
  }
}

std::vector<int> block_indices(const SpinBasis& basis, double S_tot, double Sz_tot) {
  std::vector<int> out;
  for (size_t k = 0; k < basis.states.size(); ++k)
    if (std::abs(basis.states[k].S_tot - S_tot) < 1e-9 &&
        std::abs(basis.states[k].Sz_tot - Sz_tot) < 1e-9)
      out.push_back(static_cast<int>(k));
  return out;
}

cmat block_project(const SpinBasis& basis, const cmat& op, double S_tot, double Sz_tot) {
  if (op.rows() != basis.to_product.rows() || op.cols() != basis.to_product.cols())
    throw std::invalid_argument("block_project: operator dimension mismatch");
  const std::vector<int> idx = block_indices(basis, S_tot, Sz_tot);
  if (idx.empty())
    throw std::invalid_argument("block_project: empty (S_tot, Sz_tot) block");
  const cmat coupled = basis.to_product.adjoint() * op * basis.to_product;
  const double scale = std::max(1e-300, op.norm());
  double leak = 0.0;
  for (int r : idx)
    for (Eigen::Index c = 0; c < coupled.cols(); ++c) {
      const bool inside =
          std::find(idx.begin(), idx.end(), static_cast<int>(c)) != idx.end();
      if (!inside) {
        leak = std::max(leak, std::abs(coupled(r, c)));
        leak = std::max(leak, std::abs(coupled(c, r)));
      }
    }
  if (leak > 1e-9 * scale)
    throw std::invalid_argument("block_project: operator couples blocks");
  cmat out(idx.size(), idx.size());
  for (size_t r = 0; r < idx.size(); ++r)
    for (size_t c = 0; c < idx.size(); ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          coupled(idx[r], idx[c]);
  return out;
}

}  // namespace eoq
