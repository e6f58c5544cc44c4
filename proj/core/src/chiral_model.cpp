#include "fbi/chiral_model.hpp"

#include <algorithm>
#include <cmath>

#include "fbi/errors.hpp"

namespace fbi {

PlaneWaveBasis::PlaneWaveBasis(const MoireLattice& lattice, double radius)
    : lattice_(lattice), radius_(radius), g_list_(gshells(lattice, radius)) {
  if (n_g() < 7) throw CutoffError("plane-wave cutoff too small: need at least 7 G vectors");
  for (const auto& G : g_list_) box_ = std::max({box_, std::abs(G.m), std::abs(G.n)});
  const int w = 2 * box_ + 1;
  lookup_.assign(static_cast<std::size_t>(w) * w, -1);
  for (int i = 0; i < n_g(); ++i) {
    const auto& G = g_list_[i];
    lookup_[static_cast<std::size_t>(G.m + box_) * w + (G.n + box_)] = i;
  }
  for (const auto& G : g_list_)
    for (int n = 0; n < 3; ++n)
      if (find(G + interlayer_shift(lattice_, n)) < 0) ++truncated_;
}

int PlaneWaveBasis::find(ReciprocalIndex G) const {
  if (std::abs(G.m) > box_ || std::abs(G.n) > box_) return -1;
  const int w = 2 * box_ + 1;
  return lookup_[static_cast<std::size_t>(G.m + box_) * w + (G.n + box_)];
}

Vec2 PlaneWaveBasis::offset(int layer, ReciprocalIndex G) const {
  const Vec2 q0 = lattice_.q_vectors[0];
  return lattice_.reciprocal(G) + (layer == 0 ? q0 : Vec2(-q0));
}

PlaneWaveBasis make_basis(const MoireLattice& lattice, double radius) { return PlaneWaveBasis(lattice, radius); }

double shells_to_radius(const MoireLattice& lattice, double shells) { return shells * lattice.g1.norm(); }

ReciprocalIndex interlayer_shift(const MoireLattice& lattice, int n) {
  // layer-2 momentum = layer-1 momentum + q_n, with layers offset by +-q_0 = -+(g1+g2)/3
  return lattice.q_difference(n) - ReciprocalIndex{1, 1};
}

ChiralOperator assemble_D(const Vec2& k, double alpha, const PlaneWaveBasis& basis) {
  const int ng = basis.n_g();
  ChiralOperator op;
  op.k = k;
  op.alpha = alpha;
  op.matrix = MatrixXc::Zero(2 * ng, 2 * ng);
  MatrixXc& D = op.matrix;
  const auto& gl = basis.g_list();
  for (int layer = 0; layer < 2; ++layer)
    for (int i = 0; i < ng; ++i) {
      const Vec2 p = k + basis.offset(layer, gl[i]);
      D(layer * ng + i, layer * ng + i) = cplx(p.x(), p.y());
    }
  const cplx w = basis.lattice().omega_phase;
  cplx wn = 1.0;
  for (int n = 0; n < 3; ++n, wn *= w) {
    const ReciprocalIndex s = interlayer_shift(basis.lattice(), n);
    for (int i = 0; i < ng; ++i) {
      const int up = basis.find(gl[i] + s);
      if (up >= 0) D(i, ng + up) = alpha * wn;
      const int down = basis.find(gl[i] - s);
      if (down >= 0) D(ng + i, down) = alpha * wn;
    }
  }
  return op;
}

MatrixXc assemble_H(const Vec2& k, double alpha, const PlaneWaveBasis& basis) {
  const MatrixXc D = assemble_D(k, alpha, basis).matrix;
  const int n = static_cast<int>(D.rows());
  MatrixXc H = MatrixXc::Zero(2 * n, 2 * n);
  H.topRightCorner(n, n) = D.adjoint();
  H.bottomLeftCorner(n, n) = D;
  return H;
}

VectorXc symmetry_action(Symmetry which, const VectorXc& state, const PlaneWaveBasis& basis) {
  const int ng = basis.n_g();
  if (state.size() != 4 * ng) throw PreconditionError("symmetry_action expects a 4*n_g state");
  const auto& gl = basis.g_list();
  VectorXc out = VectorXc::Zero(state.size());
  auto at = [ng](int sub, int layer, int g) { return (2 * sub + layer) * ng + g; };
  if (which == Symmetry::Q) {
    // u(-r) relabels G -> -G; conjugation maps it back, so coefficients stay at G.
    for (int sub = 0; sub < 2; ++sub)
      for (int layer = 0; layer < 2; ++layer)
        for (int g = 0; g < ng; ++g) out[at(sub, layer, g)] = std::conj(state[at(1 - sub, layer, g)]);
    return out;
  }
  for (int g = 0; g < ng; ++g) {
    const int mg = basis.find(-gl[g]);
    for (int sub = 0; sub < 2; ++sub) {
      out[at(sub, 0, g)] = state[at(sub, 1, mg)];
      out[at(sub, 1, g)] = -state[at(sub, 0, mg)];
    }
  }
  return out;
}

VectorXc shift_state(const VectorXc& state, ReciprocalIndex G0, const PlaneWaveBasis& basis) {
  const int ng = basis.n_g();
  const int blocks = static_cast<int>(state.size()) / ng;
  const auto& gl = basis.g_list();
  VectorXc out = VectorXc::Zero(state.size());
  for (int g = 0; g < ng; ++g) {
    const int src = basis.find(gl[g] + G0);
    if (src < 0) continue;
    for (int b = 0; b < blocks; ++b) out[b * ng + g] = state[b * ng + src];
  }
  return out;
}

}  // namespace fbi
