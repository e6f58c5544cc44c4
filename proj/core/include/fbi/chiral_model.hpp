#pragma once

#include <vector>

#include "fbi/moire_geometry.hpp"

namespace fbi {

// Truncated plane-wave basis. A D-spinor has 2*n_g entries ordered (layer, G);
// a full H-spinor has 4*n_g entries ordered (sublattice, layer, G).
class PlaneWaveBasis {
 public:
  PlaneWaveBasis() = default;
  PlaneWaveBasis(const MoireLattice& lattice, double radius);

  const MoireLattice& lattice() const { return lattice_; }
  double radius() const { return radius_; }
  const std::vector<ReciprocalIndex>& g_list() const { return g_list_; }
  int n_g() const { return static_cast<int>(g_list_.size()); }
  int spinor_dim() const { return 2 * n_g(); }
  int state_dim() const { return 4 * n_g(); }

  // Position of G in g_list, or -1 when G lies outside the cutoff.
  int find(ReciprocalIndex G) const;

  // Plane-wave momentum carried by (layer, G) relative to Bloch momentum k.
  Vec2 offset(int layer, ReciprocalIndex G) const;

  // Number of interlayer couplings dropped because their target G is outside the cutoff.
  int truncated_couplings() const { return truncated_; }

 private:
  MoireLattice lattice_;
  double radius_ = 0.0;
  std::vector<ReciprocalIndex> g_list_;
  int box_ = 0;
  std::vector<int> lookup_;
  int truncated_ = 0;
};

PlaneWaveBasis make_basis(const MoireLattice& lattice, double radius);
double shells_to_radius(const MoireLattice& lattice, double shells);

// Integer shift s_n with layer-2 G' = G + s_n coupled to layer-1 G through q_n.
ReciprocalIndex interlayer_shift(const MoireLattice& lattice, int n);

struct ChiralOperator {
  MatrixXc matrix;
  Vec2 k;
  double alpha = 0.0;
};

ChiralOperator assemble_D(const Vec2& k, double alpha, const PlaneWaveBasis& basis);
MatrixXc assemble_H(const Vec2& k, double alpha, const PlaneWaveBasis& basis);

enum class Symmetry { Q, L };

// Q: swap sublattices, conjugate, r -> -r. Keeps the fiber k.
// L: diag(J, J) with J = [[0,1],[-1,0]] and r -> -r. Sends fiber k to -k.
VectorXc symmetry_action(Symmetry which, const VectorXc& state, const PlaneWaveBasis& basis);

// Coefficients of e^{-i G0.r} u, i.e. the same Bloch function relabelled from k to k + G0.
VectorXc shift_state(const VectorXc& state, ReciprocalIndex G0, const PlaneWaveBasis& basis);

}  // namespace fbi
