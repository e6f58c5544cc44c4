#pragma once

#include <array>
#include <string>
#include <vector>

#include "fbi/chiral_model.hpp"
#include "fbi/moire_geometry.hpp"

namespace fbi {

struct MagicAlphaResult {
  double alpha = 0.0;
  double residual = 0.0;
  int evaluations = 0;
};

// Smallest singular value of D_k(alpha).
double flatness_residual(const Vec2& k, double alpha, const PlaneWaveBasis& basis);

// Gamma and one generic momentum; the K points of this convention are zero modes at every alpha.
std::vector<Vec2> default_magic_sample(const MoireLattice& lattice);

// Golden-section minimisation of max_k sigma_min(D_k) over [lo, hi].
MagicAlphaResult find_magic_alpha(const PlaneWaveBasis& basis, double lo, double hi, double tol,
                                  const std::vector<Vec2>& sample);
MagicAlphaResult find_magic_alpha(const PlaneWaveBasis& basis, double lo, double hi, double tol);

struct FlatBandState {
  Vec2 k;
  // band 0 = [u; 0] on sublattice A, band 1 = Q band 0 = [0; conj u(-r)].
  // Normalised so that sum_G |c|^2 = |Omega|.
  std::array<VectorXc, 2> bands;
  double residual = 0.0;
  double next_singular = 0.0;
};

FlatBandState flat_band_states(const Vec2& k, double alpha, const PlaneWaveBasis& basis,
                               double max_residual = 1e-6);

class BlochBundle {
 public:
  BlochBundle() = default;
  BlochBundle(KGrid grid, PlaneWaveBasis basis, double alpha, std::vector<FlatBandState> states)
      : grid_(std::move(grid)), basis_(std::move(basis)), alpha_(alpha), states_(std::move(states)) {}

  const KGrid& grid() const { return grid_; }
  const PlaneWaveBasis& basis() const { return basis_; }
  const MoireLattice& lattice() const { return basis_.lattice(); }
  double alpha_star() const { return alpha_; }
  const std::vector<FlatBandState>& states() const { return states_; }
  const FlatBandState& state(std::size_t k) const { return states_[k]; }
  const VectorXc& band(std::size_t k, int n) const { return states_[k].bands[n]; }
  static constexpr const char* gauge_tag = "chiral-sublattice";
  double max_residual() const;

 private:
  KGrid grid_;
  PlaneWaveBasis basis_;
  double alpha_ = 0.0;
  std::vector<FlatBandState> states_;
};

BlochBundle build_bundle(const KGrid& grid, const PlaneWaveBasis& basis, double alpha,
                         double max_residual = 1e-6);

// Orthogonal projector onto the flat-band space at one k, in the plane-wave basis.
MatrixXc flat_band_projector(const FlatBandState& state, const PlaneWaveBasis& basis);

// (1/|Omega|) <b_m(k) | e^{-i G0.r} b_n(k')>, the overlap of two band sets.
MatrixXc band_overlap(const std::array<VectorXc, 2>& left, const std::array<VectorXc, 2>& right,
                      ReciprocalIndex G0, const PlaneWaveBasis& basis);

// Operator-norm distance between equal-rank projectors, from the overlap matrix.
double subspace_distance(const MatrixXc& overlap);

// ||Pi(k) - Pi(k + delta)|| with k + delta unfolded.
double projector_distance(const BlochBundle& bundle, std::size_t k, GridMomentum delta);

struct GridEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  GridMomentum delta;
  double distance = 0.0;
};

struct ConnectivityReport {
  std::size_t n_points = 0;
  std::vector<GridEdge> probes;
  std::vector<GridEdge> edges;
  std::vector<int> component;
  int n_components = 0;
  bool connected() const { return n_components == 1; }
  double max_edge_distance() const;
  // Shortest edge path from -> to, neighbors visited in fixed offset order.
  std::vector<GridEdge> witness_path(std::size_t from, std::size_t to) const;
};

// Nearest-neighbor grid steps in (a, b) units.
const std::vector<GridMomentum>& neighbor_offsets();

ConnectivityReport check_grid_assumption(const BlochBundle& bundle);

// Real-space evaluation of the periodic part, normalised to unit cell average of |u|^2.
VectorXc evaluate_state(const VectorXc& coeffs, const PlaneWaveBasis& basis, const Vec2& r);

// n x n uniform samples s1 a1 + s2 a2; offset shifts the grid by half a step.
std::vector<Vec2> r_sample(const MoireLattice& lattice, int n, bool offset = false);

}  // namespace fbi
