#pragma once

#include <optional>
#include <vector>

#include "fbi/flat_bands.hpp"

namespace fbi {

// All grid momenta p in K + Gamma* with |p| <= radius, sorted by |p| then (a, b).
std::vector<GridMomentum> qprime_disc(const KGrid& grid, double radius);

class FormFactorTable {
 public:
  FormFactorTable() = default;
  // entries are stored k-major: entries[k * qprimes.size() + qi].
  FormFactorTable(KGrid grid, Flavor flavor, double cutoff, std::vector<GridMomentum> qprimes,
                  std::vector<MatrixXc> entries);

  const KGrid& grid() const { return grid_; }
  Flavor flavor() const { return flavor_; }
  int dim() const { return flavor_dim(flavor_); }
  double cutoff() const { return cutoff_; }
  std::size_t nk() const { return grid_.size(); }
  std::size_t nq() const { return qprimes_.size(); }
  const std::vector<GridMomentum>& qprimes() const { return qprimes_; }
  const GridMomentum& qprime(std::size_t qi) const { return qprimes_[qi]; }
  Vec2 qvec(std::size_t qi) const { return grid_.vec(qprimes_[qi]); }
  bool is_reciprocal(std::size_t qi) const { return grid_.is_reciprocal(qprimes_[qi]); }

  const MatrixXc& at(std::size_t k, std::size_t qi) const { return entries_[k * nq() + qi]; }
  MatrixXc& at(std::size_t k, std::size_t qi) { return entries_[k * nq() + qi]; }
  std::optional<std::size_t> find(GridMomentum p) const;
  std::size_t index_of(GridMomentum p) const;
  std::size_t negate(std::size_t qi) const { return negation_[qi]; }
  // Grid point reached from k by q', i.e. the representative of k + q'.
  std::size_t target(std::size_t k, std::size_t qi) const { return grid_.add(k, qprimes_[qi]); }

  // Tail estimate: max_k sum of |Lambda_k(p)|_F^2 over the outermost shell of the table.
  double tail_norm = 0.0;
  bool cutoff_warning = false;
  double plane_wave_cutoff = 0.0;
  std::uint64_t grid_hash() const { return grid_.hash(); }

 private:
  KGrid grid_;
  Flavor flavor_ = Flavor::spinless;
  double cutoff_ = 0.0;
  std::vector<GridMomentum> qprimes_;
  std::vector<MatrixXc> entries_;
  std::vector<std::size_t> negation_;
  std::int64_t box_a_ = 0, box_b_ = 0;
  std::vector<std::int64_t> lookup_;
};

struct TableOptions {
  double tail_threshold = 1e-6;
};

// Lambda_k(p)_{mn} = (1/|Omega|) sum_G <u_mk(G), u_n,k+p(G)>.
FormFactorTable compute_table(const BlochBundle& bundle, double cutoff, const TableOptions& opt = {});

// Form factor between unfolded momenta k and k + p, evaluated from the bundle directly.
MatrixXc form_factor_unfolded(const BlochBundle& bundle, GridMomentum k, GridMomentum p);

// sum_G e^{iG.r} Lambda_k((k' - k) + G) over table entries.
MatrixXc pair_product(const FormFactorTable& table, std::size_t k, std::size_t kp, const Vec2& r);
// <u_mk(r), u_nk'(r)> from real-space samples of the bundle.
MatrixXc pair_product_direct(const BlochBundle& bundle, std::size_t k, std::size_t kp, const Vec2& r);

// max_G |sum_k Tr(Lambda_k(G) diag(1,-1))| over reciprocal entries of a spinless table.
double sum_rule_check(const FormFactorTable& table);

struct IdentityResiduals {
  double normalization = 0.0;  // max_k |Lambda_k(0) - I|_F
  double adjoint = 0.0;        // max |Lambda_k(p)^dagger - Lambda_{k+p}(-p)|_F
};
IdentityResiduals identity_residuals(const FormFactorTable& table);

// Largest |Lambda_k(p)_{12}|, |Lambda_k(p)_{21}| of a spinless table.
double off_diagonal_norm(const FormFactorTable& table);

// Elementwise magnitude mismatch between Lambda_k(p) and conj(Lambda_{-k}(-p)).
double time_reversal_magnitude_residual(const FormFactorTable& table);

// Valley doubling by the time-reversal partner in chiral gauge; spin as a tensor factor I_2.
// Throws ConventionError when the resulting structure fails validation.
FormFactorTable extend_flavor(const FormFactorTable& spinless, Flavor target);

// The 4x4 swap of bands 2 and 4 (tensored with I_2 for spin); identity for spinless.
MatrixXc flavor_permutation(Flavor flavor);

// Largest deviation of Pi Lambda Pi from the block-scalar form over the table.
double block_scalar_residual(const FormFactorTable& table);

struct TailShell {
  double radius = 0.0;
  double tail = 0.0;  // sum over reciprocal G with |G| > radius
};
std::vector<TailShell> tail_profile(const FormFactorTable& table, std::size_t k);

}  // namespace fbi
