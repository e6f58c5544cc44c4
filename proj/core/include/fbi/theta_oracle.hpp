#pragma once

#include <vector>

#include "fbi/flat_bands.hpp"

namespace fbi {

// Jacobi theta_1(v | tau) by its q-series, truncated once terms drop below 1e-17 of the sum.
cplx jacobi_theta1(cplx v, cplx tau);

// Analytic flat band u_k = F_k u_0 built from the numerical k = 0 state.
class ThetaOracle {
 public:
  ThetaOracle(const PlaneWaveBasis& basis, const VectorXc& u0);

  // Scalar factor F_k(r); F_0 = 1.
  cplx factor(const Vec2& k, const Vec2& r) const;
  // Zero of F_k inside the cell, up to lattice translations.
  Vec2 zero_location(const Vec2& k) const;
  // F_k(r) u_0(r) at each r, normalised to unit mean |u|^2 over the sample.
  std::vector<VectorXc> sample(const Vec2& k, const std::vector<Vec2>& rs) const;

 private:
  PlaneWaveBasis basis_;
  VectorXc u0_;
  cplx w1_, w2_, tau_;
};

// |<a, b>| / (|a| |b|) for two sampled spinor fields.
double sampled_overlap(const std::vector<VectorXc>& a, const std::vector<VectorXc>& b);

std::vector<VectorXc> sample_state(const VectorXc& coeffs, const PlaneWaveBasis& basis, const std::vector<Vec2>& rs);

}  // namespace fbi
