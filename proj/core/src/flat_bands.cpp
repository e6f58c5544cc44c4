#include "fbi/flat_bands.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "fbi/errors.hpp"

namespace fbi {

double flatness_residual(const Vec2& k, double alpha, const PlaneWaveBasis& basis) {
  const MatrixXc D = assemble_D(k, alpha, basis).matrix;
  Eigen::BDCSVD<MatrixXc> svd(D);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

std::vector<Vec2> default_magic_sample(const MoireLattice& lattice) {
  return {Vec2::Zero(), 0.3 * lattice.g1 + 0.17 * lattice.g2};
}

MagicAlphaResult find_magic_alpha(const PlaneWaveBasis& basis, double lo, double hi, double tol,
                                  const std::vector<Vec2>& sample) {
  if (!(lo < hi)) throw PreconditionError("magic-alpha interval must satisfy lo < hi");
  MagicAlphaResult out;
  auto f = [&](double alpha) {
    ++out.evaluations;
    double worst = 0.0;
    for (const auto& k : sample) worst = std::max(worst, flatness_residual(k, alpha, basis));
    return worst;
  };
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && (b - a) > 1e-13; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  out.alpha = fc <= fd ? c : d;
  out.residual = std::min(fc, fd);
  if (!(out.residual < tol))
    throw SearchFailure("no flat band below tolerance in the alpha interval", out.residual);
  return out;
}

MagicAlphaResult find_magic_alpha(const PlaneWaveBasis& basis, double lo, double hi, double tol) {
  return find_magic_alpha(basis, lo, hi, tol, default_magic_sample(basis.lattice()));
}

FlatBandState flat_band_states(const Vec2& k, double alpha, const PlaneWaveBasis& basis, double max_residual) {
  const MatrixXc D = assemble_D(k, alpha, basis).matrix;
  Eigen::BDCSVD<MatrixXc> svd(D, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const Eigen::Index last = s.size() - 1;
  FlatBandState st;
  st.k = k;
  st.residual = s(last);
  st.next_singular = s(last - 1);
  if (!(st.residual <= max_residual))
    throw NotFlatError("flatness residual " + std::to_string(st.residual) + " exceeds " + std::to_string(max_residual));
  if (st.next_singular < 1e-4)
    throw DegenerateGaugeError("flat-band kernel of D_k is not one-dimensional");

  VectorXc v = svd.matrixV().col(last);
  const double vmax = v.cwiseAbs().maxCoeff();
  Eigen::Index pivot = 0;
  while (std::abs(v(pivot)) < vmax * (1.0 - 1e-9)) ++pivot;
  v *= std::conj(v(pivot)) / std::abs(v(pivot));
  v *= std::sqrt(basis.lattice().area_omega) / v.norm();

  const Eigen::Index n = v.size();
  st.bands[0] = VectorXc::Zero(2 * n);
  st.bands[0].head(n) = v;
  st.bands[1] = symmetry_action(Symmetry::Q, st.bands[0], basis);
  return st;
}

double BlochBundle::max_residual() const {
  double r = 0.0;
  for (const auto& s : states_) r = std::max(r, s.residual);
  return r;
}

BlochBundle build_bundle(const KGrid& grid, const PlaneWaveBasis& basis, double alpha, double max_residual) {
  std::vector<FlatBandState> states(grid.size());
  const long n = static_cast<long>(grid.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < n; ++k) {
    try {
      states[k] = flat_band_states(grid.point(k), alpha, basis, max_residual);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return BlochBundle(grid, basis, alpha, std::move(states));
}

MatrixXc flat_band_projector(const FlatBandState& state, const PlaneWaveBasis& basis) {
  const double area = basis.lattice().area_omega;
  MatrixXc P = MatrixXc::Zero(state.bands[0].size(), state.bands[0].size());
  for (const auto& b : state.bands) P += b * b.adjoint() / area;
  return P;
}

MatrixXc band_overlap(const std::array<VectorXc, 2>& left, const std::array<VectorXc, 2>& right,
                      ReciprocalIndex G0, const PlaneWaveBasis& basis) {
  MatrixXc O(2, 2);
  for (int n = 0; n < 2; ++n) {
    const VectorXc shifted = shift_state(right[n], G0, basis);
    for (int m = 0; m < 2; ++m) O(m, n) = left[m].dot(shifted) / basis.lattice().area_omega;
  }
  return O;
}

double subspace_distance(const MatrixXc& overlap) {
  Eigen::JacobiSVD<MatrixXc> svd(overlap);
  const double smin = svd.singularValues().minCoeff();
  return std::sqrt(std::max(0.0, 1.0 - std::min(1.0, smin) * std::min(1.0, smin)));
}

double projector_distance(const BlochBundle& bundle, std::size_t k, GridMomentum delta) {
  const KGrid& grid = bundle.grid();
  const Folded f = grid.fold(grid.momentum(k) + delta);
  return subspace_distance(band_overlap(bundle.state(k).bands, bundle.state(f.k).bands, f.G, bundle.basis()));
}

const std::vector<GridMomentum>& neighbor_offsets() {
  static const std::vector<GridMomentum> offs = {{1, 0}, {0, 1}, {1, -1}, {-1, 0}, {0, -1}, {-1, 1}};
  return offs;
}

double ConnectivityReport::max_edge_distance() const {
  double m = 0.0;
  for (const auto& e : probes) m = std::max(m, e.distance);
  return m;
}

std::vector<GridEdge> ConnectivityReport::witness_path(std::size_t from, std::size_t to) const {
  std::vector<std::vector<const GridEdge*>> adj(n_points);
  for (const auto& e : edges) adj[e.from].push_back(&e);
  std::vector<const GridEdge*> via(n_points, nullptr);
  std::vector<bool> seen(n_points, false);
  std::deque<std::size_t> queue{from};
  seen[from] = true;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    if (u == to) break;
    for (const GridEdge* e : adj[u])
      if (!seen[e->to]) {
        seen[e->to] = true;
        via[e->to] = e;
        queue.push_back(e->to);
      }
  }
  if (!seen[to]) throw PreconditionError("no path between the requested momenta");
  std::vector<GridEdge> path;
  for (std::size_t v = to; v != from; v = via[v]->from) path.push_back(*via[v]);
  std::reverse(path.begin(), path.end());
  return path;
}

ConnectivityReport check_grid_assumption(const BlochBundle& bundle) {
  const KGrid& grid = bundle.grid();
  ConnectivityReport rep;
  rep.n_points = grid.size();
  for (std::size_t k = 0; k < grid.size(); ++k)
    for (const auto& d : neighbor_offsets()) {
      const std::size_t to = grid.add(k, d);
      if (to == k) continue;
      GridEdge e{k, to, d, projector_distance(bundle, k, d)};
      rep.probes.push_back(e);
      if (e.distance < 1.0) rep.edges.push_back(e);
    }
  rep.component.assign(grid.size(), -1);
  for (std::size_t s = 0; s < grid.size(); ++s) {
    if (rep.component[s] >= 0) continue;
    const int c = rep.n_components++;
    std::deque<std::size_t> queue{s};
    rep.component[s] = c;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (const auto& e : rep.edges)
        if (e.from == u && rep.component[e.to] < 0) {
          rep.component[e.to] = c;
          queue.push_back(e.to);
        }
    }
  }
  return rep;
}

VectorXc evaluate_state(const VectorXc& coeffs, const PlaneWaveBasis& basis, const Vec2& r) {
  const int ng = basis.n_g();
  const int blocks = static_cast<int>(coeffs.size()) / ng;
  const auto& gl = basis.g_list();
  VectorXc out = VectorXc::Zero(blocks);
  const double norm = 1.0 / std::sqrt(basis.lattice().area_omega);
  for (int b = 0; b < blocks; ++b) {
    const int layer = b % 2;
    cplx acc = 0.0;
    for (int g = 0; g < ng; ++g) {
      const cplx c = coeffs[b * ng + g];
      if (c == cplx(0.0)) continue;
      acc += c * std::polar(1.0, basis.offset(layer, gl[g]).dot(r));
    }
    out[b] = norm * acc;
  }
  return out;
}

std::vector<Vec2> r_sample(const MoireLattice& lattice, int n, bool offset) {
  std::vector<Vec2> rs;
  rs.reserve(static_cast<std::size_t>(n) * n);
  const double o = offset ? 0.5 : 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) rs.push_back(lattice.real_space((i + o) / n, (j + o) / n));
  return rs;
}

}  // namespace fbi
