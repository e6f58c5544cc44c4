#include "fbi/ferro_propagation.hpp"

#include <cmath>

#include "fbi/errors.hpp"

namespace fbi {

ShiftChoice select_invertible_shift(const FormFactorTable& table, std::size_t k, GridMomentum delta, double threshold) {
  const KGrid& grid = table.grid();
  ShiftChoice best;
  bool found = false;
  for (std::size_t qi = 0; qi < table.nq(); ++qi) {
    const GridMomentum G = table.qprime(qi) - delta;
    if (!grid.is_reciprocal(G)) continue;
    Eigen::JacobiSVD<MatrixXc> svd(table.at(k, qi));
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (!found || smin > best.sigma_min) {
      found = true;
      best.qi = qi;
      best.G = {static_cast<int>(G.a / grid.n_kx()), static_cast<int>(G.b / grid.n_ky())};
      best.sigma_min = smin;
      best.condition = smin > 0.0 ? s(0) / smin : INFINITY;
    }
  }
  if (!found || !(best.sigma_min > threshold))
    throw NoInvertibleShiftError("no reciprocal shift gives an invertible form factor for this step");
  return best;
}

PropagationPath path_from_steps(const FormFactorTable& table, std::size_t start, const std::vector<GridMomentum>& deltas,
                                double threshold) {
  PropagationPath path;
  path.momenta.push_back(start);
  std::size_t k = start;
  for (const auto& d : deltas) {
    PropagationStep step{k, d, select_invertible_shift(table, k, d, threshold)};
    path.condition_bound *= step.shift.condition;
    path.steps.push_back(step);
    k = table.grid().add(k, d);
    path.momenta.push_back(k);
  }
  return path;
}

PropagationPath build_path(const FormFactorTable& table, const ConnectivityReport& graph, std::size_t from,
                           std::size_t to, double threshold) {
  std::vector<GridMomentum> deltas;
  if (from != to)
    for (const auto& e : graph.witness_path(from, to)) deltas.push_back(e.delta);
  return path_from_steps(table, from, deltas, threshold);
}

MatrixXc propagate_block(const FormFactorTable& table, const MatrixXc& block, GridMomentum Delta,
                         const PropagationPath& path) {
  const int d = table.dim();
  MatrixXc left = MatrixXc::Identity(d, d), right = MatrixXc::Identity(d, d);
  for (const auto& step : path.steps) {
    const std::size_t shifted_k = table.grid().add(step.k, Delta);
    left = left * table.at(step.k, step.shift.qi);
    right = right * table.at(shifted_k, step.shift.qi);
  }
  Eigen::PartialPivLU<MatrixXc> lu(left);
  Eigen::JacobiSVD<MatrixXc> svd(left);
  if (svd.singularValues()(d - 1) <= 1e-14 * svd.singularValues()(0))
    throw SingularStepError("propagation product is singular");
  return lu.solve(block * right);
}

double uniform_filling_check(const DensityMatrix& dm) {
  const double t0 = dm.block(0, 0).trace().real();
  double worst = 0.0;
  for (std::size_t k = 1; k < dm.nk; ++k) worst = std::max(worst, std::abs(dm.block(k, k).trace().real() - t0));
  return worst;
}

}  // namespace fbi
