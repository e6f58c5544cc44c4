#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fbi {

using cplx = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

// Integer coordinates (m, n) of m*g1 + n*g2.
struct ReciprocalIndex {
  int m = 0;
  int n = 0;
  friend bool operator==(const ReciprocalIndex&, const ReciprocalIndex&) = default;
  friend auto operator<=>(const ReciprocalIndex&, const ReciprocalIndex&) = default;
};

inline ReciprocalIndex operator+(ReciprocalIndex a, ReciprocalIndex b) { return {a.m + b.m, a.n + b.n}; }
inline ReciprocalIndex operator-(ReciprocalIndex a, ReciprocalIndex b) { return {a.m - b.m, a.n - b.n}; }
inline ReciprocalIndex operator-(ReciprocalIndex a) { return {-a.m, -a.n}; }

// Flat-band flavor content: 2, 4 or 8 bands per k.
enum class Flavor { spinless, valley, valley_spin };

int flavor_dim(Flavor f);
const char* flavor_name(Flavor f);
Flavor parse_flavor(const std::string& s);

}  // namespace fbi
