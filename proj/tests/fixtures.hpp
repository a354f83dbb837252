#pragma once

// Systems used across the test suites, plus random generators.

#include <cmath>
#include <random>
#include <vector>

#include "larc/larc.hpp"

namespace larc::testing {

// B1 = Omega_23, B2 = Omega_34 in so(4).
inline Matrix chain_b1() {
  Matrix m = Matrix::Zero(4, 4);
  m(1, 2) = 1;
  m(2, 1) = -1;
  return m;
}

inline Matrix chain_b2() {
  Matrix m = Matrix::Zero(4, 4);
  m(2, 3) = 1;
  m(3, 2) = -1;
  return m;
}

inline GeneratorSet chain_system() {
  return GeneratorSet(GeneratorKind::skew, 4, std::nullopt, {chain_b1(), chain_b2()});
}

inline Matrix omega_x() {
  Matrix m(3, 3);
  m << 0, 0, 0, 0, 0, -1, 0, 1, 0;
  return m;
}
inline Matrix omega_y() {
  Matrix m(3, 3);
  m << 0, 0, 1, 0, 0, 0, -1, 0, 0;
  return m;
}
inline Matrix omega_z() {
  Matrix m(3, 3);
  m << 0, -1, 0, 1, 0, 0, 0, 0, 0;
  return m;
}

// x' = (w0 Omega_z + u Omega_y + v Omega_z) x
inline GeneratorSet bloch_system(double larmor = 1.0) {
  return GeneratorSet(GeneratorKind::skew, 3, Matrix(larmor * omega_z()), {omega_y(), omega_z()});
}

inline GeneratorSet full_so_basis(int n) {
  std::vector<Matrix> gens;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) gens.push_back(omega(n, i, j));
  return GeneratorSet(GeneratorKind::skew, n, std::nullopt, gens);
}

inline Matrix random_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

inline Vector random_vector(int n, std::mt19937_64& rng) { return random_matrix(n, 1, rng).col(0); }

inline Matrix random_skew(int n, std::mt19937_64& rng) {
  Matrix a = random_matrix(n, n, rng);
  return a - a.transpose();
}

// Haar-ish rotation: QR of a Gaussian matrix with the sign fixed to det +1.
inline Matrix random_rotation(int n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(n, n, rng));
  Matrix q = qr.householderQ();
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

inline StatePoint random_sphere_point(int n, std::mt19937_64& rng) {
  return StatePoint::on_sphere(random_vector(n, rng));
}

/**
 * Random skew generator sets with a spread of closure dimensions: generic
 * sets (usually all of so(n)), single generators, and rotated copies of
 * standard-basis subgraphs (block subalgebras with non-trivial orbits).
 */
inline GeneratorSet random_skew_system(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> flavour(0, 2);
  std::vector<Matrix> gens;
  switch (flavour(rng)) {
    case 0: {
      std::uniform_int_distribution<int> m(1, 3);
      const int count = m(rng);
      for (int k = 0; k < count; ++k) gens.push_back(random_skew(n, rng));
      break;
    }
    case 1:
      gens.push_back(random_skew(n, rng));
      break;
    default: {
      const Matrix r = random_rotation(n, rng);
      std::bernoulli_distribution keep(0.4);
      for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j)
          if (keep(rng)) gens.push_back(r * omega(n, i, j) * r.transpose());
      if (gens.empty()) gens.push_back(r * omega(n, 1, 2) * r.transpose());
      break;
    }
  }
  return GeneratorSet(GeneratorKind::skew, n, std::nullopt, gens);
}

inline AffineGenerator random_affine(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> flavour(0, 3);
  switch (flavour(rng)) {
    case 0:
      return AffineGenerator::pure_rotation(random_skew(n, rng));
    case 1:
      return AffineGenerator::pure_translation(random_vector(n, rng));
    case 2: {
      std::uniform_int_distribution<int> idx(1, n);
      int i = idx(rng), j = idx(rng);
      if (n == 1) return AffineGenerator::pure_translation(random_vector(n, rng));
      while (j == i) j = idx(rng);
      return AffineGenerator(omega(n, i, j), Vector::Zero(n));
    }
    default:
      return AffineGenerator(random_skew(n, rng), random_vector(n, rng));
  }
}

inline std::vector<AffineGenerator> random_affine_list(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> m(1, 3);
  std::vector<AffineGenerator> out;
  const int count = m(rng);
  for (int k = 0; k < count; ++k) out.push_back(random_affine(n, rng));
  return out;
}

}  // namespace larc::testing
