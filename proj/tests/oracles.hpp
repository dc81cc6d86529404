#pragma once

// Test-only oracles: closed-form amplitude constructions and helper
// generators, kept independent of the gate-application paths they check.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "psqe/common.hpp"
#include "psqe/density.hpp"
#include "psqe/state.hpp"
#include "psqe/states.hpp"

namespace psqe::oracle {

// Uniform superposition of the even-parity n-bit strings, written directly.
inline StateVector closed_form_psi(int n) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(dim);
  const double amp = std::pow(2.0, -(n - 1) / 2.0);
  for (Eigen::Index x = 0; x < dim; ++x)
    if (!popcount_parity(x)) a(x) = amp;
  return StateVector::from_amplitudes(n, std::move(a));
}

// The duplicated state written directly from its support: for each
// even-parity string x1..xn, amplitude 2^{-(n-1)/2} on the basis state
// |x1..x_{n-1}, x1..x_{n-1}, xn> in the library's qubit layout.
inline StateVector closed_form_psi_d(int n) {
  const int nq = 2 * n - 1;
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(Eigen::Index{1} << nq);
  const double amp = std::pow(2.0, -(n - 1) / 2.0);
  for (Eigen::Index x = 0; x < (Eigen::Index{1} << n); ++x) {
    if (popcount_parity(x)) continue;
    Eigen::Index full = 0;
    for (int i = 0; i < n; ++i) {
      const Eigen::Index bit = (x >> (n - 1 - i)) & 1;
      if (i < n - 1) {
        full |= bit << (nq - 1 - i);            // cipher qubit
        full |= bit << (nq - 1 - (n - 1 + i));  // duplicate
      } else {
        full |= bit;  // last qubit is the least significant
      }
    }
    a(full) = amp;
  }
  return StateVector::from_amplitudes(nq, std::move(a));
}

// Full-register operator applying a 2x2 gate to one qubit, built by plain
// Kronecker products (independent of the simulator's strided gate kernel).
inline Eigen::MatrixXcd one_qubit_operator(int nq, int qubit,
                                           const Eigen::Matrix2cd& g) {
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Ones(1, 1);
  for (int i = 0; i < nq; ++i)
    op = kron(op, i == qubit ? Eigen::MatrixXcd(g)
                             : Eigen::MatrixXcd(Eigen::Matrix2cd::Identity()));
  return op;
}

inline Eigen::Matrix2cd hadamard2() {
  Eigen::Matrix2cd h;
  const double s = 1.0 / std::sqrt(2.0);
  h << s, s, s, -s;
  return h;
}

// Worked-example intermediate: the 9-qubit duplicated state for n = 5 with
// Hadamard applied to the second and third cipher qubits (key 0110), built
// entirely through the matrix route.
inline StateVector worked_example_after_step4() {
  const StateVector base = closed_form_psi_d(5);
  Eigen::MatrixXcd op = one_qubit_operator(9, 1, hadamard2()) *
                        one_qubit_operator(9, 2, hadamard2());
  return StateVector::from_amplitudes(9, op * base.amplitudes());
}

inline StateVector random_state(int nq, Rng& rng) {
  Eigen::VectorXcd a(Eigen::Index{1} << nq);
  for (Eigen::Index i = 0; i < a.size(); ++i)
    a(i) = cxd(rng.gaussian(), rng.gaussian());
  a.normalize();
  return StateVector::from_amplitudes(nq, std::move(a));
}

inline Eigen::MatrixXcd random_hermitian(Eigen::Index dim, Rng& rng) {
  Eigen::MatrixXcd g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      g(i, j) = cxd(rng.gaussian(), rng.gaussian());
  return (g + g.adjoint()) / 2.0;
}

inline double binomial_sigma(double p, double samples) {
  return std::sqrt(p * (1.0 - p) / samples);
}

inline double state_distance(const StateVector& a, const StateVector& b) {
  return (a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff();
}

}  // namespace psqe::oracle
