#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "psqe/common.hpp"
#include "psqe/state.hpp"

namespace psqe {

// State family used by the protocol. All constructors build the state by
// gate application (H + CNOT fan-out), so they exercise the simulator; the
// closed-form amplitude expressions live in the tests as independent oracles.

inline int parity(const std::vector<int>& bits) {
  if (bits.empty()) throw std::invalid_argument("parity of empty sequence");
  int p = 0;
  for (int b : bits) p ^= (b & 1);
  return p;
}

inline int popcount_parity(unsigned long long x) {
  int p = 0;
  while (x) {
    p ^= 1;
    x &= x - 1;
  }
  return p;
}

// (|0...0> + |1...1>)/sqrt(2): H on the first qubit, then a CNOT chain.
inline StateVector ghz(int n, GateTally* tally = nullptr) {
  if (n < 2) throw std::invalid_argument("ghz: n must be >= 2");
  StateVector s(n);
  s = apply_gate(s, GateOp::h(0), tally);
  for (int i = 1; i < n; ++i) s = apply_gate(s, GateOp::cnot(i - 1, i), tally);
  return s;
}

// H^(x)n applied to ghz(n); supported on exactly the even-parity basis
// strings with uniform amplitude 2^{-(n-1)/2}.
inline StateVector psi(int n, GateTally* tally = nullptr) {
  StateVector s = ghz(n, tally);
  for (int i = 0; i < n; ++i) s = apply_gate(s, GateOp::h(i), tally);
  return s;
}

// X on the last qubit of psi(n); supported on the odd-parity strings.
inline StateVector psi_tilde(int n, GateTally* tally = nullptr) {
  return apply_gate(psi(n, tally), GateOp::x(n - 1), tally);
}

// Qubit layout of the duplicated state on 2n-1 qubits:
//   [0 .. n-2]      cipher qubits q_1 .. q_{n-1}
//   [n-1 .. 2n-3]   duplicates   q_1D .. q_{(n-1)D}
//   [2n-2]          q_n
inline int duplicate_qubit(int n, int cipher_index) {
  return n - 1 + cipher_index;
}
inline int last_qubit(int n) { return 2 * n - 2; }

inline std::vector<int> cipher_positions(int n) {
  std::vector<int> pos(n - 1);
  for (int i = 0; i < n - 1; ++i) pos[i] = i;
  return pos;
}

// psi(n) with a duplicate CNOT-copied from each cipher qubit. Built in place
// on the full register: GHZ over {cipher qubits, q_n}, H on those n qubits,
// then the duplicate fan-out. Gate counts match the closed-form circuit
// resource formulas.
inline StateVector psi_d(int n, GateTally* tally = nullptr) {
  if (n < 3) throw std::invalid_argument("psi_d: n must be >= 3");
  StateVector s(2 * n - 1);
  s = apply_gate(s, GateOp::h(0), tally);
  for (int i = 1; i < n - 1; ++i)
    s = apply_gate(s, GateOp::cnot(i - 1, i), tally);
  s = apply_gate(s, GateOp::cnot(n - 2, last_qubit(n)), tally);
  for (int i = 0; i < n - 1; ++i) s = apply_gate(s, GateOp::h(i), tally);
  s = apply_gate(s, GateOp::h(last_qubit(n)), tally);
  for (int i = 0; i < n - 1; ++i)
    s = apply_gate(s, GateOp::cnot(i, duplicate_qubit(n, i)), tally);
  return s;
}

struct PropertyCheck {
  bool holds = false;
  double max_deviation = 0.0;
};

inline PropertyCheck compare_states(const StateVector& a, const StateVector& b,
                                    double tolerance = tol::state) {
  const double dev = (a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff();
  return {dev <= tolerance, dev};
}

// Recursion check: psi(n+1) == (psi(n)|0> + psi_tilde(n)|1>)/sqrt(2),
// compared amplitude by amplitude.
inline PropertyCheck check_property1(int n) {
  if (n < 2) throw std::invalid_argument("check_property1: n must be >= 2");
  const StateVector lhs = psi(n + 1);
  const Eigen::VectorXcd base = psi(n).amplitudes();
  const Eigen::VectorXcd flipped = psi_tilde(n).amplitudes();
  Eigen::VectorXcd rhs(lhs.dim());
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index x = 0; x < base.size(); ++x) {
    rhs(2 * x) = base(x) * inv_sqrt2;       // new last qubit = 0
    rhs(2 * x + 1) = flipped(x) * inv_sqrt2; // new last qubit = 1
  }
  return compare_states(lhs,
                        StateVector::from_amplitudes(n + 1, std::move(rhs)));
}

inline bool check_support_partition(const StateVector& a, const StateVector& b,
                                    double tolerance = tol::state) {
  const double expected = std::pow(2.0, -(a.num_qubits() - 1) / 2.0);
  for (Eigen::Index x = 0; x < a.dim(); ++x) {
    const double ma = std::abs(a.amplitude(x));
    const double mb = std::abs(b.amplitude(x));
    const bool in_a = ma > tolerance;
    const bool in_b = mb > tolerance;
    if (in_a == in_b) return false;  // must be in exactly one support
    const double mag = in_a ? ma : mb;
    if (std::abs(mag - expected) > tolerance) return false;
  }
  return true;
}

// Support-partition check: psi(n) and psi_tilde(n) together cover every
// basis string exactly once, all nonzero amplitudes of equal magnitude.
inline bool check_property2(int n, double tolerance = tol::state) {
  if (n < 2) throw std::invalid_argument("check_property2: n must be >= 2");
  return check_support_partition(psi(n), psi_tilde(n), tolerance);
}

}  // namespace psqe
