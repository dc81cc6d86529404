#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "psqe/common.hpp"

namespace psqe {

// Dense state vector over num_qubits qubits.
//
// Qubit ordering convention: qubit 0 is the leftmost label in ket notation,
// so for a basis-state integer x, qubit i holds bit (num_qubits - 1 - i)
// of x. |q0 q1 q2> = |011> is amplitude index 0b011 = 3.
class StateVector {
 public:
  // |00...0>
  explicit StateVector(int num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits < 1 || num_qubits > 25)
      throw std::invalid_argument("StateVector: qubit count out of range");
    amps_ = Eigen::VectorXcd::Zero(dim());
    amps_(0) = 1.0;
  }

  static StateVector from_amplitudes(int num_qubits, Eigen::VectorXcd amps) {
    StateVector s(num_qubits);
    if (amps.size() != s.dim())
      throw std::invalid_argument("StateVector: amplitude length mismatch");
    s.amps_ = std::move(amps);
    return s;
  }

  int num_qubits() const { return num_qubits_; }
  Eigen::Index dim() const { return Eigen::Index{1} << num_qubits_; }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  cxd amplitude(Eigen::Index basis_index) const { return amps_(basis_index); }

  double norm_error() const { return std::abs(amps_.squaredNorm() - 1.0); }

  // Bit position of qubit q inside a basis-state integer.
  int bit_shift(int q) const { return num_qubits_ - 1 - q; }

  void check_qubit(int q) const {
    if (q < 0 || q >= num_qubits_)
      throw std::out_of_range("qubit index out of range");
  }

 private:
  int num_qubits_;
  Eigen::VectorXcd amps_;

  friend StateVector apply_unitary_on_subset(const StateVector&,
                                             const Eigen::MatrixXcd&,
                                             const std::vector<int>&);
  friend class GateApplier;
};

struct GateOp {
  enum class Kind { Hadamard, PauliX, Cnot };
  Kind kind;
  int target;
  int control = -1;  // Cnot only

  static GateOp h(int target) { return {Kind::Hadamard, target}; }
  static GateOp x(int target) { return {Kind::PauliX, target}; }
  static GateOp cnot(int control, int target) {
    return {Kind::Cnot, target, control};
  }
};

// Running count of gates applied through an instrumented path.
struct GateTally {
  long hadamards = 0;
  long pauli_xs = 0;
  long cnots = 0;
};

namespace detail {

inline void apply_hadamard_inplace(Eigen::VectorXcd& a, int shift) {
  const Eigen::Index stride = Eigen::Index{1} << shift;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index base = 0; base < a.size(); base += 2 * stride) {
    for (Eigen::Index i = base; i < base + stride; ++i) {
      const cxd lo = a(i);
      const cxd hi = a(i + stride);
      a(i) = (lo + hi) * inv_sqrt2;
      a(i + stride) = (lo - hi) * inv_sqrt2;
    }
  }
}

inline void apply_pauli_x_inplace(Eigen::VectorXcd& a, int shift) {
  const Eigen::Index stride = Eigen::Index{1} << shift;
  for (Eigen::Index base = 0; base < a.size(); base += 2 * stride)
    for (Eigen::Index i = base; i < base + stride; ++i)
      std::swap(a(i), a(i + stride));
}

inline void apply_cnot_inplace(Eigen::VectorXcd& a, int ctrl_shift,
                               int tgt_shift) {
  const Eigen::Index cbit = Eigen::Index{1} << ctrl_shift;
  const Eigen::Index tbit = Eigen::Index{1} << tgt_shift;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if ((i & cbit) && !(i & tbit)) std::swap(a(i), a(i | tbit));
}

}  // namespace detail

inline StateVector apply_gate(const StateVector& state, const GateOp& gate,
                              GateTally* tally = nullptr) {
  state.check_qubit(gate.target);
  Eigen::VectorXcd a = state.amplitudes();
  switch (gate.kind) {
    case GateOp::Kind::Hadamard:
      detail::apply_hadamard_inplace(a, state.bit_shift(gate.target));
      if (tally) ++tally->hadamards;
      break;
    case GateOp::Kind::PauliX:
      detail::apply_pauli_x_inplace(a, state.bit_shift(gate.target));
      if (tally) ++tally->pauli_xs;
      break;
    case GateOp::Kind::Cnot:
      state.check_qubit(gate.control);
      if (gate.control == gate.target)
        throw std::invalid_argument("CNOT control equals target");
      detail::apply_cnot_inplace(a, state.bit_shift(gate.control),
                                 state.bit_shift(gate.target));
      if (tally) ++tally->cnots;
      break;
  }
  return StateVector::from_amplitudes(state.num_qubits(), std::move(a));
}

// Applies a 2^m x 2^m unitary to the listed qubits (identity elsewhere).
// u's row/column index reads the targets in order, targets[0] most
// significant, matching the global ket convention.
inline StateVector apply_unitary_on_subset(const StateVector& state,
                                           const Eigen::MatrixXcd& u,
                                           const std::vector<int>& targets) {
  const int m = static_cast<int>(targets.size());
  if (m == 0) throw std::invalid_argument("empty target list");
  if (u.rows() != u.cols() || u.rows() != (Eigen::Index{1} << m))
    throw std::invalid_argument("unitary dimension mismatch");
  std::vector<int> sorted = targets;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("duplicate target qubits");
  for (int q : targets) state.check_qubit(q);

  const Eigen::Index sub_dim = Eigen::Index{1} << m;
  std::vector<Eigen::Index> scatter(sub_dim, 0);
  Eigen::Index target_mask = 0;
  for (int j = 0; j < m; ++j)
    target_mask |= Eigen::Index{1} << state.bit_shift(targets[j]);
  for (Eigen::Index s = 0; s < sub_dim; ++s)
    for (int j = 0; j < m; ++j)
      if ((s >> (m - 1 - j)) & 1)
        scatter[s] |= Eigen::Index{1} << state.bit_shift(targets[j]);

  Eigen::VectorXcd a = state.amplitudes();
  Eigen::VectorXcd in(sub_dim), out(sub_dim);
  for (Eigen::Index base = 0; base < a.size(); ++base) {
    if (base & target_mask) continue;
    for (Eigen::Index s = 0; s < sub_dim; ++s) in(s) = a(base | scatter[s]);
    out.noalias() = u * in;
    for (Eigen::Index s = 0; s < sub_dim; ++s) a(base | scatter[s]) = out(s);
  }
  return StateVector::from_amplitudes(state.num_qubits(), std::move(a));
}

namespace detail {

inline StateVector collapse(const StateVector& state, int index, int bit,
                            double branch_prob) {
  if (branch_prob < 1e-15)
    throw std::runtime_error("collapse onto a zero-probability branch");
  const Eigen::Index qbit = Eigen::Index{1} << state.bit_shift(index);
  Eigen::VectorXcd a = state.amplitudes();
  const double scale = 1.0 / std::sqrt(branch_prob);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (((i & qbit) != 0) == (bit != 0))
      a(i) *= scale;
    else
      a(i) = 0.0;
  }
  return StateVector::from_amplitudes(state.num_qubits(), std::move(a));
}

inline double prob_of_one(const StateVector& state, int index) {
  const Eigen::Index qbit = Eigen::Index{1} << state.bit_shift(index);
  double p1 = 0.0;
  const auto& a = state.amplitudes();
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (i & qbit) p1 += std::norm(a(i));
  return p1;
}

}  // namespace detail

// Computational-basis measurement with eager collapse. The returned state is
// the renormalized projection, so re-measuring the same qubit repeats the bit.
inline std::pair<int, StateVector> measure_qubit(const StateVector& state,
                                                 int index, Rng& rng) {
  state.check_qubit(index);
  const double p1 = detail::prob_of_one(state, index);
  const int bit = rng.uniform() < p1 ? 1 : 0;
  return {bit, detail::collapse(state, index, bit, bit ? p1 : 1.0 - p1)};
}

// Deterministic projection onto a chosen outcome. Used for worked-example
// reproduction where the pad sequence is injected; throws if the requested
// branch has (near-)zero probability.
inline std::pair<int, StateVector> project_qubit(const StateVector& state,
                                                 int index, int bit) {
  state.check_qubit(index);
  const double p1 = detail::prob_of_one(state, index);
  return {bit, detail::collapse(state, index, bit, bit ? p1 : 1.0 - p1)};
}

inline std::pair<std::vector<int>, StateVector> measure_qubits(
    const StateVector& state, const std::vector<int>& indices, Rng& rng) {
  std::vector<int> bits;
  bits.reserve(indices.size());
  StateVector cur = state;
  for (int q : indices) {
    auto [b, next] = measure_qubit(cur, q, rng);
    bits.push_back(b);
    cur = std::move(next);
  }
  return {std::move(bits), std::move(cur)};
}

}  // namespace psqe
