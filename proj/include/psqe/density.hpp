#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <stdexcept>
#include <utility>
#include <vector>

#include "psqe/common.hpp"
#include "psqe/state.hpp"

namespace psqe {

// Hermitian, PSD, trace-1 matrix over num_qubits qubits.
struct DensityMatrix {
  int num_qubits = 0;
  Eigen::MatrixXcd entries;

  Eigen::Index dim() const { return Eigen::Index{1} << num_qubits; }

  double hermiticity_error() const {
    return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  }
  double trace_error() const { return std::abs(entries.trace() - cxd(1.0)); }

  bool is_valid(double tolerance = tol::state) const {
    if (entries.rows() != dim() || entries.cols() != dim()) return false;
    if (hermiticity_error() > tolerance) return false;
    if (trace_error() > tolerance) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(entries,
                                                       Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tolerance;
  }
};

inline double max_abs_diff(const Eigen::MatrixXcd& a,
                           const Eigen::MatrixXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const Eigen::MatrixXcd& m,
                         double tolerance = tol::unitary) {
  return m.rows() == m.cols() &&
         (m - m.adjoint()).cwiseAbs().maxCoeff() <= tolerance;
}

inline bool is_unitary(const Eigen::MatrixXcd& u,
                       double tolerance = tol::unitary) {
  if (u.rows() != u.cols()) return false;
  Eigen::MatrixXcd prod = u * u.adjoint();
  prod -= Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  return prod.cwiseAbs().maxCoeff() <= tolerance;
}

// Reduced density matrix of the kept qubits, in the given order (keep[0]
// becomes the most significant index bit of the result).
inline DensityMatrix partial_trace(const StateVector& state,
                                   const std::vector<int>& keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");
  for (int q : keep) state.check_qubit(q);
  {
    std::vector<int> sorted = keep;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("partial_trace: duplicate keep indices");
  }

  const int nq = state.num_qubits();
  const int nk = static_cast<int>(keep.size());
  std::vector<bool> kept(nq, false);
  for (int q : keep) kept[q] = true;
  std::vector<int> traced;
  for (int q = 0; q < nq; ++q)
    if (!kept[q]) traced.push_back(q);

  const Eigen::Index dim_k = Eigen::Index{1} << nk;
  const Eigen::Index dim_t = Eigen::Index{1} << traced.size();

  // full_index(a, t) = kept-scatter(a) | traced-scatter(t)
  std::vector<Eigen::Index> keep_scatter(dim_k, 0), trace_scatter(dim_t, 0);
  for (Eigen::Index a = 0; a < dim_k; ++a)
    for (int j = 0; j < nk; ++j)
      if ((a >> (nk - 1 - j)) & 1)
        keep_scatter[a] |= Eigen::Index{1} << state.bit_shift(keep[j]);
  for (Eigen::Index t = 0; t < dim_t; ++t)
    for (std::size_t j = 0; j < traced.size(); ++j)
      if ((t >> (traced.size() - 1 - j)) & 1)
        trace_scatter[t] |= Eigen::Index{1} << state.bit_shift(traced[j]);

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim_k, dim_k);
  Eigen::VectorXcd col(dim_k);
  const auto& amps = state.amplitudes();
  for (Eigen::Index t = 0; t < dim_t; ++t) {
    for (Eigen::Index a = 0; a < dim_k; ++a)
      col(a) = amps(keep_scatter[a] | trace_scatter[t]);
    rho.noalias() += col * col.adjoint();
  }
  return DensityMatrix{nk, std::move(rho)};
}

struct Eigensystem {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXcd eigenvectors; // orthonormal columns, same order
};

inline Eigensystem eigensystem(const Eigen::MatrixXcd& m,
                               double tolerance = tol::unitary) {
  if (!is_hermitian(m, tolerance))
    throw std::invalid_argument("eigensystem: input not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigensystem: solver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

inline Eigensystem eigensystem(const DensityMatrix& rho) {
  return eigensystem(rho.entries);
}

// Haar-distributed random unitary: QR of a complex Ginibre matrix with the
// R-diagonal phase correction.
inline Eigen::MatrixXcd haar_random_unitary(Eigen::Index dim, Rng& rng) {
  Eigen::MatrixXcd g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      g(i, j) = cxd(rng.gaussian(), rng.gaussian());
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j) {
    cxd d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  return q;
}

// Kronecker product, used for building small operators and oracle states.
inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a,
                             const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace psqe
