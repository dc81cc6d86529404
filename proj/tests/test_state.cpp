#include <catch2/catch_amalgamated.hpp>

#include <array>

#include "oracles.hpp"
#include "psqe/adversary.hpp"
#include "psqe/density.hpp"
#include "psqe/state.hpp"
#include "psqe/states.hpp"

using namespace psqe;

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

TEST_CASE("Hadamard on |0> gives the uniform superposition") {
  StateVector s(1);
  s = apply_gate(s, GateOp::h(0));
  CHECK(std::abs(s.amplitude(0) - cxd(kInvSqrt2)) < tol::state);
  CHECK(std::abs(s.amplitude(1) - cxd(kInvSqrt2)) < tol::state);
}

TEST_CASE("CNOT builds a Bell pair from (|00>+|10>)/sqrt(2)") {
  StateVector s(2);
  s = apply_gate(s, GateOp::h(0));
  s = apply_gate(s, GateOp::cnot(0, 1));
  CHECK(std::abs(s.amplitude(0b00) - cxd(kInvSqrt2)) < tol::state);
  CHECK(std::abs(s.amplitude(0b11) - cxd(kInvSqrt2)) < tol::state);
  CHECK(std::abs(s.amplitude(0b01)) < tol::state);
  CHECK(std::abs(s.amplitude(0b10)) < tol::state);
}

TEST_CASE("H twice restores psi(3)") {
  const StateVector before = psi(3);
  StateVector after = apply_gate(before, GateOp::h(1));
  after = apply_gate(after, GateOp::h(1));
  CHECK(oracle::state_distance(before, after) < tol::state);
}

TEST_CASE("gate algebra on random states") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const StateVector s = oracle::random_state(4, rng);

    StateVector hh = apply_gate(apply_gate(s, GateOp::h(2)), GateOp::h(2));
    CHECK(oracle::state_distance(s, hh) < tol::state);

    StateVector cc = apply_gate(apply_gate(s, GateOp::cnot(0, 3)),
                                GateOp::cnot(0, 3));
    CHECK(oracle::state_distance(s, cc) < tol::state);

    // H_a H_b CNOT(a->b) H_b H_a == CNOT(b->a)
    StateVector lhs = s;
    lhs = apply_gate(lhs, GateOp::h(1));
    lhs = apply_gate(lhs, GateOp::h(2));
    lhs = apply_gate(lhs, GateOp::cnot(1, 2));
    lhs = apply_gate(lhs, GateOp::h(2));
    lhs = apply_gate(lhs, GateOp::h(1));
    const StateVector rhs = apply_gate(s, GateOp::cnot(2, 1));
    CHECK(oracle::state_distance(lhs, rhs) < tol::state);
  }
}

TEST_CASE("norm preserved through random gate sequences") {
  Rng rng(12);
  StateVector s = oracle::random_state(5, rng);
  for (int step = 0; step < 200; ++step) {
    const int q = static_cast<int>(rng.uniform() * 5);
    if (rng.bit()) {
      s = apply_gate(s, GateOp::h(q));
    } else {
      const int t = (q + 1 + static_cast<int>(rng.uniform() * 4)) % 5;
      s = apply_gate(s, GateOp::cnot(q, t));
    }
  }
  CHECK(s.norm_error() < tol::state);
}

TEST_CASE("gate errors") {
  StateVector s(2);
  CHECK_THROWS_AS(apply_gate(s, GateOp::h(2)), std::out_of_range);
  CHECK_THROWS_AS(apply_gate(s, GateOp::cnot(1, 1)), std::invalid_argument);
}

TEST_CASE("apply_unitary_on_subset") {
  Rng rng(13);
  const StateVector s = oracle::random_state(3, rng);

  SECTION("identity leaves the state unchanged") {
    const auto out =
        apply_unitary_on_subset(s, Eigen::MatrixXcd::Identity(4, 4), {0, 2});
    CHECK(oracle::state_distance(s, out) < tol::state);
  }

  SECTION("H x H on |00> gives |++>") {
    StateVector z(2);
    const Eigen::MatrixXcd hh =
        kron(oracle::hadamard2(), oracle::hadamard2());
    const auto out = apply_unitary_on_subset(z, hh, {0, 1});
    for (int x = 0; x < 4; ++x)
      CHECK(std::abs(out.amplitude(x) - cxd(0.5)) < tol::state);
  }

  SECTION("matches the single-qubit kernel on a subset") {
    const Eigen::MatrixXcd hh =
        kron(oracle::hadamard2(), oracle::hadamard2());
    const auto via_subset = apply_unitary_on_subset(s, hh, {1, 0});
    // targets listed as (1,0): factor order follows the list
    StateVector via_gates = apply_gate(s, GateOp::h(1));
    via_gates = apply_gate(via_gates, GateOp::h(0));
    CHECK(oracle::state_distance(via_subset, via_gates) < tol::state);
  }

  SECTION("rejects bad inputs") {
    CHECK_THROWS_AS(
        apply_unitary_on_subset(s, Eigen::MatrixXcd::Identity(4, 4), {1, 1}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        apply_unitary_on_subset(s, Eigen::MatrixXcd::Identity(2, 2), {0, 1}),
        std::invalid_argument);
  }

  SECTION("norm preserved under a Haar-random unitary") {
    Eigen::MatrixXcd u = haar_random_unitary(8, rng);
    const auto out = apply_unitary_on_subset(s, u, {0, 1, 2});
    CHECK(out.norm_error() < tol::state);
  }
}

TEST_CASE("measurement of an eigenstate is deterministic and repeatable") {
  Rng rng(14);
  StateVector s(1);
  s = apply_gate(s, GateOp::x(0));
  for (int i = 0; i < 5; ++i) {
    auto [bit, next] = measure_qubit(s, 0, rng);
    CHECK(bit == 1);
    s = next;
  }
}

TEST_CASE("Bell measurement fixes the partner qubit") {
  Rng rng(15);
  StateVector bell(2);
  bell = apply_gate(bell, GateOp::h(0));
  bell = apply_gate(bell, GateOp::cnot(0, 1));
  int ones = 0;
  const int trials = 2000;
  for (int i = 0; i < trials; ++i) {
    auto [b0, collapsed] = measure_qubit(bell, 0, rng);
    auto [b1, rest] = measure_qubit(collapsed, 1, rng);
    CHECK(b0 == b1);
    ones += b0;
  }
  const double sigma = oracle::binomial_sigma(0.5, trials);
  CHECK(std::abs(ones / double(trials) - 0.5) < 5 * sigma);
}

TEST_CASE("full measurement of psi(5) always has even parity") {
  Rng rng(16);
  const StateVector base = psi(5);
  for (int i = 0; i < 2000; ++i) {
    auto [bits, rest] = measure_qubits(base, {0, 1, 2, 3, 4}, rng);
    CHECK(parity(bits) == 0);
  }
}

TEST_CASE("measurement statistics match Born probabilities") {
  Rng rng(17);
  const StateVector s = oracle::random_state(2, rng);
  const int samples = 10000;
  std::array<int, 4> counts{};
  for (int i = 0; i < samples; ++i) {
    auto [bits, rest] = measure_qubits(s, {0, 1}, rng);
    ++counts[(bits[0] << 1) | bits[1]];
  }
  for (int x = 0; x < 4; ++x) {
    const double p = std::norm(s.amplitude(x));
    const double sigma = oracle::binomial_sigma(p, samples);
    CHECK(std::abs(counts[x] / double(samples) - p) <= 5 * sigma);
  }
}

TEST_CASE("partial trace basics") {
  Rng rng(18);

  SECTION("Bell pair reduces to I/2") {
    StateVector bell(2);
    bell = apply_gate(bell, GateOp::h(0));
    bell = apply_gate(bell, GateOp::cnot(0, 1));
    const DensityMatrix rho = partial_trace(bell, {0});
    CHECK(max_abs_diff(rho.entries, Eigen::MatrixXcd::Identity(2, 2) / 2.0) <
          tol::state);
  }

  SECTION("product state returns the kept factor") {
    StateVector s(2);
    s = apply_gate(s, GateOp::h(1));  // |0> x |+>
    const DensityMatrix rho = partial_trace(s, {1});
    Eigen::MatrixXcd plus(2, 2);
    plus << 0.5, 0.5, 0.5, 0.5;
    CHECK(max_abs_diff(rho.entries, plus) < tol::state);
  }

  SECTION("cipher qubits of psi_d(3) are maximally mixed") {
    const DensityMatrix rho = partial_trace(psi_d(3), {0, 1});
    CHECK(max_abs_diff(rho.entries, Eigen::MatrixXcd::Identity(4, 4) / 4.0) <
          tol::state);
  }

  SECTION("trace preserved and result valid for a random state") {
    const StateVector s = oracle::random_state(5, rng);
    const DensityMatrix rho = partial_trace(s, {3, 1});
    CHECK(rho.trace_error() < tol::state);
    CHECK(rho.is_valid());
  }

  SECTION("rejects empty or invalid keep sets") {
    const StateVector s = oracle::random_state(3, rng);
    CHECK_THROWS_AS(partial_trace(s, {}), std::invalid_argument);
    CHECK_THROWS_AS(partial_trace(s, {0, 5}), std::out_of_range);
  }
}

TEST_CASE("eigensystem") {
  Rng rng(19);

  SECTION("I/2 has eigenvalues (0.5, 0.5)") {
    const auto es = eigensystem(Eigen::MatrixXcd::Identity(2, 2) / 2.0);
    CHECK(es.eigenvalues(0) == Catch::Approx(0.5));
    CHECK(es.eigenvalues(1) == Catch::Approx(0.5));
  }

  SECTION("rho(0) has eigenvalues (2 -+ sqrt(2))/4") {
    const auto es = eigensystem(Eigen::MatrixXcd(rho_bit(0)));
    const double s2 = std::sqrt(2.0);
    CHECK(std::abs(es.eigenvalues(0) - (2.0 - s2) / 4.0) < tol::eigen);
    CHECK(std::abs(es.eigenvalues(1) - (2.0 + s2) / 4.0) < tol::eigen);
  }

  SECTION("rho_e for two cipher qubits has spectrum {1/8 x2, 3/8 x2}") {
    const auto es = eigensystem(rho_e_explicit(3));
    CHECK(std::abs(es.eigenvalues(0) - 0.125) < tol::eigen);
    CHECK(std::abs(es.eigenvalues(1) - 0.125) < tol::eigen);
    CHECK(std::abs(es.eigenvalues(2) - 0.375) < tol::eigen);
    CHECK(std::abs(es.eigenvalues(3) - 0.375) < tol::eigen);
  }

  SECTION("reconstruction of random Hermitian matrices up to dim 32") {
    for (Eigen::Index dim : {2, 5, 16, 32}) {
      const Eigen::MatrixXcd m = oracle::random_hermitian(dim, rng);
      const auto es = eigensystem(m);
      const Eigen::MatrixXcd rebuilt = es.eigenvectors *
                                       es.eigenvalues.asDiagonal() *
                                       es.eigenvectors.adjoint();
      CHECK(max_abs_diff(rebuilt, m) <= tol::reconstruct);
      Eigen::MatrixXcd gram =
          es.eigenvectors.adjoint() * es.eigenvectors -
          Eigen::MatrixXcd::Identity(dim, dim);
      CHECK(gram.cwiseAbs().maxCoeff() <= tol::unitary);
      for (Eigen::Index i = 1; i < dim; ++i)
        CHECK(es.eigenvalues(i - 1) <= es.eigenvalues(i));
    }
  }

  SECTION("rejects non-Hermitian input") {
    Eigen::MatrixXcd bad(2, 2);
    bad << 0.0, 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(eigensystem(bad), std::invalid_argument);
  }
}

TEST_CASE("haar_random_unitary is unitary") {
  Rng rng(20);
  for (Eigen::Index dim : {2, 4, 16}) {
    CHECK(is_unitary(haar_random_unitary(dim, rng)));
  }
}
