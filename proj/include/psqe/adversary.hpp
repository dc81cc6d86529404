#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "psqe/common.hpp"
#include "psqe/density.hpp"
#include "psqe/protocol.hpp"
#include "psqe/state.hpp"
#include "psqe/states.hpp"

namespace psqe {

// ---------------------------------------------------------------------------
// Reduced states

// Cipher-qubit reduced state of the duplicated protocol state after the key
// rotation. Identical to I/2^{n-1} for every key.
inline DensityMatrix reduced_cipher_state(int n, const KeyBits& key) {
  StateVector st = psi_d(n);
  st = apply_key_rotation(st, key, cipher_positions(n));
  return partial_trace(st, cipher_positions(n));
}

// Same trace taken on the state family without duplicate qubits; not
// proportional to identity, which is what makes the duplicates necessary.
inline DensityMatrix reduced_cipher_state_without_duplicates(
    int n, const KeyBits& key) {
  StateVector st = psi(n);
  st = apply_key_rotation(st, key, cipher_positions(n));
  return partial_trace(st, cipher_positions(n));
}

// ---------------------------------------------------------------------------
// Eve's effective state and its spectrum

// Equal mixture over every even-parity (n-1)-bit basis string and all
// 2^{n-1} Hadamard key-variants of each, built projector by projector.
inline DensityMatrix rho_e_explicit(int n) {
  if (n < 3 || n > 8)
    throw std::invalid_argument("rho_e_explicit: supported for 3 <= n <= 8");
  const int m = n - 1;
  const Eigen::Index dim = Eigen::Index{1} << m;

  Eigen::Vector2cd zero{1.0, 0.0}, one{0.0, 1.0};
  Eigen::Vector2cd plus{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  Eigen::Vector2cd minus{1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)};

  const double weight = 1.0 / (std::pow(2.0, m - 1) * std::pow(2.0, m));
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index q = 0; q < dim; ++q) {
    if (popcount_parity(q)) continue;  // even-parity strings only
    for (Eigen::Index mask = 0; mask < dim; ++mask) {
      Eigen::MatrixXcd v = Eigen::MatrixXcd::Ones(1, 1);
      for (int i = 0; i < m; ++i) {
        const int bit = (q >> (m - 1 - i)) & 1;
        const bool rotated = (mask >> (m - 1 - i)) & 1;
        const Eigen::Vector2cd f =
            bit ? (rotated ? minus : one) : (rotated ? plus : zero);
        v = kron(v, f);
      }
      rho.noalias() += weight * (v * v.adjoint());
    }
  }
  return DensityMatrix{m, std::move(rho)};
}

// Single-qubit building blocks rho(0) = (|0><0| + |+><+|)/2 and
// rho(1) = (|1><1| + |-><-|)/2.
inline Eigen::Matrix2cd rho_bit(int bit) {
  Eigen::Matrix2cd r;
  if (bit == 0)
    r << 0.75, 0.25, 0.25, 0.25;
  else
    r << 0.25, -0.25, -0.25, 0.75;
  return r;
}

// Closed-form spectrum of rho_e: two eigenvalues, each with multiplicity
// 2^{n-2}, eigenvectors given by tensor products of phi1/phi2. The shared
// prefactor is fixed by trace normalization to 1/2^{n-1}.
struct ClosedFormEigensystem {
  int n = 0;
  double lambda_low = 0.0;   // odd number of phi2 factors
  double lambda_high = 0.0;  // even number of phi2 factors
  long multiplicity = 0;
  Eigen::Vector2d phi1;
  Eigen::Vector2d phi2;

  // Eigenvector for a factor mask: bit (n-2-i) of mask selects phi2 for
  // factor i. Eigenvalue is lambda_high when the mask has even popcount.
  Eigen::VectorXcd eigenvector(Eigen::Index mask) const {
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Ones(1, 1);
    for (int i = 0; i < n - 1; ++i) {
      const bool second = (mask >> (n - 2 - i)) & 1;
      const Eigen::Vector2d& f = second ? phi2 : phi1;
      v = kron(v, f.cast<cxd>());
    }
    return v.col(0);
  }
};

inline ClosedFormEigensystem rho_e_eigensystem_closed(int n) {
  if (n < 3)
    throw std::invalid_argument("rho_e_eigensystem_closed: n must be >= 3");
  ClosedFormEigensystem c;
  c.n = n;
  const double ratio = std::pow(std::sqrt(2.0) / 2.0, n - 1);
  const double prefactor = std::pow(2.0, -(n - 1));
  c.lambda_high = prefactor * (1.0 + ratio);
  c.lambda_low = prefactor * (1.0 - ratio);
  c.multiplicity = 1L << (n - 2);
  const double s2 = std::sqrt(2.0);
  c.phi1 << std::sqrt(2.0 + s2) / 2.0, std::sqrt(2.0 - s2) / 2.0;
  c.phi2 << std::sqrt(2.0 - s2) / 2.0, -std::sqrt(2.0 + s2) / 2.0;
  return c;
}

struct PsBounds {
  double p_min = 0.0;
  double p_max = 1.0;
  int n = 0;
};

// Two-sided closed-form bound on Eve's key-averaged success probability:
// 1/2 -+ (sqrt(2)/2)^{n+1}.
inline PsBounds ps_bounds(int n) {
  if (n < 3) throw std::invalid_argument("ps_bounds: n must be >= 3");
  const double gap = std::pow(std::sqrt(2.0) / 2.0, n + 1);
  return {0.5 - gap, 0.5 + gap, n};
}

// ---------------------------------------------------------------------------
// Lemma: two-sided trace bound for any orthonormal subset

// Checks sum_low-k(lambda) <= sum_i <phi_i|H|phi_i> <= sum_top-k(lambda)
// for the given orthonormal columns.
inline bool lemma1_check(const Eigen::MatrixXcd& h,
                         const Eigen::MatrixXcd& subset,
                         double tolerance = tol::eigen) {
  if (!is_hermitian(h, tolerance))
    throw std::invalid_argument("lemma1_check: matrix not Hermitian");
  Eigen::MatrixXcd gram = subset.adjoint() * subset;
  gram -= Eigen::MatrixXcd::Identity(subset.cols(), subset.cols());
  if (gram.cwiseAbs().maxCoeff() > tolerance)
    throw std::invalid_argument("lemma1_check: subset not orthonormal");

  const Eigen::VectorXd lambda = eigensystem(h).eigenvalues;
  const Eigen::Index nn = h.rows();
  const Eigen::Index k = subset.cols();
  double mid = 0.0;
  for (Eigen::Index i = 0; i < k; ++i)
    mid += (subset.col(i).adjoint() * h * subset.col(i))(0).real();
  const double lower = lambda.head(k).sum();
  const double upper = lambda.tail(k).sum();
  (void)nn;
  return lower - tolerance <= mid && mid <= upper + tolerance;
}

// ---------------------------------------------------------------------------
// Attacks

// Unitary that maps the 2^{n-2} top eigenvectors of rho_e onto the
// even-parity computational strings (and the bottom ones onto odd parity),
// so a computational parity measurement after applying it saturates the
// upper bound. Applied directly (not adjointed) to the in-transit qubits.
inline Eigen::MatrixXcd optimal_attack_unitary(int n) {
  const ClosedFormEigensystem c = rho_e_eigensystem_closed(n);
  const Eigen::Index dim = Eigen::Index{1} << (n - 1);

  std::vector<Eigen::Index> evens, odds;
  for (Eigen::Index x = 0; x < dim; ++x)
    (popcount_parity(x) ? odds : evens).push_back(x);

  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, dim);
  std::size_t ei = 0, oi = 0;
  for (Eigen::Index mask = 0; mask < dim; ++mask) {
    const Eigen::VectorXcd v = c.eigenvector(mask);
    const Eigen::Index target =
        popcount_parity(mask) ? odds[oi++] : evens[ei++];
    u.row(target) += v.adjoint();  // |target><v|
  }
  return u;
}

// Success probability of a parity-rule measurement after rotating rho by u,
// straight from the analysis expression.
inline double predicted_ps(const Eigen::MatrixXcd& rho,
                           const Eigen::MatrixXcd& u) {
  const Eigen::MatrixXcd rotated = u * rho * u.adjoint();
  double p = 0.0;
  for (Eigen::Index x = 0; x < rotated.rows(); ++x)
    if (!popcount_parity(x)) p += rotated(x, x).real();
  return p;
}

enum class AttackKind {
  Passive,
  GuessKey,
  InterceptResend,
  OptimalUnitary,
  CustomUnitary,
};

struct AttackStrategy {
  AttackKind kind = AttackKind::Passive;
  // GuessKey: Eve's guessed key; empty means she knows the true key
  // (the correct-guess baseline).
  std::vector<int> guess;
  Eigen::MatrixXcd unitary;  // CustomUnitary only

  std::string name() const {
    switch (kind) {
      case AttackKind::Passive: return "passive";
      case AttackKind::GuessKey: return "guess-key";
      case AttackKind::InterceptResend: return "intercept-resend";
      case AttackKind::OptimalUnitary: return "optimal";
      case AttackKind::CustomUnitary: return "custom-unitary";
    }
    return "?";
  }

  static AttackStrategy passive() { return {}; }
  static AttackStrategy guess_key(std::vector<int> g = {}) {
    return {AttackKind::GuessKey, std::move(g), {}};
  }
  static AttackStrategy intercept_resend() {
    return {AttackKind::InterceptResend, {}, {}};
  }
  static AttackStrategy optimal_unitary() {
    return {AttackKind::OptimalUnitary, {}, {}};
  }
  static AttackStrategy custom_unitary(Eigen::MatrixXcd u) {
    return {AttackKind::CustomUnitary, {}, std::move(u)};
  }
};

// Builds the channel hook realizing the strategy for one round. `true_key`
// backs the correct-guess baseline; `resolved_unitary` must already be
// materialized for the two unitary kinds.
inline ChannelHook make_channel_hook(const AttackStrategy& strategy,
                                     const KeyBits& true_key,
                                     const Eigen::MatrixXcd& resolved_unitary) {
  switch (strategy.kind) {
    case AttackKind::Passive:
      return [](StateVector st, const std::vector<int>&, Rng& rng) {
        return EveResult{std::move(st), rng.bit(), "passive"};
      };
    case AttackKind::GuessKey: {
      KeyBits guess;
      guess.bits = strategy.guess.empty() ? true_key.bits : strategy.guess;
      return [guess](StateVector st, const std::vector<int>& cipher,
                     Rng& rng) {
        st = apply_key_rotation(st, guess, cipher);
        auto [bits, collapsed] = measure_qubits(st, cipher, rng);
        // undo the trial rotation before forwarding
        collapsed = apply_key_rotation(collapsed, guess, cipher);
        return EveResult{std::move(collapsed), parity(bits), "guess-key"};
      };
    }
    case AttackKind::InterceptResend:
      return [](StateVector st, const std::vector<int>& cipher, Rng& rng) {
        auto [bits, collapsed] = measure_qubits(st, cipher, rng);
        return EveResult{std::move(collapsed), parity(bits),
                         "intercept-resend"};
      };
    case AttackKind::OptimalUnitary:
    case AttackKind::CustomUnitary: {
      Eigen::MatrixXcd u = resolved_unitary;
      std::string label = strategy.name();
      return [u, label](StateVector st, const std::vector<int>& cipher,
                        Rng& rng) {
        st = apply_unitary_on_subset(st, u, cipher);
        auto [bits, collapsed] = measure_qubits(st, cipher, rng);
        // forward the measured basis vector mapped back to the original frame
        collapsed = apply_unitary_on_subset(collapsed, u.adjoint(), cipher);
        return EveResult{std::move(collapsed), parity(bits), label};
      };
    }
  }
  throw std::logic_error("unreachable");
}

struct AttackReport {
  std::string strategy;
  int n = 0;
  long rounds = 0;
  long successes = 0;
  double empirical_ps = 0.0;
  double std_error = 0.0;
  double mismatch_rate = 0.0;  // Alice vs Bob disagreement under the attack
  PsBounds bound;
};

// Monte Carlo estimate of Eve's success probability, key drawn uniformly at
// random per round per the key-averaged definition. Eve guesses q_n = parity
// of her measured cipher bits.
inline AttackReport simulate_attack(
    const AttackStrategy& strategy, int n, long rounds, Rng& rng,
    std::vector<RoundTranscript>* transcripts_out = nullptr) {
  if (rounds < 1) throw std::invalid_argument("simulate_attack: rounds >= 1");

  Eigen::MatrixXcd u;
  if (strategy.kind == AttackKind::OptimalUnitary)
    u = optimal_attack_unitary(n);
  else if (strategy.kind == AttackKind::CustomUnitary) {
    u = strategy.unitary;
    if (u.rows() != (Eigen::Index{1} << (n - 1)))
      throw std::invalid_argument("simulate_attack: unitary dimension");
  }

  const StateVector base = psi_d(n);
  AttackReport report;
  report.strategy = strategy.name();
  report.n = n;
  report.rounds = rounds;
  report.bound = ps_bounds(n);

  long mismatches = 0;
  for (long j = 0; j < rounds; ++j) {
    const KeyBits key = KeyBits::random(n - 1, rng);
    const ChannelHook hook = make_channel_hook(strategy, key, u);
    RoundOptions opts;
    opts.prebuilt_state = &base;
    RoundTranscript t = run_round(n, key, hook, rng, opts);
    t.round_index = j;
    if (t.eve_guess && *t.eve_guess == t.alice_bit) ++report.successes;
    if (t.bob_bit && *t.bob_bit != t.alice_bit) ++mismatches;
    if (transcripts_out) transcripts_out->push_back(std::move(t));
  }
  report.empirical_ps =
      static_cast<double>(report.successes) / static_cast<double>(rounds);
  report.std_error = std::sqrt(report.empirical_ps *
                               (1.0 - report.empirical_ps) /
                               static_cast<double>(rounds));
  report.mismatch_rate =
      static_cast<double>(mismatches) / static_cast<double>(rounds);
  return report;
}

// Oracle search: no sampled unitary should beat the closed-form upper bound.
// Returns the best empirical success probability over `num_unitaries`
// Haar-random attacks plus the constructed optimal one.
inline double brute_force_ps_search(int n, int num_unitaries, long rounds_each,
                                    Rng& rng) {
  if (num_unitaries < 1)
    throw std::invalid_argument("brute_force_ps_search: need >= 1 unitary");
  const Eigen::Index dim = Eigen::Index{1} << (n - 1);
  double best = 0.0;
  for (int i = 0; i < num_unitaries; ++i) {
    const AttackStrategy s =
        AttackStrategy::custom_unitary(haar_random_unitary(dim, rng));
    best = std::max(best, simulate_attack(s, n, rounds_each, rng).empirical_ps);
  }
  const AttackStrategy opt = AttackStrategy::optimal_unitary();
  best = std::max(best, simulate_attack(opt, n, rounds_each, rng).empirical_ps);
  return best;
}

// ---------------------------------------------------------------------------
// Information gain

inline double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// Eve's per-round information gain in bits, 1 - H2(P_max(n)); approximately
// 2^{-n}/ln 2 for large n.
inline double entropy_gain(int n) {
  return 1.0 - binary_entropy(ps_bounds(n).p_max);
}

// ---------------------------------------------------------------------------
// Conditional-probability symmetry

struct BayesReport {
  long parity0 = 0, parity1 = 0;
  long qn0_given_parity0 = 0, qn1_given_parity1 = 0;
  long qn0_total = 0;
  long rounds = 0;
  double p_cond0 = 0.0;  // P(q_n = 0 | measured parity 0)
  double p_cond1 = 0.0;  // P(q_n = 1 | measured parity 1)
  double marginal_parity0 = 0.0;
  double marginal_qn0 = 0.0;
  bool symmetric = false;
};

// Empirically checks P(q_n=0 | parity 0) = P(q_n=1 | parity 1) and that both
// marginals sit at 1/2, for a fixed attack unitary, within 5 sigma.
inline BayesReport bayes_symmetry_check(int n, const Eigen::MatrixXcd& u,
                                        long rounds, Rng& rng) {
  if (rounds < 10000)
    throw std::invalid_argument("bayes_symmetry_check: rounds >= 1e4");
  const AttackStrategy s = AttackStrategy::custom_unitary(u);
  const StateVector base = psi_d(n);

  BayesReport r;
  r.rounds = rounds;
  for (long j = 0; j < rounds; ++j) {
    const KeyBits key = KeyBits::random(n - 1, rng);
    const ChannelHook hook = make_channel_hook(s, key, u);
    RoundOptions opts;
    opts.prebuilt_state = &base;
    RoundTranscript t = run_round(n, key, hook, rng, opts);
    const int eve_parity = *t.eve_guess;  // parity of Eve's measured bits
    if (eve_parity == 0) {
      ++r.parity0;
      if (t.alice_bit == 0) ++r.qn0_given_parity0;
    } else {
      ++r.parity1;
      if (t.alice_bit == 1) ++r.qn1_given_parity1;
    }
    if (t.alice_bit == 0) ++r.qn0_total;
  }
  r.p_cond0 = static_cast<double>(r.qn0_given_parity0) / r.parity0;
  r.p_cond1 = static_cast<double>(r.qn1_given_parity1) / r.parity1;
  r.marginal_parity0 = static_cast<double>(r.parity0) / rounds;
  r.marginal_qn0 = static_cast<double>(r.qn0_total) / rounds;

  const double p_pool =
      static_cast<double>(r.qn0_given_parity0 + r.qn1_given_parity1) / rounds;
  const double sigma_diff =
      std::sqrt(p_pool * (1.0 - p_pool) *
                (1.0 / r.parity0 + 1.0 / r.parity1));
  const double sigma_marginal = std::sqrt(0.25 / rounds);
  r.symmetric = std::abs(r.p_cond0 - r.p_cond1) <= 5.0 * sigma_diff &&
                std::abs(r.marginal_parity0 - 0.5) <= 5.0 * sigma_marginal &&
                std::abs(r.marginal_qn0 - 0.5) <= 5.0 * sigma_marginal;
  return r;
}

}  // namespace psqe
