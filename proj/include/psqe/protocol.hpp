#pragma once

#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "psqe/common.hpp"
#include "psqe/state.hpp"
#include "psqe/states.hpp"

namespace psqe {

// The (n-1)-bit reusable key shared by Alice and Bob.
struct KeyBits {
  std::vector<int> bits;

  int length() const { return static_cast<int>(bits.size()); }
  int ones() const {
    int c = 0;
    for (int b : bits) c += b;
    return c;
  }

  static KeyBits random(int length, Rng& rng) {
    KeyBits k;
    k.bits.resize(length);
    for (int& b : k.bits) b = rng.bit();
    return k;
  }
};

// One-time pad accumulated from Phase-1 rounds. Consumed at most once.
struct PadBits {
  std::vector<int> bits;
  bool used = false;

  int length() const { return static_cast<int>(bits.size()); }
};

struct CipherText {
  std::vector<int> bits;
};

// What Eve did to the in-transit cipher qubits, plus her inference if any.
struct EveResult {
  StateVector state;
  std::optional<int> guess;
  std::string action;
};

// Channel hook invoked between Alice's send and Bob's receive. Receives the
// full joint state but is only supposed to touch the listed cipher qubits.
using ChannelHook =
    std::function<EveResult(StateVector, const std::vector<int>&, Rng&)>;

struct RoundTranscript {
  long round_index = 0;
  std::vector<int> key;
  int alice_bit = 0;
  std::optional<int> bob_bit;
  std::vector<int> cipher_outcomes;
  std::string eve_action;  // empty when the channel was honest
  std::optional<int> eve_guess;
};

struct RoundOptions {
  std::optional<int> forced_alice_bit;   // outcome injection for golden runs
  std::optional<KeyBits> bob_key;        // defaults to the shared key
  bool alice_measures_before_channel = false;
  const StateVector* prebuilt_state = nullptr;  // skip gate-level rebuild
  GateTally* tally = nullptr;
};

// Step 4 (and, reused, Step 6): Hadamard on exactly the positions where the
// key bit is 1. Self-inverse.
inline StateVector apply_key_rotation(const StateVector& state,
                                      const KeyBits& key,
                                      const std::vector<int>& positions,
                                      GateTally* tally = nullptr) {
  if (static_cast<int>(positions.size()) != key.length())
    throw std::invalid_argument("key length does not match cipher positions");
  StateVector s = state;
  for (std::size_t i = 0; i < positions.size(); ++i)
    if (key.bits[i]) s = apply_gate(s, GateOp::h(positions[i]), tally);
  return s;
}

// One Phase-1 round: build the duplicated state, Alice's key rotation,
// channel transit (Eve optional), Bob's inverse rotation, measurements,
// parity decode. Alice's q_n measurement defaults to after Step 6 but can be
// moved before the channel; both orders commute.
inline RoundTranscript run_round(int n, const KeyBits& key,
                                 const ChannelHook& eve, Rng& rng,
                                 const RoundOptions& opts = {}) {
  if (key.length() != n - 1)
    throw std::invalid_argument("run_round: key length must be n-1");

  const std::vector<int> cipher = cipher_positions(n);
  StateVector st = opts.prebuilt_state ? *opts.prebuilt_state
                                       : psi_d(n, opts.tally);
  st = apply_key_rotation(st, key, cipher, opts.tally);

  RoundTranscript t;
  t.key = key.bits;

  auto alice_measures = [&](StateVector s) {
    int bit;
    if (opts.forced_alice_bit) {
      std::tie(bit, s) = project_qubit(s, last_qubit(n), *opts.forced_alice_bit);
    } else {
      std::tie(bit, s) = measure_qubit(s, last_qubit(n), rng);
    }
    t.alice_bit = bit;
    return s;
  };

  if (opts.alice_measures_before_channel) st = alice_measures(std::move(st));

  if (eve) {
    EveResult r = eve(std::move(st), cipher, rng);
    st = std::move(r.state);
    t.eve_guess = r.guess;
    t.eve_action = std::move(r.action);
  }

  const KeyBits& bob_key = opts.bob_key ? *opts.bob_key : key;
  st = apply_key_rotation(st, bob_key, cipher, opts.tally);

  if (!opts.alice_measures_before_channel) st = alice_measures(std::move(st));

  auto [outcomes, rest] = measure_qubits(st, cipher, rng);
  t.cipher_outcomes = std::move(outcomes);
  t.bob_bit = parity(t.cipher_outcomes);
  return t;
}

struct PadGeneration {
  PadBits alice;
  PadBits bob;
  std::vector<RoundTranscript> transcripts;
};

// Phase-1 repetition loop. `inject`, when present, forces Alice's outcome in
// each round (the worked-example stand-in for the rng).
inline PadGeneration generate_pad(int n, const KeyBits& key, long m,
                                  const ChannelHook& eve, Rng& rng,
                                  const std::vector<int>& inject = {}) {
  if (m < 1) throw std::invalid_argument("generate_pad: m must be >= 1");
  if (!inject.empty() && static_cast<long>(inject.size()) != m)
    throw std::invalid_argument("generate_pad: injected pad length mismatch");

  PadGeneration out;
  const StateVector base = psi_d(n);
  for (long j = 0; j < m; ++j) {
    RoundOptions opts;
    opts.prebuilt_state = &base;
    if (!inject.empty()) opts.forced_alice_bit = inject[j];
    RoundTranscript t = run_round(n, key, eve, rng, opts);
    t.round_index = j;
    out.alice.bits.push_back(t.alice_bit);
    out.bob.bits.push_back(*t.bob_bit);
    out.transcripts.push_back(std::move(t));
  }
  return out;
}

// Phase 2, Step 8. Marks the pad as consumed; a second use is rejected.
inline CipherText encrypt(const std::vector<int>& plaintext, PadBits& pad) {
  if (plaintext.size() != pad.bits.size())
    throw std::invalid_argument("encrypt: plaintext/pad length mismatch");
  if (pad.used) throw std::logic_error("encrypt: pad already consumed");
  pad.used = true;
  CipherText c;
  c.bits.resize(plaintext.size());
  for (std::size_t i = 0; i < plaintext.size(); ++i)
    c.bits[i] = plaintext[i] ^ pad.bits[i];
  return c;
}

// Phase 2, Step 9.
inline std::vector<int> decrypt(const CipherText& cipher, const PadBits& pad) {
  if (cipher.bits.size() != pad.bits.size())
    throw std::invalid_argument("decrypt: ciphertext/pad length mismatch");
  std::vector<int> p(cipher.bits.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    p[i] = cipher.bits[i] ^ pad.bits[i];
  return p;
}

// Code-word authentication with the Phase-2 roles swapped: the responder
// encrypts the code word with its pad, the challenger decrypts with its own
// pad and compares. `responder_key` models an impersonator guessing the key;
// pass the shared key for the honest flow.
inline bool authenticate(const std::vector<int>& codeword, int n,
                         const KeyBits& challenger_key,
                         const KeyBits& responder_key, const ChannelHook& eve,
                         Rng& rng) {
  if (codeword.empty())
    throw std::invalid_argument("authenticate: empty code word");
  const long m = static_cast<long>(codeword.size());

  PadGeneration gen;
  {
    const StateVector base = psi_d(n);
    for (long j = 0; j < m; ++j) {
      RoundOptions opts;
      opts.prebuilt_state = &base;
      opts.bob_key = responder_key;
      RoundTranscript t = run_round(n, challenger_key, eve, rng, opts);
      t.round_index = j;
      gen.alice.bits.push_back(t.alice_bit);
      gen.bob.bits.push_back(*t.bob_bit);
    }
  }
  CipherText c = encrypt(codeword, gen.bob);
  return decrypt(c, gen.alice) == codeword;
}

inline bool authenticate(const std::vector<int>& codeword, int n,
                         const KeyBits& key, Rng& rng) {
  return authenticate(codeword, n, key, key, ChannelHook{}, rng);
}

struct CircuitResources {
  long qubits = 0;
  long cnots = 0;
  long hadamards = 0;

  bool operator==(const CircuitResources&) const = default;
};

// Closed-form gate/qubit counts for one round with key weight n_k,
// including Bob's decryption rotations.
inline CircuitResources circuit_resources(int n, int n_k) {
  if (n < 3) throw std::invalid_argument("circuit_resources: n must be >= 3");
  if (n_k < 0 || n_k > n - 1)
    throw std::invalid_argument("circuit_resources: n_k out of range");
  return {2L * n - 1, 2L * n - 2, static_cast<long>(n) + 2L * n_k + 1};
}

// Counts emitted by actually running an instrumented round.
inline CircuitResources instrumented_resources(int n, const KeyBits& key,
                                               Rng& rng) {
  GateTally tally;
  RoundOptions opts;
  opts.tally = &tally;
  run_round(n, key, ChannelHook{}, rng, opts);
  return {2L * n - 1, tally.cnots, tally.hadamards};
}

// One JSON object per round, newline separated.
inline std::string transcripts_to_jsonl(
    const std::vector<RoundTranscript>& transcripts) {
  std::ostringstream out;
  for (const auto& t : transcripts) {
    nlohmann::ordered_json j;
    j["round_index"] = t.round_index;
    j["key"] = t.key;
    j["alice_bit"] = t.alice_bit;
    if (t.bob_bit)
      j["bob_bit"] = *t.bob_bit;
    else
      j["bob_bit"] = nullptr;
    j["cipher_outcomes"] = t.cipher_outcomes;
    j["eve_action"] = t.eve_action;
    out << j.dump() << '\n';
  }
  return out.str();
}

// Bit-string helpers; most-significant-first in all textual encodings.
inline std::vector<int> parse_bits(const std::string& text) {
  std::vector<int> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1')
      throw std::invalid_argument("bit string must contain only 0/1");
    bits.push_back(c - '0');
  }
  return bits;
}

inline std::string format_bits(const std::vector<int>& bits) {
  std::string s;
  s.reserve(bits.size());
  for (int b : bits) s.push_back(b ? '1' : '0');
  return s;
}

}  // namespace psqe
