// Command-line front end: verify the core identities, run the protocol,
// mount attacks, print resource counts, and sweep parameter grids.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "psqe/adversary.hpp"
#include "psqe/harness.hpp"
#include "psqe/protocol.hpp"
#include "psqe/states.hpp"

using namespace psqe;

namespace {

// Relative output paths land in $PSQE_OUT_DIR when it is set.
std::string resolve_out(const std::string& path) {
  if (path.empty()) return path;
  const char* dir = std::getenv("PSQE_OUT_DIR");
  std::filesystem::path p(path);
  if (dir && *dir && p.is_relative()) p = std::filesystem::path(dir) / p;
  return p.string();
}

void write_or_print(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  const std::string full = resolve_out(path);
  std::ofstream out(full, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + full);
  out << content;
  std::cerr << "wrote " << full << "\n";
}

AttackStrategy parse_strategy(const std::string& name,
                              const std::string& guess) {
  if (name == "passive") return AttackStrategy::passive();
  if (name == "guess-key") return AttackStrategy::guess_key(parse_bits(guess));
  if (name == "intercept-resend") return AttackStrategy::intercept_resend();
  if (name == "optimal") return AttackStrategy::optimal_unitary();
  throw CLI::ValidationError("--strategy", "unknown strategy " + name);
}

int cmd_verify(int n) {
  int failures = 0;
  auto check = [&](const std::string& what, bool ok, double value) {
    std::cout << (ok ? "ok   " : "FAIL ") << what << " (" << value << ")\n";
    failures += !ok;
  };

  for (int m = 2; m <= n; ++m) {
    const PropertyCheck c = check_property1(m);
    check("recursion n=" + std::to_string(m), c.holds, c.max_deviation);
    check("support partition n=" + std::to_string(m), check_property2(m), 0.0);
  }

  Rng rng(1);
  for (int m = 3; m <= n; ++m) {
    const Eigen::Index dim = Eigen::Index{1} << (m - 1);
    const Eigen::MatrixXcd target =
        Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim);
    double worst = 0.0;
    for (int t = 0; t < 8; ++t) {
      const KeyBits k = KeyBits::random(m - 1, rng);
      worst = std::max(worst,
                       max_abs_diff(reduced_cipher_state(m, k).entries, target));
    }
    check("maximally mixed cipher n=" + std::to_string(m), worst <= 1e-10,
          worst);
  }

  for (int m = 3; m <= std::min(n, 8); ++m) {
    const auto closed = rho_e_eigensystem_closed(m);
    const auto numeric = eigensystem(rho_e_explicit(m));
    const Eigen::Index dim = numeric.eigenvalues.size();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i)
      worst = std::max(worst, std::abs(numeric.eigenvalues(i) -
                                       (i < dim / 2 ? closed.lambda_low
                                                    : closed.lambda_high)));
    check("adversary spectrum n=" + std::to_string(m), worst <= 1e-9, worst);
  }

  std::cout << (failures ? "verification FAILED\n" : "all checks passed\n");
  return failures ? 1 : 0;
}

int cmd_run(int n, const std::string& key_str, const std::string& plaintext_str,
            long rounds, std::uint64_t seed, const std::string& inject,
            const std::string& out, const std::string& format) {
  Rng rng(seed);
  const KeyBits key = key_str.empty() ? KeyBits::random(n - 1, rng)
                                      : KeyBits{parse_bits(key_str)};
  if (key.length() != n - 1)
    throw CLI::ValidationError("--key", "key must have n-1 bits");

  const std::vector<int> plaintext = parse_bits(plaintext_str);
  const long pad_len =
      plaintext.empty() ? rounds : static_cast<long>(plaintext.size());
  const std::vector<int> forced = parse_bits(inject);
  if (!forced.empty() && static_cast<long>(forced.size()) != pad_len)
    throw CLI::ValidationError("--inject-pad", "length must match the pad");

  PadGeneration gen = generate_pad(n, key, pad_len, ChannelHook{}, rng, forced);

  nlohmann::ordered_json j;
  j["n"] = n;
  j["key"] = format_bits(key.bits);
  j["rounds"] = pad_len;
  j["seed"] = seed;
  j["alice_pad"] = format_bits(gen.alice.bits);
  j["bob_pad"] = format_bits(gen.bob.bits);
  j["pads_agree"] = gen.alice.bits == gen.bob.bits;
  const TamperStat tamper = tamper_detection_stat(gen.transcripts);
  j["mismatch_rate"] = tamper.mismatch_rate;
  j["verdict"] = tamper.tampered ? "tampered" : "clean";
  if (!plaintext.empty()) {
    const CipherText c = encrypt(plaintext, gen.alice);
    j["plaintext"] = format_bits(plaintext);
    j["ciphertext"] = format_bits(c.bits);
    j["decrypted"] = format_bits(decrypt(c, gen.bob));
    j["recovered"] = decrypt(c, gen.bob) == plaintext;
  }

  if (format == "csv") {
    std::string csv = "field,value\n";
    for (auto& [k, v] : j.items())
      csv += k + "," + (v.is_string() ? v.get<std::string>() : v.dump()) + "\n";
    write_or_print(out, csv);
  } else {
    write_or_print(out, j.dump(2) + "\n");
  }
  if (!plaintext.empty() && !j["recovered"].get<bool>()) return 1;
  return gen.alice.bits == gen.bob.bits ? 0 : 1;
}

int cmd_attack(int n, const std::string& strategy_name,
               const std::string& guess, long rounds, std::uint64_t seed,
               const std::string& out, const std::string& format) {
  ExperimentConfig c;
  c.n = n;
  c.strategy = parse_strategy(strategy_name, guess);
  c.rounds = rounds;
  c.seed = seed;
  const ResultRecord r = run_experiment(c);

  if (format == "csv") {
    write_or_print(out, sweep_csv({r}));
  } else {
    write_or_print(out, record_to_string(r));
  }
  return 0;
}

int cmd_resources(int n, const std::string& key_str,
                  const std::string& format) {
  std::uint64_t seed = 1;
  Rng rng(seed);
  std::vector<std::pair<int, CircuitResources>> rows;
  if (!key_str.empty()) {
    const KeyBits key{parse_bits(key_str)};
    if (key.length() != n - 1)
      throw CLI::ValidationError("--key", "key must have n-1 bits");
    rows.emplace_back(key.ones(), instrumented_resources(n, key, rng));
  } else {
    for (int nk = 0; nk <= n - 1; ++nk)
      rows.emplace_back(nk, circuit_resources(n, nk));
  }

  if (format == "csv") {
    std::string csv = "n,key_weight,qubits,cnots,hadamards\n";
    for (const auto& [nk, res] : rows)
      csv += std::to_string(n) + ',' + std::to_string(nk) + ',' +
             std::to_string(res.qubits) + ',' + std::to_string(res.cnots) +
             ',' + std::to_string(res.hadamards) + '\n';
    write_or_print("", csv);
  } else {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& [nk, res] : rows)
      j.push_back({{"n", n},
                   {"key_weight", nk},
                   {"qubits", res.qubits},
                   {"cnots", res.cnots},
                   {"hadamards", res.hadamards}});
    write_or_print("", j.dump(2) + "\n");
  }
  return 0;
}

int cmd_sweep(int n_max, long rounds, std::uint64_t seed,
              const std::vector<std::string>& strategy_names,
              const std::string& out, const std::string& format) {
  ExperimentConfig base;
  base.rounds = rounds;
  base.seed = seed;
  std::vector<int> ns;
  for (int n = 3; n <= n_max; ++n) ns.push_back(n);

  std::vector<std::optional<AttackStrategy>> strategies;
  for (const std::string& s : strategy_names) {
    if (s == "honest")
      strategies.emplace_back(std::nullopt);
    else
      strategies.emplace_back(parse_strategy(s, ""));
  }

  const auto table = sweep(base, ns, strategies);
  if (format == "csv") {
    write_or_print(out, sweep_csv(table));
  } else {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& r : table) j.push_back(record_to_json(r));
    write_or_print(out, j.dump(2) + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum pad-distribution simulator and attack toolkit"};
  app.require_subcommand(1);

  int n = 5;
  std::string key, plaintext, inject, out, strategy = "optimal", guess;
  std::string format = "json";
  long rounds = 10000;
  std::uint64_t seed = 0;
  int n_max = 6;
  std::vector<std::string> sweep_strategies{"honest", "intercept-resend",
                                            "optimal"};

  auto add_common = [&](CLI::App* cmd, bool with_out) {
    cmd->add_option("--n", n, "number of protocol qubits (>= 3)")
        ->check(CLI::Range(3, 12));
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    if (with_out)
      cmd->add_option("--out", out,
                      "output file (default stdout; relative paths land in "
                      "$PSQE_OUT_DIR)");
  };

  CLI::App* verify = app.add_subcommand(
      "verify", "check the structural identities up to --n");
  verify->add_option("--n", n, "largest n to verify")->check(CLI::Range(3, 10));

  CLI::App* run = app.add_subcommand(
      "run", "honest protocol: pad generation plus optional encryption");
  add_common(run, true);
  run->add_option("--key", key, "shared key bits (default: random)");
  run->add_option("--plaintext", plaintext, "plaintext bits to encrypt");
  run->add_option("--rounds", rounds, "pad length when no plaintext is given");
  run->add_option("--inject-pad", inject,
                  "force Alice's outcomes to this bit string");

  CLI::App* attack = app.add_subcommand(
      "attack", "Monte Carlo estimate of an eavesdropping strategy");
  add_common(attack, true);
  attack->add_option("--strategy", strategy,
                     "passive | guess-key | intercept-resend | optimal");
  attack->add_option("--guess", guess, "guess-key: Eve's guessed key bits");
  attack->add_option("--rounds", rounds, "Monte Carlo rounds");

  CLI::App* resources = app.add_subcommand(
      "resources", "per-round qubit and gate counts");
  add_common(resources, false);
  resources->add_option("--key", key,
                        "instrument one round with this key instead of the "
                        "whole table");

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "strategy x n grid of experiments");
  add_common(sweep_cmd, true);
  sweep_cmd->add_option("--n-max", n_max, "sweep n = 3..n-max")
      ->check(CLI::Range(3, 10));
  sweep_cmd->add_option("--rounds", rounds, "rounds per cell");
  sweep_cmd->add_option("--strategy", sweep_strategies,
                        "strategies to include ('honest' for no attack)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (verify->parsed()) return cmd_verify(n);
    if (run->parsed())
      return cmd_run(n, key, plaintext, rounds, seed, inject, out, format);
    if (attack->parsed())
      return cmd_attack(n, strategy, guess, rounds, seed, out, format);
    if (resources->parsed()) return cmd_resources(n, key, format);
    if (sweep_cmd->parsed())
      return cmd_sweep(n_max, rounds, seed, sweep_strategies, out, format);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
