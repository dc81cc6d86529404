#pragma once

#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "psqe/adversary.hpp"
#include "psqe/common.hpp"
#include "psqe/protocol.hpp"

namespace psqe {

// Seeded description of one Monte Carlo experiment. The seed fully
// determines every stochastic choice, including the key draw when no fixed
// key is given.
struct ExperimentConfig {
  int n = 3;
  std::optional<KeyBits> fixed_key;  // absent: uniform random per experiment
  std::optional<AttackStrategy> strategy;  // absent: honest run
  long rounds = 1000;
  long pad_length = 0;
  std::uint64_t seed = 0;
  std::string output_path;
};

struct TamperStat {
  double mismatch_rate = 0.0;
  bool tampered = false;
};

// Fraction of rounds where Bob's decoded bit disagrees with Alice's. The
// default threshold 1/4 sits between the honest rate (0) and the
// theoretical attack floor 1 - P_max (>= 1/4 for n >= 3).
inline TamperStat tamper_detection_stat(
    const std::vector<RoundTranscript>& transcripts, double threshold = 0.25) {
  long complete = 0, mismatches = 0;
  for (const auto& t : transcripts) {
    if (!t.bob_bit) continue;
    ++complete;
    if (*t.bob_bit != t.alice_bit) ++mismatches;
  }
  if (complete == 0)
    throw std::invalid_argument("tamper_detection_stat: no complete rounds");
  const double rate =
      static_cast<double>(mismatches) / static_cast<double>(complete);
  return {rate, rate > threshold};
}

struct ResultRecord {
  ExperimentConfig config;
  double agreement_rate = 0.0;
  std::optional<double> empirical_ps;
  double pad_bias = 0.0;  // fraction of 1s in Alice's pad bits
  double std_error = 0.0;
  double p_min = 0.0;
  double p_max = 1.0;
  double mismatch_rate = 0.0;
  std::string verdict;      // "clean" or "tampered"
  double wall_time_ms = 0;  // informational; never serialized
};

// --- JSON serialization (nlohmann::ordered_json keeps field order stable
// so identical configs serialize byte-identically) ---

inline nlohmann::ordered_json strategy_to_json(const AttackStrategy& s) {
  nlohmann::ordered_json j;
  j["kind"] = s.name();
  if (s.kind == AttackKind::GuessKey) j["guess"] = s.guess;
  if (s.kind == AttackKind::CustomUnitary) {
    std::vector<std::vector<std::vector<double>>> rows;
    for (Eigen::Index r = 0; r < s.unitary.rows(); ++r) {
      std::vector<std::vector<double>> row;
      for (Eigen::Index c = 0; c < s.unitary.cols(); ++c)
        row.push_back({s.unitary(r, c).real(), s.unitary(r, c).imag()});
      rows.push_back(std::move(row));
    }
    j["unitary"] = rows;
  }
  return j;
}

inline AttackStrategy strategy_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind");
  if (kind == "passive") return AttackStrategy::passive();
  if (kind == "guess-key")
    return AttackStrategy::guess_key(
        j.value("guess", std::vector<int>{}));
  if (kind == "intercept-resend") return AttackStrategy::intercept_resend();
  if (kind == "optimal") return AttackStrategy::optimal_unitary();
  if (kind == "custom-unitary") {
    const auto& rows = j.at("unitary");
    const Eigen::Index dim = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXcd u(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r)
      for (Eigen::Index c = 0; c < dim; ++c)
        u(r, c) = cxd(rows[r][c][0].get<double>(),
                      rows[r][c][1].get<double>());
    return AttackStrategy::custom_unitary(std::move(u));
  }
  throw std::invalid_argument("unknown strategy kind: " + kind);
}

inline nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["n"] = c.n;
  j["key"] = c.fixed_key ? nlohmann::ordered_json(format_bits(c.fixed_key->bits))
                         : nlohmann::ordered_json(nullptr);
  j["strategy"] = c.strategy ? strategy_to_json(*c.strategy)
                             : nlohmann::ordered_json(nullptr);
  j["rounds"] = c.rounds;
  j["pad_length"] = c.pad_length;
  j["seed"] = c.seed;
  j["output_path"] = c.output_path;
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.n = j.at("n");
  if (!j.at("key").is_null())
    c.fixed_key = KeyBits{parse_bits(j.at("key").get<std::string>())};
  if (!j.at("strategy").is_null())
    c.strategy = strategy_from_json(j.at("strategy"));
  c.rounds = j.at("rounds");
  c.pad_length = j.value("pad_length", 0L);
  c.seed = j.at("seed");
  c.output_path = j.value("output_path", std::string{});
  return c;
}

// Wall time deliberately omitted: re-running the same config must produce
// byte-identical files.
inline nlohmann::ordered_json record_to_json(const ResultRecord& r) {
  nlohmann::ordered_json j;
  j["config"] = config_to_json(r.config);
  j["agreement_rate"] = r.agreement_rate;
  j["empirical_ps"] = r.empirical_ps ? nlohmann::ordered_json(*r.empirical_ps)
                                     : nlohmann::ordered_json(nullptr);
  j["pad_bias"] = r.pad_bias;
  j["std_error"] = r.std_error;
  j["p_min"] = r.p_min;
  j["p_max"] = r.p_max;
  j["mismatch_rate"] = r.mismatch_rate;
  j["verdict"] = r.verdict;
  return j;
}

inline std::string record_to_string(const ResultRecord& r) {
  return record_to_json(r).dump(2) + "\n";
}

// Executes the configured campaign deterministically from the seed. Honest
// runs reuse one key for all rounds (fixed or drawn once); attack runs
// follow the key-averaged adversary model and redraw the key each round.
inline ResultRecord run_experiment(const ExperimentConfig& config) {
  if (config.rounds < 1 || config.n < 3)
    throw std::invalid_argument("run_experiment: invalid config");

  const auto start = std::chrono::steady_clock::now();
  Rng rng = Rng::substream(config.seed, 0);

  ResultRecord rec;
  rec.config = config;
  const PsBounds bounds = ps_bounds(config.n);
  rec.p_min = bounds.p_min;
  rec.p_max = bounds.p_max;

  std::vector<RoundTranscript> transcripts;
  if (config.strategy) {
    AttackReport report = simulate_attack(*config.strategy, config.n,
                                          config.rounds, rng, &transcripts);
    rec.empirical_ps = report.empirical_ps;
    rec.std_error = report.std_error;
    rec.mismatch_rate = report.mismatch_rate;
    rec.agreement_rate = 1.0 - report.mismatch_rate;
    long ones = 0;
    for (const auto& t : transcripts) ones += t.alice_bit;
    rec.pad_bias = static_cast<double>(ones) / config.rounds;
  } else {
    const KeyBits key = config.fixed_key
                            ? *config.fixed_key
                            : KeyBits::random(config.n - 1, rng);
    PadGeneration gen =
        generate_pad(config.n, key, config.rounds, ChannelHook{}, rng);
    transcripts = std::move(gen.transcripts);
    long agree = 0, ones = 0;
    for (const auto& t : transcripts) {
      if (*t.bob_bit == t.alice_bit) ++agree;
      ones += t.alice_bit;
    }
    rec.agreement_rate = static_cast<double>(agree) / config.rounds;
    rec.mismatch_rate = 1.0 - rec.agreement_rate;
    rec.pad_bias = static_cast<double>(ones) / config.rounds;
  }

  const TamperStat tamper = tamper_detection_stat(transcripts);
  rec.verdict = tamper.tampered ? "tampered" : "clean";

  rec.wall_time_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();

  if (!config.output_path.empty()) {
    std::ofstream out(config.output_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + config.output_path);
    out << record_to_string(rec);
  }
  return rec;
}

// Cartesian product of n values and strategies (nullopt = honest cell).
// Each cell gets its own seed derived from (base seed, cell index), so any
// cell reproduces standalone.
inline std::vector<ResultRecord> sweep(
    const ExperimentConfig& base, const std::vector<int>& n_values,
    const std::vector<std::optional<AttackStrategy>>& strategies) {
  if (n_values.empty()) throw std::invalid_argument("sweep: empty n list");
  if (strategies.empty())
    throw std::invalid_argument("sweep: empty strategy list");

  std::vector<ResultRecord> table;
  std::uint64_t cell = 0;
  for (int n : n_values) {
    for (const auto& strategy : strategies) {
      ExperimentConfig c = base;
      c.n = n;
      c.strategy = strategy;
      c.seed = mix_seed(base.seed, cell++);
      c.output_path.clear();
      table.push_back(run_experiment(c));
    }
  }
  return table;
}

inline std::string csv_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string sweep_csv(const std::vector<ResultRecord>& table) {
  std::string out =
      "strategy,n,rounds,empirical_ps,p_min,p_max,std_error,"
      "agreement_rate,mismatch_rate,pad_bias\n";
  for (const auto& r : table) {
    out += r.config.strategy ? r.config.strategy->name() : "honest";
    out += ',' + std::to_string(r.config.n);
    out += ',' + std::to_string(r.config.rounds);
    out += ',' + (r.empirical_ps ? csv_double(*r.empirical_ps) : std::string());
    out += ',' + csv_double(r.p_min);
    out += ',' + csv_double(r.p_max);
    out += ',' + csv_double(r.std_error);
    out += ',' + csv_double(r.agreement_rate);
    out += ',' + csv_double(r.mismatch_rate);
    out += ',' + csv_double(r.pad_bias);
    out += '\n';
  }
  return out;
}

}  // namespace psqe
