#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ccattack/adapter.hpp"
#include "ccattack/attack.hpp"
#include "ccattack/embed.hpp"
#include "ccattack/model.hpp"
#include "ccattack/report.hpp"

// Orchestration shared by the command line tool and the python module: each
// run_* function is one subcommand with files in and files out.
namespace ccattack::driver {

// A run whose input produced nothing to work on (empty dataset, empty
// adversarial file).
struct EmptyResultError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmbedTrainArgs {
  std::string data;
  std::string out;
  lang::Lang lang = lang::Lang::java;
  embed::EmbedConfig config;
};

struct EmbedTrainSummary {
  std::size_t samples = 0;
  std::size_t dropped = 0;
  std::size_t vocab = 0;
};

EmbedTrainSummary run_embed_train(const EmbedTrainArgs& args);

struct AttackArgs {
  std::string data;
  std::string embed_path;  // unused by the random method
  std::string vocab_data;  // substitution vocabulary source; empty: use data
  std::string adapter_spec;
  std::string out;
  lang::Lang lang = lang::Lang::java;
  attack::Method method = attack::Method::accent;
  attack::AttackConfig config;
  adapter::AdapterConfig adapter_config;
  int jobs = 1;
};

struct AttackSummary {
  std::size_t samples = 0;
  std::size_t dropped = 0;
  std::size_t valid = 0;
  std::size_t queries = 0;
  double mean_score_before = 0.0;
  double mean_score_after = 0.0;
};

AttackSummary run_attack_cmd(const AttackArgs& args);

struct MaskArgs {
  std::string data;
  std::string out;
  lang::Lang lang = lang::Lang::java;
  int count = 2;
  std::uint64_t seed = 7;
};

struct MaskSummary {
  std::size_t samples = 0;
  std::size_t dropped = 0;
};

MaskSummary run_mask(const MaskArgs& args);

struct TrainToyArgs {
  std::string data;
  std::string out;
  std::string curve_out;  // optional loss-curve CSV
  lang::Lang lang = lang::Lang::java;
  model::MaskedTrainConfig config;
};

struct TrainToySummary {
  std::size_t samples = 0;
  std::size_t dropped = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  double first_combined = 0.0;
  double final_combined = 0.0;
};

TrainToySummary run_train_toy(const TrainToyArgs& args);

struct EvaluateArgs {
  std::string data;
  std::string adv;
  std::string adapter_spec;
  std::string out;       // report JSON
  std::string out_text;  // optional human-readable report
  lang::Lang lang = lang::Lang::java;
  adapter::AdapterConfig adapter_config;
  nlohmann::json run_config;  // echoed into the report
};

report::Report run_evaluate(const EvaluateArgs& args);

}  // namespace ccattack::driver
