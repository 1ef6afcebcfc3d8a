// Command line front end: adversarial identifier substitution for code
// comment generators, plus the supporting embedding/masking/toy-model runs.
#include <cstdio>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ccattack/driver.hpp"

namespace {

using namespace ccattack;

constexpr int kExitOk = 0;
constexpr int kExitUnexpected = 1;
constexpr int kExitInput = 2;
constexpr int kExitAdapter = 3;
constexpr int kExitEmpty = 4;
constexpr int kExitIdMismatch = 5;

struct CliOptions {
  std::string lang_name = "java";

  driver::EmbedTrainArgs embed_train;
  driver::AttackArgs attack;
  std::string method_name = "accent";
  driver::MaskArgs mask;
  driver::TrainToyArgs train_toy;
  driver::EvaluateArgs evaluate;
};

void add_adapter_options(CLI::App* cmd, adapter::AdapterConfig* config) {
  cmd->add_option("--max-in-flight", config->max_in_flight,
                  "Outstanding wire requests")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--timeout-ms", config->timeout_ms,
                  "Response timeout; one retransmit before failing")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--gen-length", config->gen_length,
                  "Comment length of the builtin toy model")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

int dispatch(const CLI::App& app, CliOptions& opt) {
  const lang::Lang lg = lang::lang_from_string(opt.lang_name);

  if (app.got_subcommand("embed-train")) {
    opt.embed_train.lang = lg;
    driver::EmbedTrainSummary s = driver::run_embed_train(opt.embed_train);
    std::printf("samples: %zu (dropped %zu)\nvocabulary: %zu tokens\nwrote %s\n",
                s.samples, s.dropped, s.vocab, opt.embed_train.out.c_str());
    return kExitOk;
  }

  if (app.got_subcommand("attack")) {
    opt.attack.lang = lg;
    opt.attack.method = attack::method_from_string(opt.method_name);
    if (opt.attack.method != attack::Method::random_sub &&
        opt.attack.embed_path.empty())
      throw CLI::ValidationError("--embed",
                                 "required for methods that rank by embedding");
    driver::AttackSummary s = driver::run_attack_cmd(opt.attack);
    std::printf("samples: %zu (dropped %zu)\nvalid: %zu\nmodel queries: %zu\n"
                "mean score before/after: %.2f / %.2f\nwrote %s\n",
                s.samples, s.dropped, s.valid, s.queries, s.mean_score_before,
                s.mean_score_after, opt.attack.out.c_str());
    return kExitOk;
  }

  if (app.got_subcommand("mask")) {
    opt.mask.lang = lg;
    driver::MaskSummary s = driver::run_mask(opt.mask);
    std::printf("samples: %zu (dropped %zu)\nwrote %s\n", s.samples, s.dropped,
                opt.mask.out.c_str());
    return kExitOk;
  }

  if (app.got_subcommand("train-toy")) {
    opt.train_toy.lang = lg;
    driver::TrainToySummary s = driver::run_train_toy(opt.train_toy);
    std::printf("samples: %zu (dropped %zu)\ntheta: %zu x %zu\n"
                "combined loss: %.6f -> %.6f\nwrote %s\n",
                s.samples, s.dropped, s.rows, s.cols, s.first_combined,
                s.final_combined, opt.train_toy.out.c_str());
    return kExitOk;
  }

  if (app.got_subcommand("evaluate")) {
    opt.evaluate.lang = lg;
    opt.evaluate.run_config = {
        {"adapter", opt.evaluate.adapter_spec},
        {"adv", opt.evaluate.adv},
        {"command", "evaluate"},
        {"data", opt.evaluate.data},
        {"gen_length", opt.evaluate.adapter_config.gen_length},
        {"lang", opt.lang_name},
        {"max_in_flight", opt.evaluate.adapter_config.max_in_flight},
        {"timeout_ms", opt.evaluate.adapter_config.timeout_ms},
    };
    report::Report rep = driver::run_evaluate(opt.evaluate);
    std::printf("%s", report::report_to_text(rep).c_str());
    if (!opt.evaluate.out.empty())
      std::printf("wrote %s\n", opt.evaluate.out.c_str());
    return kExitOk;
  }

  throw CLI::ValidationError("subcommand", "nothing to do");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Identifier-substitution attacks on code comment generators"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI file");

  CliOptions opt;
  const auto lang_check = CLI::IsMember({"java", "python"});

  CLI::App* embed_train =
      app.add_subcommand("embed-train", "Train identifier embeddings on a dataset");
  embed_train->add_option("--data", opt.embed_train.data, "Training JSONL")->required();
  embed_train->add_option("--lang", opt.lang_name, "Language")->required()->check(lang_check);
  embed_train->add_option("--out", opt.embed_train.out, "Embedding table file")->required();
  embed_train->add_option("--dim", opt.embed_train.config.dim)->check(CLI::PositiveNumber)->capture_default_str();
  embed_train->add_option("--window", opt.embed_train.config.window)->check(CLI::PositiveNumber)->capture_default_str();
  embed_train->add_option("--negatives", opt.embed_train.config.negatives)->check(CLI::PositiveNumber)->capture_default_str();
  embed_train->add_option("--min-count", opt.embed_train.config.min_count)->check(CLI::PositiveNumber)->capture_default_str();
  embed_train->add_option("--epochs", opt.embed_train.config.epochs)->check(CLI::PositiveNumber)->capture_default_str();
  embed_train->add_option("--lr", opt.embed_train.config.lr)->check(CLI::PositiveNumber)->capture_default_str();
  embed_train->add_option("--seed", opt.embed_train.config.seed)->capture_default_str();

  CLI::App* attack_cmd =
      app.add_subcommand("attack", "Generate adversarial variants of a dataset");
  attack_cmd->add_option("--data", opt.attack.data, "Dataset JSONL to attack")->required();
  attack_cmd->add_option("--lang", opt.lang_name, "Language")->required()->check(lang_check);
  attack_cmd->add_option("--adapter", opt.attack.adapter_spec,
                         "exec:CMD | tcp:HOST:PORT | builtin:surrogate:TRAIN.jsonl | "
                         "builtin:toy:MODEL")
      ->required();
  attack_cmd->add_option("--method", opt.method_name, "accent | random | mh")
      ->check(CLI::IsMember({"accent", "random", "mh"}))
      ->capture_default_str();
  attack_cmd->add_option("--out", opt.attack.out, "Adversarial JSONL")->required();
  attack_cmd->add_option("--embed", opt.attack.embed_path, "Embedding table file");
  attack_cmd->add_option("--vocab-data", opt.attack.vocab_data,
                         "Substitution vocabulary source (default: --data)");
  attack_cmd->add_option("--k", opt.attack.config.k, "Candidates per identifier")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  attack_cmd->add_option("--max", opt.attack.config.max_subs,
                         "Identifiers substituted per program")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  attack_cmd->add_option("--alpha", opt.attack.config.alpha)->capture_default_str();
  attack_cmd->add_option("--beta", opt.attack.config.beta)->capture_default_str();
  attack_cmd->add_option("--mh-iterations", opt.attack.config.mh_iterations)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  attack_cmd->add_option("--mh-temperature", opt.attack.config.mh_temperature)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  attack_cmd->add_option("--seed", opt.attack.config.seed)->capture_default_str();
  attack_cmd->add_option("--jobs", opt.attack.jobs, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_adapter_options(attack_cmd, &opt.attack.adapter_config);

  CLI::App* mask_cmd =
      app.add_subcommand("mask", "Mask identifiers for robust training data");
  mask_cmd->add_option("--data", opt.mask.data, "Dataset JSONL")->required();
  mask_cmd->add_option("--lang", opt.lang_name, "Language")->required()->check(lang_check);
  mask_cmd->add_option("--out", opt.mask.out, "Masked JSONL")->required();
  mask_cmd->add_option("--count", opt.mask.count, "Identifiers masked per sample")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  mask_cmd->add_option("--seed", opt.mask.seed)->capture_default_str();

  CLI::App* train_toy =
      app.add_subcommand("train-toy", "Train the builtin toy comment model");
  train_toy->add_option("--data", opt.train_toy.data, "Training JSONL")->required();
  train_toy->add_option("--lang", opt.lang_name, "Language")->required()->check(lang_check);
  train_toy->add_option("--out", opt.train_toy.out, "Model file")->required();
  train_toy->add_option("--lambda", opt.train_toy.config.lambda,
                        "Weight of the unmasked loss term (1 = no masking)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  train_toy->add_option("--count-masked", opt.train_toy.config.count_masked)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_toy->add_option("--epochs", opt.train_toy.config.epochs)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_toy->add_option("--lr", opt.train_toy.config.lr)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_toy->add_option("--seed", opt.train_toy.config.seed)->capture_default_str();
  train_toy->add_option("--curve", opt.train_toy.curve_out, "Loss curve CSV");

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Score a model on original and adversarial code");
  evaluate->add_option("--data", opt.evaluate.data, "Dataset JSONL")->required();
  evaluate->add_option("--lang", opt.lang_name, "Language")->required()->check(lang_check);
  evaluate->add_option("--adv", opt.evaluate.adv, "Adversarial JSONL")->required();
  evaluate->add_option("--adapter", opt.evaluate.adapter_spec,
                       "exec:CMD | tcp:HOST:PORT | builtin:surrogate:TRAIN.jsonl | "
                       "builtin:toy:MODEL")
      ->required();
  evaluate->add_option("--out", opt.evaluate.out, "Report JSON")->required();
  evaluate->add_option("--text", opt.evaluate.out_text, "Human-readable report file");
  add_adapter_options(evaluate, &opt.evaluate.adapter_config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    return dispatch(app, opt);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const driver::EmptyResultError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitEmpty;
  } catch (const adapter::AdapterError& e) {
    std::fprintf(stderr, "adapter error: %s\n", e.what());
    return e.kind == adapter::AdapterErrorKind::id_mismatch ? kExitIdMismatch
                                                            : kExitAdapter;
  } catch (const std::out_of_range& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIdMismatch;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const std::runtime_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return kExitUnexpected;
  }
}
