#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccattack/adapter.hpp"
#include "ccattack/corpus.hpp"
#include "ccattack/embed.hpp"
#include "ccattack/rng.hpp"

namespace ccattack::attack {

enum class Method { accent, random_sub, mh };

Method method_from_string(std::string_view name);  // "accent" | "random" | "mh"
std::string_view to_string(Method method);

struct AttackConfig {
  int k = 5;         // candidate identifiers per attacked identifier
  int max_subs = 2;  // identifiers substituted per program
  double alpha = 0.5;
  double beta = 0.5;
  int mh_iterations = 100;
  double mh_temperature = 0.05;
  std::uint64_t seed = 1;
};

struct AttackResult {
  corpus::AdversarialSample sample;
  bool valid = false;
  std::size_t queries = 0;   // adapter requests spent on this sample
  double score_before = 0.0; // BLEU of the model comment on the original
  double score_after = 0.0;  // BLEU of the model comment on the adversarial
};

// BLEU of the adapter's comment for `code` against the reference.
double score(adapter::ModelAdapter& model, const std::string& code,
             const std::string& reference);

// Combination score of saliency S and score drop delta: S * delta when both
// are nonzero, S * beta when only the drop is zero, delta * alpha when only
// the saliency is zero, 0 when both are. Magnitudes below 1e-12 count as zero.
double h_score(double saliency, double delta, double alpha, double beta);

// Declared identifiers of every program, first appearance order, deduplicated.
std::vector<std::string> collect_identifier_vocab(const corpus::Dataset& data);
// Every identifier and keyword token text; the unfiltered pool used by the
// random baseline.
std::vector<std::string> collect_raw_token_vocab(const corpus::Dataset& data);

// Greedy two-stage attack: rank identifiers by h_score of saliency and
// per-identifier best score drop, then apply the top max_subs substitutions.
AttackResult accent_attack(const corpus::Sample& sample, lang::Lang lang,
                           const embed::EmbeddingTable& table,
                           const std::vector<std::string>& vocab,
                           adapter::ModelAdapter& model, const AttackConfig& config,
                           Rng& rng);

// Uniform identifier choice, uniform replacement from the raw vocabulary,
// no checks; the replacement may break the program.
AttackResult random_attack(const corpus::Sample& sample, lang::Lang lang,
                           const std::vector<std::string>& vocab,
                           adapter::ModelAdapter& model, const AttackConfig& config,
                           Rng& rng);

// Metropolis-Hastings over substitution maps: proposals replace, insert or
// revert one substitution; stationary density exp(-score/T); returns the
// best-scoring state visited.
AttackResult mh_attack(const corpus::Sample& sample, lang::Lang lang,
                       const embed::EmbeddingTable& table,
                       const std::vector<std::string>& vocab,
                       adapter::ModelAdapter& model, const AttackConfig& config,
                       Rng& rng);

AttackResult run_attack(Method method, const corpus::Sample& sample, lang::Lang lang,
                        const embed::EmbeddingTable& table,
                        const std::vector<std::string>& vocab,
                        const std::vector<std::string>& raw_vocab,
                        adapter::ModelAdapter& model, const AttackConfig& config);

}  // namespace ccattack::attack
