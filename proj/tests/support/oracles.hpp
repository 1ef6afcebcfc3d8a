#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ccattack/embed.hpp"
#include "ccattack/lang.hpp"
#include "ccattack/model.hpp"

// Independent reference implementations used to cross-check the library.
// Everything here is written from the metric definitions, not from the
// library code, and favors clarity over speed.
namespace ccattack::oracles {

std::vector<std::string> words_ref(const std::string& text);

double bleu_ref(const std::string& reference, const std::string& candidate);
double rouge_ref(const std::string& reference, const std::string& candidate);
double meteor_ref(const std::string& reference, const std::string& candidate);

double cosine_ref(const std::vector<double>& a, const std::vector<double>& b);

// Top-k vocabulary entries by cosine between mean-of-subtoken vectors,
// computed by full scan and explicit sort.
std::vector<std::string> candidates_ref(const embed::EmbeddingTable& table,
                                        const std::string& identifier,
                                        const std::vector<std::string>& vocab,
                                        const std::vector<std::string>& exclude,
                                        int k);

double jaccard_ref(const std::vector<std::string>& a,
                   const std::vector<std::string>& b);

// Mean NLL of one comment under the pooled-softmax model, recomputed from
// scratch per token.
double toy_nll_ref(const model::ToyModel& model,
                   const std::vector<std::string>& stream,
                   const std::vector<std::string>& comment);

// Exhaustive search over substitution maps: every subset of at most max_subs
// identifiers, every assignment of pool candidates, materialized by checked
// renames; returns the lowest reachable after-score.
struct BruteForceBest {
  double after = 0.0;
  std::size_t states = 0;  // valid (materializable) maps enumerated
};
BruteForceBest brute_force_best(
    const std::string& code, lang::Lang lang,
    const std::vector<std::string>& identifiers,
    const std::map<std::string, std::vector<std::string>>& pools, int max_subs,
    const std::function<double(const std::string&)>& after_score);

}  // namespace ccattack::oracles
