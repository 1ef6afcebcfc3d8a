#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ccattack::metrics {

// Comment tokenization shared by every text metric: lowercase, split on
// whitespace, strip trailing punctuation from each token, drop empties.
std::vector<std::string> tokenize_text(std::string_view text);

// Smoothed sentence BLEU-4 on a 0-100 scale. Higher-order precisions use
// add-one smoothing; unigram precision is left unsmoothed so disjoint
// sentences score 0. Orders with no candidate n-grams contribute factor 1.
// Empty reference or candidate scores 0; never throws.
double bleu(const std::string& reference, const std::string& candidate);

// Corpus-level BLEU-4: n-gram and length statistics pooled over all pairs
// before combining, add-one smoothing on orders > 1.
double corpus_bleu(const std::vector<std::pair<std::string, std::string>>& ref_cand);

// ROUGE-L F-measure (beta^2 = 1.2), 0-100.
double rouge_l(const std::string& reference, const std::string& candidate);

// Exact-match METEOR: greedy left-to-right alignment to the earliest
// unmatched reference token, Fmean = 10PR/(R+9P), fragmentation penalty
// 0.5 * (chunks/matches)^3. 0-100.
double meteor_lite(const std::string& reference, const std::string& candidate);

struct Degradation {
  double value = 0.0;     // percent drop relative to the pre-attack score
  bool degenerate = false;  // pre-attack score was 0; value forced to 0
};

// Relative degradation in percent: 100 * (before - after) / before.
Degradation relative_degradation(double before, double after);

// Percent of adversarial programs that still pass the validity check.
double valid_rate(std::size_t valid, std::size_t total);

// Overall success: degradation weighted by validity, in percent
// (r_d and v_r are both percentages, so s_r = r_d * v_r / 100).
double success_rate(double relative_degradation_pct, double valid_rate_pct);

}  // namespace ccattack::metrics
