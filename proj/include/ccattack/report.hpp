#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ccattack/adapter.hpp"
#include "ccattack/corpus.hpp"

namespace ccattack::report {

struct Row {
  std::string id;
  double bleu_before = 0.0, bleu_after = 0.0;
  double rouge_l_before = 0.0, rouge_l_after = 0.0;
  double meteor_before = 0.0, meteor_after = 0.0;
  bool valid = false;
  bool degenerate = false;  // per-sample pre-attack BLEU was 0
  std::size_t queries = 0;  // adapter requests spent evaluating this row
};

struct Report {
  std::vector<Row> rows;
  double corpus_bleu_before = 0.0, corpus_bleu_after = 0.0;
  double mean_rouge_l_before = 0.0, mean_rouge_l_after = 0.0;
  double mean_meteor_before = 0.0, mean_meteor_after = 0.0;
  double relative_degradation = 0.0;  // percent, from corpus BLEU
  bool degenerate = false;            // corpus pre-attack BLEU was 0
  double valid_rate = 0.0;            // percent
  double success_rate = 0.0;          // percent
};

// Queries the model for the original and adversarial comment of every
// adversarial sample and scores both against the dataset reference. Validity
// is recomputed from adv_code. Throws std::out_of_range when an original_id
// has no dataset sample.
Report build_report(const corpus::Dataset& data,
                    const std::vector<corpus::AdversarialSample>& adv,
                    adapter::ModelAdapter& model);

// Sorted-key JSON with the full run configuration echoed under "config".
nlohmann::json report_to_json(const Report& report, const nlohmann::json& run_config);
std::string report_to_text(const Report& report);

}  // namespace ccattack::report
