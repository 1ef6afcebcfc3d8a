#include "ccattack/report.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "ccattack/metrics.hpp"

namespace ccattack::report {

Report build_report(const corpus::Dataset& data,
                    const std::vector<corpus::AdversarialSample>& adv,
                    adapter::ModelAdapter& model) {
  std::map<std::string, const corpus::Sample*> by_id;
  for (const corpus::Sample& s : data.samples) by_id.emplace(s.id, &s);

  Report report;
  std::vector<std::pair<std::string, std::string>> before_pairs, after_pairs;
  double rouge_b = 0.0, rouge_a = 0.0, meteor_b = 0.0, meteor_a = 0.0;
  std::size_t valid_count = 0;

  for (const corpus::AdversarialSample& a : adv) {
    auto it = by_id.find(a.original_id);
    if (it == by_id.end())
      throw std::out_of_range("adversarial sample references unknown id: " +
                              a.original_id);
    const corpus::Sample& s = *it->second;

    Row row;
    row.id = a.original_id;
    std::string comment_before = model.query(s.code);
    std::string comment_after = model.query(a.adv_code);
    row.queries = 2;
    row.bleu_before = metrics::bleu(s.comment, comment_before);
    row.bleu_after = metrics::bleu(s.comment, comment_after);
    row.rouge_l_before = metrics::rouge_l(s.comment, comment_before);
    row.rouge_l_after = metrics::rouge_l(s.comment, comment_after);
    row.meteor_before = metrics::meteor_lite(s.comment, comment_before);
    row.meteor_after = metrics::meteor_lite(s.comment, comment_after);
    row.valid = lang::validate(a.adv_code, data.lang);
    row.degenerate = row.bleu_before <= 0.0;

    before_pairs.emplace_back(s.comment, comment_before);
    after_pairs.emplace_back(s.comment, comment_after);
    rouge_b += row.rouge_l_before;
    rouge_a += row.rouge_l_after;
    meteor_b += row.meteor_before;
    meteor_a += row.meteor_after;
    if (row.valid) ++valid_count;
    report.rows.push_back(std::move(row));
  }

  const std::size_t n = report.rows.size();
  if (n == 0) return report;
  report.corpus_bleu_before = metrics::corpus_bleu(before_pairs);
  report.corpus_bleu_after = metrics::corpus_bleu(after_pairs);
  report.mean_rouge_l_before = rouge_b / n;
  report.mean_rouge_l_after = rouge_a / n;
  report.mean_meteor_before = meteor_b / n;
  report.mean_meteor_after = meteor_a / n;
  metrics::Degradation deg =
      metrics::relative_degradation(report.corpus_bleu_before, report.corpus_bleu_after);
  report.relative_degradation = deg.value;
  report.degenerate = deg.degenerate;
  report.valid_rate = metrics::valid_rate(valid_count, n);
  report.success_rate = metrics::success_rate(report.relative_degradation,
                                              report.valid_rate);
  return report;
}

nlohmann::json report_to_json(const Report& report, const nlohmann::json& run_config) {
  nlohmann::json rows = nlohmann::json::array();
  for (const Row& r : report.rows) {
    rows.push_back({
        {"id", r.id},
        {"bleu_before", r.bleu_before},
        {"bleu_after", r.bleu_after},
        {"rouge_l_before", r.rouge_l_before},
        {"rouge_l_after", r.rouge_l_after},
        {"meteor_before", r.meteor_before},
        {"meteor_after", r.meteor_after},
        {"valid", r.valid},
        {"degenerate", r.degenerate},
        {"queries", r.queries},
    });
  }
  nlohmann::json summary = {
      {"samples", report.rows.size()},
      {"corpus_bleu_before", report.corpus_bleu_before},
      {"corpus_bleu_after", report.corpus_bleu_after},
      {"mean_rouge_l_before", report.mean_rouge_l_before},
      {"mean_rouge_l_after", report.mean_rouge_l_after},
      {"mean_meteor_before", report.mean_meteor_before},
      {"mean_meteor_after", report.mean_meteor_after},
      {"relative_degradation", report.relative_degradation},
      {"degenerate", report.degenerate},
      {"valid_rate", report.valid_rate},
      {"success_rate", report.success_rate},
  };
  return nlohmann::json{
      {"config", run_config},
      {"rows", std::move(rows)},
      {"summary", std::move(summary)},
  };
}

std::string report_to_text(const Report& report) {
  char buf[256];
  std::string out;
  out += "id                bleu_b   bleu_a  rouge_b  rouge_a meteor_b meteor_a "
         "valid\n";
  for (const Row& r : report.rows) {
    std::snprintf(buf, sizeof(buf), "%-16s %8.2f %8.2f %8.2f %8.2f %8.2f %8.2f %5s\n",
                  r.id.c_str(), r.bleu_before, r.bleu_after, r.rouge_l_before,
                  r.rouge_l_after, r.meteor_before, r.meteor_after,
                  r.valid ? "yes" : "no");
    out += buf;
  }
  std::snprintf(buf, sizeof(buf),
                "\nsamples: %zu\ncorpus BLEU before/after: %.2f / %.2f\n",
                report.rows.size(), report.corpus_bleu_before,
                report.corpus_bleu_after);
  out += buf;
  std::snprintf(buf, sizeof(buf),
                "relative degradation: %.2f%%%s\nvalid rate: %.2f%%\nsuccess rate: "
                "%.2f%%\n",
                report.relative_degradation,
                report.degenerate ? " (degenerate: baseline BLEU is 0)" : "",
                report.valid_rate, report.success_rate);
  out += buf;
  return out;
}

}  // namespace ccattack::report
