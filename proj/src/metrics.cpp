#include "ccattack/metrics.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <unordered_map>

namespace ccattack::metrics {

namespace {

constexpr int kMaxOrder = 4;
constexpr double kRougeBeta2 = 1.2;

using Counts = std::unordered_map<std::string, int>;

// n-grams joined with an unprintable separator so counts can live in one map.
Counts ngram_counts(const std::vector<std::string>& tokens, int n) {
  Counts counts;
  if (tokens.size() < static_cast<std::size_t>(n)) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (int j = 1; j < n; ++j) {
      key += '\x1f';
      key += tokens[i + j];
    }
    ++counts[key];
  }
  return counts;
}

struct BleuStats {
  std::array<long long, kMaxOrder> matched{};
  std::array<long long, kMaxOrder> total{};
  long long ref_len = 0;
  long long cand_len = 0;

  void add(const std::vector<std::string>& ref, const std::vector<std::string>& cand) {
    ref_len += static_cast<long long>(ref.size());
    cand_len += static_cast<long long>(cand.size());
    for (int n = 1; n <= kMaxOrder; ++n) {
      if (cand.size() < static_cast<std::size_t>(n)) continue;
      total[n - 1] += static_cast<long long>(cand.size()) - n + 1;
      Counts rc = ngram_counts(ref, n);
      for (const auto& [key, count] : ngram_counts(cand, n)) {
        auto it = rc.find(key);
        if (it != rc.end()) matched[n - 1] += std::min(count, it->second);
      }
    }
  }

  double combine() const {
    if (cand_len == 0 || ref_len == 0) return 0.0;
    if (total[0] == 0 || matched[0] == 0) return 0.0;
    double log_sum = std::log(static_cast<double>(matched[0]) / total[0]);
    for (int n = 2; n <= kMaxOrder; ++n) {
      if (total[n - 1] == 0) continue;  // log(1) from the smoothed convention
      log_sum += std::log((matched[n - 1] + 1.0) / (total[n - 1] + 1.0));
    }
    log_sum /= kMaxOrder;
    double bp = cand_len >= ref_len
                    ? 1.0
                    : std::exp(1.0 - static_cast<double>(ref_len) / cand_len);
    return 100.0 * bp * std::exp(log_sum);
  }
};

}  // namespace

std::vector<std::string> tokenize_text(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    while (!cur.empty() && std::ispunct(static_cast<unsigned char>(cur.back())))
      cur.pop_back();
    if (!cur.empty()) out.push_back(cur);
    cur.clear();
  };
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
      continue;
    }
    cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  flush();
  return out;
}

double bleu(const std::string& reference, const std::string& candidate) {
  BleuStats stats;
  stats.add(tokenize_text(reference), tokenize_text(candidate));
  return stats.combine();
}

double corpus_bleu(const std::vector<std::pair<std::string, std::string>>& ref_cand) {
  BleuStats stats;
  for (const auto& [ref, cand] : ref_cand)
    stats.add(tokenize_text(ref), tokenize_text(cand));
  return stats.combine();
}

double rouge_l(const std::string& reference, const std::string& candidate) {
  std::vector<std::string> r = tokenize_text(reference);
  std::vector<std::string> c = tokenize_text(candidate);
  if (r.empty() || c.empty()) return 0.0;
  const std::size_t nr = r.size(), nc = c.size();
  std::vector<std::size_t> prev(nc + 1, 0), cur(nc + 1, 0);
  for (std::size_t i = 1; i <= nr; ++i) {
    for (std::size_t j = 1; j <= nc; ++j) {
      cur[j] = r[i - 1] == c[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  const double lcs = static_cast<double>(prev[nc]);
  if (lcs == 0.0) return 0.0;
  const double recall = lcs / nr;
  const double precision = lcs / nc;
  return 100.0 * (1.0 + kRougeBeta2) * recall * precision /
         (recall + kRougeBeta2 * precision);
}

double meteor_lite(const std::string& reference, const std::string& candidate) {
  std::vector<std::string> r = tokenize_text(reference);
  std::vector<std::string> c = tokenize_text(candidate);
  if (r.empty() || c.empty()) return 0.0;
  std::vector<bool> ref_used(r.size(), false);
  // match[i] = index of the reference token aligned to candidate token i.
  std::vector<std::ptrdiff_t> match(c.size(), -1);
  std::size_t matches = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (!ref_used[j] && r[j] == c[i]) {
        ref_used[j] = true;
        match[i] = static_cast<std::ptrdiff_t>(j);
        ++matches;
        break;
      }
    }
  }
  if (matches == 0) return 0.0;
  const double precision = static_cast<double>(matches) / c.size();
  const double recall = static_cast<double>(matches) / r.size();
  const double fmean = 10.0 * precision * recall / (recall + 9.0 * precision);
  std::size_t chunks = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (match[i] < 0) continue;
    bool continues = i > 0 && match[i - 1] >= 0 && match[i] == match[i - 1] + 1;
    if (!continues) ++chunks;
  }
  const double frag = static_cast<double>(chunks) / matches;
  const double penalty = 0.5 * frag * frag * frag;
  return 100.0 * fmean * (1.0 - penalty);
}

Degradation relative_degradation(double before, double after) {
  if (before <= 0.0) return {0.0, true};
  return {100.0 * (before - after) / before, false};
}

double valid_rate(std::size_t valid, std::size_t total) {
  if (total == 0) return 0.0;
  return 100.0 * static_cast<double>(valid) / static_cast<double>(total);
}

double success_rate(double relative_degradation_pct, double valid_rate_pct) {
  return relative_degradation_pct * valid_rate_pct / 100.0;
}

}  // namespace ccattack::metrics
