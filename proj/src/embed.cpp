#include "ccattack/embed.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ccattack/lang.hpp"
#include "ccattack/rng.hpp"

namespace ccattack::embed {

EmbeddingTable::EmbeddingTable(std::vector<std::string> tokens, std::vector<float> data,
                               int dim)
    : tokens_(std::move(tokens)), data_(std::move(data)), dim_(dim) {
  if (data_.size() != tokens_.size() * static_cast<std::size_t>(dim_))
    throw std::invalid_argument("embedding table shape mismatch");
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) index_.emplace(tokens_[i], i);
}

bool EmbeddingTable::contains(std::string_view token) const {
  return index_.find(std::string(token)) != index_.end();
}

std::span<const float> EmbeddingTable::row(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return {};
  return row(it->second);
}

std::span<const float> EmbeddingTable::row(std::size_t index) const {
  return {data_.data() + index * dim_, static_cast<std::size_t>(dim_)};
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

EmbeddingTable train_embeddings(const std::vector<std::vector<std::string>>& streams,
                                const EmbedConfig& config) {
  // Vocabulary: first-appearance order, tokens below min_count dropped.
  std::vector<std::string> vocab;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<long long> freq;
  {
    std::unordered_map<std::string, long long> counts;
    std::vector<std::string> order;
    for (const auto& stream : streams)
      for (const auto& tok : stream)
        if (++counts[tok] == 1) order.push_back(tok);
    for (const auto& tok : order) {
      if (counts[tok] < config.min_count) continue;
      index.emplace(tok, vocab.size());
      vocab.push_back(tok);
      freq.push_back(counts[tok]);
    }
  }
  const std::size_t v = vocab.size();
  const int dim = config.dim;
  if (v == 0) return EmbeddingTable({}, {}, dim);

  std::vector<std::vector<std::size_t>> filtered;
  long long total_words = 0;
  for (const auto& stream : streams) {
    std::vector<std::size_t> ids;
    ids.reserve(stream.size());
    for (const auto& tok : stream) {
      auto it = index.find(tok);
      if (it != index.end()) ids.push_back(it->second);
    }
    total_words += static_cast<long long>(ids.size());
    filtered.push_back(std::move(ids));
  }

  // Unigram^(3/4) cumulative table for negative sampling.
  std::vector<double> cumulative(v);
  {
    double acc = 0.0;
    for (std::size_t i = 0; i < v; ++i) {
      acc += std::pow(static_cast<double>(freq[i]), 0.75);
      cumulative[i] = acc;
    }
  }
  Rng rng(config.seed);
  auto sample_negative = [&]() -> std::size_t {
    double u = rng.real() * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return std::min<std::size_t>(it - cumulative.begin(), v - 1);
  };

  std::vector<float> center(v * dim);
  std::vector<float> context(v * dim, 0.0f);
  for (auto& x : center)
    x = static_cast<float>((rng.real() - 0.5) / dim);

  const double total_steps =
      std::max(1.0, static_cast<double>(total_words) * config.epochs);
  long long processed = 0;
  std::vector<double> grad_center(dim);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& ids : filtered) {
      const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(ids.size());
      for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double lr =
            config.lr * std::max(1e-4, 1.0 - static_cast<double>(processed) / total_steps);
        ++processed;
        const std::size_t w = ids[i];
        float* vw = center.data() + w * dim;
        for (std::ptrdiff_t j = i - config.window; j <= i + config.window; ++j) {
          if (j == i || j < 0 || j >= n) continue;
          const std::size_t target = ids[j];
          std::fill(grad_center.begin(), grad_center.end(), 0.0);
          for (int neg = 0; neg <= config.negatives; ++neg) {
            std::size_t out;
            double label;
            if (neg == 0) {
              out = target;
              label = 1.0;
            } else {
              out = sample_negative();
              if (out == target) continue;
              label = 0.0;
            }
            float* uo = context.data() + out * dim;
            double dot = 0.0;
            for (int d = 0; d < dim; ++d) dot += vw[d] * uo[d];
            const double g = (label - sigmoid(dot)) * lr;
            for (int d = 0; d < dim; ++d) {
              grad_center[d] += g * uo[d];
              uo[d] += static_cast<float>(g * vw[d]);
            }
          }
          for (int d = 0; d < dim; ++d) vw[d] += static_cast<float>(grad_center[d]);
        }
      }
    }
  }
  return EmbeddingTable(std::move(vocab), std::move(center), dim);
}

double cosine(std::span<const float> a, std::span<const float> b) {
  if (a.empty() || b.empty() || a.size() != b.size()) return 0.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace {

std::vector<float> mean_rows(const EmbeddingTable& table,
                             const std::vector<std::string>& tokens) {
  std::vector<double> acc(table.dim(), 0.0);
  std::size_t hits = 0;
  for (const auto& tok : tokens) {
    std::span<const float> r = table.row(tok);
    if (r.empty()) continue;
    ++hits;
    for (int d = 0; d < table.dim(); ++d) acc[d] += r[d];
  }
  if (hits == 0) return {};
  std::vector<float> out(table.dim());
  for (int d = 0; d < table.dim(); ++d)
    out[d] = static_cast<float>(acc[d] / static_cast<double>(hits));
  return out;
}

}  // namespace

std::vector<float> identifier_embedding(const EmbeddingTable& table,
                                        std::string_view identifier) {
  return mean_rows(table, lang::split_subtokens(identifier));
}

std::vector<float> program_embedding(const EmbeddingTable& table,
                                     const std::vector<std::string>& stream) {
  return mean_rows(table, stream);
}

std::vector<std::string> select_candidates(
    const EmbeddingTable& table, std::string_view identifier,
    const std::vector<std::string>& vocab,
    const std::unordered_set<std::string>& exclude, int k) {
  if (k <= 0) return {};
  std::vector<float> anchor = identifier_embedding(table, identifier);
  if (anchor.empty()) return {};
  std::vector<std::pair<double, const std::string*>> scored;
  for (const std::string& cand : vocab) {
    if (cand == identifier || exclude.count(cand)) continue;
    std::vector<float> emb = identifier_embedding(table, cand);
    if (emb.empty()) continue;
    scored.emplace_back(cosine(anchor, emb), &cand);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return *a.second < *b.second;
  });
  std::vector<std::string> out;
  out.reserve(std::min<std::size_t>(k, scored.size()));
  for (const auto& [c, tok] : scored) {
    if (out.size() == static_cast<std::size_t>(k)) break;
    out.push_back(*tok);
  }
  return out;
}

void save_embeddings(const EmbeddingTable& table, const EmbedConfig& config,
                     const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << table.dim() << ' ' << config.window << ' ' << config.seed << '\n';
  char buf[32];
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.tokens()[i];
    for (float x : table.row(i)) {
      std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(x));
      out << ' ' << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

EmbeddingTable load_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error(path + ": empty file");
  std::istringstream hs(header);
  int dim = 0, window = 0;
  std::uint64_t seed = 0;
  if (!(hs >> dim >> window >> seed) || dim <= 0)
    throw std::runtime_error(path + ": bad header");
  std::vector<std::string> tokens;
  std::vector<float> data;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) throw std::runtime_error(path + ": bad row");
    for (int d = 0; d < dim; ++d) {
      float x;
      if (!(ls >> x))
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": short row");
      data.push_back(x);
    }
    tokens.push_back(std::move(tok));
  }
  return EmbeddingTable(std::move(tokens), std::move(data), dim);
}

}  // namespace ccattack::embed
