#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace ccattack::embed {

struct EmbedConfig {
  int dim = 128;
  int window = 5;     // context tokens considered on each side
  int negatives = 5;  // negative samples per positive pair
  int min_count = 2;  // tokens rarer than this are dropped from the vocab
  int epochs = 5;
  double lr = 0.05;
  std::uint64_t seed = 1;
};

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::vector<std::string> tokens, std::vector<float> data, int dim);

  int dim() const { return dim_; }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  bool contains(std::string_view token) const;
  // Row for a vocabulary token; empty span when absent.
  std::span<const float> row(std::string_view token) const;
  std::span<const float> row(std::size_t index) const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<float> data_;
  int dim_ = 0;
};

// Skip-gram with negative sampling over subtoken streams (one stream per
// program). Deterministic for a fixed config.
EmbeddingTable train_embeddings(const std::vector<std::vector<std::string>>& streams,
                                const EmbedConfig& config);

// Cosine similarity; 0 when either vector is empty or zero-norm.
double cosine(std::span<const float> a, std::span<const float> b);

// Identifier vector: mean of the rows of its in-vocabulary subtokens.
// Empty when no subtoken is in the vocabulary.
std::vector<float> identifier_embedding(const EmbeddingTable& table,
                                        std::string_view identifier);

// Program vector: mean of the rows of all in-vocabulary stream tokens.
std::vector<float> program_embedding(const EmbeddingTable& table,
                                     const std::vector<std::string>& stream);

// The k vocabulary identifiers most similar to `identifier` by cosine over
// identifier embeddings, excluding `exclude` and `identifier` itself.
// Ties break lexicographically; identifiers with no embedding are skipped.
std::vector<std::string> select_candidates(
    const EmbeddingTable& table, std::string_view identifier,
    const std::vector<std::string>& vocab,
    const std::unordered_set<std::string>& exclude, int k);

// Text format: "dim window seed" header line, then one "token v1 .. vdim"
// line per row, 9 significant digits. Byte-stable.
void save_embeddings(const EmbeddingTable& table, const EmbedConfig& config,
                     const std::string& path);
EmbeddingTable load_embeddings(const std::string& path);

}  // namespace ccattack::embed
