#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ccattack/corpus.hpp"
#include "ccattack/lang.hpp"
#include "ccattack/rng.hpp"

namespace ccattack::model {

inline constexpr std::string_view kMaskToken = "<unk>";
inline constexpr std::string_view kOovComment = "<oov>";

// Replaces min(count, #identifiers) uniformly chosen declared identifiers
// with the mask token, every occurrence each. Masked names may collide; the
// result still passes the validity check.
std::string mask_identifiers(const std::string& code, lang::Lang lang, int count,
                             Rng& rng);

// Retrieval model: returns the training comment whose code subtoken multiset
// has the highest Jaccard overlap with the query (ties: lowest entry index).
class SurrogateModel {
 public:
  explicit SurrogateModel(const corpus::Dataset& train);
  std::string predict(const std::string& code) const;

 private:
  struct Entry {
    std::vector<std::pair<std::string, int>> counts;  // sorted by token
    std::size_t total = 0;
    std::string comment;
  };
  std::vector<Entry> entries_;
  lang::Lang lang_;
};

// Conditionally-unigram comment model: theta has one row per code-vocabulary
// subtoken and one column per comment-vocabulary token; mean-pooled code rows
// go through a softmax over comment tokens. Unknown code subtokens share the
// mask row, which is what masked training exploits.
struct ToyModel {
  lang::Lang lang = lang::Lang::java;
  std::vector<std::string> code_vocab;     // mask token is the final row
  std::vector<std::string> comment_vocab;  // oov token is the final column
  std::vector<double> theta;               // row-major code_vocab x comment_vocab

  std::size_t rows() const { return code_vocab.size(); }
  std::size_t cols() const { return comment_vocab.size(); }
};

ToyModel make_toy_model(const corpus::Dataset& train);

// Mean NLL of the comments given the code streams, with theta as-is.
double toy_loss(const ToyModel& model, const std::vector<std::vector<std::string>>& streams,
                const std::vector<std::vector<std::string>>& comments);

struct MaskedTrainConfig {
  double lambda = 0.5;    // weight of the unmasked term in the objective
  int count_masked = 2;   // identifiers masked per sample
  int epochs = 100;
  double lr = 0.1;
  std::uint64_t seed = 7;
};

struct EpochLoss {
  double combined = 0.0;
  double origin = 0.0;
  double masked = 0.0;
};

// Full-batch gradient descent on lambda * L_origin + (1 - lambda) * L_masked.
// Masks are redrawn every epoch. Losses are recorded at the start of each
// epoch, before that epoch's update. With lambda = 1 the masked term has
// weight zero and the run reproduces plain training bit for bit.
std::vector<EpochLoss> train_toy(ToyModel& model, const corpus::Dataset& train,
                                 const MaskedTrainConfig& config);

// The `length` most probable comment tokens for this code, joined by spaces.
// Ties resolve in vocabulary order.
std::string toy_generate(const ToyModel& model, const std::string& code, int length);

void save_toy(const ToyModel& model, const std::string& path);
ToyModel load_toy(const std::string& path);

std::string loss_curve_csv(const std::vector<EpochLoss>& curve);

}  // namespace ccattack::model
