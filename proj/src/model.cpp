#include "ccattack/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "ccattack/metrics.hpp"

namespace ccattack::model {

std::string mask_identifiers(const std::string& code, lang::Lang lang, int count,
                             Rng& rng) {
  std::vector<lang::IdentifierInfo> ids = lang::extract_identifiers(code, lang);
  if (ids.empty() || count <= 0) return code;
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  const std::size_t take = std::min<std::size_t>(count, ids.size());
  order.resize(take);
  std::sort(order.begin(), order.end());  // mask in declaration order
  std::string out = code;
  for (std::size_t i : order)
    out = lang::rename_unchecked(out, ids[i].name, std::string(kMaskToken), lang);
  return out;
}

// --- Surrogate -------------------------------------------------------------

namespace {

std::vector<std::pair<std::string, int>> sorted_counts(
    const std::vector<std::string>& stream) {
  std::map<std::string, int> counts;
  for (const auto& tok : stream) ++counts[tok];
  return {counts.begin(), counts.end()};
}

// Multiset Jaccard: sum of min counts over sum of max counts.
double multiset_jaccard(const std::vector<std::pair<std::string, int>>& a,
                        const std::vector<std::pair<std::string, int>>& b) {
  std::size_t i = 0, j = 0;
  long long min_sum = 0, max_sum = 0;
  while (i < a.size() && j < b.size()) {
    int cmp = a[i].first.compare(b[j].first);
    if (cmp < 0) {
      max_sum += a[i++].second;
    } else if (cmp > 0) {
      max_sum += b[j++].second;
    } else {
      min_sum += std::min(a[i].second, b[j].second);
      max_sum += std::max(a[i].second, b[j].second);
      ++i;
      ++j;
    }
  }
  for (; i < a.size(); ++i) max_sum += a[i].second;
  for (; j < b.size(); ++j) max_sum += b[j].second;
  if (max_sum == 0) return 1.0;
  return static_cast<double>(min_sum) / static_cast<double>(max_sum);
}

}  // namespace

SurrogateModel::SurrogateModel(const corpus::Dataset& train) : lang_(train.lang) {
  entries_.reserve(train.samples.size());
  for (const corpus::Sample& s : train.samples) {
    Entry e;
    std::vector<std::string> stream = lang::subtoken_stream(s.code, lang_);
    e.counts = sorted_counts(stream);
    e.total = stream.size();
    e.comment = s.comment;
    entries_.push_back(std::move(e));
  }
}

std::string SurrogateModel::predict(const std::string& code) const {
  if (entries_.empty()) return "";
  std::vector<std::pair<std::string, int>> query;
  try {
    query = sorted_counts(lang::subtoken_stream(code, lang_));
  } catch (const lang::LexError&) {
    return "";  // unlexable adversarial input
  }
  double best = -1.0;
  std::size_t best_index = 0;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    double sim = multiset_jaccard(query, entries_[i].counts);
    if (sim > best) {
      best = sim;
      best_index = i;
    }
  }
  return entries_[best_index].comment;
}

// --- Toy model --------------------------------------------------------------

ToyModel make_toy_model(const corpus::Dataset& train) {
  ToyModel model;
  model.lang = train.lang;
  std::unordered_map<std::string, std::size_t> code_seen, comment_seen;
  for (const corpus::Sample& s : train.samples) {
    for (const auto& tok : lang::subtoken_stream(s.code, train.lang))
      if (code_seen.emplace(tok, model.code_vocab.size()).second)
        model.code_vocab.push_back(tok);
    for (const auto& tok : metrics::tokenize_text(s.comment))
      if (comment_seen.emplace(tok, model.comment_vocab.size()).second)
        model.comment_vocab.push_back(tok);
  }
  if (!code_seen.count(std::string(kMaskToken)))
    model.code_vocab.emplace_back(kMaskToken);
  model.comment_vocab.emplace_back(kOovComment);
  model.theta.assign(model.rows() * model.cols(), 0.0);
  return model;
}

namespace {

struct SampleView {
  // (row, count) pairs for the code stream, total stream length.
  std::vector<std::pair<std::size_t, double>> row_counts;
  std::size_t stream_len = 0;
  // (col, count) pairs for the comment, total comment length.
  std::vector<std::pair<std::size_t, double>> col_counts;
  std::size_t comment_len = 0;
};

std::size_t code_row(const ToyModel& model,
                     const std::unordered_map<std::string, std::size_t>& index,
                     const std::string& tok) {
  auto it = index.find(tok);
  return it == index.end() ? model.rows() - 1 : it->second;  // mask row
}

SampleView make_view(const ToyModel& model,
                     const std::unordered_map<std::string, std::size_t>& code_index,
                     const std::unordered_map<std::string, std::size_t>& comment_index,
                     const std::vector<std::string>& stream,
                     const std::vector<std::string>& comment) {
  SampleView view;
  std::map<std::size_t, double> rows, cols;
  for (const auto& tok : stream) ++rows[code_row(model, code_index, tok)];
  for (const auto& tok : comment) {
    auto it = comment_index.find(tok);
    ++cols[it == comment_index.end() ? model.cols() - 1 : it->second];  // oov col
  }
  view.row_counts = {rows.begin(), rows.end()};
  view.col_counts = {cols.begin(), cols.end()};
  view.stream_len = stream.size();
  view.comment_len = comment.size();
  return view;
}

// Pooled logits -> log-softmax; returns per-column probabilities and fills
// the sample's NLL.
std::vector<double> forward(const ToyModel& model, const SampleView& view,
                            double* nll_out) {
  const std::size_t cols = model.cols();
  std::vector<double> z(cols, 0.0);
  for (const auto& [row, count] : view.row_counts) {
    const double w = count / static_cast<double>(view.stream_len);
    const double* theta_row = model.theta.data() + row * cols;
    for (std::size_t j = 0; j < cols; ++j) z[j] += w * theta_row[j];
  }
  const double zmax = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (std::size_t j = 0; j < cols; ++j) sum += std::exp(z[j] - zmax);
  const double log_sum = std::log(sum) + zmax;
  if (nll_out) {
    double nll = 0.0;
    for (const auto& [col, count] : view.col_counts)
      nll += count * (log_sum - z[col]);
    *nll_out = nll / static_cast<double>(view.comment_len);
  }
  std::vector<double> p(cols);
  for (std::size_t j = 0; j < cols; ++j) p[j] = std::exp(z[j] - log_sum);
  return p;
}

// grad[i][j] += weight * (n_i / n) * (p_j - q_j); the analytic gradient of the
// mean NLL of a conditionally-unigram softmax over mean-pooled rows.
void accumulate_grad(const ToyModel& model, const SampleView& view,
                     const std::vector<double>& p, double weight,
                     std::vector<double>& grad) {
  const std::size_t cols = model.cols();
  std::vector<double> diff(p);
  for (const auto& [col, count] : view.col_counts)
    diff[col] -= count / static_cast<double>(view.comment_len);
  for (const auto& [row, count] : view.row_counts) {
    const double w = weight * count / static_cast<double>(view.stream_len);
    double* grad_row = grad.data() + row * cols;
    for (std::size_t j = 0; j < cols; ++j) grad_row[j] += w * diff[j];
  }
}

double batch_pass(const ToyModel& model, const std::vector<SampleView>& views,
                  double weight, std::vector<double>* grad) {
  double loss = 0.0;
  std::size_t counted = 0;
  for (const SampleView& view : views) {
    if (view.stream_len == 0 || view.comment_len == 0) continue;
    double nll = 0.0;
    std::vector<double> p = forward(model, view, &nll);
    loss += nll;
    ++counted;
    if (grad) accumulate_grad(model, view, p, weight, *grad);
  }
  if (counted == 0) return 0.0;
  return loss / static_cast<double>(counted);
}

}  // namespace

double toy_loss(const ToyModel& model, const std::vector<std::vector<std::string>>& streams,
                const std::vector<std::vector<std::string>>& comments) {
  std::unordered_map<std::string, std::size_t> code_index, comment_index;
  for (std::size_t i = 0; i < model.code_vocab.size(); ++i)
    code_index.emplace(model.code_vocab[i], i);
  for (std::size_t i = 0; i < model.comment_vocab.size(); ++i)
    comment_index.emplace(model.comment_vocab[i], i);
  std::vector<SampleView> views;
  for (std::size_t i = 0; i < streams.size(); ++i)
    views.push_back(make_view(model, code_index, comment_index, streams[i], comments[i]));
  return batch_pass(model, views, 0.0, nullptr);
}

std::vector<EpochLoss> train_toy(ToyModel& model, const corpus::Dataset& train,
                                 const MaskedTrainConfig& config) {
  std::unordered_map<std::string, std::size_t> code_index, comment_index;
  for (std::size_t i = 0; i < model.code_vocab.size(); ++i)
    code_index.emplace(model.code_vocab[i], i);
  for (std::size_t i = 0; i < model.comment_vocab.size(); ++i)
    comment_index.emplace(model.comment_vocab[i], i);

  std::vector<std::vector<std::string>> comments;
  std::vector<SampleView> origin_views;
  for (const corpus::Sample& s : train.samples) {
    comments.push_back(metrics::tokenize_text(s.comment));
    origin_views.push_back(make_view(model, code_index, comment_index,
                                     lang::subtoken_stream(s.code, train.lang),
                                     comments.back()));
  }
  const std::size_t n_samples = train.samples.size();
  const bool use_masked = config.lambda < 1.0;

  std::vector<EpochLoss> curve;
  std::vector<double> grad(model.theta.size());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<SampleView> masked_views;
    if (use_masked) {
      masked_views.reserve(n_samples);
      for (std::size_t i = 0; i < n_samples; ++i) {
        const corpus::Sample& s = train.samples[i];
        Rng rng(Rng::derive(config.seed, s.id + "#" + std::to_string(epoch)));
        std::string masked =
            mask_identifiers(s.code, train.lang, config.count_masked, rng);
        masked_views.push_back(make_view(model, code_index, comment_index,
                                         lang::subtoken_stream(masked, train.lang),
                                         comments[i]));
      }
    }

    std::fill(grad.begin(), grad.end(), 0.0);
    EpochLoss losses;
    losses.origin = batch_pass(model, origin_views, config.lambda, &grad);
    if (use_masked)
      losses.masked = batch_pass(model, masked_views, 1.0 - config.lambda, &grad);
    losses.combined = config.lambda * losses.origin +
                      (use_masked ? (1.0 - config.lambda) * losses.masked : 0.0);
    curve.push_back(losses);

    std::size_t counted = 0;
    for (const SampleView& v : origin_views)
      if (v.stream_len > 0 && v.comment_len > 0) ++counted;
    if (counted == 0) break;
    const double scale = config.lr / static_cast<double>(counted);
    for (std::size_t i = 0; i < model.theta.size(); ++i)
      model.theta[i] -= scale * grad[i];
  }
  return curve;
}

std::string toy_generate(const ToyModel& model, const std::string& code, int length) {
  std::unordered_map<std::string, std::size_t> code_index, comment_index;
  for (std::size_t i = 0; i < model.code_vocab.size(); ++i)
    code_index.emplace(model.code_vocab[i], i);
  std::vector<std::string> stream;
  try {
    stream = lang::subtoken_stream(code, model.lang);
  } catch (const lang::LexError&) {
    return "";
  }
  if (stream.empty() || model.cols() == 0) return "";
  SampleView view;
  std::map<std::size_t, double> rows;
  for (const auto& tok : stream) ++rows[code_row(model, code_index, tok)];
  view.row_counts = {rows.begin(), rows.end()};
  view.stream_len = stream.size();
  view.comment_len = 1;  // unused by forward when nll_out is null
  std::vector<double> p = forward(model, view, nullptr);
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
  std::string out;
  const std::size_t take = std::min<std::size_t>(std::max(length, 0), order.size());
  for (std::size_t i = 0; i < take; ++i) {
    if (!out.empty()) out += ' ';
    out += model.comment_vocab[order[i]];
  }
  return out;
}

void save_toy(const ToyModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "toy-model " << lang::to_string(model.lang) << ' ' << model.rows() << ' '
      << model.cols() << '\n';
  for (std::size_t j = 0; j < model.cols(); ++j) {
    if (j) out << ' ';
    out << model.comment_vocab[j];
  }
  out << '\n';
  char buf[40];
  for (std::size_t i = 0; i < model.rows(); ++i) {
    out << model.code_vocab[i];
    const double* row = model.theta.data() + i * model.cols();
    for (std::size_t j = 0; j < model.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
      out << ' ' << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

ToyModel load_toy(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string magic, lang_name;
  std::size_t rows = 0, cols = 0;
  if (!(in >> magic >> lang_name >> rows >> cols) || magic != "toy-model")
    throw std::runtime_error(path + ": not a toy model file");
  ToyModel model;
  model.lang = lang::lang_from_string(lang_name);
  model.comment_vocab.resize(cols);
  for (std::size_t j = 0; j < cols; ++j)
    if (!(in >> model.comment_vocab[j]))
      throw std::runtime_error(path + ": truncated comment vocabulary");
  model.code_vocab.resize(rows);
  model.theta.resize(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!(in >> model.code_vocab[i]))
      throw std::runtime_error(path + ": truncated code vocabulary");
    for (std::size_t j = 0; j < cols; ++j)
      if (!(in >> model.theta[i * cols + j]))
        throw std::runtime_error(path + ": truncated parameter row");
  }
  return model;
}

std::string loss_curve_csv(const std::vector<EpochLoss>& curve) {
  std::string out = "epoch,combined,origin,masked\n";
  char buf[128];
  for (std::size_t e = 0; e < curve.size(); ++e) {
    std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.9g\n", e, curve[e].combined,
                  curve[e].origin, curve[e].masked);
    out += buf;
  }
  return out;
}

}  // namespace ccattack::model
