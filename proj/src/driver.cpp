#include "ccattack/driver.hpp"

#include <fstream>
#include <mutex>
#include <thread>

#include "ccattack/corpus.hpp"

namespace ccattack::driver {

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

corpus::Dataset load_nonempty(const std::string& path, lang::Lang lang) {
  corpus::Dataset data = corpus::load_dataset(path, lang);
  if (data.samples.empty())
    throw EmptyResultError(path + ": no valid samples" +
                           (data.dropped ? " (" + std::to_string(data.dropped) +
                                               " dropped by the validity check)"
                                         : ""));
  return data;
}

}  // namespace

EmbedTrainSummary run_embed_train(const EmbedTrainArgs& args) {
  corpus::Dataset data = load_nonempty(args.data, args.lang);
  std::vector<std::vector<std::string>> streams;
  streams.reserve(data.samples.size());
  for (const corpus::Sample& s : data.samples)
    streams.push_back(lang::subtoken_stream(s.code, args.lang));
  embed::EmbeddingTable table = embed::train_embeddings(streams, args.config);
  embed::save_embeddings(table, args.config, args.out);
  return {data.samples.size(), data.dropped, table.size()};
}

AttackSummary run_attack_cmd(const AttackArgs& args) {
  corpus::Dataset data = load_nonempty(args.data, args.lang);

  corpus::Dataset vocab_source;
  const corpus::Dataset* vocab_data = &data;
  if (!args.vocab_data.empty() && args.vocab_data != args.data) {
    vocab_source = load_nonempty(args.vocab_data, args.lang);
    vocab_data = &vocab_source;
  }
  std::vector<std::string> vocab, raw_vocab;
  if (args.method == attack::Method::random_sub)
    raw_vocab = attack::collect_raw_token_vocab(*vocab_data);
  else
    vocab = attack::collect_identifier_vocab(*vocab_data);

  embed::EmbeddingTable table;
  if (args.method != attack::Method::random_sub)
    table = embed::load_embeddings(args.embed_path);

  std::unique_ptr<adapter::ModelAdapter> model =
      adapter::make_adapter(args.adapter_spec, args.lang, args.adapter_config);

  std::vector<attack::AttackResult> results(data.samples.size());
  const int jobs = std::max(1, args.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < data.samples.size(); ++i)
      results[i] = attack::run_attack(args.method, data.samples[i], args.lang, table,
                                      vocab, raw_vocab, *model, args.config);
  } else {
    // Samples are independent; results land at their dataset index, so the
    // output does not depend on scheduling.
    std::mutex mu;
    std::size_t next = 0;
    std::exception_ptr failure;
    auto worker = [&] {
      for (;;) {
        std::size_t i;
        {
          std::lock_guard<std::mutex> lock(mu);
          if (failure || next >= data.samples.size()) return;
          i = next++;
        }
        try {
          attack::AttackResult r =
              attack::run_attack(args.method, data.samples[i], args.lang, table,
                                 vocab, raw_vocab, *model, args.config);
          std::lock_guard<std::mutex> lock(mu);
          results[i] = std::move(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<corpus::AdversarialSample> adv;
  adv.reserve(results.size());
  AttackSummary summary;
  summary.samples = results.size();
  summary.dropped = data.dropped;
  for (attack::AttackResult& r : results) {
    if (r.valid) ++summary.valid;
    summary.queries += r.queries;
    summary.mean_score_before += r.score_before;
    summary.mean_score_after += r.score_after;
    adv.push_back(std::move(r.sample));
  }
  if (!results.empty()) {
    summary.mean_score_before /= static_cast<double>(results.size());
    summary.mean_score_after /= static_cast<double>(results.size());
  }
  corpus::save_adversarial(adv, args.out);
  return summary;
}

MaskSummary run_mask(const MaskArgs& args) {
  corpus::Dataset data = load_nonempty(args.data, args.lang);
  corpus::Dataset masked;
  masked.lang = args.lang;
  for (const corpus::Sample& s : data.samples) {
    Rng rng(Rng::derive(args.seed, s.id));
    masked.samples.push_back(
        {s.id, model::mask_identifiers(s.code, args.lang, args.count, rng), s.comment});
  }
  corpus::save_dataset(masked, args.out);
  return {data.samples.size(), data.dropped};
}

TrainToySummary run_train_toy(const TrainToyArgs& args) {
  corpus::Dataset data = load_nonempty(args.data, args.lang);
  model::ToyModel toy = model::make_toy_model(data);
  std::vector<model::EpochLoss> curve = model::train_toy(toy, data, args.config);
  model::save_toy(toy, args.out);
  if (!args.curve_out.empty()) write_file(args.curve_out, model::loss_curve_csv(curve));
  TrainToySummary summary;
  summary.samples = data.samples.size();
  summary.dropped = data.dropped;
  summary.rows = toy.rows();
  summary.cols = toy.cols();
  if (!curve.empty()) {
    summary.first_combined = curve.front().combined;
    summary.final_combined = curve.back().combined;
  }
  return summary;
}

report::Report run_evaluate(const EvaluateArgs& args) {
  corpus::Dataset data = load_nonempty(args.data, args.lang);
  std::vector<corpus::AdversarialSample> adv = corpus::load_adversarial(args.adv);
  if (adv.empty()) throw EmptyResultError(args.adv + ": no adversarial samples");
  std::unique_ptr<adapter::ModelAdapter> model =
      adapter::make_adapter(args.adapter_spec, args.lang, args.adapter_config);
  report::Report rep = report::build_report(data, adv, *model);
  if (!args.out.empty())
    write_file(args.out, report::report_to_json(rep, args.run_config).dump(2) + "\n");
  if (!args.out_text.empty()) write_file(args.out_text, report::report_to_text(rep));
  return rep;
}

}  // namespace ccattack::driver
