#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ccattack/driver.hpp"
#include "ccattack/metrics.hpp"
#include "ccattack/report.hpp"
#include "support/synth.hpp"

using namespace ccattack;

namespace {

struct TempDir {
  std::string path;
  TempDir() {
    static int counter = 0;
    path = "/tmp/ccattack_report_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter++);
    REQUIRE(std::system(("mkdir -p " + path).c_str()) == 0);
  }
  ~TempDir() { (void)!std::system(("rm -rf " + path).c_str()); }
  std::string file(const std::string& name) const { return path + "/" + name; }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// A model that answers the reference for original code and loses tokens on
// substituted code, so attacks measurably degrade it.
corpus::Dataset two_sample_data() {
  corpus::Dataset data;
  data.lang = lang::Lang::java;
  data.samples.push_back({"s1", "int addValues(int left) { return left; }",
                          "adds the values from the left side"});
  data.samples.push_back({"s2", "void clearCache() { flush(); }",
                          "clears the cache and flushes everything out"});
  return data;
}

}  // namespace

TEST_CASE("report rows score both sides and recompute validity") {
  corpus::Dataset data = two_sample_data();
  std::vector<corpus::AdversarialSample> adv;
  adv.push_back({"s1", "int addValues(int omega) { return omega; }",
                 {{"left", "omega"}}, data.samples[0].comment});
  adv.push_back({"s2", "void int() { flush(); }", {{"clearCache", "int"}},
                 data.samples[1].comment});

  auto model = adapter::make_callback_adapter([&](const std::string& code) {
    if (code == data.samples[0].code) return data.samples[0].comment;
    if (code == data.samples[1].code) return data.samples[1].comment;
    return std::string("something unrelated entirely");
  });
  report::Report rep = report::build_report(data, adv, *model);

  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].id == "s1");
  CHECK(rep.rows[0].bleu_before == doctest::Approx(100.0));
  CHECK(rep.rows[0].bleu_after < 100.0);
  CHECK(rep.rows[0].rouge_l_before == doctest::Approx(100.0));
  CHECK(rep.rows[0].meteor_before > 99.0);
  CHECK(rep.rows[0].valid);
  CHECK_FALSE(rep.rows[0].degenerate);
  CHECK(rep.rows[0].queries == 2);
  CHECK_FALSE(rep.rows[1].valid);  // keyword as a method name
  CHECK(model->queries() == 4);

  CHECK(rep.valid_rate == doctest::Approx(50.0));
  CHECK(rep.corpus_bleu_after < rep.corpus_bleu_before);
  CHECK(rep.relative_degradation > 0.0);
  CHECK_FALSE(rep.degenerate);
  CHECK(rep.success_rate ==
        doctest::Approx(rep.relative_degradation * rep.valid_rate / 100.0)
            .epsilon(1e-12));
}

TEST_CASE("report flags degenerate pre-attack scores") {
  corpus::Dataset data = two_sample_data();
  std::vector<corpus::AdversarialSample> adv;
  adv.push_back({"s1", data.samples[0].code, {}, data.samples[0].comment});

  auto model = adapter::make_callback_adapter(
      [](const std::string&) { return std::string("zz yy xx ww"); });
  report::Report rep = report::build_report(data, adv, *model);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].bleu_before == 0.0);
  CHECK(rep.rows[0].degenerate);
  CHECK(rep.degenerate);
  CHECK(rep.relative_degradation == 0.0);
  CHECK(rep.success_rate == 0.0);
}

TEST_CASE("report rejects adversarial ids missing from the dataset") {
  corpus::Dataset data = two_sample_data();
  std::vector<corpus::AdversarialSample> adv;
  adv.push_back({"ghost", data.samples[0].code, {}, "whatever"});
  auto model = adapter::make_callback_adapter(
      [](const std::string&) { return std::string("x"); });
  CHECK_THROWS_AS(report::build_report(data, adv, *model), std::out_of_range);
}

TEST_CASE("report json carries config, rows and summary with sorted keys") {
  corpus::Dataset data = two_sample_data();
  std::vector<corpus::AdversarialSample> adv;
  adv.push_back({"s1", "int addValues(int omega) { return omega; }",
                 {{"left", "omega"}}, data.samples[0].comment});
  auto model = adapter::make_callback_adapter([&](const std::string& code) {
    return code == data.samples[0].code ? data.samples[0].comment
                                        : std::string("other words here");
  });
  report::Report rep = report::build_report(data, adv, *model);
  nlohmann::json run_config = {{"adapter", "builtin:test"}, {"data", "x.jsonl"}};
  nlohmann::json doc = report::report_to_json(rep, run_config);

  CHECK(doc["config"] == run_config);
  REQUIRE(doc["rows"].size() == 1);
  const auto& row = doc["rows"][0];
  CHECK(row["id"] == "s1");
  CHECK(row["bleu_before"].get<double>() == doctest::Approx(100.0));
  CHECK(row["valid"] == true);
  CHECK(row["queries"] == 2);
  const auto& summary = doc["summary"];
  CHECK(summary["corpus_bleu_before"].get<double>() ==
        doctest::Approx(rep.corpus_bleu_before));
  CHECK(summary["relative_degradation"].get<double>() ==
        doctest::Approx(rep.relative_degradation));
  CHECK(summary["valid_rate"].get<double>() == doctest::Approx(100.0));
  CHECK(summary["success_rate"].get<double>() ==
        doctest::Approx(rep.success_rate));

  std::string text = report::report_to_text(rep);
  CHECK(text.find("corpus BLEU") != std::string::npos);
  CHECK(text.find("valid rate") != std::string::npos);
  CHECK(text.find("success rate") != std::string::npos);
}

TEST_CASE("attack driver writes identical files with one or four workers") {
  TempDir dir;
  corpus::Dataset data = synth::make_dataset(lang::Lang::java, 24, 5);
  corpus::save_dataset(data, dir.file("data.jsonl"));

  driver::EmbedTrainArgs embed_args;
  embed_args.data = dir.file("data.jsonl");
  embed_args.out = dir.file("emb.txt");
  embed_args.config.dim = 16;
  embed_args.config.epochs = 2;
  embed_args.config.min_count = 1;
  driver::EmbedTrainSummary embed_summary = driver::run_embed_train(embed_args);
  CHECK(embed_summary.samples == 24);
  CHECK(embed_summary.dropped == 0);
  CHECK(embed_summary.vocab > 0);

  driver::AttackArgs attack_args;
  attack_args.data = dir.file("data.jsonl");
  attack_args.embed_path = dir.file("emb.txt");
  attack_args.adapter_spec = "builtin:surrogate:" + dir.file("data.jsonl");
  attack_args.out = dir.file("adv1.jsonl");
  attack_args.jobs = 1;
  driver::AttackSummary one = driver::run_attack_cmd(attack_args);
  CHECK(one.samples == 24);
  CHECK(one.valid == 24);
  CHECK(one.queries > 24);

  attack_args.out = dir.file("adv4.jsonl");
  attack_args.jobs = 4;
  driver::AttackSummary four = driver::run_attack_cmd(attack_args);
  CHECK(four.queries == one.queries);
  CHECK(slurp(dir.file("adv4.jsonl")) == slurp(dir.file("adv1.jsonl")));

  driver::EvaluateArgs eval_args;
  eval_args.data = dir.file("data.jsonl");
  eval_args.adv = dir.file("adv1.jsonl");
  eval_args.adapter_spec = "builtin:surrogate:" + dir.file("data.jsonl");
  eval_args.out = dir.file("report.json");
  eval_args.out_text = dir.file("report.txt");
  eval_args.run_config = {{"adapter", eval_args.adapter_spec}};
  report::Report rep = driver::run_evaluate(eval_args);
  CHECK(rep.rows.size() == 24);
  CHECK(rep.valid_rate == doctest::Approx(100.0));
  for (const report::Row& row : rep.rows) CHECK(row.queries == 2);
  CHECK(rep.success_rate ==
        doctest::Approx(rep.relative_degradation * rep.valid_rate / 100.0)
            .epsilon(1e-12));

  std::string json_text = slurp(dir.file("report.json"));
  CHECK(json_text.back() == '\n');
  nlohmann::json parsed = nlohmann::json::parse(json_text);
  CHECK(parsed["rows"].size() == 24);
  CHECK(slurp(dir.file("report.txt")) == report::report_to_text(rep));
}

TEST_CASE("drivers reject empty work") {
  TempDir dir;
  { std::ofstream(dir.file("empty.jsonl")); }
  corpus::Dataset data = two_sample_data();
  corpus::save_dataset(data, dir.file("data.jsonl"));

  driver::EmbedTrainArgs embed_args;
  embed_args.data = dir.file("empty.jsonl");
  embed_args.out = dir.file("emb.txt");
  CHECK_THROWS_AS(driver::run_embed_train(embed_args), driver::EmptyResultError);

  driver::EvaluateArgs eval_args;
  eval_args.data = dir.file("data.jsonl");
  eval_args.adv = dir.file("empty.jsonl");
  eval_args.adapter_spec = "builtin:surrogate:" + dir.file("data.jsonl");
  CHECK_THROWS_AS(driver::run_evaluate(eval_args), driver::EmptyResultError);
}

TEST_CASE("mask and toy training drivers round-trip files") {
  TempDir dir;
  corpus::Dataset data = synth::make_dataset(lang::Lang::python, 30, 11);
  corpus::save_dataset(data, dir.file("data.jsonl"));

  driver::MaskArgs mask_args;
  mask_args.data = dir.file("data.jsonl");
  mask_args.out = dir.file("masked.jsonl");
  mask_args.lang = lang::Lang::python;
  driver::MaskSummary mask_summary = driver::run_mask(mask_args);
  CHECK(mask_summary.samples == 30);
  corpus::Dataset masked = corpus::load_dataset(dir.file("masked.jsonl"),
                                                lang::Lang::python);
  CHECK(masked.samples.size() == 30);
  std::size_t with_mask = 0;
  for (const corpus::Sample& s : masked.samples)
    if (s.code.find("<unk>") != std::string::npos) ++with_mask;
  CHECK(with_mask == 30);

  driver::TrainToyArgs train_args;
  train_args.data = dir.file("data.jsonl");
  train_args.out = dir.file("toy.model");
  train_args.curve_out = dir.file("curve.csv");
  train_args.lang = lang::Lang::python;
  train_args.config.epochs = 5;
  driver::TrainToySummary train_summary = driver::run_train_toy(train_args);
  CHECK(train_summary.samples == 30);
  CHECK(train_summary.rows > 0);
  CHECK(train_summary.final_combined < train_summary.first_combined);

  model::ToyModel loaded = model::load_toy(dir.file("toy.model"));
  CHECK(loaded.rows() == train_summary.rows);
  CHECK(loaded.cols() == train_summary.cols);
  std::string curve = slurp(dir.file("curve.csv"));
  CHECK(curve.rfind("epoch,combined,origin,masked\n", 0) == 0);
}
