// Python bindings for the core operations and the file-level runs.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "ccattack/driver.hpp"
#include "ccattack/lang.hpp"
#include "ccattack/metrics.hpp"
#include "ccattack/model.hpp"
#include "ccattack/rng.hpp"

namespace py = pybind11;
using namespace ccattack;

namespace {

lang::Lang to_lang(const std::string& name) { return lang::lang_from_string(name); }

const char* kind_name(lang::TokenKind kind) {
  switch (kind) {
    case lang::TokenKind::identifier: return "identifier";
    case lang::TokenKind::keyword: return "keyword";
    case lang::TokenKind::literal: return "literal";
    case lang::TokenKind::op: return "op";
    case lang::TokenKind::punct: return "punct";
    case lang::TokenKind::comment_trivia: return "comment";
    case lang::TokenKind::whitespace: return "whitespace";
  }
  return "?";
}

py::dict json_to_dict(const nlohmann::json& value) {
  auto json_mod = py::module_::import("json");
  return json_mod.attr("loads")(value.dump());
}

py::dict summary_dict(const driver::AttackSummary& s) {
  py::dict d;
  d["samples"] = s.samples;
  d["dropped"] = s.dropped;
  d["valid"] = s.valid;
  d["queries"] = s.queries;
  d["mean_score_before"] = s.mean_score_before;
  d["mean_score_after"] = s.mean_score_after;
  return d;
}

}  // namespace

PYBIND11_MODULE(ccattack, m) {
  m.doc() = "Identifier-substitution attacks on code comment generators";

  py::register_exception<lang::LexError>(m, "LexError");
  py::register_exception<lang::RenameError>(m, "RenameError");
  py::register_exception<adapter::AdapterError>(m, "AdapterError");

  m.def(
      "tokenize",
      [](const std::string& code, const std::string& lg) {
        py::list out;
        for (const lang::Token& t : lang::tokenize(code, to_lang(lg)))
          out.append(py::make_tuple(t.text, kind_name(t.kind), t.begin, t.end));
        return out;
      },
      py::arg("code"), py::arg("lang"),
      "Lossless token list: (text, kind, begin, end) tuples");

  m.def(
      "split_subtokens",
      [](const std::string& name) { return lang::split_subtokens(name); },
      py::arg("name"));

  m.def(
      "subtoken_stream",
      [](const std::string& code, const std::string& lg) {
        return lang::subtoken_stream(code, to_lang(lg));
      },
      py::arg("code"), py::arg("lang"));

  m.def(
      "extract_identifiers",
      [](const std::string& code, const std::string& lg) {
        py::list out;
        for (const lang::IdentifierInfo& info :
             lang::extract_identifiers(code, to_lang(lg))) {
          py::dict d;
          d["name"] = info.name;
          d["kind"] = std::string(lang::to_string(info.kind));
          d["occurrences"] = info.occurrences;
          d["single_letter"] = info.single_letter;
          d["decl"] = info.decl_token;
          out.append(d);
        }
        return out;
      },
      py::arg("code"), py::arg("lang"));

  m.def(
      "validate",
      [](const std::string& code, const std::string& lg) {
        return lang::validate(code, to_lang(lg));
      },
      py::arg("code"), py::arg("lang"));

  m.def(
      "is_keyword",
      [](const std::string& word, const std::string& lg) {
        return lang::is_keyword(word, to_lang(lg));
      },
      py::arg("word"), py::arg("lang"));

  m.def(
      "rename",
      [](const std::string& code, const std::string& old_name,
         const std::string& new_name, const std::string& lg) {
        return lang::rename(code, old_name, new_name, to_lang(lg));
      },
      py::arg("code"), py::arg("old_name"), py::arg("new_name"), py::arg("lang"));

  m.def(
      "mask",
      [](const std::string& code, const std::string& lg, int count,
         std::uint64_t seed) {
        Rng rng(seed);
        return model::mask_identifiers(code, to_lang(lg), count, rng);
      },
      py::arg("code"), py::arg("lang"), py::arg("count") = 2, py::arg("seed") = 7,
      "Replace count randomly chosen declared identifiers with <unk>");

  m.def(
      "bleu",
      [](const std::string& reference, const std::string& candidate) {
        return metrics::bleu(reference, candidate);
      },
      py::arg("reference"), py::arg("candidate"));

  m.def(
      "rouge_l",
      [](const std::string& reference, const std::string& candidate) {
        return metrics::rouge_l(reference, candidate);
      },
      py::arg("reference"), py::arg("candidate"));

  m.def(
      "meteor_lite",
      [](const std::string& reference, const std::string& candidate) {
        return metrics::meteor_lite(reference, candidate);
      },
      py::arg("reference"), py::arg("candidate"));

  m.def(
      "relative_degradation",
      [](double before, double after) {
        metrics::Degradation d = metrics::relative_degradation(before, after);
        return py::make_tuple(d.value, d.degenerate);
      },
      py::arg("before"), py::arg("after"),
      "Percent score drop and a flag for a zero pre-attack score");

  m.def(
      "embed_train",
      [](const std::string& data, const std::string& lg, const std::string& out,
         int dim, int window, int negatives, int min_count, int epochs, double lr,
         std::uint64_t seed) {
        driver::EmbedTrainArgs args;
        args.data = data;
        args.lang = to_lang(lg);
        args.out = out;
        args.config.dim = dim;
        args.config.window = window;
        args.config.negatives = negatives;
        args.config.min_count = min_count;
        args.config.epochs = epochs;
        args.config.lr = lr;
        args.config.seed = seed;
        driver::EmbedTrainSummary s = driver::run_embed_train(args);
        py::dict d;
        d["samples"] = s.samples;
        d["dropped"] = s.dropped;
        d["vocab"] = s.vocab;
        return d;
      },
      py::arg("data"), py::arg("lang"), py::arg("out"), py::arg("dim") = 128,
      py::arg("window") = 5, py::arg("negatives") = 5, py::arg("min_count") = 2,
      py::arg("epochs") = 5, py::arg("lr") = 0.05, py::arg("seed") = 1);

  m.def(
      "attack",
      [](const std::string& data, const std::string& lg, const std::string& adapter,
         const std::string& out, const std::string& method, const std::string& embed,
         const std::string& vocab_data, int k, int max_subs, double alpha,
         double beta, int mh_iterations, double mh_temperature, std::uint64_t seed,
         int jobs, int max_in_flight, int timeout_ms, int gen_length) {
        driver::AttackArgs args;
        args.data = data;
        args.lang = to_lang(lg);
        args.adapter_spec = adapter;
        args.out = out;
        args.method = attack::method_from_string(method);
        args.embed_path = embed;
        args.vocab_data = vocab_data;
        args.config.k = k;
        args.config.max_subs = max_subs;
        args.config.alpha = alpha;
        args.config.beta = beta;
        args.config.mh_iterations = mh_iterations;
        args.config.mh_temperature = mh_temperature;
        args.config.seed = seed;
        args.jobs = jobs;
        args.adapter_config.max_in_flight = max_in_flight;
        args.adapter_config.timeout_ms = timeout_ms;
        args.adapter_config.gen_length = gen_length;
        return summary_dict(driver::run_attack_cmd(args));
      },
      py::arg("data"), py::arg("lang"), py::arg("adapter"), py::arg("out"),
      py::arg("method") = "accent", py::arg("embed") = std::string(),
      py::arg("vocab_data") = std::string(), py::arg("k") = 5,
      py::arg("max_subs") = 2, py::arg("alpha") = 0.5, py::arg("beta") = 0.5,
      py::arg("mh_iterations") = 100, py::arg("mh_temperature") = 0.05,
      py::arg("seed") = 1, py::arg("jobs") = 1, py::arg("max_in_flight") = 8,
      py::arg("timeout_ms") = 30000, py::arg("gen_length") = 8);

  m.def(
      "mask_file",
      [](const std::string& data, const std::string& lg, const std::string& out,
         int count, std::uint64_t seed) {
        driver::MaskArgs args;
        args.data = data;
        args.lang = to_lang(lg);
        args.out = out;
        args.count = count;
        args.seed = seed;
        driver::MaskSummary s = driver::run_mask(args);
        py::dict d;
        d["samples"] = s.samples;
        d["dropped"] = s.dropped;
        return d;
      },
      py::arg("data"), py::arg("lang"), py::arg("out"), py::arg("count") = 2,
      py::arg("seed") = 7);

  m.def(
      "train_toy",
      [](const std::string& data, const std::string& lg, const std::string& out,
         double lambda_, int count_masked, int epochs, double lr,
         std::uint64_t seed, const std::string& curve) {
        driver::TrainToyArgs args;
        args.data = data;
        args.lang = to_lang(lg);
        args.out = out;
        args.curve_out = curve;
        args.config.lambda = lambda_;
        args.config.count_masked = count_masked;
        args.config.epochs = epochs;
        args.config.lr = lr;
        args.config.seed = seed;
        driver::TrainToySummary s = driver::run_train_toy(args);
        py::dict d;
        d["samples"] = s.samples;
        d["dropped"] = s.dropped;
        d["rows"] = s.rows;
        d["cols"] = s.cols;
        d["first_combined"] = s.first_combined;
        d["final_combined"] = s.final_combined;
        return d;
      },
      py::arg("data"), py::arg("lang"), py::arg("out"), py::arg("lambda_") = 0.5,
      py::arg("count_masked") = 2, py::arg("epochs") = 100, py::arg("lr") = 0.1,
      py::arg("seed") = 7, py::arg("curve") = std::string());

  m.def(
      "evaluate",
      [](const std::string& data, const std::string& lg, const std::string& adv,
         const std::string& adapter, const std::string& out, const std::string& text,
         int max_in_flight, int timeout_ms, int gen_length) {
        driver::EvaluateArgs args;
        args.data = data;
        args.lang = to_lang(lg);
        args.adv = adv;
        args.adapter_spec = adapter;
        args.out = out;
        args.out_text = text;
        args.adapter_config.max_in_flight = max_in_flight;
        args.adapter_config.timeout_ms = timeout_ms;
        args.adapter_config.gen_length = gen_length;
        args.run_config = {{"adapter", adapter}, {"adv", adv},
                           {"command", "evaluate"}, {"data", data}, {"lang", lg}};
        report::Report rep = driver::run_evaluate(args);
        return json_to_dict(report::report_to_json(rep, args.run_config));
      },
      py::arg("data"), py::arg("lang"), py::arg("adv"), py::arg("adapter"),
      py::arg("out") = std::string(), py::arg("text") = std::string(),
      py::arg("max_in_flight") = 8, py::arg("timeout_ms") = 30000,
      py::arg("gen_length") = 8,
      "Score the model on paired original/adversarial programs; returns the report");
}
