#include "ccattack/attack.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "ccattack/metrics.hpp"

namespace ccattack::attack {

Method method_from_string(std::string_view name) {
  if (name == "accent") return Method::accent;
  if (name == "random") return Method::random_sub;
  if (name == "mh") return Method::mh;
  throw std::invalid_argument("unknown attack method: " + std::string(name));
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::accent: return "accent";
    case Method::random_sub: return "random";
    default: return "mh";
  }
}

double score(adapter::ModelAdapter& model, const std::string& code,
             const std::string& reference) {
  return metrics::bleu(reference, model.query(code));
}

double h_score(double saliency, double delta, double alpha, double beta) {
  constexpr double kZero = 1e-12;
  const bool s_zero = std::fabs(saliency) < kZero;
  const bool d_zero = std::fabs(delta) < kZero;
  if (!s_zero && !d_zero) return saliency * delta;
  if (!s_zero) return saliency * beta;
  if (!d_zero) return delta * alpha;
  return 0.0;
}

std::vector<std::string> collect_identifier_vocab(const corpus::Dataset& data) {
  std::vector<std::string> vocab;
  std::unordered_set<std::string> seen;
  for (const corpus::Sample& s : data.samples)
    for (const lang::IdentifierInfo& info : lang::extract_identifiers(s.code, data.lang))
      if (seen.insert(info.name).second) vocab.push_back(info.name);
  return vocab;
}

std::vector<std::string> collect_raw_token_vocab(const corpus::Dataset& data) {
  std::vector<std::string> vocab;
  std::unordered_set<std::string> seen;
  for (const corpus::Sample& s : data.samples)
    for (const lang::Token& t : lang::tokenize(s.code, data.lang))
      if ((t.kind == lang::TokenKind::identifier || t.kind == lang::TokenKind::keyword) &&
          seen.insert(t.text).second)
        vocab.push_back(t.text);
  return vocab;
}

namespace {

std::unordered_set<std::string> identifier_token_texts(const std::string& code,
                                                       lang::Lang lang) {
  std::unordered_set<std::string> out;
  for (const lang::Token& t : lang::tokenize(code, lang))
    if (t.kind == lang::TokenKind::identifier) out.insert(t.text);
  return out;
}

// Letters that occur nowhere in the program as an identifier, so a rename to
// one of them always succeeds.
std::vector<std::string> available_letters(
    const std::unordered_set<std::string>& program_tokens) {
  std::vector<std::string> out;
  for (char c = 'a'; c <= 'z'; ++c) {
    std::string letter(1, c);
    if (!program_tokens.count(letter)) out.push_back(std::move(letter));
  }
  return out;
}

AttackResult baseline_result(const corpus::Sample& sample, lang::Lang lang) {
  AttackResult res;
  res.sample.original_id = sample.id;
  res.sample.adv_code = sample.code;
  res.sample.comment = sample.comment;
  res.valid = lang::validate(sample.code, lang);
  return res;
}

}  // namespace

AttackResult accent_attack(const corpus::Sample& sample, lang::Lang lang,
                           const embed::EmbeddingTable& table,
                           const std::vector<std::string>& vocab,
                           adapter::ModelAdapter& model, const AttackConfig& config,
                           Rng& rng) {
  AttackResult res = baseline_result(sample, lang);
  res.score_before = metrics::bleu(sample.comment, model.query(sample.code));
  res.queries = 1;
  res.score_after = res.score_before;

  const std::vector<lang::IdentifierInfo> ids =
      lang::extract_identifiers(sample.code, lang);
  if (ids.empty() || config.max_subs <= 0) return res;

  const std::unordered_set<std::string> program_tokens =
      identifier_token_texts(sample.code, lang);
  const std::vector<float> prog_emb =
      embed::program_embedding(table, lang::subtoken_stream(sample.code, lang));

  struct Ranked {
    const lang::IdentifierInfo* info;
    std::string best;
    double h;
  };
  std::vector<Ranked> ranked;
  for (const lang::IdentifierInfo& info : ids) {
    std::vector<std::string> candidates;
    if (info.single_letter) {
      std::vector<std::string> letters = available_letters(program_tokens);
      if (!letters.empty())
        candidates.push_back(letters[rng.index(letters.size())]);
    } else {
      candidates =
          embed::select_candidates(table, info.name, vocab, program_tokens, config.k);
    }
    if (candidates.empty()) continue;

    double best_delta = 0.0;
    std::string best;
    for (const std::string& cand : candidates) {
      std::string renamed;
      try {
        renamed = lang::rename(sample.code, info.name, cand, lang);
      } catch (const lang::RenameError&) {
        continue;
      }
      double after = metrics::bleu(sample.comment, model.query(renamed));
      ++res.queries;
      double delta = res.score_before - after;
      if (best.empty() || delta > best_delta) {
        best_delta = delta;
        best = cand;
      }
    }
    if (best.empty()) continue;

    double saliency = embed::cosine(embed::identifier_embedding(table, info.name),
                                    std::span<const float>(prog_emb));
    ranked.push_back({&info, best, h_score(saliency, best_delta, config.alpha,
                                           config.beta)});
  }

  // Highest combination score first; declaration order breaks ties.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Ranked& a, const Ranked& b) { return a.h > b.h; });

  std::string adv = sample.code;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (res.sample.substitutions.size() >= static_cast<std::size_t>(config.max_subs))
      break;
    try {
      adv = lang::rename(adv, ranked[i].info->name, ranked[i].best, lang);
      res.sample.substitutions.emplace_back(ranked[i].info->name, ranked[i].best);
    } catch (const lang::RenameError&) {
      // An earlier substitution introduced this candidate; skip, keep rank.
    }
  }

  res.sample.adv_code = adv;
  if (!res.sample.substitutions.empty()) {
    res.score_after = metrics::bleu(sample.comment, model.query(adv));
    ++res.queries;
  }
  res.valid = lang::validate(adv, lang);
  return res;
}

AttackResult random_attack(const corpus::Sample& sample, lang::Lang lang,
                           const std::vector<std::string>& vocab,
                           adapter::ModelAdapter& model, const AttackConfig& config,
                           Rng& rng) {
  AttackResult res = baseline_result(sample, lang);
  res.score_before = metrics::bleu(sample.comment, model.query(sample.code));
  res.queries = 1;
  res.score_after = res.score_before;

  const std::vector<lang::IdentifierInfo> ids =
      lang::extract_identifiers(sample.code, lang);
  if (ids.empty() || vocab.empty() || config.max_subs <= 0) return res;

  std::vector<std::size_t> order(ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  order.resize(std::min<std::size_t>(config.max_subs, order.size()));

  std::string adv = sample.code;
  for (std::size_t i : order) {
    const std::string& replacement = vocab[rng.index(vocab.size())];
    try {
      adv = lang::rename_unchecked(adv, ids[i].name, replacement, lang);
      res.sample.substitutions.emplace_back(ids[i].name, replacement);
    } catch (const lang::LexError&) {
      break;  // a previous replacement made the snippet unlexable
    }
  }

  res.sample.adv_code = adv;
  if (!res.sample.substitutions.empty()) {
    res.score_after = metrics::bleu(sample.comment, model.query(adv));
    ++res.queries;
  }
  res.valid = lang::validate(adv, lang);
  return res;
}

AttackResult mh_attack(const corpus::Sample& sample, lang::Lang lang,
                       const embed::EmbeddingTable& table,
                       const std::vector<std::string>& vocab,
                       adapter::ModelAdapter& model, const AttackConfig& config,
                       Rng& rng) {
  AttackResult res = baseline_result(sample, lang);
  res.score_before = metrics::bleu(sample.comment, model.query(sample.code));
  res.queries = 1;
  res.score_after = res.score_before;

  const std::vector<lang::IdentifierInfo> ids =
      lang::extract_identifiers(sample.code, lang);
  if (ids.empty() || config.max_subs <= 0) return res;

  const std::unordered_set<std::string> program_tokens =
      identifier_token_texts(sample.code, lang);

  // Substitution pools; identifiers without usable candidates are untouchable.
  std::vector<std::string> names;
  std::unordered_map<std::string, std::vector<std::string>> pools;
  for (const lang::IdentifierInfo& info : ids) {
    std::vector<std::string> pool =
        info.single_letter
            ? available_letters(program_tokens)
            : embed::select_candidates(table, info.name, vocab, program_tokens,
                                       config.k);
    if (pool.empty()) continue;
    names.push_back(info.name);
    pools.emplace(info.name, std::move(pool));
  }
  if (names.empty()) return res;

  std::map<std::string, std::string> state;  // old name -> replacement
  std::unordered_map<std::string, double> score_cache{{sample.code, res.score_before}};
  double cur_score = res.score_before;
  double best_score = res.score_before;
  std::map<std::string, std::string> best_state;
  std::string best_adv = sample.code;

  enum MoveKind { kReplace, kInsert, kRevert };
  for (int iter = 0; iter < config.mh_iterations; ++iter) {
    std::vector<std::string> unused;
    for (const std::string& name : names)
      if (!state.count(name)) unused.push_back(name);

    std::vector<MoveKind> moves;
    if (!state.empty()) moves.push_back(kReplace);
    if (state.size() < static_cast<std::size_t>(config.max_subs) && !unused.empty())
      moves.push_back(kInsert);
    if (!state.empty()) moves.push_back(kRevert);
    if (moves.empty()) break;

    std::map<std::string, std::string> proposal = state;
    const MoveKind move = moves[rng.index(moves.size())];
    if (move == kReplace) {
      auto it = std::next(state.begin(), rng.index(state.size()));
      std::vector<const std::string*> alternatives;
      for (const std::string& cand : pools[it->first])
        if (cand != it->second) alternatives.push_back(&cand);
      if (alternatives.empty()) continue;  // nothing to change; rejected
      proposal[it->first] = *alternatives[rng.index(alternatives.size())];
    } else if (move == kInsert) {
      const std::string& name = unused[rng.index(unused.size())];
      const std::vector<std::string>& pool = pools[name];
      proposal[name] = pool[rng.index(pool.size())];
    } else {
      auto it = std::next(state.begin(), rng.index(state.size()));
      proposal.erase(it->first);
    }

    std::string adv = sample.code;
    bool ok = true;
    for (const auto& [from, to] : proposal) {
      try {
        adv = lang::rename(adv, from, to, lang);
      } catch (const lang::RenameError&) {
        ok = false;  // e.g. two substitutions sharing a replacement
        break;
      }
    }
    if (!ok) continue;  // unmaterializable proposal; rejected

    double prop_score;
    auto cached = score_cache.find(adv);
    if (cached != score_cache.end()) {
      prop_score = cached->second;
    } else {
      prop_score = metrics::bleu(sample.comment, model.query(adv));
      ++res.queries;
      score_cache.emplace(adv, prop_score);
    }

    if (prop_score < best_score) {
      best_score = prop_score;
      best_state = proposal;
      best_adv = adv;
    }

    // Stationary density exp((score(p) - score(x)) / T): acceptance ratio
    // reduces to exp((cur - proposed) / T).
    bool accept = prop_score <= cur_score;
    if (!accept) {
      double ratio = std::exp((cur_score - prop_score) / config.mh_temperature);
      accept = rng.real() < ratio;
    }
    if (accept) {
      state = std::move(proposal);
      cur_score = prop_score;
    }
  }

  res.sample.adv_code = best_adv;
  res.sample.substitutions.assign(best_state.begin(), best_state.end());
  res.score_after = best_score;
  res.valid = lang::validate(best_adv, lang);
  return res;
}

AttackResult run_attack(Method method, const corpus::Sample& sample, lang::Lang lang,
                        const embed::EmbeddingTable& table,
                        const std::vector<std::string>& vocab,
                        const std::vector<std::string>& raw_vocab,
                        adapter::ModelAdapter& model, const AttackConfig& config) {
  Rng rng(Rng::derive(config.seed, sample.id));
  switch (method) {
    case Method::accent:
      return accent_attack(sample, lang, table, vocab, model, config, rng);
    case Method::random_sub:
      return random_attack(sample, lang, raw_vocab, model, config, rng);
    default:
      return mh_attack(sample, lang, table, vocab, model, config, rng);
  }
}

}  // namespace ccattack::attack
