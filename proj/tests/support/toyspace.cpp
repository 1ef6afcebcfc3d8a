#include "support/toyspace.hpp"

#include <array>

#include "ccattack/rng.hpp"

namespace ccattack::toyspace {
namespace {

constexpr std::array<const char*, 5> kNames = {"alphaval", "bravoval", "carolval",
                                               "deltaval", "echoval"};
constexpr std::array<const char*, 5> kCands = {"amberone", "crimsonone",
                                               "indigoone", "oliveone", "tealone"};
constexpr int kDim = 5;

// Candidate i points along axis i; name j leans on axis j with a weaker pull
// toward axis j+1, so its nearest candidates are c_j then c_{j+1}. Every
// component is positive, keeping all saliencies positive.
embed::EmbeddingTable make_table() {
  std::vector<std::string> tokens;
  std::vector<float> data;
  for (std::size_t j = 0; j < kNames.size(); ++j) {
    tokens.emplace_back(kNames[j]);
    for (int d = 0; d < kDim; ++d) {
      float v = 0.15f;
      if (d == static_cast<int>(j)) v += 0.9f;
      if (d == static_cast<int>((j + 1) % kNames.size())) v += 0.45f;
      data.push_back(v);
    }
  }
  for (std::size_t i = 0; i < kCands.size(); ++i) {
    tokens.emplace_back(kCands[i]);
    for (int d = 0; d < kDim; ++d)
      data.push_back(d == static_cast<int>(i) ? 1.15f : 0.15f);
  }
  return embed::EmbeddingTable(std::move(tokens), std::move(data), kDim);
}

std::string slot_comment(const std::string& code, lang::Lang lg) {
  static const std::array<const char*, 3> kGaps = {
      " gapaa gapab gapac ", " gapba gapbb gapbc ", " gapca gapcb gapcc "};
  std::string out = "padaa padab padac";
  std::size_t slot = 0;
  for (const auto& info : lang::extract_identifiers(code, lg)) {
    out += kGaps[slot % kGaps.size()] + info.name;
    ++slot;
  }
  out += " tailaa tailab tailac";
  return out;
}

}  // namespace

Instance make_instance(std::uint64_t seed) {
  Rng rng(Rng::derive(seed, "toyspace"));
  Instance inst;
  inst.lang = rng.index(2) == 0 ? lang::Lang::java : lang::Lang::python;
  inst.table = make_table();
  inst.vocab.assign(kCands.begin(), kCands.end());

  const std::size_t id_count = 2 + rng.index(2);
  std::vector<std::size_t> order = {0, 1, 2, 3, 4};
  rng.shuffle(order);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < id_count; ++i) names.emplace_back(kNames[order[i]]);

  std::string code;
  if (inst.lang == lang::Lang::java) {
    code = id_count == 2
               ? "int " + names[0] + "(int " + names[1] + ") { return " + names[1] +
                     "; }"
               : "int " + names[0] + "(int " + names[1] + ", int " + names[2] +
                     ") { return " + names[1] + " + " + names[2] + "; }";
  } else {
    code = id_count == 2
               ? "def " + names[0] + "(" + names[1] + "):\n    return " + names[1] +
                     "\n"
               : "def " + names[0] + "(" + names[1] + ", " + names[2] +
                     "):\n    return " + names[1] + " + " + names[2] + "\n";
  }

  const lang::Lang lg = inst.lang;
  inst.victim = [lg](const std::string& c) { return slot_comment(c, lg); };

  inst.sample.id = "toy";
  inst.sample.code = code;
  inst.sample.comment = inst.victim(code);

  inst.config.k = 1 + static_cast<int>(rng.index(2));
  inst.config.max_subs =
      1 + static_cast<int>(rng.index(std::min<std::size_t>(2, id_count)));
  inst.config.seed = seed;
  return inst;
}

}  // namespace ccattack::toyspace
