#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ccattack/attack.hpp"
#include "ccattack/corpus.hpp"
#include "ccattack/embed.hpp"

// Tiny attack instances with a hand-built embedding table and a victim whose
// comment isolates each identifier between constant words, so no 4-gram
// spans two substituted positions and exhaustive search is tractable.
namespace ccattack::toyspace {

struct Instance {
  corpus::Sample sample;
  lang::Lang lang = lang::Lang::java;
  embed::EmbeddingTable table;
  std::vector<std::string> vocab;  // candidate words
  attack::AttackConfig config;     // k and max_subs set per instance
  std::function<std::string(const std::string&)> victim;
};

Instance make_instance(std::uint64_t seed);

}  // namespace ccattack::toyspace
