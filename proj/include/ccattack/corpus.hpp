#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ccattack/lang.hpp"

namespace ccattack::corpus {

struct Sample {
  std::string id;
  std::string code;
  std::string comment;
};

struct Dataset {
  lang::Lang lang = lang::Lang::java;
  std::vector<Sample> samples;
  std::size_t dropped = 0;  // lines rejected by the validity check
};

// One JSON object per line with "code" and "comment" fields; "id" is optional
// and defaults to the zero-padded 1-based line number. Samples whose code
// fails lang::validate are dropped and counted. Throws std::runtime_error on
// unreadable files or malformed JSON.
Dataset load_dataset(const std::string& path, lang::Lang lang);
Dataset parse_dataset(const std::string& jsonl, lang::Lang lang);

void save_dataset(const Dataset& data, const std::string& path);

struct AdversarialSample {
  std::string original_id;
  std::string adv_code;
  // Applied substitutions as (old, new) pairs in application order.
  std::vector<std::pair<std::string, std::string>> substitutions;
  std::string comment;  // reference comment carried over from the dataset
};

// JSONL with sorted keys and '\n' terminators; output is byte-stable.
void save_adversarial(const std::vector<AdversarialSample>& samples,
                      const std::string& path);
std::vector<AdversarialSample> load_adversarial(const std::string& path);

std::string adversarial_to_jsonl(const std::vector<AdversarialSample>& samples);

}  // namespace ccattack::corpus
