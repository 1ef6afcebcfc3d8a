#include "ccattack/corpus.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ccattack::corpus {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string line_id(std::size_t line_no) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06zu", line_no);
  return buf;
}

json parse_line(const std::string& line, const std::string& path, std::size_t line_no) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw std::runtime_error(path + ":" + std::to_string(line_no) +
                             ": not a JSON object");
  return j;
}

std::string require_string(const json& j, const char* key, const std::string& path,
                           std::size_t line_no) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string())
    throw std::runtime_error(path + ":" + std::to_string(line_no) +
                             ": missing string field \"" + key + "\"");
  return it->get<std::string>();
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

Dataset parse_jsonl(const std::string& text, lang::Lang lang, const std::string& path) {
  Dataset data;
  data.lang = lang;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    json j = parse_line(line, path, line_no);
    Sample s;
    s.code = require_string(j, "code", path, line_no);
    s.comment = require_string(j, "comment", path, line_no);
    auto id = j.find("id");
    if (id == j.end()) {
      s.id = line_id(line_no);
    } else if (id->is_string()) {
      s.id = id->get<std::string>();
    } else if (id->is_number_integer()) {
      s.id = std::to_string(id->get<long long>());
    } else {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad id type");
    }
    if (!lang::validate(s.code, lang)) {
      ++data.dropped;
      continue;
    }
    data.samples.push_back(std::move(s));
  }
  return data;
}

}  // namespace

Dataset load_dataset(const std::string& path, lang::Lang lang) {
  return parse_jsonl(read_file(path), lang, path);
}

Dataset parse_dataset(const std::string& jsonl, lang::Lang lang) {
  return parse_jsonl(jsonl, lang, "<string>");
}

void save_dataset(const Dataset& data, const std::string& path) {
  std::string out;
  for (const Sample& s : data.samples) {
    json j;
    j["code"] = s.code;
    j["comment"] = s.comment;
    j["id"] = s.id;
    out += j.dump();
    out += '\n';
  }
  write_file(path, out);
}

std::string adversarial_to_jsonl(const std::vector<AdversarialSample>& samples) {
  std::string out;
  for (const AdversarialSample& s : samples) {
    json j;
    j["adv_code"] = s.adv_code;
    j["comment"] = s.comment;
    j["original_id"] = s.original_id;
    json subs = json::array();
    for (const auto& [from, to] : s.substitutions) subs.push_back(json::array({from, to}));
    j["substitutions"] = std::move(subs);
    out += j.dump();
    out += '\n';
  }
  return out;
}

void save_adversarial(const std::vector<AdversarialSample>& samples,
                      const std::string& path) {
  write_file(path, adversarial_to_jsonl(samples));
}

std::vector<AdversarialSample> load_adversarial(const std::string& path) {
  std::vector<AdversarialSample> out;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    json j = parse_line(line, path, line_no);
    AdversarialSample s;
    s.original_id = require_string(j, "original_id", path, line_no);
    s.adv_code = require_string(j, "adv_code", path, line_no);
    s.comment = require_string(j, "comment", path, line_no);
    auto subs = j.find("substitutions");
    if (subs == j.end() || !subs->is_array())
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": missing substitutions array");
    for (const json& pair : *subs) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() ||
          !pair[1].is_string())
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": substitutions must be [old, new] pairs");
      s.substitutions.emplace_back(pair[0].get<std::string>(),
                                   pair[1].get<std::string>());
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace ccattack::corpus
