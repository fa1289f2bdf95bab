// Copyright 2026 The GenSF Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gensf/corpus.h"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gensf/error.h"
#include "gensf/random.h"
#include "json.hpp"

namespace gensf {
namespace {

using nlohmann::json;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kNotFound, "dataset not found: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

SlotLabel ParseLabel(const json& value, const std::string& utterance,
                     const std::string& where) {
  if (value.is_null()) return {};
  if (!value.is_object() || !value.contains("span")) {
    throw Error(ErrorKind::kParse, where + ": label must be null or {\"span\": [start, end]}");
  }
  const json& span = value.at("span");
  if (!span.is_array() || span.size() != 2 || !span[0].is_number_integer() ||
      !span[1].is_number_integer()) {
    throw Error(ErrorKind::kParse, where + ": span must be two integers");
  }
  const auto start = span[0].get<long long>();
  const auto end = span[1].get<long long>();
  if (start < 0 || end < 0) {
    throw Error(ErrorKind::kValidation, where + ": negative span offset");
  }
  SlotLabel label{Span{static_cast<std::size_t>(start), static_cast<std::size_t>(end)}};
  // An explicit surface string must agree with the offsets.
  if (value.contains("value") && label.span->end <= utterance.size() &&
      label.span->start <= label.span->end &&
      utterance.substr(label.span->start, label.span->size()) !=
          value.at("value").get<std::string>()) {
    throw Error(ErrorKind::kValidation, where + ": \"value\" does not match span text");
  }
  return label;
}

json LabelToJson(const SlotExample& example, const SlotLabel& label) {
  if (!label.has_value()) return nullptr;
  return json{{"span", {label.span->start, label.span->end}},
              {"value", example.utterance.substr(label.span->start, label.span->size())}};
}

// Code point index -> byte offset for UTF-8 text. Indices past the end map to
// the end of the string.
std::size_t CodePointToByte(const std::string& text, std::size_t index) {
  std::size_t cp = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if ((static_cast<unsigned char>(text[i]) & 0xC0) == 0x80) continue;
    if (cp == index) return i;
    ++cp;
  }
  return cp == index ? text.size() : text.size() + 1;
}

}  // namespace

std::string SlotExample::Surface(const std::string& slot_key) const {
  auto it = labels.find(slot_key);
  if (it == labels.end() || !it->second.has_value()) return {};
  return utterance.substr(it->second.span->start, it->second.span->size());
}

void ValidateDataset(const Dataset& dataset) {
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < dataset.examples.size(); ++i) {
    const SlotExample& ex = dataset.examples[i];
    const std::string where = "record " + std::to_string(i);
    for (const std::string& key : ex.requested_slots) {
      if (!dataset.slot_keys.contains(key)) {
        problems.push_back(where + ": requested slot '" + key + "' not in slot set");
      }
    }
    for (const auto& [key, label] : ex.labels) {
      if (!dataset.slot_keys.contains(key)) {
        problems.push_back(where + ": label key '" + key + "' not in slot set");
      }
      if (!label.has_value()) continue;
      const Span& span = *label.span;
      if (span.start >= span.end) {
        problems.push_back(where + ": empty or inverted span for '" + key + "'");
      } else if (span.end > ex.utterance.size()) {
        problems.push_back(where + ": span for '" + key + "' exceeds utterance length");
      }
    }
  }
  if (problems.empty()) return;
  std::string message = "dataset '" + dataset.domain_name + "' failed validation:";
  for (const std::string& p : problems) message += "\n  " + p;
  throw Error(ErrorKind::kValidation, message);
}

Dataset ParseDataset(const std::string& contents, const std::string& name) {
  Dataset dataset;
  dataset.domain_name = name;
  bool declared_keys = false;
  std::istringstream lines(contents);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) {
      continue;
    }
    const std::string where = "line " + std::to_string(line_no) + " (record " +
                              std::to_string(dataset.examples.size()) + ")";
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::kParse, where + ": " + e.what());
    }
    if (!record.is_object()) throw Error(ErrorKind::kParse, where + ": expected an object");
    try {
      if (record.contains("slot_keys")) {
        if (!dataset.examples.empty() || declared_keys) {
          throw Error(ErrorKind::kParse, where + ": header must be the first line");
        }
        dataset.domain_name = record.value("domain", name);
        for (const auto& key : record.at("slot_keys")) dataset.slot_keys.insert(key.get<std::string>());
        declared_keys = true;
        continue;
      }
      SlotExample ex;
      ex.utterance = record.at("utterance").get<std::string>();
      if (record.contains("requested")) {
        ex.requested_slots = record.at("requested").get<std::vector<std::string>>();
      }
      if (record.contains("labels")) {
        for (const auto& [key, value] : record.at("labels").items()) {
          ex.labels[key] = ParseLabel(value, ex.utterance, where + " label '" + key + "'");
        }
      }
      if (!declared_keys) {
        dataset.slot_keys.insert(ex.requested_slots.begin(), ex.requested_slots.end());
        for (const auto& entry : ex.labels) dataset.slot_keys.insert(entry.first);
      }
      dataset.examples.push_back(std::move(ex));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kParse, where + ": " + e.what());
    }
  }
  ValidateDataset(dataset);
  return dataset;
}

Dataset LoadDataset(const std::string& path) {
  return ParseDataset(ReadFile(path), std::filesystem::path(path).stem().string());
}

std::string SerializeDataset(const Dataset& dataset) {
  std::string out;
  json header{{"domain", dataset.domain_name}, {"slot_keys", dataset.slot_keys}};
  out += header.dump() + "\n";
  for (const SlotExample& ex : dataset.examples) {
    json labels = json::object();
    for (const auto& [key, label] : ex.labels) labels[key] = LabelToJson(ex, label);
    json record{{"utterance", ex.utterance}, {"requested", ex.requested_slots}, {"labels", labels}};
    out += record.dump() + "\n";
  }
  return out;
}

void SaveDataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << SerializeDataset(dataset);
}

Dataset ImportRestaurants8k(const std::string& path) {
  json root;
  try {
    root = json::parse(ReadFile(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, path + ": " + e.what());
  }
  if (!root.is_array()) throw Error(ErrorKind::kParse, path + ": expected a JSON array");
  Dataset dataset;
  dataset.domain_name = "restaurants";
  for (std::size_t i = 0; i < root.size(); ++i) {
    const json& rec = root[i];
    const std::string where = "record " + std::to_string(i);
    try {
      SlotExample ex;
      ex.utterance = rec.at("userInput").at("text").get<std::string>();
      if (rec.contains("context") && rec["context"].contains("requestedSlots")) {
        ex.requested_slots = rec["context"]["requestedSlots"].get<std::vector<std::string>>();
      }
      if (rec.contains("labels")) {
        for (const json& lab : rec["labels"]) {
          const std::string slot = lab.at("slot").get<std::string>();
          const json& vs = lab.at("valueSpan");
          const auto start = vs.value("startIndex", 0);
          const auto end = vs.at("endIndex").get<int>();
          ex.labels[slot] = SlotLabel{Span{CodePointToByte(ex.utterance, start),
                                           CodePointToByte(ex.utterance, end)}};
        }
      }
      dataset.slot_keys.insert(ex.requested_slots.begin(), ex.requested_slots.end());
      for (const auto& entry : ex.labels) dataset.slot_keys.insert(entry.first);
      dataset.examples.push_back(std::move(ex));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kParse, where + ": " + e.what());
    }
  }
  ValidateDataset(dataset);
  return dataset;
}

Dataset SplitFraction(const Dataset& dataset, int denominator, std::uint64_t seed) {
  if (denominator < 1) {
    throw Error(ErrorKind::kConfig, "fraction denominator must be >= 1");
  }
  const std::size_t keep = dataset.examples.size() / static_cast<std::size_t>(denominator);
  if (keep == 0) {
    throw Error(ErrorKind::kValidation,
                "fraction 1/" + std::to_string(denominator) + " of " +
                    std::to_string(dataset.examples.size()) + " examples is empty");
  }
  if (denominator == 1) return dataset;
  std::vector<std::size_t> index(dataset.examples.size());
  for (std::size_t i = 0; i < index.size(); ++i) index[i] = i;
  Rng rng(DeriveSeed(seed, "fraction"));
  Shuffle(index.begin(), index.end(), rng);
  index.resize(keep);
  std::sort(index.begin(), index.end());
  Dataset out;
  out.domain_name = dataset.domain_name;
  out.slot_keys = dataset.slot_keys;
  out.examples.reserve(keep);
  for (std::size_t i : index) out.examples.push_back(dataset.examples[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic corpus.

namespace {

const char* const kSyllables[] = {
    "la",  "ke",  "sha", "mo",  "cher", "nan", "cie", "wal", "te",  "mey",
    "lau", "ri",  "ce",  "hoi", "sel",  "dor", "an",  "ma",  "bel", "to",
    "vin", "ka",  "ro",  "li",  "den",  "tha", "gor", "mi",  "sen", "pa",
    "zu",  "ner", "fa",  "quin", "el",  "bra", "do",  "ri",  "vos", "tan"};

const char* const kMonths[] = {"January", "February", "March",     "April",
                               "May",     "June",     "July",      "August",
                               "September", "October", "November", "December"};

const char* const kWeekdays[] = {"monday", "tuesday", "wednesday", "thursday",
                                 "friday", "saturday", "sunday"};

const char* const kNumberWords[] = {"two", "three", "four", "five", "six",
                                    "seven", "eight", "nine", "ten"};

std::string Ordinal(int day) {
  const char* suffix = "th";
  if (day % 100 < 11 || day % 100 > 13) {
    if (day % 10 == 1) suffix = "st";
    if (day % 10 == 2) suffix = "nd";
    if (day % 10 == 3) suffix = "rd";
  }
  return std::to_string(day) + suffix;
}

template <typename T, std::size_t N>
const T& Pick(Rng& rng, const T (&items)[N]) {
  return items[UniformIndex(rng, N)];
}

template <typename T>
const T& Pick(Rng& rng, const std::vector<T>& items) {
  return items[UniformIndex(rng, items.size())];
}

std::string DateValue(Rng& rng) {
  switch (UniformIndex(rng, 6)) {
    case 0:
    case 1:
      return std::string(Pick(rng, kMonths)) + " " + Ordinal(1 + static_cast<int>(UniformIndex(rng, 28)));
    case 2:
      return std::string("next ") + Pick(rng, kWeekdays);
    case 3:
      return Pick(rng, kWeekdays);
    case 4:
      return "the " + Ordinal(1 + static_cast<int>(UniformIndex(rng, 28)));
    default: {
      static const char* const kRelative[] = {"tomorrow", "today", "tonight"};
      return Pick(rng, kRelative);
    }
  }
}

std::string HourValue(Rng& rng) { return std::to_string(1 + UniformIndex(rng, 12)); }

std::string TimeValue(Rng& rng) {
  switch (UniformIndex(rng, 6)) {
    case 0:
    case 1:
      return HourValue(rng) + (UniformIndex(rng, 2) ? "pm" : "am");
    case 2:
      return HourValue(rng) + (UniformIndex(rng, 2) ? ":30" : ":15") + "pm";
    case 3:
      return HourValue(rng) + " o'clock";
    case 4:
      return "half past " + HourValue(rng);
    default: {
      static const char* const kNamed[] = {"noon", "midnight", "lunchtime"};
      return Pick(rng, kNamed);
    }
  }
}

std::string PeopleValue(Rng& rng) {
  if (UniformIndex(rng, 2) == 0) return std::to_string(2 + UniformIndex(rng, 11));
  return Pick(rng, kNumberWords);
}

// Carrier phrases. Placeholders: {date} {time} {people} {first} {last}.
const char* const kCarriers[] = {
    // no slots
    "Hi, I would like to make a reservation",
    "Can you help me book a table?",
    "I want to book a restaurant",
    "hello there",
    "Do you have any tables available?",
    "I need to change my booking",
    // one slot
    "Table for {people} please",
    "I need a table for {people} people",
    "Can I book for {date}?",
    "I'd like to come in {date}",
    "Is there anything at {time}?",
    "We will arrive around {time}",
    "The booking is for {date}",
    "There will be {people} of us",
    "It's under the name {last}",
    "My first name is {first}",
    // two slots
    "A table for {people} at {time} please",
    "Book us in for {date} at {time}",
    "My name is {first} {last}",
    "{people} people on {date}",
    "Could we get a table at {time} {date}?",
    "Please reserve a table for {first} {last}",
    "Can {people} of us come at {time}?",
    // three slots
    "We will require an outside table to seat {people} people on {date} at {time}",
    "I need a table for {people} at {time} on {date}",
    "My party will be {people} people. My name is {first} {last}",
    "Book a table for {first} {last} on {date}",
    "{first} {last}, party of {people}",
    "Reserve {date} at {time} for {last}",
};

struct RequestedCarrier {
  const char* text;
  std::vector<std::string> requested;
};

// Answers to a system question; bare values are ambiguous without the
// requested slots (a bare hour is a time or a head count).
const std::vector<RequestedCarrier>& RequestedCarriers() {
  static const std::vector<RequestedCarrier> carriers = {
      {"{people}", {"people"}},
      {"{people} people", {"people"}},
      {"we are {people}", {"people"}},
      {"{time}", {"time"}},
      {"{time} works", {"time"}},
      {"{date}", {"date"}},
      {"{date} please", {"date"}},
      {"{first} {last}", {"first_name", "last_name"}},
      {"{first}", {"first_name"}},
      {"{last}", {"last_name"}},
      {"it's {last}", {"last_name"}},
      {"{time} for {people}", {"time", "people"}},
  };
  return carriers;
}

struct Placeholder {
  const char* token;
  const char* slot;
};

constexpr Placeholder kPlaceholders[] = {{"{date}", "date"},
                                         {"{time}", "time"},
                                         {"{people}", "people"},
                                         {"{first}", "first_name"},
                                         {"{last}", "last_name"}};

std::vector<std::string> CarrierSlots(const std::string& carrier) {
  std::vector<std::string> slots;
  for (const Placeholder& p : kPlaceholders) {
    if (carrier.find(p.token) != std::string::npos) slots.push_back(p.slot);
  }
  return slots;
}

std::vector<std::string> MakeNamePool(Rng& rng, std::size_t count) {
  std::set<std::string> seen;
  std::vector<std::string> names;
  while (names.size() < count) {
    const std::size_t syllables = 2 + UniformIndex(rng, 2);
    std::string name;
    for (std::size_t i = 0; i < syllables; ++i) name += Pick(rng, kSyllables);
    name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    if (seen.insert(name).second) names.push_back(name);
  }
  return names;
}

constexpr std::size_t kNamePoolSize = 6000;

struct ValuePools {
  std::vector<std::string> names;
};

SlotExample Compose(const std::string& carrier, std::vector<std::string> requested,
                    const ValuePools& pools, Rng& rng) {
  SlotExample ex;
  ex.requested_slots = std::move(requested);
  std::size_t pos = 0;
  while (pos < carrier.size()) {
    const std::size_t open = carrier.find('{', pos);
    if (open == std::string::npos) {
      ex.utterance += carrier.substr(pos);
      break;
    }
    ex.utterance += carrier.substr(pos, open - pos);
    const std::size_t close = carrier.find('}', open);
    const std::string token = carrier.substr(open, close - open + 1);
    std::string slot;
    std::string value;
    if (token == "{date}") {
      slot = "date";
      value = DateValue(rng);
    } else if (token == "{time}") {
      slot = "time";
      value = TimeValue(rng);
    } else if (token == "{people}") {
      slot = "people";
      value = PeopleValue(rng);
    } else if (token == "{first}") {
      slot = "first_name";
      value = Pick(rng, pools.names);
    } else {
      slot = "last_name";
      value = Pick(rng, pools.names);
    }
    // Bare-hour answers make the time/people ambiguity explicit.
    if (slot == "time" && carrier == "{time}" && UniformIndex(rng, 3) == 0) {
      value = HourValue(rng);
    }
    const std::size_t start = ex.utterance.size();
    ex.utterance += value;
    ex.labels[slot] = SlotLabel{Span{start, ex.utterance.size()}};
    pos = close + 1;
  }
  // Case variation on carrier text only; slot values keep their casing.
  if (!ex.utterance.empty() && UniformIndex(rng, 4) == 0) {
    const bool first_is_slot =
        std::any_of(ex.labels.begin(), ex.labels.end(),
                    [](const auto& entry) { return entry.second.has_value() && entry.second.span->start == 0; });
    if (!first_is_slot) {
      char& c = ex.utterance[0];
      c = static_cast<char>(std::islower(static_cast<unsigned char>(c))
                                ? std::toupper(static_cast<unsigned char>(c))
                                : std::tolower(static_cast<unsigned char>(c)));
    }
  }
  return ex;
}

Dataset MakeSplit(std::size_t size, const std::vector<std::string>& slot_keys,
                  const ValuePools& pools, const std::string& domain, Rng& rng) {
  const std::set<std::string> allowed(slot_keys.begin(), slot_keys.end());
  auto usable = [&](const std::vector<std::string>& slots) {
    return std::all_of(slots.begin(), slots.end(),
                       [&](const std::string& s) { return allowed.contains(s); });
  };
  std::vector<std::string> carriers;
  for (const char* c : kCarriers) {
    if (usable(CarrierSlots(c))) carriers.emplace_back(c);
  }
  std::vector<RequestedCarrier> requested;
  for (const RequestedCarrier& rc : RequestedCarriers()) {
    if (usable(CarrierSlots(rc.text)) && usable(rc.requested)) requested.push_back(rc);
  }

  Dataset dataset;
  dataset.domain_name = domain;
  dataset.slot_keys = allowed;
  dataset.examples.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    if (!requested.empty() && UniformIndex(rng, 4) == 0) {
      const RequestedCarrier& rc = Pick(rng, requested);
      dataset.examples.push_back(Compose(rc.text, rc.requested, pools, rng));
    } else {
      dataset.examples.push_back(Compose(Pick(rng, carriers), {}, pools, rng));
    }
  }
  return dataset;
}

}  // namespace

const std::vector<std::string>& SyntheticSlotKeys() {
  static const std::vector<std::string> keys = {"date", "time", "people", "first_name",
                                                "last_name"};
  return keys;
}

SyntheticCorpus GenerateSynthetic(const SynthConfig& config, std::uint64_t seed) {
  if (config.train_size < 1 || config.test_size < 1) {
    throw Error(ErrorKind::kConfig, "synthetic train and test sizes must be >= 1");
  }
  if (config.num_slots < 1 || config.num_slots > SyntheticSlotKeys().size()) {
    throw Error(ErrorKind::kConfig, "synthetic slot count must be in [1, 5]");
  }
  Rng rng(DeriveSeed(seed, "corpus"));
  // Large pools keep most names rare, so a tokenizer trained on the corpus
  // splits train and test names alike.
  std::vector<std::string> names = MakeNamePool(rng, kNamePoolSize);
  const auto split = names.begin() + kNamePoolSize * 7 / 10;
  ValuePools train_pools{{names.begin(), split}};
  ValuePools test_pools{{split, names.end()}};
  const std::vector<std::string> keys(SyntheticSlotKeys().begin(),
                                      SyntheticSlotKeys().begin() + config.num_slots);
  SyntheticCorpus corpus;
  corpus.train = MakeSplit(config.train_size, keys, train_pools, "synthetic", rng);
  corpus.test = MakeSplit(config.test_size, keys, test_pools, "synthetic", rng);
  return corpus;
}

}  // namespace gensf
