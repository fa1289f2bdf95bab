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

#include "gensf/templating.h"

#include <fstream>
#include <sstream>

#include "gensf/error.h"

namespace gensf {
namespace {

std::string Trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

}  // namespace

NameMap::NameMap(std::map<std::string, std::string> phrases) : phrases_(std::move(phrases)) {
  for (const auto& [key, phrase] : phrases_) {
    if (phrase.empty() || phrase.find(kEosMarker) != std::string::npos) {
      throw Error(ErrorKind::kConfig, "invalid phrase for slot '" + key + "'");
    }
  }
}

const std::string& NameMap::Phrase(const std::string& slot_key) const {
  auto it = phrases_.find(slot_key);
  if (it == phrases_.end()) {
    throw Error(ErrorKind::kConfig, "unknown slot key '" + slot_key + "' in name map");
  }
  return it->second;
}

void NameMap::CheckCovers(const std::set<std::string>& slot_keys) const {
  for (const std::string& key : slot_keys) Phrase(key);
}

NameMap NameMap::Parse(const std::string& contents) {
  std::map<std::string, std::string> phrases;
  std::istringstream in(contents);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kParse, "name map line " + std::to_string(line_no) + ": expected key = phrase");
    }
    phrases[Trim(trimmed.substr(0, eq))] = Trim(trimmed.substr(eq + 1));
  }
  return NameMap(std::move(phrases));
}

NameMap NameMap::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kNotFound, "name map not found: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return Parse(buffer.str());
}

std::string NameMap::Serialize() const {
  std::string out;
  for (const auto& [key, phrase] : phrases_) out += key + " = " + phrase + "\n";
  return out;
}

NameMap DefaultNameMap(std::string_view domain) {
  if (domain == "restaurants" || domain == "synthetic") {
    return NameMap({{"date", "date"},
                    {"time", "time"},
                    {"people", "number of people"},
                    {"first_name", "first name"},
                    {"last_name", "last name"}});
  }
  if (domain == "dstc8") {
    return NameMap({{"from_location", "leaving from"},
                    {"to_location", "going to"},
                    {"leaving_date", "departure date"},
                    {"leaving_time", "departure time"},
                    {"from_station", "leaving from"},
                    {"to_station", "going to"},
                    {"city_of_event", "city"},
                    {"date", "date"},
                    {"time", "time"},
                    {"event_name", "event"},
                    {"number_of_seats", "number of seats"},
                    {"venue", "venue"},
                    {"area", "area"},
                    {"number_of_beds", "number of bedrooms"},
                    {"number_of_baths", "number of bathrooms"},
                    {"property_name", "property"},
                    {"visit_date", "visit date"},
                    {"pickup_location", "pickup location"},
                    {"pickup_date", "pickup date"},
                    {"pickup_time", "pickup time"},
                    {"dropoff_date", "drop off date"},
                    {"type", "car type"}});
  }
  throw Error(ErrorKind::kConfig, "no default name map for domain '" + std::string(domain) + "'");
}

ContextText RenderContext(const SlotExample& example, const std::string& slot_key,
                          const NameMap& names) {
  if (example.utterance.empty()) {
    throw Error(ErrorKind::kValidation, "cannot render an empty utterance");
  }
  const std::string& phrase = names.Phrase(slot_key);
  ContextText ctx;
  if (!example.requested_slots.empty()) {
    ctx.text = "What is the ";
    for (std::size_t i = 0; i < example.requested_slots.size(); ++i) {
      if (i > 0) ctx.text += ", ";
      ctx.text += names.Phrase(example.requested_slots[i]);
    }
    ctx.text += "? ";
    ctx.text += kEosMarker;
    ctx.text += ' ';
  }
  ctx.utterance_range.start = ctx.text.size();
  ctx.text += example.utterance;
  ctx.utterance_range.end = ctx.text.size();
  ctx.text += ' ';
  ctx.text += kEosMarker;
  ctx.text += " Ok, the " + phrase + " is";
  return ctx;
}

ContextText RenderTrivialContext(const SlotExample& example, const std::string& slot_key) {
  ContextText ctx;
  ctx.utterance_range = {0, example.utterance.size()};
  ctx.text = example.utterance + " " + std::string(kEosMarker) + " " + slot_key + " =";
  return ctx;
}

TargetText RenderTarget(const SlotExample& example, const SlotLabel& label) {
  TargetText target;
  if (!label.has_value()) {
    target.text = std::string(kNotProvided) + " " + std::string(kEosMarker);
    return target;
  }
  const Span& span = *label.span;
  if (span.start >= span.end || span.end > example.utterance.size()) {
    throw Error(ErrorKind::kValidation, "target span is empty or out of range");
  }
  target.span = span;
  target.text = example.utterance.substr(span.start, span.size()) + " " + std::string(kEosMarker);
  return target;
}

}  // namespace gensf
