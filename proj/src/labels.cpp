// Copyright 2026 The CPE-Identifier Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "cpeid/labels.hpp"

namespace cpeid {

std::string_view entity_name(Entity entity) {
  switch (entity) {
    case Entity::kEdition:
      return "edition";
    case Entity::kProduct:
      return "product";
    case Entity::kUpdate:
      return "update";
    case Entity::kVendor:
      return "vendor";
    case Entity::kVersion:
      return "version";
  }
  return "";
}

std::optional<Entity> entity_from_name(std::string_view name) {
  for (const Entity e : kAllEntities) {
    if (entity_name(e) == name) return e;
  }
  return std::nullopt;
}

std::size_t label_index(BioLabel label) {
  if (label.is_outside()) return 0;
  return 1 + 2 * static_cast<std::size_t>(label.entity) +
         (label.prefix == Prefix::kI ? 1 : 0);
}

BioLabel label_at(std::size_t index) {
  if (index == 0) return BioLabel::outside();
  const auto entity = static_cast<Entity>((index - 1) / 2);
  return (index - 1) % 2 == 0 ? BioLabel::begin(entity)
                              : BioLabel::inside(entity);
}

std::string label_name(BioLabel label) {
  if (label.is_outside()) return "O";
  std::string out = label.prefix == Prefix::kB ? "B-" : "I-";
  out += entity_name(label.entity);
  return out;
}

std::optional<BioLabel> parse_label(std::string_view text) {
  if (text == "O") return BioLabel::outside();
  if (text.size() < 3 || text[1] != '-') return std::nullopt;
  const auto entity = entity_from_name(text.substr(2));
  if (!entity) return std::nullopt;
  if (text[0] == 'B') return BioLabel::begin(*entity);
  if (text[0] == 'I') return BioLabel::inside(*entity);
  return std::nullopt;
}

bool transition_allowed(std::optional<BioLabel> prev, BioLabel cur) {
  if (cur.prefix != Prefix::kI) return true;
  return prev && !prev->is_outside() && prev->entity == cur.entity;
}

bool is_bio_valid(std::span<const BioLabel> labels) {
  std::optional<BioLabel> prev;
  for (const BioLabel& label : labels) {
    if (!transition_allowed(prev, label)) return false;
    prev = label;
  }
  return true;
}

std::vector<BioLabel> repair_bio(std::span<const BioLabel> labels) {
  std::vector<BioLabel> out(labels.begin(), labels.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::optional<BioLabel> prev =
        i == 0 ? std::nullopt : std::optional<BioLabel>(out[i - 1]);
    if (!transition_allowed(prev, out[i])) out[i].prefix = Prefix::kB;
  }
  return out;
}

}  // namespace cpeid
