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

#ifndef CPEID_LABELS_HPP_
#define CPEID_LABELS_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cpeid {

// The five CPE entity types, in label-set order.
enum class Entity { kEdition = 0, kProduct, kUpdate, kVendor, kVersion };

inline constexpr std::size_t kEntityCount = 5;
inline constexpr std::array<Entity, kEntityCount> kAllEntities = {
    Entity::kEdition, Entity::kProduct, Entity::kUpdate, Entity::kVendor,
    Entity::kVersion};

std::string_view entity_name(Entity entity);
std::optional<Entity> entity_from_name(std::string_view name);

enum class Prefix { kB, kI, kO };

struct BioLabel {
  Prefix prefix = Prefix::kO;
  Entity entity = Entity::kEdition;  // meaningful only when prefix != kO

  static BioLabel outside() { return {}; }
  static BioLabel begin(Entity e) { return {Prefix::kB, e}; }
  static BioLabel inside(Entity e) { return {Prefix::kI, e}; }

  bool is_outside() const { return prefix == Prefix::kO; }
  std::optional<Entity> entity_if_any() const {
    if (is_outside()) return std::nullopt;
    return entity;
  }

  bool operator==(const BioLabel& other) const {
    if (prefix != other.prefix) return false;
    return prefix == Prefix::kO || entity == other.entity;
  }
};

// Label set of the tagger: O first, then B-x/I-x per entity in entity order.
inline constexpr std::size_t kLabelCount = 1 + 2 * kEntityCount;

std::size_t label_index(BioLabel label);
BioLabel label_at(std::size_t index);

std::string label_name(BioLabel label);
// Accepts "O", "B-<entity>", "I-<entity>"; nullopt for anything else.
std::optional<BioLabel> parse_label(std::string_view text);

// True iff every I-x directly follows B-x or I-x.
bool is_bio_valid(std::span<const BioLabel> labels);

// True iff label cur may follow prev (prev == nullopt means sentence start).
bool transition_allowed(std::optional<BioLabel> prev, BioLabel cur);

// Orphan I-x and I-x after a different entity become B-x. Idempotent.
std::vector<BioLabel> repair_bio(std::span<const BioLabel> labels);

}  // namespace cpeid

#endif  // CPEID_LABELS_HPP_
