// Copyright 2026 The cosmo-evo Authors
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

#pragma once

#include <functional>

namespace cosmo_evo::affect {

// Valence in [-1, 1], arousal in [0, 1]. Values are clamped on construction.
class AffectTag {
 public:
  AffectTag() = default;
  AffectTag(double valence, double arousal);

  double valence() const noexcept { return valence_; }
  double arousal() const noexcept { return arousal_; }

  bool operator==(const AffectTag&) const = default;

 private:
  double valence_ = 0.0;
  double arousal_ = 0.0;
};

struct AffectConfig {
  double lambda = 0.6;
  double valence_mid = 5.0;
  double valence_scale = 5.0;
  double arousal_scale = 5.0;
  double prune_v_max = 0.2;
  double prune_a_max = 0.3;

  void validate() const;
  bool operator==(const AffectConfig&) const = default;
};

// Closed-form tagger: valence from normalized reward, arousal from |td|.
AffectTag tag(double reward, double td, const AffectConfig& cfg);

// |td| + lambda * |v| * a
double priority(double td, const AffectTag& tag, double lambda);

// |v| < prune_v_max and a < prune_a_max, both strict.
bool is_prunable(const AffectTag& tag, const AffectConfig& cfg);

// Substitution point for a learned tagger. The default wraps `tag`.
using Tagger = std::function<AffectTag(double reward, double td)>;

Tagger closed_form_tagger(const AffectConfig& cfg);

}  // namespace cosmo_evo::affect
