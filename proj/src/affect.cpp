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

#include "cosmo_evo/affect.hpp"

#include <algorithm>
#include <cmath>

#include "cosmo_evo/errors.hpp"

namespace cosmo_evo::affect {

namespace {

double clamp_finite(double x, double lo, double hi) {
  if (std::isnan(x)) return std::clamp(0.0, lo, hi);
  return std::clamp(x, lo, hi);
}

}  // namespace

AffectTag::AffectTag(double valence, double arousal)
    : valence_(clamp_finite(valence, -1.0, 1.0)), arousal_(clamp_finite(arousal, 0.0, 1.0)) {}

void AffectConfig::validate() const {
  if (!(lambda >= 0.0)) throw ConfigError("affect.lambda", "must be >= 0");
  if (!(valence_scale > 0.0)) throw ConfigError("affect.valence_scale", "must be > 0");
  if (!(arousal_scale > 0.0)) throw ConfigError("affect.arousal_scale", "must be > 0");
  if (!std::isfinite(valence_mid)) throw ConfigError("affect.valence_mid", "must be finite");
  if (!(prune_v_max >= 0.0 && prune_v_max <= 1.0))
    throw ConfigError("affect.prune_v_max", "must be in [0, 1]");
  if (!(prune_a_max >= 0.0 && prune_a_max <= 1.0))
    throw ConfigError("affect.prune_a_max", "must be in [0, 1]");
}

AffectTag tag(double reward, double td, const AffectConfig& cfg) {
  return AffectTag((reward - cfg.valence_mid) / cfg.valence_scale,
                   std::abs(td) / cfg.arousal_scale);
}

double priority(double td, const AffectTag& tag, double lambda) {
  return std::abs(td) + lambda * std::abs(tag.valence()) * tag.arousal();
}

bool is_prunable(const AffectTag& tag, const AffectConfig& cfg) {
  return std::abs(tag.valence()) < cfg.prune_v_max && tag.arousal() < cfg.prune_a_max;
}

Tagger closed_form_tagger(const AffectConfig& cfg) {
  return [cfg](double reward, double td) { return tag(reward, td, cfg); };
}

}  // namespace cosmo_evo::affect
