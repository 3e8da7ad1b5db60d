// Copyright 2026 The tgrl Authors.
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

#ifndef TGRL_FEATURES_H_
#define TGRL_FEATURES_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tgrl/interval.h"

namespace tgrl {

using Rng = std::mt19937_64;

// M unit-level feature vectors; unit i covers [i/M, (i+1)/M) of the timeline.
struct FeatureVideo {
  std::size_t num_units = 0;
  std::size_t dim = 0;
  std::vector<double> units;  // num_units x dim, row-major

  std::span<const double> unit(std::size_t i) const {
    return std::span<const double>(units).subspan(i * dim, dim);
  }
  bool operator==(const FeatureVideo&) const = default;
};

struct GroundingEpisode {
  std::string id;
  FeatureVideo video;
  std::vector<double> query;
  Interval gt;

  bool operator==(const GroundingEpisode&) const = default;
};

using Dataset = std::vector<GroundingEpisode>;

struct SynthConfig {
  std::size_t num_units = 20;
  std::size_t video_dim = 32;
  std::size_t query_dim = 64;
  std::size_t concept_count = 8;
  double noise_sigma = 0.1;
  double min_len = 0.2;
  double max_len = 0.5;
  std::uint64_t seed = 0;

  // Throws ConfigError on infeasible settings.
  void validate() const;
};

// Planted-concept episode source.
//
// The concept signatures (one d_v vector per concept) and the query
// projection (d_q x concept_count) are fixed by cfg.seed, so every episode
// drawn from generators with the same config shares them. Each episode picks a
// concept and a distinct distractor; units whose midpoint lies inside gt carry
// the concept signature, the rest the distractor, both plus Gaussian noise.
// The query is the projection of the concept's one-hot vector plus noise.
class SynthGenerator {
 public:
  explicit SynthGenerator(SynthConfig cfg);

  // Draws concept, distractor and gt (length uniform in [min_len, max_len],
  // start uniform over feasible positions) from rng.
  GroundingEpisode sample(Rng& rng, std::string id = "") const;

  // Fully specified episode; noise still comes from rng.
  GroundingEpisode make(Rng& rng, std::size_t concept_id,
                        std::size_t distractor, Interval gt,
                        std::string id = "") const;

  // Ids are id_prefix + (first_index + i).
  Dataset generate(Rng& rng, std::size_t count,
                   const std::string& id_prefix = "ep",
                   std::size_t first_index = 0) const;

  std::span<const double> signature(std::size_t concept_id) const;
  const SynthConfig& config() const { return cfg_; }

 private:
  SynthConfig cfg_;
  std::vector<double> signatures_;  // concept_count x video_dim
  std::vector<double> projection_;  // query_dim x concept_count
};

GroundingEpisode synth_episode(Rng& rng, const SynthConfig& cfg);

// JSON-lines dataset I/O. One object per line:
//   {"id": str, "units": [[...], ...], "query": [...], "gt": [g_s, g_e]}
// Blank lines are ignored. Errors: ParseError (with line number),
// SchemaError (dimension drift), ValidationError (gt invariants, naming id).
Dataset load_dataset(const std::string& path);
Dataset parse_dataset(std::istream& in);
void save_dataset(const Dataset& data, const std::string& path);
void write_dataset(const Dataset& data, std::ostream& out);

// Mean of all unit vectors.
std::vector<double> global_pool(const FeatureVideo& video);

// Mean of the units overlapping (clip.start, clip.end) with positive measure.
// Inverted clips and clips that overlap no unit pool to the zero vector.
std::vector<double> clip_pool(const FeatureVideo& video, Interval clip);

// Contiguous unit range [first, first + count) overlapped by clip.
struct UnitRange {
  std::size_t first = 0;
  std::size_t count = 0;
};
UnitRange overlapped_units(std::size_t num_units, Interval clip);

}  // namespace tgrl

#endif  // TGRL_FEATURES_H_
