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

#include "tgrl/features.h"

#include <cmath>
#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

#include "json.hpp"
#include "tgrl/errors.h"
#include "tgrl/kernels.h"

namespace tgrl {

using nlohmann::json;

namespace {

// Overlaps shorter than this count as touching, not overlapping. Boundaries
// reached by repeated +/- delta carry rounding residue of order 1e-16.
constexpr double kOverlapEps = 1e-9;

}  // namespace

void SynthConfig::validate() const {
  if (num_units == 0 || video_dim == 0 || query_dim == 0)
    throw ConfigError("synth: dimensions must be positive");
  if (concept_count < 2)
    throw ConfigError("synth: concept_count must be at least 2");
  if (!(min_len > 0.0 && min_len <= max_len && max_len <= 1.0))
    throw ConfigError("synth: need 0 < min_len <= max_len <= 1");
  if (!(noise_sigma >= 0.0))
    throw ConfigError("synth: noise_sigma must be non-negative");
}

SynthGenerator::SynthGenerator(SynthConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  Rng basis_rng(cfg_.seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  signatures_.resize(cfg_.concept_count * cfg_.video_dim);
  for (auto& v : signatures_) v = normal(basis_rng);
  projection_.resize(cfg_.query_dim * cfg_.concept_count);
  for (auto& v : projection_) v = normal(basis_rng);
}

std::span<const double> SynthGenerator::signature(std::size_t concept_id) const {
  return std::span<const double>(signatures_)
      .subspan(concept_id * cfg_.video_dim, cfg_.video_dim);
}

GroundingEpisode SynthGenerator::make(Rng& rng, std::size_t concept_id,
                                      std::size_t distractor, Interval gt,
                                      std::string id) const {
  if (concept_id >= cfg_.concept_count || distractor >= cfg_.concept_count ||
      concept_id == distractor)
    throw ConfigError("synth: invalid concept/distractor pair");
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sigma = cfg_.noise_sigma;

  GroundingEpisode ep;
  ep.id = std::move(id);
  ep.gt = gt;
  ep.video.num_units = cfg_.num_units;
  ep.video.dim = cfg_.video_dim;
  ep.video.units.resize(cfg_.num_units * cfg_.video_dim);
  const auto m = static_cast<double>(cfg_.num_units);
  for (std::size_t i = 0; i < cfg_.num_units; ++i) {
    const double mid = (static_cast<double>(i) + 0.5) / m;
    const bool inside = mid >= gt.start && mid < gt.end;
    auto sig = signature(inside ? concept_id : distractor);
    for (std::size_t k = 0; k < cfg_.video_dim; ++k)
      ep.video.units[i * cfg_.video_dim + k] = sig[k] + sigma * normal(rng);
  }
  ep.query.resize(cfg_.query_dim);
  for (std::size_t q = 0; q < cfg_.query_dim; ++q)
    ep.query[q] = projection_[q * cfg_.concept_count + concept_id] +
                  sigma * normal(rng);
  return ep;
}

GroundingEpisode SynthGenerator::sample(Rng& rng, std::string id) const {
  std::uniform_int_distribution<std::size_t> pick_concept(
      0, cfg_.concept_count - 1);
  const std::size_t c = pick_concept(rng);
  std::uniform_int_distribution<std::size_t> pick_other(
      0, cfg_.concept_count - 2);
  std::size_t d = pick_other(rng);
  if (d >= c) ++d;
  std::uniform_real_distribution<double> len_dist(cfg_.min_len, cfg_.max_len);
  const double len = len_dist(rng);
  std::uniform_real_distribution<double> start_dist(0.0, 1.0 - len);
  const double start = start_dist(rng);
  return make(rng, c, d, Interval{start, std::min(1.0, start + len)},
              std::move(id));
}

Dataset SynthGenerator::generate(Rng& rng, std::size_t count,
                                 const std::string& id_prefix,
                                 std::size_t first_index) const {
  Dataset out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(sample(rng, id_prefix + std::to_string(first_index + i)));
  return out;
}

GroundingEpisode synth_episode(Rng& rng, const SynthConfig& cfg) {
  return SynthGenerator(cfg).sample(rng);
}

// ---------------------------------------------------------------------------
// JSONL I/O

namespace {

void validate_gt(const GroundingEpisode& ep) {
  const auto [s, e] = ep.gt;
  if (!std::isfinite(s) || !std::isfinite(e) || s < 0.0 || e > 1.0 || s >= e)
    throw ValidationError("episode '" + ep.id +
                          "': gt must satisfy 0 <= g_s < g_e <= 1, got [" +
                          std::to_string(s) + ", " + std::to_string(e) + "]");
}

GroundingEpisode from_json(const json& j, int line) {
  try {
    GroundingEpisode ep;
    ep.id = j.at("id").get<std::string>();
    const auto& units = j.at("units");
    if (!units.is_array() || units.empty())
      throw ParseError("line " + std::to_string(line) +
                           ": 'units' must be a non-empty array",
                       line);
    ep.video.num_units = units.size();
    ep.video.dim = units[0].size();
    if (ep.video.dim == 0)
      throw ParseError("line " + std::to_string(line) + ": empty unit vector",
                       line);
    ep.video.units.reserve(ep.video.num_units * ep.video.dim);
    for (const auto& u : units) {
      if (u.size() != ep.video.dim)
        throw SchemaError("episode '" + ep.id + "' (line " +
                          std::to_string(line) +
                          "): unit vectors have differing dimensions");
      for (const auto& x : u) ep.video.units.push_back(x.get<double>());
    }
    ep.query = j.at("query").get<std::vector<double>>();
    if (ep.query.empty())
      throw ParseError("line " + std::to_string(line) + ": empty query", line);
    const auto gt = j.at("gt").get<std::vector<double>>();
    if (gt.size() != 2)
      throw ParseError("line " + std::to_string(line) +
                           ": 'gt' must have two entries",
                       line);
    ep.gt = Interval{gt[0], gt[1]};
    return ep;
  } catch (const json::exception& e) {
    throw ParseError("line " + std::to_string(line) + ": " + e.what(), line);
  }
}

}  // namespace

Dataset parse_dataset(std::istream& in) {
  Dataset out;
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError("line " + std::to_string(line) + ": " + e.what(), line);
    }
    if (!j.is_object())
      throw ParseError("line " + std::to_string(line) + ": expected an object",
                       line);
    GroundingEpisode ep = from_json(j, line);
    validate_gt(ep);
    if (!out.empty()) {
      const auto& first = out.front();
      if (ep.video.dim != first.video.dim)
        throw SchemaError("episode '" + ep.id + "' (line " +
                          std::to_string(line) + "): video dim " +
                          std::to_string(ep.video.dim) + " != " +
                          std::to_string(first.video.dim));
      if (ep.query.size() != first.query.size())
        throw SchemaError("episode '" + ep.id + "' (line " +
                          std::to_string(line) + "): query dim " +
                          std::to_string(ep.query.size()) + " != " +
                          std::to_string(first.query.size()));
    }
    out.push_back(std::move(ep));
  }
  return out;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset '" + path + "'");
  return parse_dataset(in);
}

void write_dataset(const Dataset& data, std::ostream& out) {
  for (const auto& ep : data) {
    json units = json::array();
    for (std::size_t i = 0; i < ep.video.num_units; ++i) {
      auto u = ep.video.unit(i);
      units.push_back(std::vector<double>(u.begin(), u.end()));
    }
    json j = {{"id", ep.id},
              {"units", std::move(units)},
              {"query", ep.query},
              {"gt", {ep.gt.start, ep.gt.end}}};
    out << j.dump() << '\n';
  }
}

void save_dataset(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write dataset '" + path + "'");
  write_dataset(data, out);
  if (!out) throw Error("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// Pooling

std::vector<double> global_pool(const FeatureVideo& video) {
  std::vector<double> out(video.dim, 0.0);
  kernels::mean_rows(video.units, video.dim, 0, video.num_units, out);
  return out;
}

UnitRange overlapped_units(std::size_t num_units, Interval clip) {
  UnitRange r;
  if (!(clip.start < clip.end)) return r;
  const auto m = static_cast<double>(num_units);
  bool found = false;
  for (std::size_t i = 0; i < num_units; ++i) {
    const double lo = static_cast<double>(i) / m;
    const double hi = static_cast<double>(i + 1) / m;
    const double overlap = std::min(clip.end, hi) - std::max(clip.start, lo);
    if (overlap > kOverlapEps) {
      if (!found) r.first = i;
      found = true;
      r.count = i - r.first + 1;
    } else if (found) {
      break;
    }
  }
  return r;
}

std::vector<double> clip_pool(const FeatureVideo& video, Interval clip) {
  std::vector<double> out(video.dim, 0.0);
  const UnitRange r = overlapped_units(video.num_units, clip);
  if (r.count == 0) return out;
  kernels::mean_rows(video.units, video.dim, r.first, r.count, out);
  return out;
}

}  // namespace tgrl
