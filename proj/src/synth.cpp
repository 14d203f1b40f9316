/* Copyright 2026 The texbias Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "texbias/synth.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "texbias/error.hpp"
#include "texbias/rng.hpp"

namespace texbias {
namespace {

// Image generation draws from its own stream so adding texture samples does
// not shift the image records.
constexpr std::uint64_t kImageStreamSalt = 0x9e3779b97f4a7c15ULL;

}  // namespace

void PlantedWorld::validate() const {
  if (textures < 2 || objects < 2) {
    throw InvalidArgument("a planted world needs at least 2 textures and 2 objects");
  }
  if (mapping.size() != textures) {
    throw InvalidArgument(fmt::format("mapping has {} entries for {} textures", mapping.size(),
                                      textures));
  }
  std::set<std::int32_t> used;
  for (auto j : mapping) {
    if (j < 0 || static_cast<std::size_t>(j) >= objects) {
      throw InvalidArgument(fmt::format("mapped object {} outside [0,{})", j, objects));
    }
    if (!used.insert(j).second) {
      throw InvalidArgument(fmt::format("object {} is mapped twice", j));
    }
  }
  if (!(noise >= 0.0 && noise < 1.0)) {
    throw InvalidArgument(fmt::format("noise {} outside [0,1)", noise));
  }
}

PlantedWorld make_planted_world(std::size_t textures, std::size_t objects, double noise,
                                std::size_t samples_per_texture,
                                std::size_t images_per_object, std::uint64_t seed) {
  if (textures > objects) {
    throw InvalidArgument(fmt::format("cannot map {} textures injectively onto {} objects",
                                      textures, objects));
  }
  PlantedWorld world;
  world.textures = textures;
  world.objects = objects;
  world.noise = noise;
  world.samples_per_texture = samples_per_texture;
  world.images_per_object = images_per_object;
  world.seed = seed;

  SeededRng rng(seed);
  std::vector<std::int32_t> pool(objects);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t i = 0; i < textures; ++i) {
    std::swap(pool[i], pool[i + rng.below(objects - i)]);
  }
  world.mapping.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(textures));
  world.validate();
  return world;
}

ClassRegistry planted_registry(const PlantedWorld& world) {
  std::vector<std::string> textures, objects;
  for (std::size_t i = 0; i < world.textures; ++i) textures.push_back(fmt::format("texture_{:02}", i));
  for (std::size_t j = 0; j < world.objects; ++j) objects.push_back(fmt::format("object_{:03}", j));
  return ClassRegistry(std::move(textures), std::move(objects));
}

std::vector<TextureProbeRecord> gen_texture_records(const PlantedWorld& world) {
  world.validate();
  SeededRng rng(world.seed);
  const double floor_conf = 1.0 / static_cast<double>(world.objects);
  std::vector<TextureProbeRecord> out;
  out.reserve(world.textures * world.samples_per_texture);
  for (std::size_t i = 0; i < world.textures; ++i) {
    const std::int32_t planted = world.mapping[i];
    for (std::size_t s = 0; s < world.samples_per_texture; ++s) {
      TextureProbeRecord r;
      r.record_id = fmt::format("tex-{:02}-{:05}", i, s);
      r.texture_class_id = static_cast<std::int32_t>(i);
      if (rng.unit() >= world.noise) {
        r.predicted_object_id = planted;
        r.confidence = 0.9 + 0.1 * rng.unit();
      } else {
        const auto k = static_cast<std::int32_t>(rng.below(world.objects - 1));
        r.predicted_object_id = k < planted ? k : k + 1;
        r.confidence = floor_conf + (0.5 - floor_conf) * rng.unit();
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<ImageProbeRecord> gen_image_records(const PlantedWorld& world) {
  world.validate();
  SeededRng rng(world.seed ^ kImageStreamSalt);
  std::vector<std::int32_t> mapped(world.mapping);
  std::sort(mapped.begin(), mapped.end());

  std::vector<ImageProbeRecord> out;
  out.reserve(mapped.size() * world.images_per_object);
  std::vector<double> weights(world.objects);
  for (const std::int32_t j : mapped) {
    for (std::size_t s = 0; s < world.images_per_object; ++s) {
      ImageProbeRecord r;
      r.record_id = fmt::format("img-{:03}-{:05}", j, s);
      r.dataset_id = world.dataset_id;
      r.true_label_id = j;
      r.probs.assign(world.objects, 0.0);
      if (world.noise == 0.0) {
        r.probs[static_cast<std::size_t>(j)] = 1.0;
      } else {
        double total = 0.0;
        for (std::size_t k = 0; k < world.objects; ++k) {
          weights[k] = static_cast<std::int32_t>(k) == j ? 0.0 : 1.0 - rng.unit();
          total += weights[k];
        }
        for (std::size_t k = 0; k < world.objects; ++k) {
          r.probs[k] = world.noise * weights[k] / total;
        }
        r.probs[static_cast<std::size_t>(j)] = 1.0 - world.noise;
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<std::int32_t> inverse_mapping(const PlantedWorld& world) {
  std::vector<std::int32_t> inverse(world.objects, -1);
  for (std::size_t i = 0; i < world.mapping.size(); ++i) {
    inverse[static_cast<std::size_t>(world.mapping[i])] = static_cast<std::int32_t>(i);
  }
  return inverse;
}

}  // namespace texbias
