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

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "texbias/records.hpp"
#include "texbias/registry.hpp"

namespace texbias {

// Synthetic probe world with a known texture -> object association.
struct PlantedWorld {
  std::size_t textures = 8;
  std::size_t objects = 8;
  std::vector<std::int32_t> mapping;  // texture id -> object id, injective
  double noise = 0.0;                 // in [0, 1)
  std::size_t samples_per_texture = 100;
  std::size_t images_per_object = 25;
  std::uint64_t seed = 0;
  std::string dataset_id = "synthetic";

  // Throws InvalidArgument if the mapping is not an injection into [0,objects)
  // or noise is outside [0,1).
  void validate() const;
};

// Mapping drawn as a seeded random injection.
PlantedWorld make_planted_world(std::size_t textures, std::size_t objects, double noise,
                                std::size_t samples_per_texture,
                                std::size_t images_per_object, std::uint64_t seed);

ClassRegistry planted_registry(const PlantedWorld& world);

// Per texture i, samples_per_texture records. With probability 1 - noise the
// prediction is mapping[i] with confidence in [0.9, 1.0); otherwise a uniform
// other object with confidence in [1/m, 0.5).
std::vector<TextureProbeRecord> gen_texture_records(const PlantedWorld& world);

// Per mapped object j (ascending), images_per_object labeled records with
// mass 1 - noise on j and the remaining noise split over the other objects
// in proportion to seeded uniform weights in (0, 1].
std::vector<ImageProbeRecord> gen_image_records(const PlantedWorld& world);

// Texture id planted for each object, -1 for unmapped objects.
std::vector<std::int32_t> inverse_mapping(const PlantedWorld& world);

}  // namespace texbias
