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

#include <cstdint>
#include <random>

namespace texbias {

// Portable seeded generator. std::mt19937_64's output sequence is fixed by
// the standard; the std:: distributions are not, so bounded integers and unit
// reals are derived here with fixed algorithms:
//   below(b): reject raw draws r < (2^64 - b) mod b, return r mod b
//   unit():   (r >> 11) * 2^-53, a real in [0, 1)
// Anything that must be reproducible across implementations goes through
// this class.
class SeededRng {
 public:
  static constexpr const char* kAlgorithm =
      "mt19937_64; below(b)=rejection of r<(2^64-b)%b then r%b; "
      "unit()=(r>>11)*2^-53";

  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return r % bound;
    }
  }

  double unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace texbias
