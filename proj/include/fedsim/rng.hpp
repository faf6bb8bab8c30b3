/*
 * Copyright 2026 The fedsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FEDSIM_RNG_HPP_
#define FEDSIM_RNG_HPP_

#include <cstdint>
#include <random>

namespace fedsim {

using Rng = std::mt19937_64;

// Purpose tags keep streams with the same numeric keys apart.
enum class StreamTag : std::uint32_t {
  kData = 1,
  kPartition = 2,
  kClient = 3,
  kInit = 4,
  kHoldout = 5,
};

// Independent stream for (seed, tag, a, b). Distinct key tuples give
// unrelated seed_seq states; identical tuples give identical streams.
inline Rng make_stream(std::uint64_t seed, StreamTag tag, std::uint64_t a = 0,
                       std::uint64_t b = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag),
                    static_cast<std::uint32_t>(a),
                    static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b),
                    static_cast<std::uint32_t>(b >> 32)};
  return Rng(seq);
}

}  // namespace fedsim

#endif  // FEDSIM_RNG_HPP_
