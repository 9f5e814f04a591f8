// Copyright 2026 The sinprecode Authors
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

#pragma once

#include <cstdint>
#include <initializer_list>

namespace sinp {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Child seed for a (domain, indices...) path under a master seed.
/// Different domains never share a stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t domain,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(master ^ mix64(domain));
  for (std::uint64_t v : path) h = mix64(h ^ mix64(v + 0x632be59bd9b4e019ULL));
  return h;
}

namespace seed_domain {
constexpr std::uint64_t kShadow = 0x5348414457ULL;   // geometry + shadowing
constexpr std::uint64_t kFading = 0x464144494eULL;   // Rayleigh draws
constexpr std::uint64_t kShadowField = 0x4649454cULL;
}  // namespace seed_domain

}  // namespace sinp
