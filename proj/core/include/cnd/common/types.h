// Copyright 2026 The cndsim Authors
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

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cnd {

// One tick is one simulated second.
using Tick = std::int64_t;

inline constexpr Tick kTicksPerMinute = 60;
inline constexpr Tick kTicksPerHour = 60 * kTicksPerMinute;
inline constexpr Tick kTicksPerDay = 24 * kTicksPerHour;

using ComponentId = std::string;
using DeployId = std::string;

enum class DeployState {
  kPreproduction,
  kTesting,
  kTested,
  kTestFailed,
  kCanary,
  kShifting,
  kReleased,
  kAborted,
  kRetired,
};

std::string DeployStateName(DeployState state);
std::optional<DeployState> ParseDeployState(std::string_view name);

// States in which a deploy may carry production weight.
inline bool ServesProduction(DeployState state) {
  return state == DeployState::kCanary || state == DeployState::kShifting ||
         state == DeployState::kReleased;
}

// Identifiers used in annotations, audit lines and URLs: [A-Za-z0-9._-]+.
bool IsValidToken(std::string_view token);

// Monotonic simulated clock. Advanced only by the harness or pipeline stages.
class VirtualClock {
 public:
  explicit VirtualClock(Tick start = 0) : now_(start) {}

  Tick Now() const { return now_.load(std::memory_order_acquire); }
  Tick Advance(Tick ticks = 1) {
    return now_.fetch_add(ticks, std::memory_order_acq_rel) + ticks;
  }

 private:
  std::atomic<Tick> now_;
};

}  // namespace cnd
