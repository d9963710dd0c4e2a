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

#include <cstdint>

namespace cnd::testkit {

struct FuzzStats {
  std::uint64_t ops = 0;
  std::uint64_t violations = 0;
  std::uint64_t gate_rejections = 0;
  std::uint64_t rule_revisions = 0;
  std::uint64_t bad_rules = 0;
};

// Random operations against a release manager over the test topology. An
// independent shadow tracks which deploys passed tests on main; any deploy
// outside it holding weight counts as a violation, as does a rule revision
// not summing to 100, an invariant failure or an audit trail that does not
// replay to the live state.
void FuzzLifecycle(std::uint64_t seed, int length, FuzzStats& stats);

}  // namespace cnd::testkit
