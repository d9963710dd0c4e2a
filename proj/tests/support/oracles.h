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

// Reference computations written independently of the library code. Tests
// compare library output against these rather than against itself.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace cnd::oracle {

// Pooled two-proportion z, long double, textbook form.
long double PooledZ(std::uint64_t n1, std::uint64_t e1, std::uint64_t n2,
                    std::uint64_t e2);

// Exact rational: allowed error ticks = window * (den - num) / den, kept as a
// reduced fraction.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double ToDouble() const { return static_cast<double>(num) / den; }
};
Fraction AllowedErrorTicks(std::int64_t slo_num, std::int64_t slo_den,
                           std::int64_t window_ticks);

// k-sigma band of a binomial proportion.
std::pair<double, double> BinomialBand(double p, std::uint64_t n, double k);

// Depth-first call order from `entry` over an adjacency list.
std::vector<std::string> DfsOrder(
    const std::map<std::string, std::vector<std::string>>& adjacency,
    const std::string& entry);

// ceil(q * n)-th smallest sample, rounded up to the 1 ms bucket edge, as the
// latency histogram defines it.
double BucketQuantile(std::vector<double> samples, double q);

// Upper bound on a uniform(mean +- jitter) draw, rounded up to a bucket.
double UniformUpperBucket(double mean, double jitter);

}  // namespace cnd::oracle
