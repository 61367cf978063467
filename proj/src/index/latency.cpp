// Copyright 2026 the kgsr authors
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

#include "kgsr/index/latency.hpp"

#include <algorithm>
#include <cmath>

#include "kgsr/error.hpp"

namespace kgsr::index {

void LatencyMonitor::record_us(std::int64_t micros) {
    if (micros < 0) throw Error(ErrorCode::InvalidConfig, "latency cannot be negative");
    samples_.push_back(micros);
}

LatencyReport LatencyMonitor::report() const {
    if (samples_.empty()) throw Error(ErrorCode::NoSamples, "no latencies recorded");
    LatencyReport r;
    r.count = samples_.size();
    double sum = 0.0;
    for (auto s : samples_) sum += static_cast<double>(s);
    r.avg_us = sum / static_cast<double>(r.count);
    std::vector<std::int64_t> sorted(samples_);
    std::sort(sorted.begin(), sorted.end());
    r.max_us = static_cast<double>(sorted.back());
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(r.count)));
    r.p95_us = static_cast<double>(sorted[std::max<std::size_t>(rank, 1) - 1]);
    r.within_threshold = r.avg_us < threshold_us_;
    return r;
}

}  // namespace kgsr::index
