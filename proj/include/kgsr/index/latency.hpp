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

#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

namespace kgsr::index {

struct LatencyReport {
    double avg_us = 0.0;
    double max_us = 0.0;
    double p95_us = 0.0;  // nearest-rank
    std::size_t count = 0;
    bool within_threshold = false;  // avg strictly below the threshold
};

/// Per-query latencies in integer microseconds. Single writer; report()
/// may run concurrently once appends have stopped.
class LatencyMonitor {
public:
    explicit LatencyMonitor(double threshold_us) : threshold_us_(threshold_us) {}

    /// Throws InvalidConfig for negative durations.
    void record_us(std::int64_t micros);
    void record(std::chrono::steady_clock::duration d) {
        record_us(std::chrono::duration_cast<std::chrono::microseconds>(d).count());
    }

    /// Throws NoSamples.
    LatencyReport report() const;

    double threshold_us() const { return threshold_us_; }
    const std::vector<std::int64_t>& samples() const { return samples_; }

private:
    double threshold_us_;
    std::vector<std::int64_t> samples_;
};

/// Times `fn` on the monotonic clock and records it.
template <typename Fn>
auto timed(LatencyMonitor& monitor, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    auto out = fn();
    monitor.record(std::chrono::steady_clock::now() - start);
    return out;
}

}  // namespace kgsr::index
