#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nmqj/linalg.hpp"

namespace nmqj {

enum class JumpDirection { Forward, Reverse };

/// Members moved between two registry entries during one step. Channels
/// carry their 1-based label.
struct JumpEvent {
    std::size_t step = 0;
    double time = 0.0;
    int channel = 0;
    JumpDirection direction = JumpDirection::Forward;
    std::size_t source = 0;
    std::size_t target = 0;
    std::int64_t members = 0;

    friend bool operator==(const JumpEvent&, const JumpEvent&) = default;
};

/// Time-indexed record of a run or of an oracle. Oracle series leave
/// counts and events empty.
struct TrajectorySeries {
    std::size_t dim = 0;
    std::vector<double> times;
    std::vector<DensityMatrix> rho;
    /// rates[k][j]: decay rate of channel j at times[k].
    std::vector<std::vector<double>> rates;
    /// counts[k][alpha]: members in registry entry alpha at times[k]; rows
    /// are padded with zeros up to the final registry size.
    std::vector<std::vector<std::int64_t>> counts;
    std::vector<JumpEvent> events;

    std::size_t size() const { return times.size(); }
};

}  // namespace nmqj
