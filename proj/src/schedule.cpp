#include "ghz/schedule.hpp"

#include <fmt/format.h>
#include <stdexcept>

namespace ghz {

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

Schedule build_default_schedule(std::uint64_t rounds, std::uint64_t seed) {
    if (rounds == 0) {
        throw std::invalid_argument("rounds_per_window must be >= 1");
    }
    constexpr std::uint64_t window_len = kTicksPerUnit;       // 1.0 units
    constexpr std::uint64_t gap = kTicksPerUnit / 8;          // 0.125 units
    Schedule s;
    s.rounds_per_window = rounds;
    s.seed = seed;
    std::uint64_t start = 0;
    for (int w = 0; w < 4; ++w) {
        s.windows[w] = ExperimentWindow{w, kAllSettings[w], Tick{start}, Tick{start + window_len}};
        start += window_len + gap;
    }
    return s;
}

Tick measurement_tick(const Schedule& schedule, int window_index, std::uint64_t round) {
    if (window_index < 0 || window_index > 3) {
        throw std::out_of_range(fmt::format("window index {} outside [0,3]", window_index));
    }
    if (round >= schedule.rounds_per_window) {
        throw std::out_of_range(
            fmt::format("round {} >= rounds_per_window {}", round, schedule.rounds_per_window));
    }
    const ExperimentWindow& w = schedule.windows[window_index];
    std::uint64_t span = w.end.ticks - w.start.ticks;
    std::uint64_t stream = (static_cast<std::uint64_t>(window_index) << 32) + round;
    return Tick{w.start.ticks + mix64(schedule.seed ^ stream) % span};
}

std::optional<int> window_for_tick(const Schedule& schedule, Tick t) {
    for (const ExperimentWindow& w : schedule.windows) {
        if (w.start <= t && t < w.end) return w.index;
    }
    return std::nullopt;
}

}  // namespace ghz
