#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "ghz/core_model.hpp"

namespace ghz {

/// One experiment window: half-open tick interval running one setting vector.
struct ExperimentWindow {
    int index = 0;
    SettingVector setting = SettingVector::yyx;
    Tick start;
    Tick end;

    friend bool operator==(const ExperimentWindow&, const ExperimentWindow&) = default;
};

/// The four windows in Table column order plus the shared seed that lets every
/// node derive the identical tick sequence with no runtime coordination.
struct Schedule {
    std::array<ExperimentWindow, 4> windows;
    std::uint64_t rounds_per_window = 0;
    std::uint64_t seed = 0;

    friend bool operator==(const Schedule&, const Schedule&) = default;
};

/// splitmix64 finalizer; bit-exact across nodes and implementations.
std::uint64_t mix64(std::uint64_t z);

/// Windows of 1.0 units (2^32 ticks) separated by 0.125-unit switch gaps,
/// starting at t=0: yyx=[0,1), yxy=[1.125,2.125), xyy=[2.25,3.25), xxx=[3.375,4.375).
/// Throws std::invalid_argument when rounds is zero.
Schedule build_default_schedule(std::uint64_t rounds, std::uint64_t seed);

/// The common measurement time of round n in window w. Pure in (schedule, w, n),
/// so all three players independently compute identical ticks.
/// Throws std::out_of_range on bad indices.
Tick measurement_tick(const Schedule& schedule, int window_index, std::uint64_t round);

/// Index of the window containing t, or nullopt when t falls in a switch gap.
std::optional<int> window_for_tick(const Schedule& schedule, Tick t);

}  // namespace ghz
