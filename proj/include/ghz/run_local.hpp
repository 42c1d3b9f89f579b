#pragma once

#include <string>

#include "ghz/core_model.hpp"
#include "ghz/host.hpp"

namespace ghz {

/// One-process session: the host and three players run as threads connected by
/// in-memory byte streams carrying the identical wire protocol, so the result
/// matches a networked run with the same (seed, rounds, table).
RunReport run_local(std::uint64_t rounds, std::uint64_t seed, const MeasurementTable& table,
                    const std::string& transcript_path = "");

}  // namespace ghz
