#include "ghz/run_local.hpp"

#include <array>
#include <stdexcept>
#include <thread>

#include "ghz/player.hpp"
#include "ghz/run_local.hpp"
#include "ghz/schedule.hpp"
#include "ghz/stream.hpp"

namespace ghz {

RunReport run_local(std::uint64_t rounds, std::uint64_t seed, const MeasurementTable& table,
                    const std::string& transcript_path) {
    TranscriptSink transcript(transcript_path);
    HostSession session(&transcript);
    Schedule schedule = build_default_schedule(rounds, seed);

    std::array<std::thread, 3> player_threads;
    std::array<std::exception_ptr, 3> player_errors{};
    for (int i = 0; i < 3; ++i) {
        auto [host_end, player_end] = make_duplex_pair();
        Role role = kAllRoles[i];
        player_threads[i] = std::thread([role, player_end, &player_errors, i] {
            try {
                run_player(player_end, role);
            } catch (...) {
                player_errors[i] = std::current_exception();
            }
        });
        if (!session.register_connection(host_end)) {
            throw std::runtime_error("in-process player registration refused");
        }
    }

    session.launch_run(schedule, table);
    RunReport report = session.collect();

    for (std::thread& t : player_threads) t.join();
    for (const auto& err : player_errors) {
        if (err) std::rethrow_exception(err);
    }
    return report;
}

}  // namespace ghz
