#pragma once

#include <map>
#include <memory>

#include "ghz/core_model.hpp"
#include "ghz/message_io.hpp"
#include "ghz/schedule.hpp"
#include "ghz/stream.hpp"
#include "ghz/transcript.hpp"

namespace ghz {

/// One station's complete knowledge: its role, its own table row, the schedule.
struct PlayerState {
    Role role = Role::alice;
    std::map<SettingVector, SignedProduct> row;
    Schedule schedule;
};

struct RegistrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Sends Hello, waits for Welcome then Launch, builds the player state from
/// the Launch payload. Throws RegistrationError on refusal or a mismatched
/// protocol version.
PlayerState connect_and_register(ByteStream& stream, LineReader& reader, Role role,
                                 TranscriptSink* transcript = nullptr);

/// Walks every (window, round) in order, computes this station's outcome at
/// the shared measurement tick, streams Data records, then Done. Reads nothing
/// after Launch.
void execute_schedule(const PlayerState& state, ByteStream& out,
                      TranscriptSink* transcript = nullptr);

/// Full player lifecycle over an established connection.
void run_player(const std::shared_ptr<ByteStream>& stream, Role role,
                TranscriptSink* transcript = nullptr);

}  // namespace ghz
