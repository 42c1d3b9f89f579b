#include "ghz/player.hpp"

#include <fmt/format.h>

namespace ghz {
namespace {

Message expect_message(LineReader& reader, TranscriptSink* transcript, Role role) {
    auto line = reader.next_line();
    if (!line) {
        throw RegistrationError("host closed the connection during registration");
    }
    if (transcript) transcript->record("h2p", static_cast<int>(role), *line);
    Message msg = decode_message(*line);
    if (const ProtocolError* err = std::get_if<ProtocolError>(&msg)) {
        throw RegistrationError(fmt::format("host refused registration: {}", err->text));
    }
    return msg;
}

}  // namespace

PlayerState connect_and_register(ByteStream& stream, LineReader& reader, Role role,
                                 TranscriptSink* transcript) {
    auto hello = send_message(stream, Hello{role, kProtocolVersion});
    if (transcript) transcript->record("p2h", static_cast<int>(role), hello);

    Message msg = expect_message(reader, transcript, role);
    const Welcome* welcome = std::get_if<Welcome>(&msg);
    if (welcome == nullptr || welcome->role != role) {
        throw RegistrationError("expected welcome for this role");
    }

    msg = expect_message(reader, transcript, role);
    const Launch* launch = std::get_if<Launch>(&msg);
    if (launch == nullptr) {
        throw RegistrationError("expected launch after welcome");
    }

    PlayerState state;
    state.role = role;
    state.schedule = launch->schedule;
    state.row = launch->row;
    for (const ExperimentWindow& w : state.schedule.windows) {
        if (!state.row.contains(w.setting)) {
            throw RegistrationError(
                fmt::format("launch row is missing setting {}", name(w.setting)));
        }
    }
    if (state.row.size() != 4) {
        throw RegistrationError("launch row must cover exactly the four scheduled settings");
    }
    return state;
}

void execute_schedule(const PlayerState& state, ByteStream& out, TranscriptSink* transcript) {
    for (const ExperimentWindow& window : state.schedule.windows) {
        const SignedProduct& entry = state.row.at(window.setting);
        SettingLabel label = label_for(window.setting, state.role);
        for (std::uint64_t n = 0; n < state.schedule.rounds_per_window; ++n) {
            Tick t = measurement_tick(state.schedule, window.index, n);
            MeasurementRecord rec;
            rec.role = state.role;
            rec.window_index = window.index;
            rec.round = n;
            rec.label = label;
            rec.value = eval_signed_product(entry, t);
            rec.tick = t;
            auto frame = send_message(out, Data{rec});
            if (transcript) transcript->record("p2h", static_cast<int>(state.role), frame);
        }
    }
    auto done = send_message(out, Done{state.role});
    if (transcript) transcript->record("p2h", static_cast<int>(state.role), done);
}

void run_player(const std::shared_ptr<ByteStream>& stream, Role role, TranscriptSink* transcript) {
    LineReader reader(*stream);
    PlayerState state = connect_and_register(*stream, reader, role, transcript);
    execute_schedule(state, *stream, transcript);
    stream->close();
}

}  // namespace ghz
