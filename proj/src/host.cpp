#include "ghz/host.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <fstream>
#include <thread>

#include <json.hpp>

namespace ghz {

std::uint64_t RunReport::total_violations() const {
    std::uint64_t n = 0;
    for (const WindowStats& w : windows) n += w.violations;
    return n;
}

std::string report_to_json(const RunReport& report) {
    using Json = nlohmann::ordered_json;
    Json windows = Json::array();
    for (const WindowStats& w : report.windows) {
        Json stations = Json::object();
        for (int r = 0; r < 3; ++r) {
            stations[std::to_string(r + 1)] = w.station_plus_fraction[r];
        }
        windows.push_back(Json{{"setting", name(w.setting)},
                               {"rounds_completed", w.rounds_completed},
                               {"plus_count", w.plus_count},
                               {"minus_count", w.minus_count},
                               {"expected_product", w.expected_product},
                               {"violations", w.violations},
                               {"station_plus_fraction", std::move(stations)}});
    }
    Json j{{"seed", report.seed},
           {"rounds_per_window", report.rounds_per_window},
           {"windows", std::move(windows)},
           {"incomplete_rounds", report.incomplete_rounds},
           {"invalid_rounds", report.invalid_rounds},
           {"rejected_records", report.rejected_records},
           {"rejections", report.rejections},
           {"total_violations", report.total_violations()},
           {"locality_audit",
            Json{{"pass", report.locality_audit.pass},
                 {"violations", report.locality_audit.violations}}}};
    return j.dump(2);
}

void write_rounds_csv(const RunReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out.is_open()) {
        throw std::runtime_error(fmt::format("cannot open csv file \"{}\"", path));
    }
    out << "window,round,tick,v1,v2,v3,product\n";
    for (const RoundResult& r : report.rounds) {
        out << r.window_index << ',' << r.round << ',' << r.tick << ',' << r.values[0] << ','
            << r.values[1] << ',' << r.values[2] << ',' << r.product << '\n';
    }
}

RecordCollector::RecordCollector(Schedule schedule) : schedule_(std::move(schedule)) {}

void RecordCollector::ingest_record(const MeasurementRecord& rec) {
    auto reject = [&](const std::string& why) {
        ++rejected_;
        if (rejections_.size() < 100) {
            rejections_.push_back(fmt::format("role {} window {} round {}: {}",
                                              static_cast<int>(rec.role), rec.window_index,
                                              rec.round, why));
        }
    };

    if (rec.window_index < 0 || rec.window_index > 3) {
        reject("window index out of range");
        return;
    }
    if (rec.round >= schedule_.rounds_per_window) {
        reject("round out of range");
        return;
    }
    const ExperimentWindow& window = schedule_.windows[rec.window_index];
    if (rec.label != label_for(window.setting, rec.role)) {
        reject(fmt::format("label '{}' inconsistent with window setting {}", to_char(rec.label),
                           name(window.setting)));
        return;
    }

    Pending& pending = rounds_[{rec.window_index, rec.round}];
    auto& slot = pending.by_role[static_cast<int>(rec.role) - 1];
    if (slot.has_value()) {
        reject("duplicate record");
        return;
    }
    for (const auto& other : pending.by_role) {
        if (other.has_value() && other->tick != rec.tick) {
            pending.tick_mismatch = true;
        }
    }
    slot = rec;
}

void RecordCollector::note_done(Role role) { done_[static_cast<int>(role) - 1] = true; }

bool RecordCollector::all_done() const {
    return done_[0] && done_[1] && done_[2];
}

RunReport RecordCollector::finalize() const {
    RunReport report;
    report.seed = schedule_.seed;
    report.rounds_per_window = schedule_.rounds_per_window;
    report.rejected_records = rejected_;
    report.rejections = rejections_;

    std::array<std::array<std::uint64_t, 3>, 4> plus_by_station{};
    std::array<std::array<std::uint64_t, 3>, 4> total_by_station{};

    for (int w = 0; w < 4; ++w) {
        report.windows[w].setting = schedule_.windows[w].setting;
        report.windows[w].expected_product = kExpectedProducts[w];
    }

    for (const auto& [key, pending] : rounds_) {
        auto [w, round] = key;
        RoundResult rr;
        rr.window_index = w;
        rr.round = round;
        rr.tick_mismatch = pending.tick_mismatch;
        int present = 0;
        int product = 1;
        for (int r = 0; r < 3; ++r) {
            if (pending.by_role[r].has_value()) {
                const MeasurementRecord& rec = *pending.by_role[r];
                rr.values[r] = to_int(rec.value);
                rr.tick = rec.tick.ticks;
                product *= to_int(rec.value);
                ++present;
                ++total_by_station[w][r];
                if (rec.value == Sign::plus) ++plus_by_station[w][r];
            }
        }
        rr.complete = (present == 3);
        if (rr.complete && !rr.tick_mismatch) {
            rr.product = product;
            WindowStats& stats = report.windows[w];
            ++stats.rounds_completed;
            if (product == +1) {
                ++stats.plus_count;
            } else {
                ++stats.minus_count;
            }
            if (product != stats.expected_product) ++stats.violations;
        } else if (rr.tick_mismatch) {
            ++report.invalid_rounds;
        } else {
            ++report.incomplete_rounds;
        }
        report.rounds.push_back(rr);
    }

    for (int w = 0; w < 4; ++w) {
        for (int r = 0; r < 3; ++r) {
            report.windows[w].station_plus_fraction[r] =
                total_by_station[w][r] == 0
                    ? 0.0
                    : static_cast<double>(plus_by_station[w][r]) /
                          static_cast<double>(total_by_station[w][r]);
        }
    }
    return report;
}

HostSession::HostSession(TranscriptSink* transcript) : transcript_(transcript) {}

std::optional<Role> HostSession::register_connection(std::shared_ptr<ByteStream> stream) {
    auto reader = std::make_unique<LineReader>(*stream);
    // Refused connections never join the session, so they stay out of the
    // run transcript.
    auto refuse = [&](const std::string& text) -> std::optional<Role> {
        try {
            send_message(*stream, ProtocolError{text});
        } catch (const TransportError&) {
        }
        stream->close();
        return std::nullopt;
    };

    std::optional<std::string> line;
    try {
        line = reader->next_line();
    } catch (const FrameError&) {
        return refuse("truncated hello");
    } catch (const TransportError& e) {
        return refuse(e.what());
    }
    if (!line) return refuse("connection closed before hello");

    Message msg;
    try {
        msg = decode_message(*line);
    } catch (const std::exception& e) {
        return refuse(fmt::format("bad hello: {}", e.what()));
    }
    const Hello* hello = std::get_if<Hello>(&msg);
    if (hello == nullptr) {
        return refuse("expected hello");
    }
    if (hello->proto != kProtocolVersion) {
        return refuse(fmt::format("protocol version mismatch: host speaks {}, got {}",
                                  kProtocolVersion, hello->proto));
    }
    if (players_.contains(hello->role)) {
        return refuse(fmt::format("role {} already registered", static_cast<int>(hello->role)));
    }

    if (transcript_) transcript_->record("p2h", static_cast<int>(hello->role), *line);
    auto frame = send_message(*stream, Welcome{hello->role});
    if (transcript_) transcript_->record("h2p", static_cast<int>(hello->role), frame);
    players_[hello->role] = Connection{std::move(stream), std::move(reader)};
    return hello->role;
}

bool HostSession::ready() const { return players_.size() == 3; }

std::vector<Role> HostSession::missing_roles() const {
    std::vector<Role> missing;
    for (Role r : kAllRoles) {
        if (!players_.contains(r)) missing.push_back(r);
    }
    return missing;
}

void HostSession::launch_run(const Schedule& schedule, const MeasurementTable& table) {
    if (!ready()) {
        throw std::logic_error("launch before all three players registered");
    }
    for (auto& [role, conn] : players_) {
        Launch launch;
        launch.schedule = schedule;
        for (const ExperimentWindow& w : schedule.windows) {
            auto it = table.entries.find({role, w.setting});
            if (it == table.entries.end()) {
                throw std::out_of_range(fmt::format("table has no entry for station {} setting {}",
                                                    static_cast<int>(role), name(w.setting)));
            }
            launch.row[w.setting] = it->second;
        }
        auto frame = send_message(*conn.stream, Message{std::move(launch)});
        if (transcript_) transcript_->record("h2p", static_cast<int>(role), frame);
    }
    // No table row survives dispatch; only the schedule is retained.
    schedule_ = schedule;
    launched_ = true;
}

RunReport HostSession::collect() {
    if (!launched_) {
        throw std::logic_error("collect before launch");
    }
    RecordCollector collector(*schedule_);
    std::mutex mu;

    auto reader_loop = [&](Role role, Connection& conn) {
        for (;;) {
            std::optional<std::string> line;
            try {
                line = conn.reader->next_line();
            } catch (const std::exception&) {
                break;  // timeout, truncation, or transport failure ends this player
            }
            if (!line) break;
            Message msg;
            try {
                msg = decode_message(*line);
            } catch (const std::exception&) {
                continue;
            }
            if (const Data* data = std::get_if<Data>(&msg)) {
                if (transcript_) transcript_->record("p2h", static_cast<int>(role), *line);
                std::lock_guard lock(mu);
                collector.ingest_record(data->record);
            } else if (const Done* done = std::get_if<Done>(&msg)) {
                if (transcript_) transcript_->record("p2h", static_cast<int>(role), *line);
                std::lock_guard lock(mu);
                collector.note_done(done->role);
                break;
            }
        }
    };

    std::vector<std::thread> readers;
    readers.reserve(players_.size());
    for (auto& [role, conn] : players_) {
        readers.emplace_back(reader_loop, role, std::ref(conn));
    }
    for (std::thread& t : readers) t.join();

    RunReport report = collector.finalize();
    if (transcript_) {
        report.locality_audit = audit_transcript(transcript_->entries());
    }
    return report;
}

void accept_players(HostSession& session, TcpListener& listener,
                    std::chrono::milliseconds timeout, std::chrono::milliseconds read_timeout) {
    auto deadline = std::chrono::steady_clock::now() + timeout;
    while (!session.ready()) {
        auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (remaining.count() <= 0) break;
        auto stream = listener.accept(remaining);
        if (!stream) break;
        stream->set_read_timeout(read_timeout);
        session.register_connection(std::move(stream));
    }
    if (!session.ready()) {
        auto missing = session.missing_roles();
        std::string names;
        for (Role r : missing) {
            if (!names.empty()) names += ", ";
            names += std::to_string(static_cast<int>(r));
        }
        throw SessionError(fmt::format("timed out waiting for roles [{}]", names),
                           std::move(missing));
    }
}

}  // namespace ghz
