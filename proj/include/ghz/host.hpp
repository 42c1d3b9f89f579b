#pragma once

#include <array>
#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ghz/message_io.hpp"
#include "ghz/schedule.hpp"
#include "ghz/stream.hpp"
#include "ghz/transcript.hpp"
#include "ghz/wire.hpp"

// The host never evaluates table entries: it handles only opaque +-1 values,
// labels, and ticks. Nothing in this module may call rademacher,
// eval_signed_product, or standard_table.

namespace ghz {

/// Quantum prediction per window, public knowledge independent of the table.
inline constexpr std::array<int, 4> kExpectedProducts = {-1, -1, -1, +1};

/// One finalized coincidence round.
struct RoundResult {
    int window_index = 0;
    std::uint64_t round = 0;
    std::uint64_t tick = 0;
    std::array<int, 3> values = {0, 0, 0};  // by role-1; 0 = missing
    int product = 0;                        // defined when complete
    bool complete = false;
    bool tick_mismatch = false;
};

struct WindowStats {
    SettingVector setting = SettingVector::yyx;
    std::uint64_t rounds_completed = 0;
    std::uint64_t plus_count = 0;
    std::uint64_t minus_count = 0;
    int expected_product = 0;
    std::uint64_t violations = 0;
    std::array<double, 3> station_plus_fraction = {0, 0, 0};
};

struct RunReport {
    std::uint64_t seed = 0;
    std::uint64_t rounds_per_window = 0;
    std::array<WindowStats, 4> windows;
    std::uint64_t incomplete_rounds = 0;
    std::uint64_t invalid_rounds = 0;
    std::uint64_t rejected_records = 0;
    std::vector<std::string> rejections;
    AuditResult locality_audit;
    std::vector<RoundResult> rounds;  // ordered by (window, round)

    std::uint64_t total_violations() const;
};

std::string report_to_json(const RunReport& report);
void write_rounds_csv(const RunReport& report, const std::string& path);

/// Pure coincidence-round collector. Routes records into rounds keyed by
/// (window, round); the third record of a round fixes its product. Arrival
/// order never affects the finalized report.
class RecordCollector {
  public:
    explicit RecordCollector(Schedule schedule);

    /// Routes one record. Rejects label/window mismatches and duplicates;
    /// a tick disagreement across a round flags the whole round invalid.
    void ingest_record(const MeasurementRecord& rec);

    void note_done(Role role);
    bool all_done() const;

    RunReport finalize() const;

  private:
    struct Pending {
        std::array<std::optional<MeasurementRecord>, 3> by_role;
        bool tick_mismatch = false;
    };

    Schedule schedule_;
    std::map<std::pair<int, std::uint64_t>, Pending> rounds_;
    std::array<bool, 3> done_ = {false, false, false};
    std::uint64_t rejected_ = 0;
    std::vector<std::string> rejections_;
};

struct SessionError : std::runtime_error {
    SessionError(const std::string& what, std::vector<Role> missing_)
        : std::runtime_error(what), missing(std::move(missing_)) {}
    std::vector<Role> missing;
};

/// Host side of one run: registration, launch, collection.
class HostSession {
  public:
    explicit HostSession(TranscriptSink* transcript = nullptr);

    /// Hello/Welcome handshake on a fresh connection. Returns the registered
    /// role, or nullopt when refused (duplicate role, bad proto, bad frame);
    /// a refusal is answered with a ProtocolError before the stream is dropped.
    std::optional<Role> register_connection(std::shared_ptr<ByteStream> stream);

    bool ready() const;
    std::vector<Role> missing_roles() const;

    /// Sends each player the schedule plus only its own table row. The session
    /// keeps the schedule and drops every row after dispatch.
    /// Throws std::logic_error when not ready.
    void launch_run(const Schedule& schedule, const MeasurementTable& table);

    /// Reads Data/Done from all three players concurrently and builds the
    /// report, including the locality audit of the attached transcript.
    RunReport collect();

  private:
    struct Connection {
        std::shared_ptr<ByteStream> stream;
        std::unique_ptr<LineReader> reader;
    };

    TranscriptSink* transcript_;
    std::map<Role, Connection> players_;
    std::optional<Schedule> schedule_;
    bool launched_ = false;
};

/// Accepts TCP connections until all three roles are registered.
/// Each accepted socket gets `read_timeout` as its receive timeout, bounding
/// collection when a player crashes mid-run.
/// Throws SessionError listing the missing roles when the deadline passes.
void accept_players(HostSession& session, TcpListener& listener,
                    std::chrono::milliseconds timeout,
                    std::chrono::milliseconds read_timeout = std::chrono::milliseconds(30000));

}  // namespace ghz
