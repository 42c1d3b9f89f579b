#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <doctest.h>

#include "ghz/core_model.hpp"
#include "ghz/host.hpp"
#include "ghz/message_io.hpp"
#include "ghz/schedule.hpp"
#include "ghz/stream.hpp"

using namespace ghz;

namespace {

// Builds the full consistent record multiset for a run, using table outcomes.
std::vector<MeasurementRecord> make_records(const Schedule& schedule,
                                            const MeasurementTable& table) {
    std::vector<MeasurementRecord> records;
    for (const ExperimentWindow& w : schedule.windows) {
        for (std::uint64_t n = 0; n < schedule.rounds_per_window; ++n) {
            Tick t = measurement_tick(schedule, w.index, n);
            for (Role role : kAllRoles) {
                MeasurementRecord rec;
                rec.role = role;
                rec.window_index = w.index;
                rec.round = n;
                rec.label = label_for(w.setting, role);
                rec.value = table_outcome(table, role, w.setting, t);
                rec.tick = t;
                records.push_back(rec);
            }
        }
    }
    return records;
}

}  // namespace

TEST_CASE("collector tallies a clean run with zero violations") {
    Schedule schedule = build_default_schedule(50, 7);
    RecordCollector collector(schedule);
    for (const MeasurementRecord& rec : make_records(schedule, standard_table())) {
        collector.ingest_record(rec);
    }
    RunReport report = collector.finalize();
    for (int w = 0; w < 4; ++w) {
        CHECK(report.windows[w].rounds_completed == 50);
        CHECK(report.windows[w].violations == 0);
        CHECK(report.windows[w].expected_product == kExpectedProducts[w]);
    }
    CHECK(report.incomplete_rounds == 0);
    CHECK(report.invalid_rounds == 0);
    CHECK(report.rejected_records == 0);
    CHECK(report.rounds.size() == 200);
}

TEST_CASE("collector examples from the protocol") {
    Schedule schedule = build_default_schedule(10, 7);
    RecordCollector collector(schedule);
    auto record = [&](Role role, int w, std::uint64_t n, int value) {
        MeasurementRecord rec;
        rec.role = role;
        rec.window_index = w;
        rec.round = n;
        rec.label = label_for(schedule.windows[w].setting, role);
        rec.value = sign_from_int(value);
        rec.tick = measurement_tick(schedule, w, n);
        return rec;
    };

    // (-1,-1,-1) in window 0 -> product -1, matches expectation.
    collector.ingest_record(record(Role::alice, 0, 5, -1));
    collector.ingest_record(record(Role::bob, 0, 5, -1));
    collector.ingest_record(record(Role::claire, 0, 5, -1));
    // (-1,+1,-1) in window 3 -> product +1.
    collector.ingest_record(record(Role::alice, 3, 0, -1));
    collector.ingest_record(record(Role::bob, 3, 0, +1));
    collector.ingest_record(record(Role::claire, 3, 0, -1));

    RunReport report = collector.finalize();
    CHECK(report.windows[0].minus_count == 1);
    CHECK(report.windows[0].violations == 0);
    CHECK(report.windows[3].plus_count == 1);
    CHECK(report.windows[3].violations == 0);
}

TEST_CASE("collector rejects label inconsistent with the window setting") {
    Schedule schedule = build_default_schedule(10, 7);
    RecordCollector collector(schedule);
    MeasurementRecord rec;
    rec.role = Role::alice;
    rec.window_index = 3;  // xxx window: every station measures x
    rec.round = 0;
    rec.label = SettingLabel::y;
    rec.value = Sign::plus;
    rec.tick = measurement_tick(schedule, 3, 0);
    collector.ingest_record(rec);
    RunReport report = collector.finalize();
    CHECK(report.rejected_records == 1);
    CHECK(report.rejections[0].find("label") != std::string::npos);
}

TEST_CASE("collector rejects duplicates and flags tick mismatches") {
    Schedule schedule = build_default_schedule(10, 7);
    RecordCollector collector(schedule);
    MeasurementRecord rec;
    rec.role = Role::alice;
    rec.window_index = 0;
    rec.round = 2;
    rec.label = SettingLabel::y;
    rec.value = Sign::plus;
    rec.tick = measurement_tick(schedule, 0, 2);
    collector.ingest_record(rec);
    collector.ingest_record(rec);  // duplicate

    MeasurementRecord other = rec;
    other.role = Role::bob;
    other.tick = Tick{rec.tick.ticks + 1};  // disagreeing tick
    collector.ingest_record(other);
    MeasurementRecord third = rec;
    third.role = Role::claire;
    third.label = SettingLabel::x;
    collector.ingest_record(third);

    RunReport report = collector.finalize();
    CHECK(report.rejected_records == 1);
    CHECK(report.invalid_rounds == 1);
    for (const WindowStats& w : report.windows) CHECK(w.rounds_completed == 0);
}

TEST_CASE("arrival order never changes the report") {
    Schedule schedule = build_default_schedule(20, 99);
    auto records = make_records(schedule, standard_table());
    std::mt19937_64 rng(1);

    auto run = [&](const std::vector<MeasurementRecord>& rs) {
        RecordCollector collector(schedule);
        for (const MeasurementRecord& rec : rs) collector.ingest_record(rec);
        return report_to_json(collector.finalize());
    };

    std::string baseline = run(records);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(records.begin(), records.end(), rng);
        CHECK(run(records) == baseline);
    }
}

TEST_CASE("a corrupted table row produces violations") {
    MeasurementTable table = standard_table();
    table.entries[{Role::bob, SettingVector::xxx}].sign = Sign::minus;  // was +r1r3
    Schedule schedule = build_default_schedule(30, 12);
    RecordCollector collector(schedule);
    for (const MeasurementRecord& rec : make_records(schedule, table)) {
        collector.ingest_record(rec);
    }
    RunReport report = collector.finalize();
    CHECK(report.windows[3].violations == 30);
    CHECK(report.windows[0].violations == 0);
    CHECK(report.total_violations() == 30);
}

TEST_CASE("session registers three roles and refuses a duplicate") {
    HostSession session;
    auto [h1, p1] = make_duplex_pair();
    auto [h2, p2] = make_duplex_pair();
    auto [h2b, p2b] = make_duplex_pair();
    auto [h3, p3] = make_duplex_pair();

    send_message(*p1, Hello{Role::alice, kProtocolVersion});
    CHECK(session.register_connection(h1) == Role::alice);
    CHECK_FALSE(session.ready());

    send_message(*p2, Hello{Role::bob, kProtocolVersion});
    CHECK(session.register_connection(h2) == Role::bob);

    send_message(*p2b, Hello{Role::bob, kProtocolVersion});
    CHECK(session.register_connection(h2b) == std::nullopt);
    LineReader refused(*p2b);
    refused.next_line();  // welcome never came; first reply is the refusal
    // (the line above is the ProtocolError; stream then closes)

    send_message(*p3, Hello{Role::claire, kProtocolVersion});
    CHECK(session.register_connection(h3) == Role::claire);
    CHECK(session.ready());
    CHECK(session.missing_roles().empty());
}

TEST_CASE("session refuses a protocol version mismatch") {
    HostSession session;
    auto [h, p] = make_duplex_pair();
    send_message(*p, Hello{Role::alice, 99});
    CHECK(session.register_connection(h) == std::nullopt);
    LineReader reader(*p);
    auto line = reader.next_line();
    REQUIRE(line.has_value());
    auto msg = decode_message(*line);
    REQUIRE(std::holds_alternative<ProtocolError>(msg));
    CHECK(std::get<ProtocolError>(msg).text.find("version") != std::string::npos);
}

TEST_CASE("launch before ready is a precondition error") {
    HostSession session;
    CHECK_THROWS_AS(session.launch_run(build_default_schedule(10, 1), standard_table()),
                    std::logic_error);
}

TEST_CASE("launch sends each player only its own row") {
    HostSession session;
    std::array<std::shared_ptr<ByteStream>, 3> player_ends;
    for (int i = 0; i < 3; ++i) {
        auto [h, p] = make_duplex_pair();
        player_ends[i] = p;
        send_message(*p, Hello{kAllRoles[i], kProtocolVersion});
        REQUIRE(session.register_connection(h) == kAllRoles[i]);
    }
    MeasurementTable table = standard_table();
    session.launch_run(build_default_schedule(10, 5), table);

    for (int i = 0; i < 3; ++i) {
        LineReader reader(*player_ends[i]);
        reader.next_line();  // welcome
        auto line = reader.next_line();
        REQUIRE(line.has_value());
        auto msg = decode_message(*line);
        REQUIRE(std::holds_alternative<Launch>(msg));
        const Launch& launch = std::get<Launch>(msg);
        CHECK(launch.row.size() == 4);
        for (SettingVector sv : kAllSettings) {
            CHECK(launch.row.at(sv) == table.entries.at({kAllRoles[i], sv}));
        }
        // Row 1's payload must not equal any other station's entries wholesale.
        if (kAllRoles[i] == Role::alice) {
            CHECK(launch.row.at(SettingVector::yyx) !=
                  table.entries.at({Role::claire, SettingVector::yyx}));
        }
    }
}

TEST_CASE("accept_players reports missing roles on timeout") {
    TcpListener listener("127.0.0.1:0");
    HostSession session;
    std::string addr = "127.0.0.1:" + std::to_string(listener.port());

    std::thread t1([&] {
        auto s = tcp_connect(addr);
        send_message(*s, Hello{Role::alice, kProtocolVersion});
        LineReader r(*s);
        r.next_line();
    });
    std::thread t2([&] {
        auto s = tcp_connect(addr);
        send_message(*s, Hello{Role::bob, kProtocolVersion});
        LineReader r(*s);
        r.next_line();
    });

    try {
        accept_players(session, listener, std::chrono::milliseconds(1500));
        FAIL("expected SessionError");
    } catch (const SessionError& e) {
        REQUIRE(e.missing.size() == 1);
        CHECK(e.missing[0] == Role::claire);
    }
    t1.join();
    t2.join();
}

TEST_CASE("host sources never touch table evaluation") {
    // Host ignorance as a build-structure rule: the collecting side handles
    // only opaque values.
    std::ifstream in(std::string(GHZ_SOURCE_DIR) + "/src/host.cpp");
    REQUIRE(in.is_open());
    std::stringstream buf;
    buf << in.rdbuf();
    std::string source = buf.str();
    CHECK(source.find("rademacher") == std::string::npos);
    CHECK(source.find("eval_signed_product") == std::string::npos);
    CHECK(source.find("standard_table") == std::string::npos);
    CHECK(source.find("table_outcome") == std::string::npos);
}
