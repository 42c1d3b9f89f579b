#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ghz/analysis.hpp"
#include "ghz/core_model.hpp"
#include "ghz/host.hpp"
#include "ghz/player.hpp"
#include "ghz/run_local.hpp"
#include "ghz/schedule.hpp"
#include "ghz/stream.hpp"
#include "ghz/transcript.hpp"

namespace {

ghz::MeasurementTable load_table(const std::string& path) {
    if (path.empty()) return ghz::standard_table();
    std::ifstream in(path);
    if (!in.is_open()) {
        throw std::runtime_error("cannot open table file \"" + path + "\"");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return ghz::table_from_json(buf.str());
}

std::uint64_t pick_seed(std::optional<std::uint64_t> seed) {
    if (seed) return *seed;
    std::random_device rd;
    std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) | rd();
    std::cout << "seed: " << s << "\n";
    return s;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    if (!out.is_open()) {
        throw std::runtime_error("cannot open \"" + path + "\" for writing");
    }
    out << content;
}

void print_report_summary(const ghz::RunReport& report) {
    for (const ghz::WindowStats& w : report.windows) {
        std::cout << "window " << ghz::name(w.setting) << ": " << w.rounds_completed
                  << " rounds, product +1 x" << w.plus_count << " / -1 x" << w.minus_count
                  << ", expected " << (w.expected_product > 0 ? "+1" : "-1") << ", violations "
                  << w.violations << "\n";
    }
    std::cout << "incomplete rounds: " << report.incomplete_rounds
              << ", invalid rounds: " << report.invalid_rounds
              << ", rejected records: " << report.rejected_records << "\n";
    std::cout << "locality audit: " << (report.locality_audit.pass ? "pass" : "FAIL") << "\n";
    std::cout << "total violations: " << report.total_violations() << "\n";
}

int finish_run(const ghz::RunReport& report, const std::string& report_path,
               const std::string& csv_path) {
    if (!report_path.empty()) write_file(report_path, ghz::report_to_json(report));
    if (!csv_path.empty()) ghz::write_rounds_csv(report, csv_path);
    print_report_summary(report);
    bool ok = report.total_violations() == 0 && report.locality_audit.pass &&
              report.incomplete_rounds == 0 && report.invalid_rounds == 0;
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GHZ correlation network simulator: one host, three stations, "
                 "time-and-setting-dependent local outcomes"};
    app.require_subcommand(1);

    // host
    auto* host_cmd = app.add_subcommand("host", "collect records from three players over TCP");
    std::string listen_addr = "0.0.0.0:6700";
    std::uint64_t rounds = 1000;
    std::optional<std::uint64_t> seed;
    std::string report_path, transcript_path, csv_path, table_path;
    int timeout_secs = 30;
    host_cmd->add_option("--listen", listen_addr, "listen address")->envname("GHZ_LISTEN");
    host_cmd->add_option("--rounds", rounds, "rounds per window")->envname("GHZ_ROUNDS");
    host_cmd->add_option("--seed", seed, "shared schedule seed (random when omitted)")
        ->envname("GHZ_SEED");
    host_cmd->add_option("--report", report_path, "JSON report output path")->envname("GHZ_REPORT");
    host_cmd->add_option("--transcript", transcript_path, "JSONL transcript output path")
        ->envname("GHZ_TRANSCRIPT");
    host_cmd->add_option("--csv", csv_path, "per-round CSV output path")->envname("GHZ_CSV");
    host_cmd->add_option("--timeout-secs", timeout_secs, "accept/collection timeout")
        ->envname("GHZ_TIMEOUT_SECS");
    host_cmd->add_option("--table", table_path, "custom measurement table JSON")
        ->envname("GHZ_TABLE");

    // player
    auto* player_cmd = app.add_subcommand("player", "run one station (Alice, Bob or Claire)");
    std::string connect_addr = "127.0.0.1:6700";
    int role_num = 0;
    std::string player_transcript;
    player_cmd->add_option("--connect", connect_addr, "host address")->envname("GHZ_CONNECT");
    player_cmd->add_option("--role", role_num, "station role: 1=Alice, 2=Bob, 3=Claire")
        ->required()
        ->check(CLI::Range(1, 3))
        ->envname("GHZ_ROLE");
    player_cmd->add_option("--transcript", player_transcript, "JSONL transcript output path")
        ->envname("GHZ_TRANSCRIPT");

    // run-local
    auto* local_cmd = app.add_subcommand("run-local", "whole session in one process");
    local_cmd->add_option("--rounds", rounds, "rounds per window")->envname("GHZ_ROUNDS");
    local_cmd->add_option("--seed", seed, "shared schedule seed (random when omitted)")
        ->envname("GHZ_SEED");
    local_cmd->add_option("--report", report_path, "JSON report output path")->envname("GHZ_REPORT");
    local_cmd->add_option("--transcript", transcript_path, "JSONL transcript output path")
        ->envname("GHZ_TRANSCRIPT");
    local_cmd->add_option("--csv", csv_path, "per-round CSV output path")->envname("GHZ_CSV");
    local_cmd->add_option("--table", table_path, "custom measurement table JSON")
        ->envname("GHZ_TABLE");

    // analyze
    auto* analyze_cmd = app.add_subcommand("analyze", "offline verification of the model's claims");
    std::uint64_t analyze_rounds = 10000;
    std::uint64_t analyze_seed = 1;
    std::string analyze_out;
    analyze_cmd->add_option("--rounds", analyze_rounds, "ticks per window for balance statistics")
        ->envname("GHZ_ROUNDS");
    analyze_cmd->add_option("--seed", analyze_seed, "schedule seed for balance statistics")
        ->envname("GHZ_SEED");
    analyze_cmd->add_option("--table", table_path, "custom measurement table JSON")
        ->envname("GHZ_TABLE");
    analyze_cmd->add_option("--out", analyze_out, "report path (stdout when omitted)")
        ->envname("GHZ_OUT");

    // audit
    auto* audit_cmd = app.add_subcommand("audit", "check a transcript for locality violations");
    std::string audit_path;
    audit_cmd->add_option("transcript", audit_path, "JSONL transcript file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*host_cmd) {
            ghz::MeasurementTable table = load_table(table_path);
            std::uint64_t s = pick_seed(seed);
            ghz::TcpListener listener(listen_addr);
            std::cout << "listening on port " << listener.port() << ", waiting for players\n";
            ghz::TranscriptSink transcript(transcript_path);
            ghz::HostSession session(transcript_path.empty() ? nullptr : &transcript);
            auto timeout = std::chrono::seconds(timeout_secs);
            ghz::accept_players(session, listener, timeout, timeout);
            std::cout << "all three players registered, launching\n";
            session.launch_run(ghz::build_default_schedule(rounds, s), table);
            ghz::RunReport report = session.collect();
            return finish_run(report, report_path, csv_path);
        }
        if (*player_cmd) {
            ghz::TranscriptSink transcript(player_transcript);
            auto stream = ghz::tcp_connect(connect_addr);
            std::shared_ptr<ghz::ByteStream> shared = std::move(stream);
            ghz::run_player(shared, ghz::role_from_int(role_num),
                            player_transcript.empty() ? nullptr : &transcript);
            std::cout << "player " << role_num << " finished\n";
            return 0;
        }
        if (*local_cmd) {
            ghz::MeasurementTable table = load_table(table_path);
            std::uint64_t s = pick_seed(seed);
            ghz::RunReport report = ghz::run_local(rounds, s, table, transcript_path);
            return finish_run(report, report_path, csv_path);
        }
        if (*analyze_cmd) {
            ghz::MeasurementTable table = load_table(table_path);
            std::string report = ghz::analysis_report_json(table, analyze_rounds, analyze_seed);
            if (analyze_out.empty()) {
                std::cout << report << "\n";
            } else {
                write_file(analyze_out, report);
            }
            return 0;
        }
        if (*audit_cmd) {
            ghz::AuditResult result = ghz::audit_transcript_file(audit_path);
            if (result.pass) {
                std::cout << "audit: pass\n";
                return 0;
            }
            std::cout << "audit: FAIL\n";
            for (const std::string& v : result.violations) {
                std::cout << "  " << v << "\n";
            }
            return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
