#pragma once

#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ghz/wire.hpp"

namespace ghz {

/// One transcript line: message direction relative to the host
/// ("p2h" player-to-host, "h2p" host-to-player), the player's role, and the
/// raw JSON message text (without LF).
struct TranscriptEntry {
    std::string dir;
    int role = 0;
    std::string msg_json;
};

/// Collects entries in arrival order, optionally mirroring them to a JSONL
/// file as they arrive. Thread-safe.
class TranscriptSink {
  public:
    TranscriptSink() = default;
    explicit TranscriptSink(const std::string& path);

    void record(std::string_view dir, int role, std::string_view encoded_message);

    std::vector<TranscriptEntry> entries() const;

  private:
    mutable std::mutex mu_;
    std::vector<TranscriptEntry> entries_;
    std::optional<std::ofstream> file_;
};

struct AuditResult {
    bool pass = true;
    std::vector<std::string> violations;
};

/// Checks the unidirectional-flow contract: no player-to-player edge, no Data
/// sent by the host, and no message delivered to a player after its Launch.
/// An empty transcript passes vacuously.
AuditResult audit_transcript(const std::vector<TranscriptEntry>& entries);

/// Parses a JSONL transcript file and audits it.
/// Throws std::runtime_error when the file is missing or unparseable.
AuditResult audit_transcript_file(const std::string& path);

std::vector<TranscriptEntry> read_transcript_file(const std::string& path);

}  // namespace ghz
