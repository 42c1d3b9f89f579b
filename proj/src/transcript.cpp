#include "ghz/transcript.hpp"

#include <fmt/format.h>
#include <stdexcept>

#include <json.hpp>

namespace ghz {

TranscriptSink::TranscriptSink(const std::string& path) {
    if (!path.empty()) {
        file_.emplace(path, std::ios::trunc);
        if (!file_->is_open()) {
            throw std::runtime_error(fmt::format("cannot open transcript file \"{}\"", path));
        }
    }
}

void TranscriptSink::record(std::string_view dir, int role, std::string_view encoded_message) {
    // Strip the trailing LF of a wire frame; the transcript adds its own framing.
    while (encoded_message.ends_with('\n')) encoded_message.remove_suffix(1);
    std::lock_guard lock(mu_);
    entries_.push_back(TranscriptEntry{std::string(dir), role, std::string(encoded_message)});
    if (file_) {
        nlohmann::ordered_json line{
            {"dir", dir}, {"role", role}, {"msg", nlohmann::ordered_json::parse(encoded_message)}};
        *file_ << line.dump() << "\n";
        file_->flush();
    }
}

std::vector<TranscriptEntry> TranscriptSink::entries() const {
    std::lock_guard lock(mu_);
    return entries_;
}

AuditResult audit_transcript(const std::vector<TranscriptEntry>& entries) {
    AuditResult result;
    bool launched[4] = {false, false, false, false};  // indexed by role 1..3

    auto flag = [&](std::size_t line, const std::string& why) {
        result.pass = false;
        result.violations.push_back(fmt::format("line {}: {}", line + 1, why));
    };

    for (std::size_t i = 0; i < entries.size(); ++i) {
        const TranscriptEntry& e = entries[i];
        if (e.dir != "p2h" && e.dir != "h2p") {
            flag(i, fmt::format("edge \"{}\" is not host-mediated (player-to-player traffic)", e.dir));
            continue;
        }
        if (e.role < 1 || e.role > 3) {
            flag(i, fmt::format("role {} outside {{1,2,3}}", e.role));
            continue;
        }
        auto msg = nlohmann::json::parse(e.msg_json, nullptr, false);
        std::string tag = msg.is_object() && msg.contains("t") && msg["t"].is_string()
                              ? msg["t"].get<std::string>()
                              : std::string("?");
        if (e.dir == "h2p") {
            if (tag == "data") {
                flag(i, "host sent a data message");
                continue;
            }
            if (launched[e.role]) {
                flag(i, fmt::format("player {} received \"{}\" after launch", e.role, tag));
                continue;
            }
            if (tag == "launch") launched[e.role] = true;
        }
    }
    return result;
}

std::vector<TranscriptEntry> read_transcript_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.is_open()) {
        throw std::runtime_error(fmt::format("cannot open transcript \"{}\"", path));
    }
    std::vector<TranscriptEntry> entries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw std::runtime_error(fmt::format("{}:{}: unparseable transcript line", path, lineno));
        }
        TranscriptEntry e;
        e.dir = j.value("dir", std::string());
        e.role = j.value("role", 0);
        if (!j.contains("msg")) {
            throw std::runtime_error(fmt::format("{}:{}: missing \"msg\"", path, lineno));
        }
        e.msg_json = nlohmann::ordered_json::parse(line).at("msg").dump();
        entries.push_back(std::move(e));
    }
    return entries;
}

AuditResult audit_transcript_file(const std::string& path) {
    return audit_transcript(read_transcript_file(path));
}

}  // namespace ghz
