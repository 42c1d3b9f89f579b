#include <cstdio>
#include <fstream>

#include <doctest.h>

#include "ghz/transcript.hpp"

using namespace ghz;

namespace {

TranscriptEntry entry(const char* dir, int role, const char* msg) {
    return TranscriptEntry{dir, role, msg};
}

}  // namespace

TEST_CASE("empty transcript passes vacuously") {
    CHECK(audit_transcript({}).pass);
}

TEST_CASE("a clean session transcript passes") {
    std::vector<TranscriptEntry> t = {
        entry("p2h", 1, R"({"t":"hello","role":1,"proto":1})"),
        entry("h2p", 1, R"({"t":"welcome","role":1})"),
        entry("p2h", 2, R"({"t":"hello","role":2,"proto":1})"),
        entry("h2p", 2, R"({"t":"welcome","role":2})"),
        entry("p2h", 3, R"({"t":"hello","role":3,"proto":1})"),
        entry("h2p", 3, R"({"t":"welcome","role":3})"),
        entry("h2p", 1, R"({"t":"launch"})"),
        entry("h2p", 2, R"({"t":"launch"})"),
        entry("h2p", 3, R"({"t":"launch"})"),
        entry("p2h", 1, R"({"t":"data","role":1})"),
        entry("p2h", 2, R"({"t":"data","role":2})"),
        entry("p2h", 1, R"({"t":"done","role":1})"),
    };
    AuditResult r = audit_transcript(t);
    CHECK(r.pass);
    CHECK(r.violations.empty());
}

TEST_CASE("post-launch inbound message at a player fails") {
    std::vector<TranscriptEntry> t = {
        entry("h2p", 2, R"({"t":"launch"})"),
        entry("h2p", 2, R"({"t":"welcome","role":2})"),
    };
    AuditResult r = audit_transcript(t);
    CHECK_FALSE(r.pass);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].find("after launch") != std::string::npos);
}

TEST_CASE("host-sent data fails") {
    AuditResult r = audit_transcript({entry("h2p", 1, R"({"t":"data","role":1})")});
    CHECK_FALSE(r.pass);
}

TEST_CASE("player-to-player edge fails") {
    AuditResult r = audit_transcript({entry("p2p", 1, R"({"t":"data","role":1})")});
    CHECK_FALSE(r.pass);
    CHECK(r.violations[0].find("player-to-player") != std::string::npos);
}

TEST_CASE("transcript file round trip and audit") {
    std::string path = "test_transcript_tmp.jsonl";
    {
        TranscriptSink sink(path);
        sink.record("p2h", 1, "{\"t\":\"hello\",\"role\":1,\"proto\":1}\n");
        sink.record("h2p", 1, "{\"t\":\"welcome\",\"role\":1}\n");
    }
    auto entries = read_transcript_file(path);
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].dir == "p2h");
    CHECK(entries[0].role == 1);
    CHECK(entries[1].msg_json == R"({"t":"welcome","role":1})");
    CHECK(audit_transcript_file(path).pass);
    std::remove(path.c_str());
}

TEST_CASE("unparseable transcript file is an input error") {
    std::string path = "test_transcript_bad.jsonl";
    {
        std::ofstream out(path);
        out << "this is not json\n";
    }
    CHECK_THROWS(audit_transcript_file(path));
    std::remove(path.c_str());
    CHECK_THROWS(audit_transcript_file("does_not_exist.jsonl"));
}
