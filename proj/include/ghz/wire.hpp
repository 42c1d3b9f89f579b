#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "ghz/core_model.hpp"
#include "ghz/schedule.hpp"

namespace ghz {

inline constexpr int kProtocolVersion = 1;
inline constexpr int kDefaultPort = 6700;

/// One station's report of a single measurement.
struct MeasurementRecord {
    Role role = Role::alice;
    int window_index = 0;
    std::uint64_t round = 0;
    SettingLabel label = SettingLabel::x;
    Sign value = Sign::plus;
    Tick tick;

    friend bool operator==(const MeasurementRecord&, const MeasurementRecord&) = default;
};

struct Hello {
    Role role = Role::alice;
    int proto = kProtocolVersion;
    friend bool operator==(const Hello&, const Hello&) = default;
};

struct Welcome {
    Role role = Role::alice;
    friend bool operator==(const Welcome&, const Welcome&) = default;
};

/// Carries the schedule plus only the addressed player's table row.
struct Launch {
    Schedule schedule;
    std::map<SettingVector, SignedProduct> row;
    friend bool operator==(const Launch&, const Launch&) = default;
};

struct Data {
    MeasurementRecord record;
    friend bool operator==(const Data&, const Data&) = default;
};

struct Done {
    Role role = Role::alice;
    friend bool operator==(const Done&, const Done&) = default;
};

struct ProtocolError {
    std::string text;
    friend bool operator==(const ProtocolError&, const ProtocolError&) = default;
};

using Message = std::variant<Hello, Welcome, Launch, Data, Done, ProtocolError>;

/// Byte stream is not valid JSON or a line is missing its LF terminator.
struct FrameError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Well-formed JSON that violates the message schema; names the bad field.
struct ValidationError : std::runtime_error {
    ValidationError(std::string field_, const std::string& what)
        : std::runtime_error(what), field(std::move(field_)) {}
    std::string field;
};

/// One UTF-8 JSON object terminated by a single LF. Ticks are decimal
/// integers; no floating point on the wire.
std::string encode_message(const Message& m);

/// Inverse of encode_message on its image. `line` excludes the LF terminator.
/// Throws FrameError for malformed JSON, ValidationError for schema violations.
Message decode_message(std::string_view line);

/// Splits an incoming byte stream at LF boundaries. Partial reads never yield
/// a spurious message; leftover bytes at end-of-stream are a frame error.
class FrameReader {
  public:
    void feed(std::string_view bytes) { buffer_ += bytes; }

    /// Next complete line (without its LF), or nullopt if none is buffered.
    std::optional<std::string> next_line();

    /// Call at end-of-stream; throws FrameError if a truncated line remains.
    void finish() const;

    bool has_partial() const { return !buffer_.empty(); }

  private:
    std::string buffer_;
};

}  // namespace ghz
