#include "ghz/wire.hpp"

#include <fmt/format.h>

#include <json.hpp>

namespace ghz {
namespace {

using Json = nlohmann::ordered_json;

Json window_to_json(const ExperimentWindow& w) {
    return Json{{"setting", name(w.setting)}, {"start", w.start.ticks}, {"end", w.end.ticks}};
}

Json schedule_to_json(const Schedule& s) {
    Json windows = Json::array();
    for (const auto& w : s.windows) windows.push_back(window_to_json(w));
    return Json{{"windows", std::move(windows)},
                {"rounds_per_window", s.rounds_per_window},
                {"seed", s.seed}};
}

Json product_to_json(const SignedProduct& p) {
    return Json{{"sign", to_int(p.sign)}, {"indices", p.indices}};
}

const Json& require(const Json& obj, const char* field) {
    auto it = obj.find(field);
    if (it == obj.end()) {
        throw ValidationError(field, fmt::format("missing field \"{}\"", field));
    }
    return *it;
}

std::int64_t require_int(const Json& obj, const char* field) {
    const Json& v = require(obj, field);
    if (!v.is_number_integer()) {
        throw ValidationError(field, fmt::format("field \"{}\" must be an integer", field));
    }
    return v.get<std::int64_t>();
}

std::uint64_t require_uint(const Json& obj, const char* field) {
    const Json& v = require(obj, field);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw ValidationError(field, fmt::format("field \"{}\" must be a non-negative integer", field));
    }
    return v.get<std::uint64_t>();
}

std::string require_string(const Json& obj, const char* field) {
    const Json& v = require(obj, field);
    if (!v.is_string()) {
        throw ValidationError(field, fmt::format("field \"{}\" must be a string", field));
    }
    return v.get<std::string>();
}

Role decode_role(const Json& obj) {
    auto v = require_int(obj, "role");
    if (v < 1 || v > 3) {
        throw ValidationError("role", fmt::format("role {} outside {{1,2,3}}", v));
    }
    return static_cast<Role>(v);
}

Sign decode_sign(const Json& obj, const char* field) {
    auto v = require_int(obj, field);
    if (v != 1 && v != -1) {
        throw ValidationError(field, fmt::format("field \"{}\" must be +1 or -1, got {}", field, v));
    }
    return v == 1 ? Sign::plus : Sign::minus;
}

SettingLabel decode_label(const Json& obj) {
    auto s = require_string(obj, "label");
    if (s != "x" && s != "y") {
        throw ValidationError("label", fmt::format("label must be \"x\" or \"y\", got \"{}\"", s));
    }
    return label_from_char(s[0]);
}

SettingVector decode_setting(const std::string& s, const char* field) {
    try {
        return setting_from_name(s);
    } catch (const std::domain_error& e) {
        throw ValidationError(field, e.what());
    }
}

SignedProduct decode_product(const Json& v, const char* field) {
    if (!v.is_object()) {
        throw ValidationError(field, fmt::format("field \"{}\" must be an object", field));
    }
    Sign sign = decode_sign(v, "sign");
    const Json& idx = require(v, "indices");
    if (!idx.is_array()) {
        throw ValidationError("indices", "indices must be an array");
    }
    std::vector<int> indices;
    int prev = 0;
    for (const Json& e : idx) {
        if (!e.is_number_integer()) {
            throw ValidationError("indices", "indices must be integers");
        }
        int k = e.get<int>();
        if (k < 1 || k > kMaxRademacherIndex) {
            throw ValidationError("indices",
                                  fmt::format("index {} outside [1, {}]", k, kMaxRademacherIndex));
        }
        if (k <= prev) {
            throw ValidationError("indices", "indices must be strictly increasing");
        }
        prev = k;
        indices.push_back(k);
    }
    return SignedProduct{sign, std::move(indices)};
}

Schedule decode_schedule(const Json& v) {
    if (!v.is_object()) {
        throw ValidationError("schedule", "schedule must be an object");
    }
    const Json& windows = require(v, "windows");
    if (!windows.is_array() || windows.size() != 4) {
        throw ValidationError("windows", "schedule must have exactly 4 windows");
    }
    Schedule s;
    for (int i = 0; i < 4; ++i) {
        const Json& wj = windows[i];
        ExperimentWindow w;
        w.index = i;
        w.setting = decode_setting(require_string(wj, "setting"), "setting");
        w.start = Tick{require_uint(wj, "start")};
        w.end = Tick{require_uint(wj, "end")};
        if (!(w.start < w.end)) {
            throw ValidationError("windows", fmt::format("window {} start must precede end", i));
        }
        if (i > 0 && !(s.windows[i - 1].end < w.start)) {
            throw ValidationError("windows", fmt::format("window {} must start after the gap", i));
        }
        s.windows[i] = w;
    }
    s.rounds_per_window = require_uint(v, "rounds_per_window");
    if (s.rounds_per_window == 0) {
        throw ValidationError("rounds_per_window", "rounds_per_window must be >= 1");
    }
    s.seed = require_uint(v, "seed");
    return s;
}

}  // namespace

std::string encode_message(const Message& m) {
    Json j;
    std::visit(
        [&](const auto& msg) {
            using T = std::decay_t<decltype(msg)>;
            if constexpr (std::is_same_v<T, Hello>) {
                j = Json{{"t", "hello"}, {"role", static_cast<int>(msg.role)}, {"proto", msg.proto}};
            } else if constexpr (std::is_same_v<T, Welcome>) {
                j = Json{{"t", "welcome"}, {"role", static_cast<int>(msg.role)}};
            } else if constexpr (std::is_same_v<T, Launch>) {
                Json row = Json::object();
                for (const auto& [sv, entry] : msg.row) {
                    row[std::string(name(sv))] = product_to_json(entry);
                }
                j = Json{{"t", "launch"},
                         {"schedule", schedule_to_json(msg.schedule)},
                         {"row", std::move(row)}};
            } else if constexpr (std::is_same_v<T, Data>) {
                const MeasurementRecord& r = msg.record;
                j = Json{{"t", "data"},
                         {"role", static_cast<int>(r.role)},
                         {"window_index", r.window_index},
                         {"round", r.round},
                         {"label", std::string(1, to_char(r.label))},
                         {"value", to_int(r.value)},
                         {"tick", r.tick.ticks}};
            } else if constexpr (std::is_same_v<T, Done>) {
                j = Json{{"t", "done"}, {"role", static_cast<int>(msg.role)}};
            } else if constexpr (std::is_same_v<T, ProtocolError>) {
                j = Json{{"t", "error"}, {"text", msg.text}};
            }
        },
        m);
    return j.dump() + "\n";
}

Message decode_message(std::string_view line) {
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded()) {
        throw FrameError("malformed JSON frame");
    }
    if (!j.is_object()) {
        throw ValidationError("t", "message must be a JSON object");
    }
    std::string tag = require_string(j, "t");
    if (tag == "hello") {
        Hello m;
        m.role = decode_role(j);
        auto proto = require_int(j, "proto");
        if (proto < 1) {
            throw ValidationError("proto", fmt::format("proto must be >= 1, got {}", proto));
        }
        m.proto = static_cast<int>(proto);
        return m;
    }
    if (tag == "welcome") {
        return Welcome{decode_role(j)};
    }
    if (tag == "launch") {
        Launch m;
        m.schedule = decode_schedule(require(j, "schedule"));
        const Json& row = require(j, "row");
        if (!row.is_object()) {
            throw ValidationError("row", "row must be an object");
        }
        for (const auto& [key, value] : row.items()) {
            m.row[decode_setting(key, "row")] = decode_product(value, "row");
        }
        return m;
    }
    if (tag == "data") {
        MeasurementRecord r;
        r.role = decode_role(j);
        auto w = require_int(j, "window_index");
        if (w < 0 || w > 3) {
            throw ValidationError("window_index", fmt::format("window_index {} outside [0,3]", w));
        }
        r.window_index = static_cast<int>(w);
        r.round = require_uint(j, "round");
        r.label = decode_label(j);
        r.value = decode_sign(j, "value");
        r.tick = Tick{require_uint(j, "tick")};
        return Data{r};
    }
    if (tag == "done") {
        return Done{decode_role(j)};
    }
    if (tag == "error") {
        return ProtocolError{require_string(j, "text")};
    }
    throw ValidationError("t", fmt::format("unknown message tag \"{}\"", tag));
}

std::optional<std::string> FrameReader::next_line() {
    auto pos = buffer_.find('\n');
    if (pos == std::string::npos) return std::nullopt;
    std::string line = buffer_.substr(0, pos);
    buffer_.erase(0, pos + 1);
    return line;
}

void FrameReader::finish() const {
    if (!buffer_.empty()) {
        throw FrameError("truncated frame at end of stream");
    }
}

}  // namespace ghz
