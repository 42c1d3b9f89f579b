#include "ghz/core_model.hpp"

#include <algorithm>
#include <fmt/format.h>

#include <json.hpp>

namespace ghz {

Sign sign_from_int(int v) {
    if (v == +1) return Sign::plus;
    if (v == -1) return Sign::minus;
    throw std::domain_error(fmt::format("sign must be +1 or -1, got {}", v));
}

char to_char(SettingLabel l) { return static_cast<char>(l); }

SettingLabel label_from_char(char c) {
    if (c == 'x') return SettingLabel::x;
    if (c == 'y') return SettingLabel::y;
    throw std::domain_error(fmt::format("setting label must be 'x' or 'y', got '{}'", c));
}

std::string_view name(SettingVector sv) {
    switch (sv) {
        case SettingVector::yyx: return "yyx";
        case SettingVector::yxy: return "yxy";
        case SettingVector::xyy: return "xyy";
        case SettingVector::xxx: return "xxx";
    }
    throw std::domain_error("invalid setting vector");
}

SettingVector setting_from_name(std::string_view s) {
    for (SettingVector sv : kAllSettings) {
        if (name(sv) == s) return sv;
    }
    throw std::domain_error(fmt::format("unknown setting vector \"{}\"", s));
}

Role role_from_int(int v) {
    if (v < 1 || v > 3) {
        throw std::domain_error(fmt::format("station role must be 1, 2 or 3, got {}", v));
    }
    return static_cast<Role>(v);
}

SettingLabel label_for(SettingVector sv, Role station) {
    return label_from_char(name(sv)[static_cast<int>(station) - 1]);
}

Sign rademacher(int k, Tick t) {
    if (k < 1 || k > kMaxRademacherIndex) {
        throw std::domain_error(
            fmt::format("Rademacher index {} outside [1, {}]", k, kMaxRademacherIndex));
    }
    // frac(2^(k-1) * t) in units of 2^-32: low 32 bits of ticks << (k-1).
    auto frac = static_cast<std::uint32_t>(t.ticks << (k - 1));
    return frac < (std::uint32_t{1} << 31) ? Sign::plus : Sign::minus;
}

Sign eval_signed_product(const SignedProduct& p, Tick t) {
    Sign out = p.sign;
    for (int k : p.indices) {
        out = out * rademacher(k, t);
    }
    return out;
}

SignedProduct normalize_product(Sign sign, std::vector<int> indices) {
    std::ranges::sort(indices);
    std::vector<int> kept;
    for (std::size_t i = 0; i < indices.size();) {
        std::size_t j = i;
        while (j < indices.size() && indices[j] == indices[i]) ++j;
        if ((j - i) % 2 != 0) kept.push_back(indices[i]);
        i = j;
    }
    return SignedProduct{sign, std::move(kept)};
}

SignedProduct symbolic_triple_product(const SignedProduct& a, const SignedProduct& b,
                                      const SignedProduct& c) {
    std::vector<int> all;
    all.reserve(a.indices.size() + b.indices.size() + c.indices.size());
    all.insert(all.end(), a.indices.begin(), a.indices.end());
    all.insert(all.end(), b.indices.begin(), b.indices.end());
    all.insert(all.end(), c.indices.begin(), c.indices.end());
    return normalize_product(a.sign * b.sign * c.sign, std::move(all));
}

MeasurementTable standard_table() {
    const SignedProduct neg_r1{Sign::minus, {1}};
    const SignedProduct r2{Sign::plus, {2}};
    const SignedProduct r3{Sign::plus, {3}};
    const SignedProduct neg_r3{Sign::minus, {3}};
    const SignedProduct r1r2{Sign::plus, {1, 2}};
    const SignedProduct r1r3{Sign::plus, {1, 3}};
    const SignedProduct r2r3{Sign::plus, {2, 3}};

    MeasurementTable t;
    t.entries[{Role::alice, SettingVector::yyx}] = neg_r1;
    t.entries[{Role::alice, SettingVector::yxy}] = neg_r1;
    t.entries[{Role::alice, SettingVector::xyy}] = r2r3;
    t.entries[{Role::alice, SettingVector::xxx}] = r2r3;
    t.entries[{Role::bob, SettingVector::yyx}] = r2;
    t.entries[{Role::bob, SettingVector::yxy}] = r1r3;
    t.entries[{Role::bob, SettingVector::xyy}] = r2;
    t.entries[{Role::bob, SettingVector::xxx}] = r1r3;
    t.entries[{Role::claire, SettingVector::yyx}] = r1r2;
    t.entries[{Role::claire, SettingVector::yxy}] = r3;
    t.entries[{Role::claire, SettingVector::xyy}] = neg_r3;
    t.entries[{Role::claire, SettingVector::xxx}] = r1r2;
    return t;
}

Sign table_outcome(const MeasurementTable& table, Role station, SettingVector sv, Tick t) {
    auto it = table.entries.find({station, sv});
    if (it == table.entries.end()) {
        throw std::out_of_range(fmt::format("no table entry for station {} setting {}",
                                            static_cast<int>(station), name(sv)));
    }
    return eval_signed_product(it->second, t);
}

std::string table_to_json(const MeasurementTable& table) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (const auto& [key, entry] : table.entries) {
        auto tag = fmt::format("{}/{}", static_cast<int>(key.first), name(key.second));
        obj[tag] = {{"sign", to_int(entry.sign)}, {"indices", entry.indices}};
    }
    return obj.dump();
}

MeasurementTable table_from_json(std::string_view text) {
    auto obj = nlohmann::json::parse(text);
    MeasurementTable table;
    for (const auto& [tag, value] : obj.items()) {
        auto slash = tag.find('/');
        if (slash == std::string::npos) {
            throw std::domain_error(fmt::format("table key \"{}\" is not <role>/<setting>", tag));
        }
        Role role = role_from_int(std::stoi(tag.substr(0, slash)));
        SettingVector sv = setting_from_name(tag.substr(slash + 1));
        Sign sign = sign_from_int(value.at("sign").get<int>());
        auto indices = value.at("indices").get<std::vector<int>>();
        for (int k : indices) {
            if (k < 1 || k > kMaxRademacherIndex) {
                throw std::domain_error(fmt::format("table index {} outside [1, {}] in \"{}\"", k,
                                                    kMaxRademacherIndex, tag));
            }
        }
        table.entries[{role, sv}] = normalize_product(sign, std::move(indices));
    }
    return table;
}

}  // namespace ghz
