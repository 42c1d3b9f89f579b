#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ghz {

// Rademacher indices above this would need sub-tick resolution.
inline constexpr int kMaxRademacherIndex = 32;
inline constexpr std::uint64_t kTicksPerUnit = std::uint64_t{1} << 32;

/// Exact dyadic time point: t = ticks / 2^32 abstract time units.
/// All evaluation is integer arithmetic on ticks; nothing ever rounds.
struct Tick {
    std::uint64_t ticks = 0;

    friend auto operator<=>(const Tick&, const Tick&) = default;
};

constexpr Tick ticks_from_units(std::uint64_t units) {
    return Tick{units * kTicksPerUnit};
}

enum class Sign : int {
    plus = +1,
    minus = -1,
};

constexpr int to_int(Sign s) { return static_cast<int>(s); }

constexpr Sign operator*(Sign a, Sign b) {
    return to_int(a) == to_int(b) ? Sign::plus : Sign::minus;
}

/// Parses ±1; anything else is out of the outcome alphabet.
Sign sign_from_int(int v);

enum class SettingLabel : char {
    x = 'x',
    y = 'y',
};

char to_char(SettingLabel l);
SettingLabel label_from_char(char c);

/// The four experiment configurations, in Table column order.
enum class SettingVector : int {
    yyx = 0,
    yxy = 1,
    xyy = 2,
    xxx = 3,
};

inline constexpr std::array<SettingVector, 4> kAllSettings = {
    SettingVector::yyx, SettingVector::yxy, SettingVector::xyy, SettingVector::xxx};

std::string_view name(SettingVector sv);
SettingVector setting_from_name(std::string_view s);

enum class Role : int {
    alice = 1,
    bob = 2,
    claire = 3,
};

inline constexpr std::array<Role, 3> kAllRoles = {Role::alice, Role::bob, Role::claire};

Role role_from_int(int v);

/// The measurement type a given station performs under a setting vector.
SettingLabel label_for(SettingVector sv, Role station);

/// A sign times a product of distinct Rademacher indices. Indices are kept
/// strictly increasing; duplicates cancel (r_k * r_k = +1) and are never stored.
/// An empty index list denotes the constant function equal to `sign`.
struct SignedProduct {
    Sign sign = Sign::plus;
    std::vector<int> indices;

    friend bool operator==(const SignedProduct&, const SignedProduct&) = default;
};

/// k-th Rademacher square wave, +1 on [0,1/2) and -1 on [1/2,1) of frac(2^(k-1) t).
/// Agrees with sign[sin(2^k pi t)] wherever the sine is nonzero; the boundary
/// set takes +1 so the function is total and right-continuous.
/// Throws std::domain_error for k outside [1, kMaxRademacherIndex].
Sign rademacher(int k, Tick t);

/// Pointwise value of a signed Rademacher product at time t.
Sign eval_signed_product(const SignedProduct& p, Tick t);

/// Cancels even-multiplicity indices, sorts the rest, preserves the sign.
SignedProduct normalize_product(Sign sign, std::vector<int> indices);

/// Symbolic product of three table entries. Empty indices in the result mean
/// the triple product is constant in t.
SignedProduct symbolic_triple_product(const SignedProduct& a, const SignedProduct& b,
                                      const SignedProduct& c);

/// Per-station rows of the measurement table: (station, setting vector) -> entry.
struct MeasurementTable {
    std::map<std::pair<Role, SettingVector>, SignedProduct> entries;

    friend bool operator==(const MeasurementTable&, const MeasurementTable&) = default;
};

/// The 12-entry standard table:
///   row 1: -r1, -r1, r2*r3, r2*r3
///   row 2:  r2, r1*r3, r2, r1*r3
///   row 3:  r1*r2, r3, -r3, r1*r2
/// across columns yyx, yxy, xyy, xxx.
MeasurementTable standard_table();

/// Looks up and evaluates the entry for (station, sv) at time t.
/// Throws std::out_of_range naming the missing pair if no entry exists.
Sign table_outcome(const MeasurementTable& table, Role station, SettingVector sv, Tick t);

/// Serialization for custom-table runs: {"<role>/<setting>": {"sign": ±1, "indices": [...]}}.
std::string table_to_json(const MeasurementTable& table);
MeasurementTable table_from_json(std::string_view text);

}  // namespace ghz
