#include "ghz/analysis.hpp"

#include <fmt/format.h>
#include <stdexcept>

#include <json.hpp>

namespace ghz {

std::string_view name(Variable v) {
    switch (v) {
        case Variable::X1: return "X1";
        case Variable::X2: return "X2";
        case Variable::X3: return "X3";
        case Variable::Y1: return "Y1";
        case Variable::Y2: return "Y2";
        case Variable::Y3: return "Y3";
    }
    throw std::domain_error("invalid variable");
}

namespace {

// bits 0..5 = (X1,X2,X3,Y1,Y2,Y3); bit set means the variable equals -1.
Assignment assignment_from_bits(unsigned bits) {
    Assignment a;
    for (int i = 0; i < 6; ++i) {
        a[i] = (bits >> (5 - i)) & 1u ? Sign::minus : Sign::plus;
    }
    return a;
}

// Constraint as a GF(2) row: low 6 bits variable mask, bit 6 the parity target
// (product -1 <=> odd number of -1 factors).
unsigned constraint_row(const ParityConstraint& c) {
    unsigned row = 0;
    for (Variable v : c.variables) {
        unsigned bit = 1u << static_cast<int>(v);
        if (row & bit) {
            throw std::domain_error(
                fmt::format("variable {} repeated within one constraint", name(v)));
        }
        row |= bit;
    }
    if (c.target == Sign::minus) row |= 1u << 6;
    return row;
}

bool satisfies(const Assignment& a, const ParityConstraint& c) {
    Sign product = Sign::plus;
    for (Variable v : c.variables) {
        product = product * a[static_cast<int>(v)];
    }
    return product == c.target;
}

}  // namespace

std::vector<Assignment> enumerate_assignments(const std::vector<ParityConstraint>& constraints) {
    std::vector<Assignment> satisfying;
    for (unsigned bits = 0; bits < 64; ++bits) {
        Assignment a = assignment_from_bits(bits);
        bool ok = true;
        for (const ParityConstraint& c : constraints) {
            if (!satisfies(a, c)) {
                ok = false;
                break;
            }
        }
        if (ok) satisfying.push_back(a);
    }
    return satisfying;
}

int gf2_rank(const std::vector<ParityConstraint>& constraints) {
    std::vector<unsigned> rows;
    for (const ParityConstraint& c : constraints) {
        rows.push_back(constraint_row(c) & 0x3Fu);
    }
    int rank = 0;
    for (int col = 0; col < 6; ++col) {
        unsigned bit = 1u << col;
        std::size_t pivot = rank;
        while (pivot < rows.size() && !(rows[pivot] & bit)) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[rank], rows[pivot]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r != static_cast<std::size_t>(rank) && (rows[r] & bit)) {
                rows[r] ^= rows[rank];
            }
        }
        ++rank;
    }
    return rank;
}

std::uint64_t predicted_assignment_count(const std::vector<ParityConstraint>& constraints) {
    // Eliminate over the augmented rows; a zero variable part with parity bit
    // set marks an inconsistent system.
    std::vector<unsigned> rows;
    for (const ParityConstraint& c : constraints) {
        rows.push_back(constraint_row(c));
    }
    int rank = 0;
    for (int col = 0; col < 6; ++col) {
        unsigned bit = 1u << col;
        std::size_t pivot = rank;
        while (pivot < rows.size() && !(rows[pivot] & bit)) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[rank], rows[pivot]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r != static_cast<std::size_t>(rank) && (rows[r] & bit)) {
                rows[r] ^= rows[rank];
            }
        }
        ++rank;
    }
    for (unsigned row : rows) {
        if ((row & 0x3Fu) == 0 && (row & (1u << 6))) return 0;
    }
    return std::uint64_t{1} << (6 - rank);
}

std::vector<ParityConstraint> polt_base_constraints() {
    return {
        ParityConstraint{{Variable::Y1, Variable::Y2, Variable::X3}, Sign::minus},
        ParityConstraint{{Variable::Y1, Variable::X2, Variable::Y3}, Sign::minus},
        ParityConstraint{{Variable::X1, Variable::Y2, Variable::Y3}, Sign::minus},
    };
}

ParityConstraint quantum_xxx_constraint() {
    return ParityConstraint{{Variable::X1, Variable::X2, Variable::X3}, Sign::plus};
}

ParityConstraint polt_xxx_constraint() {
    return ParityConstraint{{Variable::X1, Variable::X2, Variable::X3}, Sign::minus};
}

int IdentificationReport::failing_count() const {
    int n = 0;
    for (const Identification& id : equalities) {
        if (!id.holds) ++n;
    }
    return n;
}

IdentificationReport check_identifications(const MeasurementTable& table) {
    struct Spec {
        const char* equality;
        Role station;
        SettingVector lhs;
        SettingVector rhs;
    };
    // The six equalities that would glue the four experiments onto one
    // probability space.
    static constexpr std::array<Spec, 6> specs = {{
        {"Y1'=Y1''", Role::alice, SettingVector::yyx, SettingVector::yxy},
        {"Y2'=Y2'''", Role::bob, SettingVector::yyx, SettingVector::xyy},
        {"Y3''=Y3'''", Role::claire, SettingVector::yxy, SettingVector::xyy},
        {"X1'''=X1*", Role::alice, SettingVector::xyy, SettingVector::xxx},
        {"X2''=X2*", Role::bob, SettingVector::yxy, SettingVector::xxx},
        {"X3'=X3*", Role::claire, SettingVector::yyx, SettingVector::xxx},
    }};

    auto entry = [&](Role station, SettingVector sv) -> const SignedProduct& {
        auto it = table.entries.find({station, sv});
        if (it == table.entries.end()) {
            throw std::out_of_range(fmt::format("table has no entry for station {} setting {}",
                                                static_cast<int>(station), name(sv)));
        }
        return it->second;
    };

    IdentificationReport report;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const Spec& s = specs[i];
        Identification id;
        id.equality = s.equality;
        id.station = s.station;
        id.lhs_setting = s.lhs;
        id.rhs_setting = s.rhs;
        id.lhs = normalize_product(entry(s.station, s.lhs).sign, entry(s.station, s.lhs).indices);
        id.rhs = normalize_product(entry(s.station, s.rhs).sign, entry(s.station, s.rhs).indices);
        id.holds = (id.lhs == id.rhs);
        report.equalities[i] = std::move(id);
    }
    return report;
}

std::map<SettingVector, SignedProduct> verify_table_products(const MeasurementTable& table) {
    std::map<SettingVector, SignedProduct> products;
    for (SettingVector sv : kAllSettings) {
        std::array<const SignedProduct*, 3> entries{};
        for (int r = 0; r < 3; ++r) {
            auto it = table.entries.find({kAllRoles[r], sv});
            if (it == table.entries.end()) {
                throw std::out_of_range(fmt::format("table has no entry for station {} setting {}",
                                                    r + 1, name(sv)));
            }
            entries[r] = &it->second;
        }
        products[sv] = symbolic_triple_product(*entries[0], *entries[1], *entries[2]);
    }
    return products;
}

std::map<std::pair<Role, int>, double> balance_statistics(const MeasurementTable& table,
                                                          const Schedule& schedule) {
    if (schedule.rounds_per_window < 100) {
        throw std::invalid_argument("balance statistics need rounds_per_window >= 100");
    }
    std::map<std::pair<Role, int>, double> fractions;
    for (const ExperimentWindow& window : schedule.windows) {
        for (Role role : kAllRoles) {
            std::uint64_t plus = 0;
            for (std::uint64_t n = 0; n < schedule.rounds_per_window; ++n) {
                Tick t = measurement_tick(schedule, window.index, n);
                if (table_outcome(table, role, window.setting, t) == Sign::plus) ++plus;
            }
            fractions[{role, window.index}] =
                static_cast<double>(plus) / static_cast<double>(schedule.rounds_per_window);
        }
    }
    return fractions;
}

std::string analysis_report_json(const MeasurementTable& table, std::uint64_t rounds,
                                 std::uint64_t seed) {
    using Json = nlohmann::ordered_json;

    auto assignment_to_json = [](const Assignment& a) {
        Json obj = Json::object();
        for (int i = 0; i < 6; ++i) {
            obj[std::string(name(kAllVariables[i]))] = to_int(a[i]);
        }
        return obj;
    };
    auto count_block = [&](const std::vector<ParityConstraint>& constraints, bool list) {
        auto satisfying = enumerate_assignments(constraints);
        Json block{{"count", satisfying.size()},
                   {"predicted_count", predicted_assignment_count(constraints)},
                   {"gf2_rank", gf2_rank(constraints)}};
        if (list) {
            Json arr = Json::array();
            for (const Assignment& a : satisfying) arr.push_back(assignment_to_json(a));
            block["assignments"] = std::move(arr);
        }
        return block;
    };

    auto base = polt_base_constraints();
    auto with_quantum = base;
    with_quantum.push_back(quantum_xxx_constraint());
    auto with_polt = base;
    with_polt.push_back(polt_xxx_constraint());

    Json single_space{{"base_relations", count_block(base, true)},
                      {"with_quantum_xxx", count_block(with_quantum, true)},
                      {"with_polt_xxx", count_block(with_polt, false)}};

    Json identifications = Json::array();
    for (const Identification& id : check_identifications(table).equalities) {
        identifications.push_back(Json{{"equality", id.equality},
                                       {"station", static_cast<int>(id.station)},
                                       {"lhs_setting", name(id.lhs_setting)},
                                       {"rhs_setting", name(id.rhs_setting)},
                                       {"holds", id.holds}});
    }

    Json products = Json::object();
    for (const auto& [sv, p] : verify_table_products(table)) {
        products[std::string(name(sv))] = Json{{"sign", to_int(p.sign)},
                                               {"indices", p.indices},
                                               {"constant", p.indices.empty()}};
    }

    Schedule schedule = build_default_schedule(rounds, seed);
    Json balance = Json::array();
    for (const auto& [key, fraction] : balance_statistics(table, schedule)) {
        balance.push_back(Json{{"station", static_cast<int>(key.first)},
                               {"window", key.second},
                               {"plus_fraction", fraction}});
    }

    Json report{{"single_space", std::move(single_space)},
                {"identification_report", std::move(identifications)},
                {"table_products", std::move(products)},
                {"balance", std::move(balance)},
                {"rounds_per_window", rounds},
                {"seed", seed}};
    return report.dump(2);
}

}  // namespace ghz
