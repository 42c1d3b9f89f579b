#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ghz/core_model.hpp"
#include "ghz/schedule.hpp"

namespace ghz {

/// The six outcome variables of the four experiments, in enumeration order.
enum class Variable : int { X1 = 0, X2 = 1, X3 = 2, Y1 = 3, Y2 = 4, Y3 = 5 };

inline constexpr std::array<Variable, 6> kAllVariables = {Variable::X1, Variable::X2, Variable::X3,
                                                          Variable::Y1, Variable::Y2, Variable::Y3};

std::string_view name(Variable v);

/// Product of distinct variables constrained to equal a fixed sign,
/// e.g. Y1*Y2*X3 = -1.
struct ParityConstraint {
    std::vector<Variable> variables;
    Sign target = Sign::plus;
};

/// One point of the hypothetical single probability space: a total +-1
/// assignment to the six variables.
using Assignment = std::array<Sign, 6>;

/// Exhaustive scan of all 64 assignments; returns the satisfying ones in
/// lexicographic order over (X1,X2,X3,Y1,Y2,Y3) with +1 before -1.
std::vector<Assignment> enumerate_assignments(const std::vector<ParityConstraint>& constraints);

/// GF(2) rank of the constraint parity matrix.
int gf2_rank(const std::vector<ParityConstraint>& constraints);

/// 2^(6-rank) when the system is consistent, 0 when it is not; must equal the
/// brute-force count.
std::uint64_t predicted_assignment_count(const std::vector<ParityConstraint>& constraints);

/// The three per-window parity relations (each product = -1).
std::vector<ParityConstraint> polt_base_constraints();
/// The quantum prediction for the fourth experiment: X1*X2*X3 = +1.
ParityConstraint quantum_xxx_constraint();
/// The counterfactual-reasoning prediction: X1*X2*X3 = -1.
ParityConstraint polt_xxx_constraint();

/// One of the six cross-experiment identification equalities.
struct Identification {
    std::string equality;  // e.g. "Y3''=Y3'''"
    Role station = Role::alice;
    SettingVector lhs_setting = SettingVector::yyx;
    SettingVector rhs_setting = SettingVector::yyx;
    SignedProduct lhs;
    SignedProduct rhs;
    bool holds = false;  // symbolic identity of the two entries
};

struct IdentificationReport {
    std::array<Identification, 6> equalities;

    int failing_count() const;
};

/// Decides each identification symbolically: it holds everywhere iff the two
/// normalized SignedProducts are identical.
IdentificationReport check_identifications(const MeasurementTable& table);

/// Symbolic triple product of the three station entries per setting. For the
/// standard table: yyx,yxy,xyy -> (-1,[]), xxx -> (+1,[]).
std::map<SettingVector, SignedProduct> verify_table_products(const MeasurementTable& table);

/// Empirical +1 fraction of every station's entry over the scheduled ticks of
/// each window. Requires rounds_per_window >= 100.
std::map<std::pair<Role, int>, double> balance_statistics(const MeasurementTable& table,
                                                          const Schedule& schedule);

/// Full JSON report for the analyze subcommand.
std::string analysis_report_json(const MeasurementTable& table, std::uint64_t rounds,
                                 std::uint64_t seed);

}  // namespace ghz
