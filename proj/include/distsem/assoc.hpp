#pragma once

#include <string_view>

#include "distsem/corpus.hpp"

namespace distsem {

// 2x2 table for one (target, feature) pair:
//              feature   other
//   target       wc       w_not
//   other       not_c    not_not
struct ContingencyTable {
    double wc = 0;
    double w_not = 0;
    double not_c = 0;
    double not_not = 0;

    double total() const { return wc + w_not + not_c + not_not; }
    double row() const { return wc + w_not; }
    double col() const { return wc + not_c; }
};

// Builds a table from marginals. Throws ValidationError on negative cells.
ContingencyTable make_table(double joint, double row_total, double col_total, double grand_total);

enum class SoAKind { CP, PMI, Phi, Odds, Dice, Yule, CosSoA };

std::string_view to_string(SoAKind kind);
SoAKind parse_soa(std::string_view name);

ContingencyTable contingency(const CooccurrenceCounts& counts, std::string_view target,
                             std::string_view feature);
ContingencyTable contingency(const CooccurrenceCounts& counts, WordId target, WordId feature);

// Strength of association. Throws UndefinedError (naming the statistic) when
// the formula's denominator vanishes or the log argument is zero.
double strength(const ContingencyTable& table, SoAKind kind, double log_base = 2.0);

}  // namespace distsem
