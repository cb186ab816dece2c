#include "distsem/assoc.hpp"

#include <cctype>
#include <cmath>
#include <string>

#include "distsem/error.hpp"

namespace distsem {

std::string_view to_string(SoAKind kind) {
    switch (kind) {
        case SoAKind::CP: return "CP";
        case SoAKind::PMI: return "PMI";
        case SoAKind::Phi: return "Phi";
        case SoAKind::Odds: return "Odds";
        case SoAKind::Dice: return "Dice";
        case SoAKind::Yule: return "Yule";
        case SoAKind::CosSoA: return "CosSoA";
    }
    return "CP";
}

SoAKind parse_soa(std::string_view name) {
    for (SoAKind k : {SoAKind::CP, SoAKind::PMI, SoAKind::Phi, SoAKind::Odds, SoAKind::Dice, SoAKind::Yule,
                      SoAKind::CosSoA}) {
        std::string_view n = to_string(k);
        if (n.size() == name.size()) {
            bool same = true;
            for (std::size_t i = 0; i < n.size(); ++i) {
                same &= std::tolower(static_cast<unsigned char>(n[i])) ==
                        std::tolower(static_cast<unsigned char>(name[i]));
            }
            if (same) return k;
        }
    }
    throw ConfigError("unknown strength-of-association '" + std::string(name) + "'");
}

ContingencyTable make_table(double joint, double row_total, double col_total, double grand_total) {
    ContingencyTable t;
    t.wc = joint;
    t.w_not = row_total - joint;
    t.not_c = col_total - joint;
    t.not_not = grand_total - joint - t.w_not - t.not_c;
    if (t.wc < 0 || t.w_not < 0 || t.not_c < 0 || t.not_not < 0) {
        throw ValidationError("inconsistent marginals: negative contingency cell");
    }
    return t;
}

ContingencyTable contingency(const CooccurrenceCounts& counts, WordId target, WordId feature) {
    return make_table(static_cast<double>(counts.pair_count(target, feature)),
                      static_cast<double>(counts.target_total(target)),
                      static_cast<double>(counts.feature_total(feature)),
                      static_cast<double>(counts.total_pairs()));
}

ContingencyTable contingency(const CooccurrenceCounts& counts, std::string_view target,
                             std::string_view feature) {
    auto t = counts.find_target(target);
    if (!t) throw MissingRowError("no counts for target '" + std::string(target) + "'");
    auto f = counts.find_feature(feature);
    if (!f) {
        // Feature never observed: the whole row falls in the "other" column.
        double row = static_cast<double>(counts.target_total(*t));
        return make_table(0, row, 0, static_cast<double>(counts.total_pairs()));
    }
    return contingency(counts, *t, *f);
}

namespace {

[[noreturn]] void undefined(SoAKind kind, const char* why) {
    throw UndefinedError(std::string(to_string(kind)) + " undefined: " + why);
}

}  // namespace

double strength(const ContingencyTable& t, SoAKind kind, double log_base) {
    const double n = t.total();
    if (!(n > 0)) undefined(kind, "empty contingency table");
    const double row = t.row(), col = t.col();
    const double row_not = t.not_c + t.not_not, col_not = t.w_not + t.not_not;
    switch (kind) {
        case SoAKind::CP:
            if (row == 0) undefined(kind, "zero row total");
            return t.wc / row;
        case SoAKind::PMI:
            if (t.wc == 0) undefined(kind, "zero joint count");
            // wc > 0 implies row, col > 0.
            return std::log((t.wc * n) / (row * col)) / std::log(log_base);
        case SoAKind::Phi: {
            double denom = row * col * row_not * col_not;
            if (denom == 0) undefined(kind, "a marginal is zero");
            return (t.wc * t.not_not - t.w_not * t.not_c) / std::sqrt(denom);
        }
        case SoAKind::Odds: {
            double denom = t.w_not * t.not_c;
            if (denom == 0) undefined(kind, "an off-diagonal cell is zero");
            return (t.wc * t.not_not) / denom;
        }
        case SoAKind::Dice:
            if (row + col == 0) undefined(kind, "zero marginals");
            return 2 * t.wc / (row + col);
        case SoAKind::Yule: {
            // (Odds - 1) / (Odds + 1), multiplied through by w_not * not_c so that
            // perfect association (an empty off-diagonal) stays defined.
            double ad = t.wc * t.not_not, bc = t.w_not * t.not_c;
            if (ad + bc == 0) undefined(kind, "both diagonal products are zero");
            return (ad - bc) / (ad + bc);
        }
        case SoAKind::CosSoA:
            if (row * col == 0) undefined(kind, "a marginal is zero");
            return t.wc / std::sqrt(row * col);
    }
    undefined(kind, "unknown statistic");
}

}  // namespace distsem
