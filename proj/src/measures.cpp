#include "distsem/measures.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <vector>

#include "distsem/error.hpp"

namespace distsem {

namespace {

constexpr MeasureInfo kMeasures[] = {
    {MeasureId::Cos, "cos", Orientation::closeness, true, SoAKind::CP},
    {MeasureId::L1, "l1", Orientation::distance, true, SoAKind::CP},
    {MeasureId::L2, "l2", Orientation::distance, true, SoAKind::CP},
    {MeasureId::KLD, "kld", Orientation::distance, false, SoAKind::CP},
    {MeasureId::KLD_Com, "kld_com", Orientation::distance, false, SoAKind::CP},
    {MeasureId::KLD_Abs, "kld_abs", Orientation::distance, false, SoAKind::CP},
    {MeasureId::KLD_UnwAbs, "kld_unwabs", Orientation::distance, true, SoAKind::CP},
    {MeasureId::KLD_Max, "kld_max", Orientation::distance, true, SoAKind::CP},
    {MeasureId::KLD_Avg, "kld_avg", Orientation::distance, true, SoAKind::CP},
    {MeasureId::ASD, "asd", Orientation::distance, false, SoAKind::CP},
    {MeasureId::JSD, "jsd", Orientation::distance, true, SoAKind::CP},
    {MeasureId::JSD_Abs, "jsd_abs", Orientation::distance, true, SoAKind::CP},
    {MeasureId::DiceCP, "dicecp", Orientation::closeness, true, SoAKind::CP},
    {MeasureId::JaccardCP, "jaccardcp", Orientation::closeness, true, SoAKind::CP},
    {MeasureId::Hindle, "hindle", Orientation::closeness, true, SoAKind::PMI},
    {MeasureId::HindleRel, "hindle_rel", Orientation::closeness, true, SoAKind::PMI},
    {MeasureId::Lin, "lin", Orientation::closeness, true, SoAKind::PMI},
    {MeasureId::Dif, "dif", Orientation::distance, true, SoAKind::CP},
    {MeasureId::Div, "div", Orientation::distance, true, SoAKind::CP},
    {MeasureId::PdtAvg, "pdtavg", Orientation::closeness, true, SoAKind::CP},
    {MeasureId::PdtAvgWt, "pdtavgwt", Orientation::closeness, true, SoAKind::CP},
    {MeasureId::CRM, "crm", Orientation::closeness, false, SoAKind::CP},
};

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

double log_in(double x, double base) { return std::log(x) / std::log(base); }

// Walks the union of two sorted profiles; absent entries are reported as 0.
template <typename F>
void for_union(const DistributionalProfile& a, const DistributionalProfile& b, F&& f) {
    auto ea = a.entries(), eb = b.entries();
    std::size_t i = 0, j = 0;
    while (i < ea.size() || j < eb.size()) {
        if (j == eb.size() || (i < ea.size() && ea[i].feature < eb[j].feature)) {
            f(ea[i].feature, ea[i].value, 0.0);
            ++i;
        } else if (i == ea.size() || eb[j].feature < ea[i].feature) {
            f(eb[j].feature, 0.0, eb[j].value);
            ++j;
        } else {
            f(ea[i].feature, ea[i].value, eb[j].value);
            ++i;
            ++j;
        }
    }
}

template <typename F>
void for_intersection(const DistributionalProfile& a, const DistributionalProfile& b, F&& f) {
    for_union(a, b, [&](const std::string& feat, double x, double y) {
        if (x != 0 && y != 0) f(feat, x, y);
    });
}

void require_compatible(const DistributionalProfile& a, const DistributionalProfile& b, const char* measure) {
    if (!a.empty() && !b.empty() && a.feature_kind() != b.feature_kind()) {
        throw IncompatibleProfilesError(std::string(measure) +
                                        ": cannot compare relation-free with relation-constrained profiles");
    }
}

void require_soa(const DistributionalProfile& a, const DistributionalProfile& b, SoAKind kind,
                 const char* measure) {
    require_compatible(a, b, measure);
    if (a.soa() != kind || b.soa() != kind) {
        throw IncompatibleProfilesError(std::string(measure) + " needs " + std::string(to_string(kind)) +
                                        " profiles");
    }
}

void require_cp(const DistributionalProfile& a, const DistributionalProfile& b, const char* measure) {
    require_soa(a, b, SoAKind::CP, measure);
    if (a.empty() || b.empty()) throw EmptyProfileError(std::string(measure) + ": empty CP profile");
}

// Aligned probabilities over the union support with zeros on either side
// replaced by epsilon and both sides renormalized.
struct SmoothedPair {
    std::vector<double> p, q;
};

SmoothedPair smooth_union(const DistributionalProfile& a, const DistributionalProfile& b, double epsilon) {
    SmoothedPair s;
    for_union(a, b, [&](const std::string&, double x, double y) {
        s.p.push_back(x == 0 ? epsilon : x);
        s.q.push_back(y == 0 ? epsilon : y);
    });
    double zp = 0, zq = 0;
    for (std::size_t k = 0; k < s.p.size(); ++k) {
        zp += s.p[k];
        zq += s.q[k];
    }
    for (std::size_t k = 0; k < s.p.size(); ++k) {
        s.p[k] /= zp;
        s.q[k] /= zq;
    }
    return s;
}

}  // namespace

void MeasureConfig::validate() const {
    if (!(log_base > 0) || log_base == 1) throw ConfigError("log base must be positive and != 1");
    if (!(epsilon > 0)) throw ConfigError("epsilon must be > 0");
    if (!(alpha > 0 && alpha <= 1)) throw ConfigError("alpha must lie in (0,1]");
    if (!(gamma >= 0 && gamma <= 1)) throw ConfigError("gamma must lie in [0,1]");
    if (!(beta >= 0 && beta <= 1)) throw ConfigError("beta must lie in [0,1]");
}

std::span<const MeasureInfo> all_measures() { return kMeasures; }

const MeasureInfo& info(MeasureId id) {
    for (const auto& m : kMeasures) {
        if (m.id == id) return m;
    }
    throw ConfigError("unknown measure id");
}

MeasureId parse_measure(std::string_view name) {
    for (const auto& m : kMeasures) {
        if (iequals(m.name, name)) return m.id;
    }
    throw ConfigError("unknown measure '" + std::string(name) + "'");
}

std::string_view to_string(WeightScheme w) {
    switch (w) {
        case WeightScheme::None: return "none";
        case WeightScheme::AvgWt: return "avgwt";
        case WeightScheme::MaxWt: return "maxwt";
    }
    return "none";
}

WeightScheme parse_weight(std::string_view name) {
    for (WeightScheme w : {WeightScheme::None, WeightScheme::AvgWt, WeightScheme::MaxWt}) {
        if (iequals(to_string(w), name)) return w;
    }
    throw ConfigError("unknown weight scheme '" + std::string(name) + "'");
}

CrmKind parse_crm_kind(std::string_view name) {
    if (iequals(name, "type")) return CrmKind::type;
    if (iequals(name, "token")) return CrmKind::token;
    if (iequals(name, "mi")) return CrmKind::mi;
    throw ConfigError("unknown CRM kind '" + std::string(name) + "'");
}

CrmPenalty parse_crm_penalty(std::string_view name) {
    if (iequals(name, "add")) return CrmPenalty::add;
    if (iequals(name, "dw")) return CrmPenalty::dw;
    throw ConfigError("unknown CRM penalty '" + std::string(name) + "'");
}

SoAKind required_soa(MeasureId id, const MeasureConfig& config) {
    if (id == MeasureId::CRM) return config.crm_kind == CrmKind::mi ? SoAKind::PMI : SoAKind::CP;
    return info(id).soa;
}

double cosine(const DistributionalProfile& a, const DistributionalProfile& b) {
    require_compatible(a, b, "Cos");
    if (a.soa() != b.soa()) throw IncompatibleProfilesError("Cos needs profiles with the same SoA");
    double dot = 0, na = 0, nb = 0;
    for_union(a, b, [&](const std::string&, double x, double y) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    });
    if (na == 0 || nb == 0) throw UndefinedError("Cos undefined: zero-norm profile");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double minkowski(const DistributionalProfile& a, const DistributionalProfile& b, int p) {
    if (p != 1 && p != 2) throw ConfigError("minkowski order must be 1 or 2");
    require_cp(a, b, p == 1 ? "L1" : "L2");
    double sum = 0;
    for_union(a, b, [&](const std::string&, double x, double y) {
        double d = std::abs(x - y);
        sum += p == 1 ? d : d * d;
    });
    return p == 1 ? sum : std::sqrt(sum);
}

Score divergence(const DistributionalProfile& a, const DistributionalProfile& b, Divergence variant,
                 const MeasureConfig& config) {
    require_cp(a, b, "divergence");
    const double base = config.log_base;
    double sum = 0;
    switch (variant) {
        case Divergence::KLD:
        case Divergence::KLD_Abs:
        case Divergence::KLD_UnwAbs: {
            SmoothedPair s = smooth_union(a, b, config.epsilon);
            for (std::size_t k = 0; k < s.p.size(); ++k) {
                double l = log_in(s.p[k] / s.q[k], base);
                if (variant == Divergence::KLD) {
                    sum += s.p[k] * l;
                } else if (variant == Divergence::KLD_Abs) {
                    sum += s.p[k] * std::abs(l);
                } else {
                    sum += std::abs(l);
                }
            }
            // Rounding can leave an identical pair at -1e-17.
            return {std::max(0.0, sum)};
        }
        case Divergence::KLD_Com: {
            double za = 0, zb = 0;
            for_intersection(a, b, [&](const std::string&, double x, double y) {
                za += x;
                zb += y;
            });
            if (za == 0) return {0.0, true, "no common features; KLD_Com taken as 0"};
            for_intersection(a, b, [&](const std::string&, double x, double y) {
                double p = x / za, q = y / zb;
                sum += p * log_in(p / q, base);
            });
            return {std::max(0.0, sum)};
        }
        case Divergence::ASD: {
            const double alpha = config.alpha;
            for_union(a, b, [&](const std::string&, double x, double y) {
                if (x == 0) return;
                double mix = alpha * y + (1 - alpha) * x;
                if (mix == 0) throw UndefinedError("ASD undefined: alpha = 1 with a zero on the second profile");
                sum += x * log_in(x / mix, base);
            });
            return {std::max(0.0, sum)};
        }
        case Divergence::JSD:
        case Divergence::JSD_Abs: {
            const bool absolute = variant == Divergence::JSD_Abs;
            auto term = [&](double x, double m) {
                if (x == 0) return 0.0;
                double l = log_in(x / m, base);
                return x * (absolute ? std::abs(l) : l);
            };
            for_union(a, b, [&](const std::string&, double x, double y) {
                double m = 0.5 * (x + y);
                sum += term(x, m) + term(y, m);
            });
            return {std::max(0.0, sum)};
        }
    }
    throw ConfigError("unknown divergence variant");
}

double hindle_contribution(double i1, double i2) {
    if (i1 > 0 && i2 > 0) return std::min(i1, i2);
    if (i1 < 0 && i2 < 0) return std::abs(std::max(i1, i2));
    return 0;
}

double hindle(const DistributionalProfile& a, const DistributionalProfile& b, HindleVariant variant,
              const MeasureConfig& config) {
    require_soa(a, b, SoAKind::PMI, "Hindle");
    if (variant == HindleVariant::syntactic &&
        ((!a.empty() && a.feature_kind() != FeatureKind::relation) ||
         (!b.empty() && b.feature_kind() != FeatureKind::relation))) {
        throw IncompatibleProfilesError("syntactic Hindle needs relation-constrained profiles");
    }
    double sum = 0;
    // A feature missing from one profile has no PMI there and contributes nothing.
    for_intersection(a, b, [&](const std::string& feat, double x, double y) {
        if (variant == HindleVariant::syntactic) {
            auto rel = feat.substr(0, feat.find(':'));
            if (!config.hindle_relations.count(rel)) return;
        }
        sum += hindle_contribution(x, y);
    });
    return sum;
}

double lin(const DistributionalProfile& a, const DistributionalProfile& b) {
    require_soa(a, b, SoAKind::PMI, "Lin");
    double num = 0, den = 0;
    for_union(a, b, [&](const std::string&, double x, double y) {
        if (x > 0) den += x;
        if (y > 0) den += y;
        if (x > 0 && y > 0) num += x + y;
    });
    if (den == 0) throw UndefinedError("Lin undefined: neither profile has a positive-PMI feature");
    return num / den;
}

double overlap(const DistributionalProfile& a, const DistributionalProfile& b, Overlap kind) {
    require_soa(a, b, SoAKind::CP, kind == Overlap::DiceCP ? "Dice^CP" : "Jaccard^CP");
    double mins = 0, sum_a = 0, sum_b = 0, shared_max = 0;
    for_union(a, b, [&](const std::string&, double x, double y) {
        mins += std::min(x, y);
        sum_a += x;
        sum_b += y;
        if (x != 0 && y != 0) shared_max += std::max(x, y);
    });
    if (kind == Overlap::DiceCP) {
        if (sum_a + sum_b == 0) throw UndefinedError("Dice^CP undefined: both profiles empty");
        return 2 * mins / (sum_a + sum_b);
    }
    if (shared_max == 0) throw UndefinedError("Jaccard^CP undefined: no common features");
    return mins / shared_max;
}

double pcm_term(Pcm kind, double p1, double p2, double log_base) {
    switch (kind) {
        case Pcm::Dif: return std::abs(p1 - p2);
        case Pcm::Div: return std::abs(log_in(p1 / p2, log_base));
        case Pcm::PdtAvg: {
            double avg = 0.5 * (p1 + p2);
            return p1 * p2 / (avg * avg);
        }
    }
    throw ConfigError("unknown PCM kind");
}

double pcm(const DistributionalProfile& a, const DistributionalProfile& b, Pcm kind, WeightScheme weight,
           const MeasureConfig& config) {
    require_cp(a, b, "PCM");
    std::vector<double> p, q;
    if (kind == Pcm::Div) {
        SmoothedPair s = smooth_union(a, b, config.epsilon);
        p = std::move(s.p);
        q = std::move(s.q);
    } else {
        for_union(a, b, [&](const std::string&, double x, double y) {
            p.push_back(x);
            q.push_back(y);
        });
    }
    const std::size_t n = p.size();
    double max_total = 0;
    for (std::size_t k = 0; k < n; ++k) max_total += std::max(p[k], q[k]);

    double sum = 0;
    for (std::size_t k = 0; k < n; ++k) {
        double term = pcm_term(kind, p[k], q[k], config.log_base);
        double w = 1;
        switch (weight) {
            case WeightScheme::None:
                // The unweighted product form averages its per-feature ratios so
                // that it stays within [0,1].
                w = kind == Pcm::PdtAvg ? 1.0 / static_cast<double>(n) : 1.0;
                break;
            case WeightScheme::AvgWt: w = 0.5 * (p[k] + q[k]); break;
            case WeightScheme::MaxWt: w = std::max(p[k], q[k]) / max_total; break;
        }
        sum += w * term;
    }
    return sum;
}

PrecisionRecall crm_precision_recall(const DistributionalProfile& a, const DistributionalProfile& b,
                                     CrmKind kind, CrmPenalty penalty) {
    require_compatible(a, b, "CRM");
    if (kind == CrmKind::mi) {
        require_soa(a, b, SoAKind::PMI, "CRM (mi)");
    } else if (kind == CrmKind::token || penalty == CrmPenalty::dw) {
        require_soa(a, b, SoAKind::CP, "CRM (token / difference-weighted)");
    } else if (a.soa() != b.soa()) {
        throw IncompatibleProfilesError("CRM needs profiles with the same SoA");
    }

    // Support sets; the mi kind keeps positive-PMI features only.
    auto in_support = [&](double v) { return kind == CrmKind::mi ? v > 0 : v != 0; };
    double size_a = 0, size_b = 0, mass_a = 0, mass_b = 0;
    double shared = 0, shared_a = 0, shared_b = 0, shared_min = 0, pen_a = 0, pen_b = 0;
    for_union(a, b, [&](const std::string&, double x, double y) {
        bool ia = in_support(x), ib = in_support(y);
        if (ia) {
            ++size_a;
            mass_a += x;
        }
        if (ib) {
            ++size_b;
            mass_b += y;
        }
        if (ia && ib) {
            ++shared;
            shared_a += x;
            shared_b += y;
            double m = std::min(x, y);
            shared_min += m;
            pen_a += m / x;
            pen_b += m / y;
        }
    });
    if (size_a == 0 || size_b == 0) throw UndefinedError("CRM undefined: empty co-occurrence set");

    switch (kind) {
        case CrmKind::type:
            if (penalty == CrmPenalty::add) return {shared / size_a, shared / size_b};
            return {pen_a / size_a, pen_b / size_b};
        case CrmKind::token:
            if (penalty == CrmPenalty::add) return {shared_a, shared_b};
            return {shared_min, shared_min};
        case CrmKind::mi:
            if (penalty == CrmPenalty::add) return {shared_a / mass_a, shared_b / mass_b};
            return {shared_min / mass_a, shared_min / mass_b};
    }
    throw ConfigError("unknown CRM kind");
}

double crm_combine(double precision, double recall, double gamma, double beta) {
    double harmonic = precision + recall == 0 ? 0 : 2 * precision * recall / (precision + recall);
    return gamma * harmonic + (1 - gamma) * (beta * precision + (1 - beta) * recall);
}

Score symmetrize(MeasureId base, SymMode mode, const DistributionalProfile& a, const DistributionalProfile& b,
                 const MeasureConfig& config) {
    Score ab = compute(base, a, b, config);
    Score ba = compute(base, b, a, config);
    Score out;
    out.value = mode == SymMode::Max ? std::max(ab.value, ba.value) : 0.5 * (ab.value + ba.value);
    out.flagged = ab.flagged || ba.flagged;
    out.note = ab.flagged ? ab.note : ba.note;
    return out;
}

Score compute(MeasureId id, const DistributionalProfile& a, const DistributionalProfile& b,
              const MeasureConfig& config) {
    config.validate();
    switch (id) {
        case MeasureId::Cos: return {cosine(a, b)};
        case MeasureId::L1: return {minkowski(a, b, 1)};
        case MeasureId::L2: return {minkowski(a, b, 2)};
        case MeasureId::KLD: return divergence(a, b, Divergence::KLD, config);
        case MeasureId::KLD_Com: return divergence(a, b, Divergence::KLD_Com, config);
        case MeasureId::KLD_Abs: return divergence(a, b, Divergence::KLD_Abs, config);
        case MeasureId::KLD_UnwAbs: return divergence(a, b, Divergence::KLD_UnwAbs, config);
        case MeasureId::KLD_Max: return symmetrize(MeasureId::KLD, SymMode::Max, a, b, config);
        case MeasureId::KLD_Avg: return symmetrize(MeasureId::KLD, SymMode::Avg, a, b, config);
        case MeasureId::ASD: return divergence(a, b, Divergence::ASD, config);
        case MeasureId::JSD: return divergence(a, b, Divergence::JSD, config);
        case MeasureId::JSD_Abs: return divergence(a, b, Divergence::JSD_Abs, config);
        case MeasureId::DiceCP: return {overlap(a, b, Overlap::DiceCP)};
        case MeasureId::JaccardCP: return {overlap(a, b, Overlap::JaccardCP)};
        case MeasureId::Hindle: return {hindle(a, b, HindleVariant::syntactic, config)};
        case MeasureId::HindleRel: return {hindle(a, b, HindleVariant::rel, config)};
        case MeasureId::Lin: return {lin(a, b)};
        case MeasureId::Dif: return {pcm(a, b, Pcm::Dif, config.weight, config)};
        case MeasureId::Div: return {pcm(a, b, Pcm::Div, config.weight, config)};
        case MeasureId::PdtAvg: return {pcm(a, b, Pcm::PdtAvg, WeightScheme::None, config)};
        case MeasureId::PdtAvgWt: return {pcm(a, b, Pcm::PdtAvg, WeightScheme::AvgWt, config)};
        case MeasureId::CRM: {
            auto pr = crm_precision_recall(a, b, config.crm_kind, config.crm_penalty);
            return {crm_combine(pr.precision, pr.recall, config.gamma, config.beta)};
        }
    }
    throw ConfigError("unknown measure id");
}

}  // namespace distsem
