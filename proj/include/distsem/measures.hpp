#pragma once

#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "distsem/profile.hpp"

namespace distsem {

enum class Orientation { distance, closeness };
enum class WeightScheme { None, AvgWt, MaxWt };
enum class CrmKind { type, token, mi };
enum class CrmPenalty { add, dw };

struct MeasureConfig {
    double log_base = 2.0;
    double epsilon = 1e-8;  // replaces zero probabilities where a log ratio needs it
    double alpha = 0.99;    // skew divergence mixing weight, in (0,1]
    double gamma = 0.5;     // CRM weight of the harmonic mean
    double beta = 0.5;      // CRM weight of precision vs recall
    WeightScheme weight = WeightScheme::None;
    CrmKind crm_kind = CrmKind::token;
    CrmPenalty crm_penalty = CrmPenalty::add;
    // Relations whose features count for the syntactic Hindle variant.
    std::set<std::string> hindle_relations = {"obj^-1", "subj^-1"};

    void validate() const;
};

enum class MeasureId {
    Cos, L1, L2,
    KLD, KLD_Com, KLD_Abs, KLD_UnwAbs, KLD_Max, KLD_Avg,
    ASD, JSD, JSD_Abs,
    DiceCP, JaccardCP,
    Hindle, HindleRel, Lin,
    Dif, Div, PdtAvg, PdtAvgWt,
    CRM,
};

// Static properties of each measure: orientation and symmetry, plus the
// strength of association its profiles must carry.
struct MeasureInfo {
    MeasureId id;
    std::string_view name;
    Orientation orientation;
    bool symmetric;
    SoAKind soa;
};

std::span<const MeasureInfo> all_measures();
const MeasureInfo& info(MeasureId id);
MeasureId parse_measure(std::string_view name);
std::string_view to_string(WeightScheme w);
WeightScheme parse_weight(std::string_view name);
CrmKind parse_crm_kind(std::string_view name);
CrmPenalty parse_crm_penalty(std::string_view name);

// The SoA a measure needs once the config is known (CRM depends on crm_kind).
SoAKind required_soa(MeasureId id, const MeasureConfig& config);

// A measure value. `flagged` marks results produced by a documented fallback
// (for example KLD over common features when there are none).
struct Score {
    Score() = default;
    Score(double v, bool f = false, std::string n = {}) : value(v), flagged(f), note(std::move(n)) {}

    double value = 0;
    bool flagged = false;
    std::string note;
};

double cosine(const DistributionalProfile& a, const DistributionalProfile& b);
double minkowski(const DistributionalProfile& a, const DistributionalProfile& b, int p);

enum class Divergence { KLD, KLD_Com, KLD_Abs, KLD_UnwAbs, ASD, JSD, JSD_Abs };
Score divergence(const DistributionalProfile& a, const DistributionalProfile& b, Divergence variant,
                 const MeasureConfig& config = {});

// Per-feature Hindle contribution for PMI values i1 and i2.
double hindle_contribution(double i1, double i2);

enum class HindleVariant { syntactic, rel };
double hindle(const DistributionalProfile& a, const DistributionalProfile& b, HindleVariant variant,
              const MeasureConfig& config = {});

double lin(const DistributionalProfile& a, const DistributionalProfile& b);

enum class Overlap { DiceCP, JaccardCP };
double overlap(const DistributionalProfile& a, const DistributionalProfile& b, Overlap kind);

enum class Pcm { Dif, Div, PdtAvg };
// Unweighted contribution of one feature with probabilities p1 and p2.
double pcm_term(Pcm kind, double p1, double p2, double log_base = 2.0);
double pcm(const DistributionalProfile& a, const DistributionalProfile& b, Pcm kind, WeightScheme weight,
           const MeasureConfig& config = {});

struct PrecisionRecall {
    double precision;
    double recall;
};
PrecisionRecall crm_precision_recall(const DistributionalProfile& a, const DistributionalProfile& b,
                                     CrmKind kind, CrmPenalty penalty);
double crm_combine(double precision, double recall, double gamma, double beta);

enum class SymMode { Max, Avg };
Score symmetrize(MeasureId base, SymMode mode, const DistributionalProfile& a, const DistributionalProfile& b,
                 const MeasureConfig& config = {});

// Dispatches on the measure id.
Score compute(MeasureId id, const DistributionalProfile& a, const DistributionalProfile& b,
              const MeasureConfig& config = {});

}  // namespace distsem
