#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "distsem/assoc.hpp"
#include "distsem/corpus.hpp"

namespace distsem {

enum class FeatureKind { word, relation };

// A relation-free feature is a bare word; a relation-constrained one is
// (relation, word), rendered `relation:word`.
struct Feature {
    std::string relation;  // empty for relation-free features
    std::string word;

    FeatureKind kind() const { return relation.empty() ? FeatureKind::word : FeatureKind::relation; }
    std::string render() const { return relation.empty() ? word : relation + ":" + word; }
    static Feature parse(std::string_view rendered);
};

struct ProfileEntry {
    std::string feature;  // rendered Feature
    double value;
};

// Sparse map from features to strength-of-association values for one target.
// Entries are kept sorted by feature and never hold explicit zeros.
class DistributionalProfile {
public:
    DistributionalProfile() = default;
    // Validates: no duplicate features, no zero values, one feature kind, and
    // for CP every value in [0,1] with a total of 1 +- 1e-9.
    DistributionalProfile(std::string target, SoAKind soa, std::vector<ProfileEntry> entries);

    const std::string& target() const { return target_; }
    SoAKind soa() const { return soa_; }
    FeatureKind feature_kind() const { return feature_kind_; }
    std::span<const ProfileEntry> entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    std::optional<double> find(std::string_view feature) const;

    friend bool operator==(const DistributionalProfile& a, const DistributionalProfile& b);

private:
    std::string target_;
    SoAKind soa_ = SoAKind::CP;
    FeatureKind feature_kind_ = FeatureKind::word;
    std::vector<ProfileEntry> entries_;
};

struct ProfileConfig {
    // Features whose word occurs fewer times than this are dropped.
    int min_feature_frequency = 1;
    double log_base = 2.0;
};

// One entry per co-occurring feature. CP values are renormalized over the
// features that survive the frequency cut so they still sum to one.
DistributionalProfile build_profile(const CooccurrenceCounts& counts, std::string_view target, SoAKind kind,
                                    const ProfileConfig& config = {});

void save_profile(const DistributionalProfile& profile, std::ostream& out);
DistributionalProfile load_profile(std::istream& in);

}  // namespace distsem
