#include "distsem/profile.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "distsem/error.hpp"
#include "distsem/text_io.hpp"

namespace distsem {

Feature Feature::parse(std::string_view rendered) {
    auto colon = rendered.find(':');
    if (colon == std::string_view::npos) return {"", std::string(rendered)};
    return {std::string(rendered.substr(0, colon)), std::string(rendered.substr(colon + 1))};
}

DistributionalProfile::DistributionalProfile(std::string target, SoAKind soa, std::vector<ProfileEntry> entries)
    : target_(std::move(target)), soa_(soa), entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const ProfileEntry& a, const ProfileEntry& b) { return a.feature < b.feature; });
    double sum = 0;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.feature.empty()) throw ValidationError("profile '" + target_ + "': empty feature");
        if (i > 0 && entries_[i - 1].feature == e.feature) {
            throw ValidationError("profile '" + target_ + "': duplicate feature '" + e.feature + "'");
        }
        if (e.value == 0 || !std::isfinite(e.value)) {
            throw ValidationError("profile '" + target_ + "': zero or non-finite value for '" + e.feature + "'");
        }
        FeatureKind k = e.feature.find(':') == std::string::npos ? FeatureKind::word : FeatureKind::relation;
        if (i == 0) {
            feature_kind_ = k;
        } else if (k != feature_kind_) {
            throw ValidationError("profile '" + target_ + "' mixes relation-free and relation-constrained features");
        }
        if (soa_ == SoAKind::CP && (e.value < 0 || e.value > 1)) {
            throw ValidationError("profile '" + target_ + "': CP value outside [0,1]");
        }
        sum += e.value;
    }
    if (soa_ == SoAKind::CP && !entries_.empty() && std::abs(sum - 1.0) > 1e-9) {
        throw ValidationError("profile '" + target_ + "': CP values sum to " + io::format_real(sum));
    }
}

std::optional<double> DistributionalProfile::find(std::string_view feature) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), feature,
                               [](const ProfileEntry& e, std::string_view f) { return e.feature < f; });
    if (it == entries_.end() || it->feature != feature) return std::nullopt;
    return it->value;
}

bool operator==(const DistributionalProfile& a, const DistributionalProfile& b) {
    if (a.target_ != b.target_ || a.soa_ != b.soa_ || a.entries_.size() != b.entries_.size()) return false;
    for (std::size_t i = 0; i < a.entries_.size(); ++i) {
        if (a.entries_[i].feature != b.entries_[i].feature || a.entries_[i].value != b.entries_[i].value) {
            return false;
        }
    }
    return true;
}

DistributionalProfile build_profile(const CooccurrenceCounts& counts, std::string_view target, SoAKind kind,
                                    const ProfileConfig& config) {
    auto t = counts.find_target(target);
    if (!t) throw MissingRowError("no counts for target '" + std::string(target) + "'");

    std::vector<CooccurrenceCounts::Cell> kept;
    for (const auto& cell : counts.row(*t)) {
        const std::string& name = counts.features()[cell.feature];
        std::string_view word = name;
        if (counts.relation_features()) word = word.substr(word.find(':') + 1);
        if (counts.unigram_count(word) < static_cast<std::uint64_t>(config.min_feature_frequency)) continue;
        kept.push_back(cell);
    }

    std::vector<ProfileEntry> entries;
    entries.reserve(kept.size());
    if (kind == SoAKind::CP) {
        double row = 0;
        for (const auto& c : kept) row += static_cast<double>(c.count);
        if (row == 0) throw EmptyProfileError("zero co-occurrence row for '" + std::string(target) + "'");
        for (const auto& c : kept) {
            entries.push_back({counts.features()[c.feature], static_cast<double>(c.count) / row});
        }
    } else {
        for (const auto& c : kept) {
            double v = strength(contingency(counts, *t, c.feature), kind, config.log_base);
            if (v != 0) entries.push_back({counts.features()[c.feature], v});
        }
    }
    if (entries.empty()) throw EmptyProfileError("empty profile for '" + std::string(target) + "'");
    return DistributionalProfile(std::string(target), kind, std::move(entries));
}

void save_profile(const DistributionalProfile& profile, std::ostream& out) {
    out << "#" << profile.target() << '\t' << to_string(profile.soa()) << '\n';
    for (const auto& e : profile.entries()) out << e.feature << '\t' << io::format_real(e.value) << '\n';
}

DistributionalProfile load_profile(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    std::optional<std::pair<std::string, SoAKind>> header;
    std::vector<ProfileEntry> entries;
    while (io::next_line(in, line)) {
        ++lineno;
        if (line.empty() || io::is_manifest_line(line)) continue;
        auto fields = io::split(line, '\t');
        if (!header) {
            if (line[0] != '#' || fields.size() != 2) throw ParseError(lineno, "expected #target<TAB>soa_kind header");
            try {
                header.emplace(std::string(fields[0].substr(1)), parse_soa(fields[1]));
            } catch (const ConfigError& e) {
                throw ParseError(lineno, e.what());
            }
            continue;
        }
        if (fields.size() != 2 || fields[0].empty()) throw ParseError(lineno, "expected feature<TAB>value");
        entries.push_back({std::string(fields[0]), io::parse_real(fields[1], lineno)});
    }
    if (!header) throw ParseError(lineno + 1, "missing profile header");
    if (entries.empty()) throw EmptyProfileError("profile file for '" + header->first + "' has no entries");
    return DistributionalProfile(header->first, header->second, std::move(entries));
}

}  // namespace distsem
