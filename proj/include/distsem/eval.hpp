#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "distsem/concept.hpp"
#include "distsem/corpus.hpp"
#include "distsem/measures.hpp"
#include "distsem/profile.hpp"

namespace distsem {

struct BenchmarkPair {
    std::string word1;
    std::string word2;
    double score;  // human judgment, higher = closer
};

struct BenchmarkSet {
    std::string name;
    std::vector<BenchmarkPair> pairs;
    double scale_min = 0;
    double scale_max = 0;
};

// CSV with header `word1,word2,score,scale_min,scale_max`. Rows give all five
// fields or just the first three, which then inherit the last declared scale.
BenchmarkSet load_benchmark(std::istream& in, std::string name = {});

struct WordChoiceProblem {
    std::string target;
    std::vector<std::string> alternatives;
    std::size_t answer_index;  // 0-based
};

// `target<TAB>alt1|alt2|...<TAB>answer_index` per line.
std::vector<WordChoiceProblem> load_word_choice(std::istream& in);

// Scores a word pair; nullopt when either word has no usable profile or the
// measure is undefined for the pair.
using PairScorer = std::function<std::optional<Score>(std::string_view, std::string_view)>;

// Word-level scorer over (sense-conflated) profiles built on demand from counts.
class ProfileScorer {
public:
    ProfileScorer(const CooccurrenceCounts& counts, MeasureId measure, MeasureConfig measure_config = {},
                  ProfileConfig profile_config = {});

    std::optional<Score> operator()(std::string_view w1, std::string_view w2);
    Orientation orientation() const { return info(measure_).orientation; }
    // Words that had no profile (missing row or empty after filtering).
    const std::vector<std::string>& missing() const { return missing_; }

private:
    const DistributionalProfile* profile(std::string_view word);

    const CooccurrenceCounts& counts_;
    MeasureId measure_;
    MeasureConfig measure_config_;
    ProfileConfig profile_config_;
    SoAKind soa_;
    std::map<std::string, std::optional<DistributionalProfile>, std::less<>> cache_;
    std::vector<std::string> missing_;
};

// Concept-level scorer: each word maps to all its candidate categories and the
// closest cross-category value is taken.
class ConceptScorer {
public:
    ConceptScorer(const Wccm& wccm, const SenseInventory& senses, MeasureId measure,
                  MeasureConfig measure_config = {});

    std::optional<Score> operator()(std::string_view w1, std::string_view w2);
    Orientation orientation() const { return info(measure_).orientation; }

private:
    const DistributionalProfile* profile(std::uint32_t category);

    const Wccm& wccm_;
    const SenseInventory& senses_;
    MeasureId measure_;
    MeasureConfig measure_config_;
    SoAKind soa_;
    std::map<std::uint32_t, std::optional<DistributionalProfile>> cache_;
};

struct RankedPair {
    std::size_t index;  // position in the benchmark
    std::string word1;
    std::string word2;
    double human;
    double score;
    bool flagged;
};

struct RankResult {
    std::vector<RankedPair> ranked;    // closest first
    std::vector<std::size_t> skipped;  // benchmark indices without a score
};

// Closeness measures descending, distance measures ascending; ties keep input order.
// More than half the pairs skipped is a coverage error.
RankResult rank_pairs(const BenchmarkSet& benchmark, const PairScorer& scorer, Orientation orientation);

double pearson(std::span<const double> xs, std::span<const double> ys);
// Average ranks for ties.
double spearman(std::span<const double> xs, std::span<const double> ys);
std::vector<double> average_ranks(std::span<const double> xs);

struct CorrelationReport {
    std::size_t pairs = 0;
    std::size_t skipped = 0;
    double pearson = 0;
    double spearman = 0;
    // Sign-adjusted so that positive always means agreement with human closeness.
    double oriented_pearson = 0;
    double oriented_spearman = 0;
};

CorrelationReport correlate(const RankResult& ranked, Orientation orientation);

struct WordChoiceOutcome {
    std::optional<std::size_t> chosen;
    bool correct = false;
    bool flagged = false;  // tie or no scorable alternative
};

struct WordChoiceResult {
    double accuracy = 0;
    std::size_t correct = 0;
    std::size_t flagged = 0;
    std::vector<WordChoiceOutcome> outcomes;
};

// Unscorable alternatives count as most distant; ties go to the first alternative.
WordChoiceResult solve_word_choice(std::span<const WordChoiceProblem> problems, const PairScorer& scorer,
                                   Orientation orientation);

}  // namespace distsem
