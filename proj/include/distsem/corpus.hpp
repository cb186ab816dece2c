#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace distsem {

enum class Boundary { document, sentence, none };

struct CorpusConfig {
    int window_radius = 5;
    bool lowercase = true;
    Boundary respect_boundaries = Boundary::document;
    int min_token_frequency = 1;

    void validate() const;
    // Canonical text form, mixed into corpus fingerprints.
    std::string describe() const;
};

std::string_view to_string(Boundary b);
Boundary parse_boundary(std::string_view name);

// Emitted between documents and (in sentence mode) between sentences. It can
// never collide with a real token, which is always a run of letters/digits.
inline constexpr std::string_view kBoundaryMarker = "<b>";

// Streams the tokens of one document. `on_sentence_end` fires after each
// sentence terminator when the config asks for sentence boundaries.
void scan_tokens(std::string_view text, const CorpusConfig& config,
                 const std::function<void(std::string_view)>& on_token,
                 const std::function<void()>& on_sentence_end);

// One document; boundary markers only appear between sentences.
std::vector<std::string> tokenize(std::string_view text, const CorpusConfig& config);

// Several documents, with a marker between consecutive documents unless the
// boundary policy is `none`.
std::vector<std::string> tokenize_documents(std::span<const std::string> documents,
                                            const CorpusConfig& config);

// Order-sensitive digest that can be combined across contiguous shards:
// digest(a + b) == digest(a).append(digest(b)).
class StreamDigest {
public:
    void update(std::string_view bytes);
    void append(const StreamDigest& next);
    std::string hex() const;

private:
    std::uint64_t h1_ = 0, h2_ = 0;
    std::uint64_t p1_ = 1, p2_ = 1;
};

using WordId = std::uint32_t;

// Immutable sparse target x feature counts stored row-wise (CSR). Names are kept
// sorted, so ids follow lexicographic order and every row is sorted by feature
// name. For window counts the feature set is the word set; for triple counts
// features are rendered `relation:word`.
class CooccurrenceCounts {
public:
    struct Cell {
        WordId feature;
        std::uint64_t count;
    };

    CooccurrenceCounts() = default;

    const std::vector<std::string>& targets() const { return targets_; }
    const std::vector<std::string>& features() const { return features_; }
    bool relation_features() const { return relation_features_; }

    std::optional<WordId> find_target(std::string_view name) const;
    std::optional<WordId> find_feature(std::string_view name) const;

    std::span<const Cell> row(WordId target) const;
    std::uint64_t pair_count(WordId target, WordId feature) const;
    std::uint64_t pair_count(std::string_view target, std::string_view feature) const;

    std::uint64_t target_total(WordId target) const { return target_totals_[target]; }
    std::uint64_t feature_total(WordId feature) const { return feature_totals_[feature]; }
    // Frequency of a word as a token (window counts) or as a triple argument.
    std::uint64_t unigram_count(std::string_view word) const;
    const std::vector<std::pair<std::string, std::uint64_t>>& unigrams() const { return unigrams_; }

    std::uint64_t total_pairs() const { return total_pairs_; }
    std::uint64_t total_tokens() const { return total_tokens_; }
    std::size_t stored_cells() const { return cells_.size(); }

    const std::string& fingerprint() const { return fingerprint_; }
    void set_fingerprint(std::string fp) { fingerprint_ = std::move(fp); }

    // Calls f(target, feature, count) in (target, feature) order.
    void for_each(const std::function<void(std::string_view, std::string_view, std::uint64_t)>& f) const;

    friend bool operator==(const CooccurrenceCounts& a, const CooccurrenceCounts& b);

    // Assembles counts from unordered string-keyed cells.
    struct Builder {
        std::vector<std::tuple<std::string, std::string, std::uint64_t>> cells;
        std::vector<std::pair<std::string, std::uint64_t>> unigrams;
        std::uint64_t total_tokens = 0;
        bool relation_features = false;
        std::string fingerprint;

        CooccurrenceCounts build() &&;
    };

private:
    friend class CooccurrenceCounter;

    std::vector<std::string> targets_;
    std::vector<std::string> features_;
    std::vector<std::uint64_t> row_offsets_{0};
    std::vector<Cell> cells_;
    std::vector<std::uint64_t> target_totals_;
    std::vector<std::uint64_t> feature_totals_;
    std::vector<std::pair<std::string, std::uint64_t>> unigrams_;  // sorted by word
    std::uint64_t total_pairs_ = 0;
    std::uint64_t total_tokens_ = 0;
    bool relation_features_ = false;
    std::string fingerprint_;
};

// Streaming window counter. Keeps only the last `window_radius` token ids, so
// memory grows with the observed vocabulary and pair set, never with corpus length.
class CooccurrenceCounter {
public:
    explicit CooccurrenceCounter(CorpusConfig config);
    ~CooccurrenceCounter();
    CooccurrenceCounter(CooccurrenceCounter&&) noexcept;
    CooccurrenceCounter& operator=(CooccurrenceCounter&&) noexcept;

    void add_token(std::string_view token);
    void add_boundary();
    // Tokenizes and counts one document, then closes it with a boundary.
    void add_document(std::string_view text);

    // Folds another shard in; the other shard is taken to follow this one.
    void merge(CooccurrenceCounter&& next);

    const StreamDigest& digest() const;
    CooccurrenceCounts finish() &&;

private:
    struct State;
    CorpusConfig config_;
    std::unique_ptr<State> state_;
};

// Counts a token sequence as produced by tokenize / tokenize_documents.
CooccurrenceCounts count_cooccurrences(std::span<const std::string> tokens,
                                       const CorpusConfig& config);

// Counts whole documents, splitting them into `threads` contiguous shards.
CooccurrenceCounts count_documents(std::span<const std::string> documents,
                                   const CorpusConfig& config, unsigned threads = 1);

// Fingerprint of the token stream of `documents`, identical to what
// count_documents and count_cooccurrences(tokenize_documents(...)) record.
std::string corpus_fingerprint(std::span<const std::string> tokens, const CorpusConfig& config);

// Cellwise sum; used for additive shard reduction.
CooccurrenceCounts merge_counts(const CooccurrenceCounts& a, const CooccurrenceCounts& b);

struct DependencyTriple {
    std::string head;
    std::string relation;
    std::string dependent;
};

std::string inverse_relation(std::string_view relation);

// Reads `head<TAB>relation<TAB>dependent` lines. The closed relation set comes
// from a `#relations<TAB>r1<TAB>r2...` header or, failing that, `declared`.
CooccurrenceCounts ingest_triples(std::istream& in,
                                  const std::optional<std::set<std::string>>& declared = std::nullopt);

void save_counts(const CooccurrenceCounts& counts, std::ostream& out);
CooccurrenceCounts load_counts(std::istream& in);

}  // namespace distsem
