#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "distsem/assoc.hpp"
#include "distsem/corpus.hpp"
#include "distsem/measures.hpp"
#include "distsem/profile.hpp"

namespace distsem {

struct Category {
    std::string id;
    std::string label;
    std::vector<std::string> words;
};

// Coarse sense inventory: thesaurus categories and the words listed under them.
class Thesaurus {
public:
    Thesaurus() = default;
    explicit Thesaurus(std::vector<Category> categories);

    std::size_t size() const { return categories_.size(); }
    bool empty() const { return categories_.empty(); }
    // Sorted by id.
    const std::vector<Category>& categories() const { return categories_; }
    const Category* find(std::string_view id) const;
    // Category ids listing `word`, sorted; empty if the word is not in the thesaurus.
    std::span<const std::string> senses(std::string_view word) const;
    const std::map<std::string, std::vector<std::string>, std::less<>>& index() const { return index_; }

    // `category_id<TAB>label<TAB>word1 word2 ...` per line.
    static Thesaurus load(std::istream& in);

private:
    std::vector<Category> categories_;
    std::map<std::string, std::vector<std::string>, std::less<>> index_;
};

struct BilingualLexicon {
    std::map<std::string, std::set<std::string>, std::less<>> translations;

    bool empty() const { return translations.empty(); }
    // `source_word<TAB>target_word` per line; repeated sources accumulate.
    static BilingualLexicon load(std::istream& in);
    // Every word of the thesaurus translating to itself.
    static BilingualLexicon identity(const Thesaurus& thesaurus);
};

// Target-language categories reachable from a source word through its translations.
std::set<std::string> candidate_senses(std::string_view word, const BilingualLexicon& lexicon,
                                       const Thesaurus& thesaurus);

// Word -> candidate categories, either straight from a thesaurus or through a
// bilingual lexicon. The category universe is always the thesaurus's.
class SenseInventory {
public:
    static SenseInventory monolingual(const Thesaurus& thesaurus);
    static SenseInventory crosslingual(const BilingualLexicon& lexicon, const Thesaurus& thesaurus);

    bool crosslingual() const { return crosslingual_; }
    const std::vector<std::string>& categories() const { return categories_; }
    // Indices into categories(), ascending.
    std::span<const std::uint32_t> senses(std::string_view word) const;

private:
    bool crosslingual_ = false;
    std::vector<std::string> categories_;
    std::map<std::string, std::vector<std::uint32_t>, std::less<>> senses_;
};

enum class WccmKind { base, bootstrapped };
enum class LanguageMode { monolingual, crosslingual };

// Sparse word x category co-occurrence matrix. Words and categories are kept
// sorted; every thesaurus category has a column even when it is empty.
class Wccm {
public:
    struct Cell {
        std::uint32_t index;  // category index in a row, word index in a column
        double value;
    };

    Wccm() = default;
    // Duplicate (word, category) cells are summed; zero cells dropped.
    static Wccm from_cells(WccmKind kind, LanguageMode mode, std::vector<std::string> categories,
                           std::vector<std::tuple<std::string, std::string, double>> cells,
                           std::string fingerprint);

    WccmKind kind() const { return kind_; }
    LanguageMode language_mode() const { return mode_; }
    const std::string& fingerprint() const { return fingerprint_; }
    const std::vector<std::string>& words() const { return words_; }
    const std::vector<std::string>& categories() const { return categories_; }

    std::optional<std::uint32_t> find_word(std::string_view word) const;
    std::optional<std::uint32_t> find_category(std::string_view id) const;

    std::span<const Cell> row(std::uint32_t word) const;
    std::span<const Cell> column(std::uint32_t category) const;
    double cell(std::uint32_t word, std::uint32_t category) const;
    double cell(std::string_view word, std::string_view category) const;
    double row_total(std::uint32_t word) const { return row_totals_[word]; }
    double column_total(std::uint32_t category) const { return column_totals_[category]; }
    double grand_total() const { return grand_total_; }
    std::size_t stored_cells() const { return row_cells_.size(); }

    friend bool operator==(const Wccm& a, const Wccm& b);

private:
    WccmKind kind_ = WccmKind::base;
    LanguageMode mode_ = LanguageMode::monolingual;
    std::string fingerprint_;
    std::vector<std::string> words_;
    std::vector<std::string> categories_;
    std::vector<std::size_t> row_offsets_{0};
    std::vector<Cell> row_cells_;
    std::vector<std::size_t> column_offsets_{0};
    std::vector<Cell> column_cells_;
    std::vector<double> row_totals_;
    std::vector<double> column_totals_;
    double grand_total_ = 0;
};

std::string_view to_string(WccmKind kind);
std::string_view to_string(LanguageMode mode);

// cell(w, c) = sum of pair_counts[w, w'] over every w' listed under c.
Wccm build_base_wccm(const CooccurrenceCounts& counts, const Thesaurus& thesaurus);

// cell(w, c) = sum of pair_counts[w, w'] over every source word w' having c as
// a cross-lingual candidate sense.
Wccm build_crosslingual_wccm(const CooccurrenceCounts& counts, const BilingualLexicon& lexicon,
                             const Thesaurus& thesaurus);

// Same construction over an arbitrary sense inventory.
Wccm build_wccm(const CooccurrenceCounts& counts, const SenseInventory& senses);

// Table for (word, category) with the word as the row.
ContingencyTable wccm_contingency(const Wccm& wccm, std::string_view word, std::string_view category);

struct BootstrapConfig {
    int iterations = 1;
    double log_base = 2.0;
};

// Second corpus pass. Each occurrence of an inventory word is assigned the
// candidate category with the largest summed positive PMI (from the previous
// matrix) against its window neighbours, ties to the smallest category id;
// every neighbour then increments exactly one cell for that category.
// `tokens` must be the stream the base counts were built from.
Wccm bootstrap_wccm(std::span<const std::string> tokens, const Wccm& base, const SenseInventory& senses,
                    const CorpusConfig& corpus, const BootstrapConfig& config = {});

// Convenience overloads over whole documents.
Wccm bootstrap_wccm_documents(std::span<const std::string> documents, const Wccm& base,
                              const SenseInventory& senses, const CorpusConfig& corpus,
                              const BootstrapConfig& config = {});

// Profile of a category over the words it co-occurs with; CP is P(word | category).
DistributionalProfile concept_profile(const Wccm& wccm, std::string_view category, SoAKind kind,
                                      double log_base = 2.0);

Score concept_distance(const Wccm& wccm, std::string_view c1, std::string_view c2, MeasureId measure,
                       const MeasureConfig& config = {});

// Dense category x category matrix; NaN where the measure is undefined.
struct ConceptMatrix {
    std::vector<std::string> categories;
    std::vector<double> values;  // row-major, categories.size()^2

    double at(std::size_t i, std::size_t j) const { return values[i * categories.size() + j]; }
};

ConceptMatrix concept_distance_matrix(const Wccm& wccm, MeasureId measure, const MeasureConfig& config = {});

void save_wccm(const Wccm& wccm, std::ostream& out);
Wccm load_wccm(std::istream& in);

}  // namespace distsem
