#include "distsem/concept.hpp"

#include <absl/container/flat_hash_map.h>

#include "string_hash.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "distsem/error.hpp"
#include "distsem/text_io.hpp"

namespace distsem {

namespace {

template <typename Vec>
std::optional<std::uint32_t> find_sorted(const Vec& names, std::string_view name) {
    auto it = std::lower_bound(names.begin(), names.end(), name,
                               [](const std::string& a, std::string_view b) { return a < b; });
    if (it == names.end() || *it != name) return std::nullopt;
    return static_cast<std::uint32_t>(it - names.begin());
}

}  // namespace

// ---------------------------------------------------------------------------
// Thesaurus and lexicon

Thesaurus::Thesaurus(std::vector<Category> categories) : categories_(std::move(categories)) {
    std::sort(categories_.begin(), categories_.end(),
              [](const Category& a, const Category& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < categories_.size(); ++i) {
        auto& c = categories_[i];
        if (c.id.empty()) throw ValidationError("thesaurus category with empty id");
        if (i > 0 && categories_[i - 1].id == c.id) throw ValidationError("duplicate category id '" + c.id + "'");
        std::sort(c.words.begin(), c.words.end());
        c.words.erase(std::unique(c.words.begin(), c.words.end()), c.words.end());
        if (c.words.empty()) throw ValidationError("category '" + c.id + "' lists no words");
        for (const auto& w : c.words) index_[w].push_back(c.id);
    }
    // Categories are visited in id order, so each sense list is already sorted.
}

const Category* Thesaurus::find(std::string_view id) const {
    auto it = std::lower_bound(categories_.begin(), categories_.end(), id,
                               [](const Category& c, std::string_view v) { return c.id < v; });
    return (it != categories_.end() && it->id == id) ? &*it : nullptr;
}

std::span<const std::string> Thesaurus::senses(std::string_view word) const {
    auto it = index_.find(word);
    if (it == index_.end()) return {};
    return it->second;
}

Thesaurus Thesaurus::load(std::istream& in) {
    std::vector<Category> cats;
    std::string line;
    std::size_t lineno = 0;
    while (io::next_line(in, line)) {
        ++lineno;
        if (line.empty() || io::is_manifest_line(line)) continue;
        auto fields = io::split(line, '\t');
        if (fields.size() != 3 || fields[0].empty()) {
            throw ParseError(lineno, "expected category_id<TAB>label<TAB>words");
        }
        Category c{std::string(fields[0]), std::string(fields[1]), {}};
        for (auto w : io::split(fields[2], ' ')) {
            if (!w.empty()) c.words.emplace_back(w);
        }
        if (c.words.empty()) throw ParseError(lineno, "category '" + c.id + "' lists no words");
        cats.push_back(std::move(c));
    }
    try {
        return Thesaurus(std::move(cats));
    } catch (const ValidationError& e) {
        throw ParseError(lineno, e.what());
    }
}

BilingualLexicon BilingualLexicon::load(std::istream& in) {
    BilingualLexicon lex;
    std::string line;
    std::size_t lineno = 0;
    while (io::next_line(in, line)) {
        ++lineno;
        if (line.empty() || io::is_manifest_line(line)) continue;
        auto fields = io::split(line, '\t');
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
            throw ParseError(lineno, "expected source_word<TAB>target_word");
        }
        lex.translations[std::string(fields[0])].emplace(fields[1]);
    }
    return lex;
}

BilingualLexicon BilingualLexicon::identity(const Thesaurus& thesaurus) {
    BilingualLexicon lex;
    for (const auto& [word, cats] : thesaurus.index()) lex.translations[word].insert(word);
    return lex;
}

std::set<std::string> candidate_senses(std::string_view word, const BilingualLexicon& lexicon,
                                       const Thesaurus& thesaurus) {
    auto it = lexicon.translations.find(word);
    if (it == lexicon.translations.end()) {
        throw OutOfVocabularyError("'" + std::string(word) + "' is not in the bilingual lexicon");
    }
    std::set<std::string> out;
    for (const auto& t : it->second) {
        for (const auto& c : thesaurus.senses(t)) out.insert(c);
    }
    return out;
}

SenseInventory SenseInventory::monolingual(const Thesaurus& thesaurus) {
    SenseInventory inv;
    for (const auto& c : thesaurus.categories()) inv.categories_.push_back(c.id);
    for (const auto& [word, cats] : thesaurus.index()) {
        auto& v = inv.senses_[word];
        for (const auto& c : cats) v.push_back(*find_sorted(inv.categories_, c));
    }
    return inv;
}

SenseInventory SenseInventory::crosslingual(const BilingualLexicon& lexicon, const Thesaurus& thesaurus) {
    SenseInventory inv;
    inv.crosslingual_ = true;
    for (const auto& c : thesaurus.categories()) inv.categories_.push_back(c.id);
    for (const auto& [word, translations] : lexicon.translations) {
        auto cands = candidate_senses(word, lexicon, thesaurus);
        if (cands.empty()) continue;
        auto& v = inv.senses_[word];
        for (const auto& c : cands) v.push_back(*find_sorted(inv.categories_, c));
    }
    return inv;
}

std::span<const std::uint32_t> SenseInventory::senses(std::string_view word) const {
    auto it = senses_.find(word);
    if (it == senses_.end()) return {};
    return it->second;
}

// ---------------------------------------------------------------------------
// Wccm

std::string_view to_string(WccmKind kind) { return kind == WccmKind::base ? "base" : "bootstrapped"; }

std::string_view to_string(LanguageMode mode) {
    return mode == LanguageMode::monolingual ? "monolingual" : "crosslingual";
}

Wccm Wccm::from_cells(WccmKind kind, LanguageMode mode, std::vector<std::string> categories,
                      std::vector<std::tuple<std::string, std::string, double>> cells, std::string fingerprint) {
    Wccm m;
    m.kind_ = kind;
    m.mode_ = mode;
    m.fingerprint_ = std::move(fingerprint);
    std::sort(categories.begin(), categories.end());
    categories.erase(std::unique(categories.begin(), categories.end()), categories.end());
    m.categories_ = std::move(categories);

    std::sort(cells.begin(), cells.end());
    std::vector<std::tuple<std::string, std::uint32_t, double>> merged;
    for (auto& [w, c, v] : cells) {
        if (v < 0 || !std::isfinite(v)) throw ValidationError("WCCM cell must be a nonnegative number");
        auto ci = find_sorted(m.categories_, c);
        if (!ci) throw ValidationError("WCCM cell refers to unknown category '" + c + "'");
        if (v == 0) continue;
        if (!merged.empty() && std::get<0>(merged.back()) == w && std::get<1>(merged.back()) == *ci) {
            std::get<2>(merged.back()) += v;
        } else {
            merged.emplace_back(std::move(w), *ci, v);
        }
    }

    for (const auto& [w, c, v] : merged) {
        if (m.words_.empty() || m.words_.back() != w) m.words_.push_back(w);
    }
    const std::size_t nw = m.words_.size(), nc = m.categories_.size();
    m.row_totals_.assign(nw, 0);
    m.column_totals_.assign(nc, 0);
    m.row_offsets_.assign(nw + 1, 0);
    m.column_offsets_.assign(nc + 1, 0);
    m.row_cells_.reserve(merged.size());
    std::uint32_t wi = 0;
    for (const auto& [w, c, v] : merged) {
        while (m.words_[wi] != w) ++wi;
        m.row_cells_.push_back({c, v});
        ++m.row_offsets_[wi + 1];
        ++m.column_offsets_[c + 1];
        m.row_totals_[wi] += v;
        m.column_totals_[c] += v;
        m.grand_total_ += v;
    }
    for (std::size_t k = 0; k < nw; ++k) m.row_offsets_[k + 1] += m.row_offsets_[k];
    for (std::size_t k = 0; k < nc; ++k) m.column_offsets_[k + 1] += m.column_offsets_[k];
    m.column_cells_.resize(merged.size());
    std::vector<std::size_t> fill(m.column_offsets_.begin(), m.column_offsets_.end() - 1);
    for (std::uint32_t w = 0; w < nw; ++w) {
        for (const auto& cell : m.row(w)) m.column_cells_[fill[cell.index]++] = {w, cell.value};
    }
    return m;
}

std::optional<std::uint32_t> Wccm::find_word(std::string_view word) const { return find_sorted(words_, word); }

std::optional<std::uint32_t> Wccm::find_category(std::string_view id) const {
    return find_sorted(categories_, id);
}

std::span<const Wccm::Cell> Wccm::row(std::uint32_t word) const {
    return {row_cells_.data() + row_offsets_[word], row_cells_.data() + row_offsets_[word + 1]};
}

std::span<const Wccm::Cell> Wccm::column(std::uint32_t category) const {
    return {column_cells_.data() + column_offsets_[category], column_cells_.data() + column_offsets_[category + 1]};
}

double Wccm::cell(std::uint32_t word, std::uint32_t category) const {
    auto r = row(word);
    auto it = std::lower_bound(r.begin(), r.end(), category,
                               [](const Cell& c, std::uint32_t k) { return c.index < k; });
    return (it != r.end() && it->index == category) ? it->value : 0.0;
}

double Wccm::cell(std::string_view word, std::string_view category) const {
    auto w = find_word(word);
    auto c = find_category(category);
    return (w && c) ? cell(*w, *c) : 0.0;
}

bool operator==(const Wccm& a, const Wccm& b) {
    if (a.kind_ != b.kind_ || a.mode_ != b.mode_ || a.words_ != b.words_ || a.categories_ != b.categories_ ||
        a.row_offsets_ != b.row_offsets_) {
        return false;
    }
    for (std::size_t i = 0; i < a.row_cells_.size(); ++i) {
        if (a.row_cells_[i].index != b.row_cells_[i].index || a.row_cells_[i].value != b.row_cells_[i].value) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Construction

Wccm build_wccm(const CooccurrenceCounts& counts, const SenseInventory& senses) {
    if (senses.categories().empty()) throw ConfigError("empty thesaurus: no categories to build a WCCM over");
    if (counts.relation_features()) {
        throw ConfigError("WCCM construction needs window (relation-free) counts");
    }
    // Senses of each feature word, resolved once.
    std::vector<std::span<const std::uint32_t>> feature_senses(counts.features().size());
    for (std::size_t f = 0; f < counts.features().size(); ++f) {
        feature_senses[f] = senses.senses(counts.features()[f]);
    }
    std::vector<std::tuple<std::string, std::string, double>> cells;
    std::vector<double> acc(senses.categories().size(), 0.0);
    std::vector<std::uint32_t> touched;
    for (WordId t = 0; t < counts.targets().size(); ++t) {
        for (const auto& c : counts.row(t)) {
            for (std::uint32_t cat : feature_senses[c.feature]) {
                if (acc[cat] == 0) touched.push_back(cat);
                acc[cat] += static_cast<double>(c.count);
            }
        }
        for (std::uint32_t cat : touched) {
            cells.emplace_back(counts.targets()[t], senses.categories()[cat], acc[cat]);
            acc[cat] = 0;
        }
        touched.clear();
    }
    return Wccm::from_cells(WccmKind::base,
                            senses.crosslingual() ? LanguageMode::crosslingual : LanguageMode::monolingual,
                            senses.categories(), std::move(cells), counts.fingerprint());
}

Wccm build_base_wccm(const CooccurrenceCounts& counts, const Thesaurus& thesaurus) {
    if (thesaurus.empty()) throw ConfigError("empty thesaurus");
    return build_wccm(counts, SenseInventory::monolingual(thesaurus));
}

Wccm build_crosslingual_wccm(const CooccurrenceCounts& counts, const BilingualLexicon& lexicon,
                             const Thesaurus& thesaurus) {
    if (lexicon.empty()) throw ConfigError("empty bilingual lexicon");
    if (thesaurus.empty()) throw ConfigError("empty thesaurus");
    return build_wccm(counts, SenseInventory::crosslingual(lexicon, thesaurus));
}

ContingencyTable wccm_contingency(const Wccm& wccm, std::string_view word, std::string_view category) {
    auto w = wccm.find_word(word);
    if (!w) throw MissingRowError("no WCCM row for '" + std::string(word) + "'");
    auto c = wccm.find_category(category);
    if (!c) throw MissingRowError("unknown category '" + std::string(category) + "'");
    return make_table(wccm.cell(*w, *c), wccm.row_total(*w), wccm.column_total(*c), wccm.grand_total());
}

namespace {

// Positive PMI of (word, category) from a matrix; 0 when unobserved.
double positive_pmi(const Wccm& m, std::optional<std::uint32_t> word, std::uint32_t category, double log_base) {
    if (!word) return 0;
    double joint = m.cell(*word, category);
    if (joint == 0) return 0;
    double pmi = std::log(joint * m.grand_total() / (m.row_total(*word) * m.column_total(category))) /
                 std::log(log_base);
    return std::max(0.0, pmi);
}

Wccm bootstrap_once(std::span<const std::string> tokens, const Wccm& scoring, const SenseInventory& senses,
                    const CorpusConfig& corpus, const BootstrapConfig& config, const std::string& fingerprint) {
    const auto& cats = senses.categories();
    const std::size_t radius = static_cast<std::size_t>(corpus.window_radius);

    // Local interning of the words that receive counts.
    absl::flat_hash_map<std::string_view, std::uint32_t, detail::StringHash, detail::StringEq> index;
    std::vector<std::string_view> names;
    absl::flat_hash_map<std::uint64_t, double> acc;

    struct Slot {
        std::uint32_t local;
        bool frequent;
        std::optional<std::uint32_t> scoring_row;
        std::span<const std::uint32_t> senses;
    };
    std::vector<Slot> segment;
    std::vector<double> score(cats.size(), 0.0);

    // Positions before `done` are attributed; a position is attributable once its
    // right-hand window is complete or the segment ends.
    std::size_t done = 0;
    auto attribute = [&](std::size_t end) {
        for (std::size_t i = done; i < end; ++i) {
            const auto& cand = segment[i].senses;
            if (cand.empty() || !segment[i].frequent) continue;
            std::size_t lo = i >= radius ? i - radius : 0;
            std::size_t hi = std::min(segment.size() - 1, i + radius);
            std::uint32_t chosen = cand.front();
            if (cand.size() > 1) {
                double best = -1;
                for (std::uint32_t c : cand) {
                    double s = 0;
                    for (std::size_t j = lo; j <= hi; ++j) {
                        if (j != i) s += positive_pmi(scoring, segment[j].scoring_row, c, config.log_base);
                    }
                    // Candidates ascend by category id, so strict > keeps the smallest on ties.
                    if (s > best) {
                        best = s;
                        chosen = c;
                    }
                }
            }
            for (std::size_t j = lo; j <= hi; ++j) {
                if (j == i || !segment[j].frequent) continue;
                acc[(static_cast<std::uint64_t>(segment[j].local) << 32) | chosen] += 1.0;
            }
        }
        done = end;
    };
    auto flush = [&] {
        attribute(segment.size());
        segment.clear();
        done = 0;
    };
    constexpr std::size_t kChunk = 1 << 16;
    auto push = [&](Slot slot) {
        segment.push_back(slot);
        if (segment.size() < kChunk + 2 * radius) return;
        attribute(segment.size() - radius);
        // Keep the left context of the first unattributed position.
        std::size_t drop = done - radius;
        segment.erase(segment.begin(), segment.begin() + static_cast<std::ptrdiff_t>(drop));
        done -= drop;
    };

    // Same frequency cut as the counter: rare words keep their positions but form no events.
    std::vector<std::uint64_t> freq;
    for (const auto& tok : tokens) {
        if (tok == kBoundaryMarker) continue;
        auto [it, inserted] = index.try_emplace(tok, static_cast<std::uint32_t>(names.size()));
        if (inserted) {
            names.push_back(tok);
            freq.push_back(0);
        }
        ++freq[it->second];
    }
    const auto min_freq = static_cast<std::uint64_t>(corpus.min_token_frequency);
    for (const auto& tok : tokens) {
        if (tok == kBoundaryMarker) {
            if (corpus.respect_boundaries != Boundary::none) flush();
            continue;
        }
        std::uint32_t local = index.find(tok)->second;
        push({local, freq[local] >= min_freq, scoring.find_word(tok), senses.senses(tok)});
    }
    flush();

    std::vector<std::tuple<std::string, std::string, double>> cells;
    cells.reserve(acc.size());
    for (const auto& [key, v] : acc) {
        cells.emplace_back(std::string(names[key >> 32]), cats[key & 0xFFFFFFFFu], v);
    }
    return Wccm::from_cells(WccmKind::bootstrapped, scoring.language_mode(), cats, std::move(cells), fingerprint);
}

}  // namespace

Wccm bootstrap_wccm(std::span<const std::string> tokens, const Wccm& base, const SenseInventory& senses,
                    const CorpusConfig& corpus, const BootstrapConfig& config) {
    corpus.validate();
    if (config.iterations < 1) throw ConfigError("bootstrap iterations must be >= 1");
    if (base.kind() != WccmKind::base) throw ConfigError("bootstrapping starts from a base WCCM");
    if (base.categories() != senses.categories()) {
        throw StalenessError("base WCCM categories do not match the sense inventory");
    }
    std::string fp = corpus_fingerprint(tokens, corpus);
    if (fp != base.fingerprint()) {
        throw StalenessError("corpus or corpus config differs from the one the base WCCM was built from");
    }
    Wccm current = bootstrap_once(tokens, base, senses, corpus, config, fp);
    for (int k = 1; k < config.iterations; ++k) {
        current = bootstrap_once(tokens, current, senses, corpus, config, fp);
    }
    return current;
}

Wccm bootstrap_wccm_documents(std::span<const std::string> documents, const Wccm& base,
                              const SenseInventory& senses, const CorpusConfig& corpus,
                              const BootstrapConfig& config) {
    auto tokens = tokenize_documents(documents, corpus);
    return bootstrap_wccm(tokens, base, senses, corpus, config);
}

// ---------------------------------------------------------------------------
// Concept profiles and distances

DistributionalProfile concept_profile(const Wccm& wccm, std::string_view category, SoAKind kind,
                                      double log_base) {
    auto c = wccm.find_category(category);
    if (!c) throw MissingRowError("unknown category '" + std::string(category) + "'");
    double col = wccm.column_total(*c);
    if (col == 0) throw EmptyProfileError("category '" + std::string(category) + "' has an empty column");
    std::vector<ProfileEntry> entries;
    for (const auto& cell : wccm.column(*c)) {
        double v;
        if (kind == SoAKind::CP) {
            v = cell.value / col;
        } else {
            // Category as the target row, word as the feature column.
            v = strength(make_table(cell.value, col, wccm.row_total(cell.index), wccm.grand_total()), kind,
                         log_base);
        }
        if (v != 0) entries.push_back({wccm.words()[cell.index], v});
    }
    if (entries.empty()) throw EmptyProfileError("empty profile for category '" + std::string(category) + "'");
    return DistributionalProfile(std::string(category), kind, std::move(entries));
}

Score concept_distance(const Wccm& wccm, std::string_view c1, std::string_view c2, MeasureId measure,
                       const MeasureConfig& config) {
    SoAKind kind = required_soa(measure, config);
    auto p1 = concept_profile(wccm, c1, kind, config.log_base);
    auto p2 = concept_profile(wccm, c2, kind, config.log_base);
    return compute(measure, p1, p2, config);
}

ConceptMatrix concept_distance_matrix(const Wccm& wccm, MeasureId measure, const MeasureConfig& config) {
    ConceptMatrix out;
    out.categories = wccm.categories();
    const std::size_t n = out.categories.size();
    out.values.assign(n * n, std::numeric_limits<double>::quiet_NaN());
    SoAKind kind = required_soa(measure, config);
    std::vector<std::optional<DistributionalProfile>> profiles(n);
    for (std::size_t i = 0; i < n; ++i) {
        try {
            profiles[i] = concept_profile(wccm, out.categories[i], kind, config.log_base);
        } catch (const EmptyProfileError&) {
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!profiles[i] || !profiles[j]) continue;
            try {
                out.values[i * n + j] = compute(measure, *profiles[i], *profiles[j], config).value;
            } catch (const UndefinedError&) {
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Serialization

void save_wccm(const Wccm& wccm, std::ostream& out) {
    out << "#wccm\tkind=" << to_string(wccm.kind()) << "\tmode=" << to_string(wccm.language_mode())
        << "\tfingerprint=" << wccm.fingerprint() << '\n';
    for (const auto& c : wccm.categories()) out << "#category\t" << c << '\n';
    for (std::uint32_t w = 0; w < wccm.words().size(); ++w) {
        for (const auto& cell : wccm.row(w)) {
            out << wccm.words()[w] << '\t' << wccm.categories()[cell.index] << '\t' << io::format_real(cell.value)
                << '\n';
        }
    }
}

Wccm load_wccm(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    WccmKind kind = WccmKind::base;
    LanguageMode mode = LanguageMode::monolingual;
    std::string fingerprint;
    std::vector<std::string> categories;
    std::vector<std::tuple<std::string, std::string, double>> cells;
    while (io::next_line(in, line)) {
        ++lineno;
        if (line.empty() || io::is_manifest_line(line)) continue;
        auto fields = io::split(line, '\t');
        if (fields[0] == "#wccm") {
            header = true;
            for (std::size_t k = 1; k < fields.size(); ++k) {
                auto eq = fields[k].find('=');
                if (eq == std::string_view::npos) throw ParseError(lineno, "malformed header field");
                auto key = fields[k].substr(0, eq), value = fields[k].substr(eq + 1);
                if (key == "kind") {
                    if (value != "base" && value != "bootstrapped") throw ParseError(lineno, "unknown WCCM kind");
                    kind = value == "base" ? WccmKind::base : WccmKind::bootstrapped;
                } else if (key == "mode") {
                    if (value != "monolingual" && value != "crosslingual") {
                        throw ParseError(lineno, "unknown language mode");
                    }
                    mode = value == "monolingual" ? LanguageMode::monolingual : LanguageMode::crosslingual;
                } else if (key == "fingerprint") {
                    fingerprint = std::string(value);
                }
            }
            continue;
        }
        if (!header) throw ParseError(lineno, "missing #wccm header");
        if (fields[0] == "#category") {
            if (fields.size() != 2 || fields[1].empty()) throw ParseError(lineno, "expected #category<TAB>id");
            categories.emplace_back(fields[1]);
            continue;
        }
        if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
            throw ParseError(lineno, "expected word<TAB>category_id<TAB>count");
        }
        cells.emplace_back(std::string(fields[0]), std::string(fields[1]), io::parse_real(fields[2], lineno));
    }
    if (!header) throw ParseError(lineno + 1, "missing #wccm header");
    try {
        return Wccm::from_cells(kind, mode, std::move(categories), std::move(cells), std::move(fingerprint));
    } catch (const ValidationError& e) {
        throw ParseError(lineno, e.what());
    }
}

}  // namespace distsem
