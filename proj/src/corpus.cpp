#include "distsem/corpus.hpp"

#include <absl/container/flat_hash_map.h>

#include "string_hash.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <thread>

#include "distsem/error.hpp"
#include "distsem/text_io.hpp"

namespace distsem {

void CorpusConfig::validate() const {
    if (window_radius < 1) throw ConfigError("window_radius must be >= 1");
    if (min_token_frequency < 1) throw ConfigError("min_token_frequency must be >= 1");
}

std::string CorpusConfig::describe() const {
    return "window=" + std::to_string(window_radius) + ";lowercase=" + (lowercase ? "1" : "0") +
           ";boundaries=" + std::string(to_string(respect_boundaries)) +
           ";min_freq=" + std::to_string(min_token_frequency);
}

std::string_view to_string(Boundary b) {
    switch (b) {
        case Boundary::document: return "document";
        case Boundary::sentence: return "sentence";
        case Boundary::none: return "none";
    }
    return "document";
}

Boundary parse_boundary(std::string_view name) {
    if (name == "document") return Boundary::document;
    if (name == "sentence") return Boundary::sentence;
    if (name == "none") return Boundary::none;
    throw ConfigError("unknown boundary policy '" + std::string(name) + "'");
}

namespace {

// Punctuation, symbols and separators outside ASCII. Everything else above
// U+007F is treated as a letter.
bool is_non_word(char32_t cp) {
    if (cp < 0x80) return false;
    if (cp <= 0xBF) return cp != 0xAA && cp != 0xB5 && cp != 0xBA;
    if (cp == 0xD7 || cp == 0xF7) return true;
    if (cp >= 0x2000 && cp <= 0x2BFF) return true;
    if (cp >= 0x3000 && cp <= 0x303F) return true;
    if (cp >= 0xFE30 && cp <= 0xFE4F) return true;
    if (cp >= 0xFF00 && cp <= 0xFF0F) return true;
    if (cp >= 0xFFF0 && cp <= 0xFFFF) return true;
    if (cp >= 0x1F000) return true;
    return false;
}

char32_t fold_case(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 32;
    if (cp < 0xC0) return cp;
    if (cp <= 0xDE && cp != 0xD7) return cp + 0x20;
    if (cp == 0x130) return 'i';
    if (cp >= 0x100 && cp <= 0x137) return cp | 1u;
    if (cp >= 0x139 && cp <= 0x148 && (cp & 1u)) return cp + 1;
    if (cp >= 0x14A && cp <= 0x177) return cp | 1u;
    if (cp == 0x178) return 0xFF;
    if (cp >= 0x179 && cp <= 0x17E && (cp & 1u)) return cp + 1;
    if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 0x20;
    if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
    if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Decodes one code point starting at text[i]; advances i.
char32_t decode(std::string_view text, std::size_t& i) {
    auto byte = [&](std::size_t k) { return static_cast<unsigned char>(text[k]); };
    unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len;
    char32_t cp;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        throw DecodeError(i, "unexpected lead byte");
    }
    if (i + len > text.size()) throw DecodeError(i, "truncated sequence");
    for (int k = 1; k < len; ++k) {
        unsigned char b = byte(i + k);
        if ((b & 0xC0) != 0x80) throw DecodeError(i + k, "expected continuation byte");
        cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        throw DecodeError(i, "overlong or out-of-range code point");
    }
    i += len;
    return cp;
}

}  // namespace

void scan_tokens(std::string_view text, const CorpusConfig& config,
                 const std::function<void(std::string_view)>& on_token,
                 const std::function<void()>& on_sentence_end) {
    const bool sentences = config.respect_boundaries == Boundary::sentence;
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        unsigned char b = static_cast<unsigned char>(text[i]);
        if (b < 0x80) {
            ++i;
            if ((b >= 'a' && b <= 'z') || (b >= '0' && b <= '9')) {
                current.push_back(static_cast<char>(b));
            } else if (b >= 'A' && b <= 'Z') {
                current.push_back(static_cast<char>(config.lowercase ? b + 32 : b));
            } else {
                if (!current.empty()) {
                    on_token(current);
                    current.clear();
                }
                if (sentences && (b == '.' || b == '!' || b == '?')) on_sentence_end();
            }
            continue;
        }
        char32_t cp = decode(text, i);
        if (is_non_word(cp)) {
            if (!current.empty()) {
                on_token(current);
                current.clear();
            }
        } else {
            append_utf8(current, config.lowercase ? fold_case(cp) : cp);
        }
    }
    if (!current.empty()) on_token(current);
}

namespace {

// Appends tokens while collapsing runs of markers and never starting with one.
struct MarkerCollapsingSink {
    std::vector<std::string>& out;
    bool pending_marker = false;

    void token(std::string_view t) {
        if (pending_marker && !out.empty()) out.emplace_back(kBoundaryMarker);
        pending_marker = false;
        out.emplace_back(t);
    }
    void marker() { pending_marker = true; }
};

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const CorpusConfig& config) {
    std::vector<std::string> out;
    MarkerCollapsingSink sink{out};
    scan_tokens(
        text, config, [&](std::string_view t) { sink.token(t); }, [&] { sink.marker(); });
    return out;
}

std::vector<std::string> tokenize_documents(std::span<const std::string> documents,
                                            const CorpusConfig& config) {
    std::vector<std::string> out;
    MarkerCollapsingSink sink{out};
    for (const auto& doc : documents) {
        scan_tokens(
            doc, config, [&](std::string_view t) { sink.token(t); }, [&] { sink.marker(); });
        if (config.respect_boundaries != Boundary::none) sink.marker();
    }
    return out;
}

// ---------------------------------------------------------------------------
// StreamDigest: two polynomial hashes modulo 2^64 with distinct odd bases.

namespace {
constexpr std::uint64_t kBase1 = 0x100000001B3ull;
constexpr std::uint64_t kBase2 = 0x9E3779B97F4A7C15ull;
}  // namespace

void StreamDigest::update(std::string_view bytes) {
    for (unsigned char c : bytes) {
        h1_ = h1_ * kBase1 + c + 1;
        h2_ = h2_ * kBase2 + c + 1;
        p1_ *= kBase1;
        p2_ *= kBase2;
    }
}

void StreamDigest::append(const StreamDigest& next) {
    h1_ = h1_ * next.p1_ + next.h1_;
    h2_ = h2_ * next.p2_ + next.h2_;
    p1_ *= next.p1_;
    p2_ *= next.p2_;
}

std::string StreamDigest::hex() const {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(h1_),
                  static_cast<unsigned long long>(h2_));
    return buf;
}

namespace {

std::string finish_fingerprint(const StreamDigest& stream, const CorpusConfig& config) {
    StreamDigest d;
    d.update(config.describe());
    d.update("|");
    d.append(stream);
    return d.hex();
}

// Tokens are hashed with a trailing separator; a boundary is hashed as the
// marker. Leading and repeated boundaries are dropped, exactly like the
// collapsing sink used by tokenize_documents.
struct DigestFeeder {
    StreamDigest digest;
    bool seen_token = false;
    bool pending_marker = false;

    void token(std::string_view t) {
        if (pending_marker && seen_token) {
            digest.update(kBoundaryMarker);
            digest.update("\n");
        }
        pending_marker = false;
        seen_token = true;
        digest.update(t);
        digest.update("\n");
    }
    void marker() { pending_marker = true; }
};

}  // namespace

std::string corpus_fingerprint(std::span<const std::string> tokens, const CorpusConfig& config) {
    DigestFeeder feeder;
    for (const auto& t : tokens) {
        if (t == kBoundaryMarker) {
            feeder.marker();
        } else {
            feeder.token(t);
        }
    }
    return finish_fingerprint(feeder.digest, config);
}

// ---------------------------------------------------------------------------
// CooccurrenceCounts

namespace {

std::optional<WordId> find_sorted(const std::vector<std::string>& names, std::string_view name) {
    auto it = std::lower_bound(names.begin(), names.end(), name,
                               [](const std::string& a, std::string_view b) { return a < b; });
    if (it == names.end() || *it != name) return std::nullopt;
    return static_cast<WordId>(it - names.begin());
}

}  // namespace

std::optional<WordId> CooccurrenceCounts::find_target(std::string_view name) const {
    return find_sorted(targets_, name);
}

std::optional<WordId> CooccurrenceCounts::find_feature(std::string_view name) const {
    return find_sorted(features_, name);
}

std::span<const CooccurrenceCounts::Cell> CooccurrenceCounts::row(WordId target) const {
    return {cells_.data() + row_offsets_[target], cells_.data() + row_offsets_[target + 1]};
}

std::uint64_t CooccurrenceCounts::pair_count(WordId target, WordId feature) const {
    auto r = row(target);
    auto it = std::lower_bound(r.begin(), r.end(), feature,
                               [](const Cell& c, WordId f) { return c.feature < f; });
    return (it != r.end() && it->feature == feature) ? it->count : 0;
}

std::uint64_t CooccurrenceCounts::pair_count(std::string_view target, std::string_view feature) const {
    auto t = find_target(target);
    auto f = find_feature(feature);
    if (!t || !f) return 0;
    return pair_count(*t, *f);
}

std::uint64_t CooccurrenceCounts::unigram_count(std::string_view word) const {
    auto it = std::lower_bound(unigrams_.begin(), unigrams_.end(), word,
                               [](const auto& a, std::string_view b) { return a.first < b; });
    return (it != unigrams_.end() && it->first == word) ? it->second : 0;
}

void CooccurrenceCounts::for_each(
    const std::function<void(std::string_view, std::string_view, std::uint64_t)>& f) const {
    for (WordId t = 0; t < targets_.size(); ++t) {
        for (const auto& c : row(t)) f(targets_[t], features_[c.feature], c.count);
    }
}

bool operator==(const CooccurrenceCounts& a, const CooccurrenceCounts& b) {
    if (a.targets_ != b.targets_ || a.features_ != b.features_ || a.row_offsets_ != b.row_offsets_ ||
        a.total_pairs_ != b.total_pairs_ || a.total_tokens_ != b.total_tokens_ ||
        a.unigrams_ != b.unigrams_ || a.relation_features_ != b.relation_features_) {
        return false;
    }
    for (std::size_t i = 0; i < a.cells_.size(); ++i) {
        if (a.cells_[i].feature != b.cells_[i].feature || a.cells_[i].count != b.cells_[i].count) {
            return false;
        }
    }
    return true;
}

CooccurrenceCounts CooccurrenceCounts::Builder::build() && {
    CooccurrenceCounts out;
    out.relation_features_ = relation_features;
    out.total_tokens_ = total_tokens;
    out.fingerprint_ = std::move(fingerprint);

    std::sort(cells.begin(), cells.end());
    // Merge duplicate keys.
    std::size_t w = 0;
    for (std::size_t r = 0; r < cells.size(); ++r) {
        if (std::get<2>(cells[r]) == 0) continue;
        if (w > 0 && std::get<0>(cells[w - 1]) == std::get<0>(cells[r]) &&
            std::get<1>(cells[w - 1]) == std::get<1>(cells[r])) {
            std::get<2>(cells[w - 1]) += std::get<2>(cells[r]);
        } else {
            if (w != r) cells[w] = std::move(cells[r]);
            ++w;
        }
    }
    cells.resize(w);

    std::vector<std::string> feature_names;
    for (const auto& c : cells) {
        if (out.targets_.empty() || out.targets_.back() != std::get<0>(c)) {
            out.targets_.push_back(std::get<0>(c));
        }
        feature_names.push_back(std::get<1>(c));
    }
    std::sort(feature_names.begin(), feature_names.end());
    feature_names.erase(std::unique(feature_names.begin(), feature_names.end()), feature_names.end());
    out.features_ = std::move(feature_names);

    out.target_totals_.assign(out.targets_.size(), 0);
    out.feature_totals_.assign(out.features_.size(), 0);
    out.row_offsets_.assign(out.targets_.size() + 1, 0);
    out.cells_.reserve(cells.size());
    for (const auto& c : cells) {
        WordId t = *find_sorted(out.targets_, std::get<0>(c));
        WordId f = *find_sorted(out.features_, std::get<1>(c));
        std::uint64_t n = std::get<2>(c);
        out.cells_.push_back({f, n});
        ++out.row_offsets_[t + 1];
        out.target_totals_[t] += n;
        out.feature_totals_[f] += n;
        out.total_pairs_ += n;
    }
    for (std::size_t k = 0; k < out.targets_.size(); ++k) out.row_offsets_[k + 1] += out.row_offsets_[k];

    std::map<std::string, std::uint64_t> uni;
    for (auto& [word, n] : unigrams) uni[word] += n;
    for (auto& [word, n] : uni) {
        if (n > 0) out.unigrams_.emplace_back(word, n);
    }
    return out;
}

// ---------------------------------------------------------------------------
// CooccurrenceCounter

struct CooccurrenceCounter::State {
    absl::flat_hash_map<std::string, WordId, detail::StringHash, detail::StringEq> index;
    std::vector<std::string> words;
    std::vector<std::uint64_t> unigram;
    absl::flat_hash_map<std::uint64_t, std::uint64_t> pairs;
    std::vector<WordId> window;  // ring buffer of the last `radius` ids
    std::size_t window_start = 0;
    std::size_t window_size = 0;
    std::uint64_t total_tokens = 0;
    DigestFeeder digest;

    WordId intern(std::string_view token) {
        auto it = index.find(token);
        if (it != index.end()) return it->second;
        WordId id = static_cast<WordId>(words.size());
        words.emplace_back(token);
        unigram.push_back(0);
        index.emplace(words.back(), id);
        return id;
    }
};

CooccurrenceCounter::CooccurrenceCounter(CorpusConfig config)
    : config_(config), state_(std::make_unique<State>()) {
    config_.validate();
    state_->window.assign(static_cast<std::size_t>(config_.window_radius), 0);
}

CooccurrenceCounter::~CooccurrenceCounter() = default;
CooccurrenceCounter::CooccurrenceCounter(CooccurrenceCounter&&) noexcept = default;
CooccurrenceCounter& CooccurrenceCounter::operator=(CooccurrenceCounter&&) noexcept = default;

void CooccurrenceCounter::add_token(std::string_view token) {
    State& s = *state_;
    s.digest.token(token);
    WordId id = s.intern(token);
    ++s.unigram[id];
    ++s.total_tokens;
    const std::size_t radius = s.window.size();
    for (std::size_t k = 0; k < s.window_size; ++k) {
        WordId prev = s.window[(s.window_start + k) % radius];
        ++s.pairs[(static_cast<std::uint64_t>(id) << 32) | prev];
        ++s.pairs[(static_cast<std::uint64_t>(prev) << 32) | id];
    }
    if (s.window_size < radius) {
        s.window[(s.window_start + s.window_size) % radius] = id;
        ++s.window_size;
    } else {
        s.window[s.window_start] = id;
        s.window_start = (s.window_start + 1) % radius;
    }
}

void CooccurrenceCounter::add_boundary() {
    state_->digest.marker();
    state_->window_size = 0;
    state_->window_start = 0;
}

void CooccurrenceCounter::add_document(std::string_view text) {
    scan_tokens(
        text, config_, [this](std::string_view t) { add_token(t); },
        [this] { add_boundary(); });
    if (config_.respect_boundaries != Boundary::none) add_boundary();
}

void CooccurrenceCounter::merge(CooccurrenceCounter&& next) {
    State& s = *state_;
    State& o = *next.state_;
    std::vector<WordId> remap(o.words.size());
    for (WordId i = 0; i < o.words.size(); ++i) {
        remap[i] = s.intern(o.words[i]);
        s.unigram[remap[i]] += o.unigram[i];
    }
    s.pairs.reserve(s.pairs.size() + o.pairs.size());
    for (const auto& [key, n] : o.pairs) {
        std::uint64_t t = remap[key >> 32];
        std::uint64_t f = remap[key & 0xFFFFFFFFu];
        s.pairs[(t << 32) | f] += n;
    }
    s.total_tokens += o.total_tokens;
    // Shards are whole documents, so the window never spans the seam.
    if (o.digest.seen_token) {
        if (s.digest.seen_token && s.digest.pending_marker) {
            s.digest.digest.update(kBoundaryMarker);
            s.digest.digest.update("\n");
        }
        s.digest.digest.append(o.digest.digest);
        s.digest.seen_token = true;
        s.digest.pending_marker = o.digest.pending_marker;
    }
    s.window_size = 0;
    s.window_start = 0;
}

const StreamDigest& CooccurrenceCounter::digest() const { return state_->digest.digest; }

CooccurrenceCounts CooccurrenceCounter::finish() && {
    State& s = *state_;
    const std::size_t n = s.words.size();
    // Rank of each id in lexicographic order.
    std::vector<WordId> order(n);
    for (WordId i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](WordId a, WordId b) { return s.words[a] < s.words[b]; });
    std::vector<WordId> rank(n);
    for (WordId r = 0; r < n; ++r) rank[order[r]] = r;

    CooccurrenceCounts out;
    out.targets_.reserve(n);
    for (WordId r = 0; r < n; ++r) out.targets_.push_back(s.words[order[r]]);

    std::vector<std::pair<std::uint64_t, std::uint64_t>> cells;
    cells.reserve(s.pairs.size());
    for (const auto& [key, c] : s.pairs) {
        std::uint64_t t = rank[key >> 32];
        std::uint64_t f = rank[key & 0xFFFFFFFFu];
        cells.emplace_back((t << 32) | f, c);
    }
    absl::flat_hash_map<std::uint64_t, std::uint64_t>().swap(s.pairs);
    std::sort(cells.begin(), cells.end());

    out.target_totals_.assign(n, 0);
    out.feature_totals_.assign(n, 0);
    out.row_offsets_.assign(n + 1, 0);
    out.cells_.reserve(cells.size());
    // Rare words still occupy window positions; only their cells are dropped.
    const auto min_freq = static_cast<std::uint64_t>(config_.min_token_frequency);
    for (const auto& [key, c] : cells) {
        WordId t = static_cast<WordId>(key >> 32);
        WordId f = static_cast<WordId>(key & 0xFFFFFFFFu);
        if (s.unigram[order[t]] < min_freq || s.unigram[order[f]] < min_freq) continue;
        out.cells_.push_back({f, c});
        ++out.row_offsets_[t + 1];
        out.target_totals_[t] += c;
        out.feature_totals_[f] += c;
        out.total_pairs_ += c;
    }
    for (std::size_t k = 0; k < n; ++k) out.row_offsets_[k + 1] += out.row_offsets_[k];

    // Window counts only keep targets and features that actually co-occur.
    // Drop isolated words from the name tables but keep their unigram counts.
    out.unigrams_.reserve(n);
    for (WordId r = 0; r < n; ++r) out.unigrams_.emplace_back(out.targets_[r], s.unigram[order[r]]);

    std::vector<WordId> keep_rank(n, 0);
    std::vector<bool> keep(n, false);
    for (WordId r = 0; r < n; ++r) keep[r] = out.target_totals_[r] > 0 || out.feature_totals_[r] > 0;
    if (std::find(keep.begin(), keep.end(), false) != keep.end()) {
        CooccurrenceCounts compact;
        WordId next = 0;
        for (WordId r = 0; r < n; ++r) {
            if (!keep[r]) continue;
            keep_rank[r] = next++;
            compact.targets_.push_back(out.targets_[r]);
            compact.target_totals_.push_back(out.target_totals_[r]);
            compact.feature_totals_.push_back(out.feature_totals_[r]);
            compact.row_offsets_.push_back(out.row_offsets_[r + 1]);
        }
        compact.cells_ = std::move(out.cells_);
        for (auto& c : compact.cells_) c.feature = keep_rank[c.feature];
        compact.unigrams_ = std::move(out.unigrams_);
        compact.total_pairs_ = out.total_pairs_;
        out = std::move(compact);
    }
    out.features_ = out.targets_;
    out.total_tokens_ = s.total_tokens;
    out.fingerprint_ = finish_fingerprint(s.digest.digest, config_);
    return out;
}

CooccurrenceCounts count_cooccurrences(std::span<const std::string> tokens, const CorpusConfig& config) {
    CooccurrenceCounter counter(config);
    for (const auto& t : tokens) {
        if (t == kBoundaryMarker) {
            counter.add_boundary();
        } else {
            counter.add_token(t);
        }
    }
    return std::move(counter).finish();
}

CooccurrenceCounts count_documents(std::span<const std::string> documents, const CorpusConfig& config,
                                   unsigned threads) {
    config.validate();
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(documents.size())));
    // Without boundaries the window runs across documents, so shards would differ.
    if (config.respect_boundaries == Boundary::none) threads = 1;
    if (threads <= 1) {
        CooccurrenceCounter counter(config);
        for (const auto& doc : documents) counter.add_document(doc);
        return std::move(counter).finish();
    }
    std::vector<CooccurrenceCounter> shards;
    shards.reserve(threads);
    for (unsigned k = 0; k < threads; ++k) shards.emplace_back(config);
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> workers;
        const std::size_t per = (documents.size() + threads - 1) / threads;
        for (unsigned k = 0; k < threads; ++k) {
            workers.emplace_back([&, k] {
                try {
                    std::size_t begin = std::min(documents.size(), k * per);
                    std::size_t end = std::min(documents.size(), begin + per);
                    for (std::size_t d = begin; d < end; ++d) shards[k].add_document(documents[d]);
                } catch (...) {
                    errors[k] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    for (unsigned k = 1; k < threads; ++k) shards[0].merge(std::move(shards[k]));
    return std::move(shards[0]).finish();
}

CooccurrenceCounts merge_counts(const CooccurrenceCounts& a, const CooccurrenceCounts& b) {
    if (a.relation_features() != b.relation_features()) {
        throw ConfigError("cannot merge window counts with relation-tagged counts");
    }
    CooccurrenceCounts::Builder builder;
    builder.relation_features = a.relation_features();
    builder.total_tokens = a.total_tokens() + b.total_tokens();
    for (const auto* c : {&a, &b}) {
        c->for_each([&](std::string_view t, std::string_view f, std::uint64_t n) {
            builder.cells.emplace_back(std::string(t), std::string(f), n);
        });
        for (const auto& u : c->unigrams()) builder.unigrams.push_back(u);
    }
    StreamDigest d;
    d.update(a.fingerprint());
    d.update("+");
    d.update(b.fingerprint());
    builder.fingerprint = d.hex();
    return std::move(builder).build();
}

// ---------------------------------------------------------------------------
// Dependency triples

std::string inverse_relation(std::string_view relation) {
    constexpr std::string_view kSuffix = "^-1";
    if (relation.size() > kSuffix.size() && relation.substr(relation.size() - kSuffix.size()) == kSuffix) {
        return std::string(relation.substr(0, relation.size() - kSuffix.size()));
    }
    return std::string(relation) + std::string(kSuffix);
}

namespace {

void check_label(std::string_view label, std::size_t line) {
    if (label.empty() || label.find_first_of(": \t") != std::string_view::npos) {
        throw ParseError(line, "invalid relation label '" + std::string(label) + "'");
    }
}

}  // namespace

CooccurrenceCounts ingest_triples(std::istream& in, const std::optional<std::set<std::string>>& declared) {
    std::optional<std::set<std::string>> labels = declared;
    CooccurrenceCounts::Builder builder;
    builder.relation_features = true;
    StreamDigest digest;
    std::string line;
    std::size_t lineno = 0;
    while (io::next_line(in, line)) {
        ++lineno;
        if (line.empty() || io::is_manifest_line(line)) continue;
        auto fields = io::split(line, '\t');
        if (fields[0] == "#relations") {
            std::set<std::string> header;
            for (std::size_t k = 1; k < fields.size(); ++k) {
                check_label(fields[k], lineno);
                header.emplace(fields[k]);
            }
            labels = std::move(header);
            continue;
        }
        if (fields.size() != 3 || fields[0].empty() || fields[2].empty()) {
            throw ParseError(lineno, "expected head<TAB>relation<TAB>dependent");
        }
        if (!labels) {
            throw ParseError(lineno, "no relation label set declared (missing #relations header)");
        }
        std::string rel(fields[1]);
        if (!labels->count(rel)) throw ParseError(lineno, "unknown relation label '" + rel + "'");
        std::string head(fields[0]), dep(fields[2]);
        builder.cells.emplace_back(head, rel + ":" + dep, 1);
        builder.cells.emplace_back(dep, inverse_relation(rel) + ":" + head, 1);
        builder.unigrams.emplace_back(head, 1);
        builder.unigrams.emplace_back(dep, 1);
        digest.update(line);
        digest.update("\n");
    }
    builder.fingerprint = digest.hex();
    return std::move(builder).build();
}

// ---------------------------------------------------------------------------
// Serialization

void save_counts(const CooccurrenceCounts& counts, std::ostream& out) {
    out << "#counts\ttotal_pairs=" << counts.total_pairs() << "\ttotal_tokens=" << counts.total_tokens()
        << "\tfeatures=" << (counts.relation_features() ? "relation" : "word")
        << "\tfingerprint=" << counts.fingerprint() << '\n';
    for (const auto& [word, n] : counts.unigrams()) out << "#unigram\t" << word << '\t' << n << '\n';
    counts.for_each([&](std::string_view t, std::string_view f, std::uint64_t n) {
        out << t << '\t' << f << '\t' << n << '\n';
    });
}

CooccurrenceCounts load_counts(std::istream& in) {
    CooccurrenceCounts::Builder builder;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    std::uint64_t declared_pairs = 0;
    while (io::next_line(in, line)) {
        ++lineno;
        if (line.empty() || io::is_manifest_line(line)) continue;
        auto fields = io::split(line, '\t');
        if (fields[0] == "#counts") {
            header = true;
            for (std::size_t k = 1; k < fields.size(); ++k) {
                auto eq = fields[k].find('=');
                if (eq == std::string_view::npos) throw ParseError(lineno, "malformed header field");
                auto key = fields[k].substr(0, eq);
                auto value = fields[k].substr(eq + 1);
                if (key == "total_pairs") {
                    declared_pairs = io::parse_count(value, lineno);
                } else if (key == "total_tokens") {
                    builder.total_tokens = io::parse_count(value, lineno);
                } else if (key == "features") {
                    builder.relation_features = value == "relation";
                } else if (key == "fingerprint") {
                    builder.fingerprint = std::string(value);
                }
            }
            continue;
        }
        if (!header) throw ParseError(lineno, "missing #counts header");
        if (fields[0] == "#unigram") {
            if (fields.size() != 3) throw ParseError(lineno, "expected #unigram<TAB>word<TAB>count");
            builder.unigrams.emplace_back(std::string(fields[1]), io::parse_count(fields[2], lineno));
            continue;
        }
        if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
            throw ParseError(lineno, "expected target<TAB>feature<TAB>count");
        }
        builder.cells.emplace_back(std::string(fields[0]), std::string(fields[1]),
                                   io::parse_count(fields[2], lineno));
    }
    if (!header) throw ParseError(lineno + 1, "missing #counts header");
    auto counts = std::move(builder).build();
    if (counts.total_pairs() != declared_pairs) {
        throw ParseError(lineno, "cell counts sum to " + std::to_string(counts.total_pairs()) +
                                     " but header declares " + std::to_string(declared_pairs));
    }
    return counts;
}

}  // namespace distsem
