#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "distsem/concept.hpp"
#include "distsem/error.hpp"
#include "oracles.hpp"

using namespace distsem;

namespace {

using Cells = std::map<std::pair<std::string, std::string>, double>;

Thesaurus load_thesaurus(const std::string& name) {
    std::ifstream in(oracle::fixture_path(name));
    return Thesaurus::load(in);
}

BilingualLexicon load_lexicon(const std::string& name) {
    std::ifstream in(oracle::fixture_path(name));
    return BilingualLexicon::load(in);
}

// Category lists straight from the fixture text.
std::map<std::string, std::set<std::string>> categories_of(const std::string& name) {
    std::map<std::string, std::set<std::string>> out;
    std::istringstream in(oracle::read_fixture(name));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream f(line);
        std::string id, label, words;
        std::getline(f, id, '\t');
        std::getline(f, label, '\t');
        std::getline(f, words);
        std::istringstream ws(words);
        std::string w;
        while (ws >> w) out[id].insert(w);
    }
    return out;
}

// Nested-loop base matrix: every event credits every category listing the neighbour.
Cells base_oracle(const oracle::Counts& k, const std::map<std::string, std::set<std::string>>& cats) {
    Cells out;
    for (const auto& [key, n] : k.pairs) {
        for (const auto& [id, words] : cats) {
            if (words.count(key.second)) out[{key.first, id}] += double(n);
        }
    }
    return out;
}

Cells cells_of(const Wccm& m) {
    Cells out;
    for (std::uint32_t w = 0; w < m.words().size(); ++w) {
        for (const auto& c : m.row(w)) out[{m.words()[w], m.categories()[c.index]}] = c.value;
    }
    return out;
}

std::vector<std::string> toy_tokens(const CorpusConfig& cfg) {
    return tokenize(oracle::read_fixture("toy.txt"), cfg);
}

// Per-occurrence argmax recomputed by brute force over the marker-free token runs.
Cells bootstrap_oracle(const std::vector<std::string>& toks, const Cells& scoring,
                       const std::map<std::string, std::set<std::string>>& cats, int radius) {
    std::map<std::string, double> row, col;
    double grand = 0;
    for (const auto& [k, v] : scoring) {
        row[k.first] += v;
        col[k.second] += v;
        grand += v;
    }
    auto ppmi = [&](const std::string& x, const std::string& c) {
        auto it = scoring.find({x, c});
        if (it == scoring.end()) return 0.0;
        return std::max(0.0, std::log2(it->second * grand / (row[x] * col[c])));
    };
    std::vector<std::vector<std::string>> segments(1);
    for (const auto& t : toks) {
        if (t == "<b>") {
            segments.emplace_back();
        } else {
            segments.back().push_back(t);
        }
    }
    Cells out;
    for (const auto& s : segments) {
        const long n = static_cast<long>(s.size());
        for (long i = 0; i < n; ++i) {
            std::vector<std::string> cand;
            for (const auto& [id, words] : cats) {
                if (words.count(s[i])) cand.push_back(id);
            }
            if (cand.empty()) continue;
            std::string best = cand.front();
            double best_score = -1;
            for (const auto& c : cand) {
                double sc = 0;
                for (long j = std::max(0L, i - radius); j <= std::min(n - 1, i + radius); ++j) {
                    if (j != i) sc += ppmi(s[j], c);
                }
                if (sc > best_score) {
                    best_score = sc;
                    best = c;
                }
            }
            for (long j = std::max(0L, i - radius); j <= std::min(n - 1, i + radius); ++j) {
                if (j != i) out[{s[j], best}] += 1;
            }
        }
    }
    return out;
}

}  // namespace

TEST_CASE("thesaurus loading and index") {
    auto t = load_thesaurus("thesaurus.tsv");
    CHECK(t.size() == 3);
    auto senses = t.senses("bank");
    CHECK(std::vector<std::string>(senses.begin(), senses.end()) == std::vector<std::string>{"finance", "river"});
    CHECK(t.senses("zebra").empty());
    for (const auto& c : t.categories()) {
        CHECK(!c.words.empty());
        for (const auto& w : c.words) {
            auto s = t.senses(w);
            CHECK(std::find(s.begin(), s.end(), c.id) != s.end());
        }
    }
    for (const auto& [w, ids] : t.index()) {
        for (const auto& id : ids) {
            const auto& words = t.find(id)->words;
            CHECK(std::find(words.begin(), words.end(), w) != words.end());
        }
    }
    std::istringstream bad("animal\tcat dog\n");
    CHECK_THROWS_AS(Thesaurus::load(bad), ParseError);
    std::istringstream dup("a\tA\tx\na\tA\ty\n");
    CHECK_THROWS_AS(Thesaurus::load(dup), ParseError);
}

TEST_CASE("cross-lingual candidate senses") {
    auto en = load_thesaurus("en_thesaurus.tsv");
    auto lex = load_lexicon("de_en_lexicon.tsv");
    CHECK(candidate_senses("stern", lex, en) == std::set<std::string>{"celestial", "celebrity"});
    CHECK(candidate_senses("bank", lex, en) == std::set<std::string>{"finance", "furniture", "river"});
    CHECK(candidate_senses("mond", lex, en) == std::set<std::string>{"celestial"});
    CHECK(candidate_senses("film", lex, en) == std::set<std::string>{"celebrity"});
    CHECK_THROWS_AS(candidate_senses("haus", lex, en), OutOfVocabularyError);
    CHECK(lex.translations.at("film") == std::set<std::string>{"film", "movie"});
}

TEST_CASE("base matrix credits every category listing a neighbour") {
    std::vector<Category> cats = {{"a", "A", {"y"}}, {"b", "B", {"y", "z"}}};
    Thesaurus t(cats);
    CorpusConfig cfg;
    cfg.window_radius = 1;
    auto c = count_cooccurrences(std::vector<std::string>{"x", "y", "x", "z"}, cfg);
    auto m = build_base_wccm(c, t);
    CHECK(m.cell("x", "a") == 2);
    CHECK(m.cell("x", "b") == 3);
    CHECK(m.cell("y", "a") == 0);
    CHECK(m.kind() == WccmKind::base);
    CHECK(m.categories().size() == 2);
    CHECK_THROWS_AS(build_base_wccm(c, Thesaurus{}), ConfigError);
}

TEST_CASE("base matrix equals the nested-loop oracle and the incidence product") {
    CorpusConfig cfg;
    auto toks = toy_tokens(cfg);
    auto counts = count_cooccurrences(toks, cfg);
    auto t = load_thesaurus("thesaurus.tsv");
    auto cats = categories_of("thesaurus.tsv");
    auto m = build_base_wccm(counts, t);
    auto want = base_oracle(oracle::count(oracle::tokens(oracle::read_fixture("toy.txt")), cfg.window_radius), cats);
    CHECK(cells_of(m) == want);

    // Linearity: counts x incidence, with the product taken densely.
    std::map<std::pair<std::string, std::string>, double> product;
    for (const auto& x : counts.targets()) {
        for (const auto& [id, words] : cats) {
            double s = 0;
            for (const auto& w : words) s += double(counts.pair_count(x, w));
            if (s != 0) product[{x, id}] = s;
        }
    }
    CHECK(cells_of(m) == product);

    double rows = 0, cols = 0;
    for (std::uint32_t w = 0; w < m.words().size(); ++w) rows += m.row_total(w);
    for (std::uint32_t c = 0; c < m.categories().size(); ++c) cols += m.column_total(c);
    CHECK(rows == m.grand_total());
    CHECK(cols == m.grand_total());
    for (const auto& [key, v] : want) {
        auto table = wccm_contingency(m, key.first, key.second);
        CHECK(table.wc == v);
        CHECK(table.total() == m.grand_total());
        double row = 0, col = 0;
        for (const auto& [k2, v2] : want) {
            if (k2.first == key.first) row += v2;
            if (k2.second == key.second) col += v2;
        }
        CHECK(table.w_not == row - v);
        CHECK(table.not_c == col - v);
    }
    CHECK_THROWS_AS(wccm_contingency(m, "zzz", "animal"), MissingRowError);
}

TEST_CASE("single-cell matrix") {
    auto m = Wccm::from_cells(WccmKind::base, LanguageMode::monolingual, {"c"}, {{"w", "c", 4.0}}, "");
    auto t = wccm_contingency(m, "w", "c");
    CHECK(t.wc == 4);
    CHECK(t.w_not == 0);
    CHECK(t.not_c == 0);
    CHECK(t.not_not == 0);
    auto p = concept_profile(m, "c", SoAKind::CP);
    REQUIRE(p.size() == 1);
    CHECK(p.entries()[0].value == 1.0);
    CHECK_THROWS_AS(Wccm::from_cells(WccmKind::base, LanguageMode::monolingual, {"c"}, {{"w", "d", 1.0}}, ""),
                    ValidationError);
}

TEST_CASE("identity lexicon reduces cross-lingual to monolingual") {
    CorpusConfig cfg;
    auto counts = count_cooccurrences(toy_tokens(cfg), cfg);
    auto t = load_thesaurus("thesaurus.tsv");
    auto mono = build_base_wccm(counts, t);
    auto xl = build_crosslingual_wccm(counts, BilingualLexicon::identity(t), t);
    CHECK(cells_of(xl) == cells_of(mono));
    CHECK(xl.language_mode() == LanguageMode::crosslingual);
    CHECK_THROWS_AS(build_crosslingual_wccm(counts, BilingualLexicon{}, t), ConfigError);
}

TEST_CASE("cross-lingual base matrix equals the oracle through candidate senses") {
    CorpusConfig cfg;
    cfg.respect_boundaries = Boundary::sentence;
    const std::string text = oracle::read_fixture("de_corpus.txt");
    auto counts = count_cooccurrences(tokenize(text, cfg), cfg);
    auto en = load_thesaurus("en_thesaurus.tsv");
    auto lex = load_lexicon("de_en_lexicon.tsv");
    auto m = build_crosslingual_wccm(counts, lex, en);

    // Source word -> categories, via translation sets and the English lists.
    auto en_cats = categories_of("en_thesaurus.tsv");
    std::map<std::string, std::set<std::string>> by_category;
    std::istringstream lines(oracle::read_fixture("de_en_lexicon.tsv"));
    std::string line;
    while (std::getline(lines, line)) {
        auto tab = line.find('\t');
        std::string src = line.substr(0, tab), tgt = line.substr(tab + 1);
        for (const auto& [id, words] : en_cats) {
            if (words.count(tgt)) by_category[id].insert(src);
        }
    }
    auto want = base_oracle(oracle::count(oracle::tokens(text, true), cfg.window_radius), by_category);
    CHECK(cells_of(m) == want);
    CHECK(m.cell("leuchtet", "celestial") > 0);
    CHECK(m.cell("leuchtet", "celebrity") > 0);
}

TEST_CASE("bootstrap matches the per-occurrence oracle and conserves events") {
    for (Boundary b : {Boundary::document, Boundary::sentence}) {
        for (int radius : {2, 5}) {
            CorpusConfig cfg;
            cfg.window_radius = radius;
            cfg.respect_boundaries = b;
            std::vector<std::string> docs = {oracle::read_fixture("toy.txt")};
            auto toks = tokenize_documents(docs, cfg);
            auto counts = count_cooccurrences(toks, cfg);
            auto t = load_thesaurus("thesaurus.tsv");
            auto cats = categories_of("thesaurus.tsv");
            auto inv = SenseInventory::monolingual(t);
            auto base = build_base_wccm(counts, t);
            auto boot = bootstrap_wccm(toks, base, inv, cfg);
            CHECK(boot.kind() == WccmKind::bootstrapped);
            CHECK(cells_of(boot) == bootstrap_oracle(toks, cells_of(base), cats, radius));

            double events = 0;
            for (const auto& x : counts.targets()) {
                for (const auto& [w, ids] : t.index()) events += double(counts.pair_count(x, w));
            }
            CHECK(boot.grand_total() == events);
            CHECK(boot.grand_total() <= base.grand_total());

            BootstrapConfig two;
            two.iterations = 2;
            auto boot2 = bootstrap_wccm(toks, base, inv, cfg, two);
            CHECK(cells_of(boot2) == bootstrap_oracle(toks, cells_of(boot), cats, radius));
            CHECK(boot2.grand_total() == events);
            CHECK(bootstrap_wccm_documents(docs, base, inv, cfg) == boot);
        }
    }
}

TEST_CASE("monosemous categories keep their base column") {
    std::vector<Category> cats = {{"pets", "", {"cat", "dog"}}, {"money", "", {"bank", "loan"}},
                                  {"water", "", {"bank", "river"}}};
    Thesaurus t(cats);
    CorpusConfig cfg;
    auto toks = toy_tokens(cfg);
    auto counts = count_cooccurrences(toks, cfg);
    auto base = build_base_wccm(counts, t);
    auto boot = bootstrap_wccm(toks, base, SenseInventory::monolingual(t), cfg);
    auto c = *base.find_category("pets");
    for (const auto& cell : base.column(c)) CHECK(boot.cell(base.words()[cell.index], "pets") == cell.value);
    CHECK(boot.column_total(*boot.find_category("pets")) == base.column_total(c));
}

TEST_CASE("strong context pulls an ambiguous word into one column") {
    std::vector<Category> cats = {{"money", "", {"bank", "cash"}}, {"water", "", {"bank", "river"}}};
    Thesaurus t(cats);
    CorpusConfig cfg;
    cfg.window_radius = 1;
    cfg.respect_boundaries = Boundary::sentence;
    std::vector<std::string> docs = {"loan cash. loan cash. loan cash. fish river. fish river. loan bank."};
    auto toks = tokenize_documents(docs, cfg);
    auto base = build_base_wccm(count_cooccurrences(toks, cfg), t);
    CHECK(base.cell("loan", "water") == 1);
    auto boot = bootstrap_wccm(toks, base, SenseInventory::monolingual(t), cfg);
    CHECK(boot.cell("loan", "money") == 4);
    CHECK(boot.cell("loan", "water") == 0);
}

TEST_CASE("bootstrap rejects stale inputs") {
    CorpusConfig cfg;
    auto toks = toy_tokens(cfg);
    auto t = load_thesaurus("thesaurus.tsv");
    auto base = build_base_wccm(count_cooccurrences(toks, cfg), t);
    auto inv = SenseInventory::monolingual(t);
    auto other = toks;
    other.pop_back();
    CHECK_THROWS_AS(bootstrap_wccm(other, base, inv, cfg), StalenessError);
    CorpusConfig wider = cfg;
    wider.window_radius = 3;
    CHECK_THROWS_AS(bootstrap_wccm(toks, base, inv, wider), StalenessError);
    auto boot = bootstrap_wccm(toks, base, inv, cfg);
    CHECK_THROWS_AS(bootstrap_wccm(toks, boot, inv, cfg), ConfigError);
    BootstrapConfig zero;
    zero.iterations = 0;
    CHECK_THROWS_AS(bootstrap_wccm(toks, base, inv, cfg, zero), ConfigError);
}

TEST_CASE("bootstrap honours the frequency cut and long streams") {
    CorpusConfig cfg;
    cfg.window_radius = 3;
    cfg.respect_boundaries = Boundary::none;
    cfg.min_token_frequency = 2;
    std::mt19937_64 rng(4);
    const char* vocab[] = {"bank", "money", "river", "water", "cash", "boat", "fish", "cat", "rare1"};
    std::uniform_int_distribution<int> pick(0, 7);
    std::vector<std::string> toks;
    for (int i = 0; i < 150000; ++i) toks.push_back(vocab[pick(rng)]);
    toks.push_back("rare1");
    auto t = load_thesaurus("thesaurus.tsv");
    auto counts = count_cooccurrences(toks, cfg);
    auto base = build_base_wccm(counts, t);
    auto boot = bootstrap_wccm(toks, base, SenseInventory::monolingual(t), cfg);
    CHECK(boot.find_word("rare1") == std::nullopt);
    double events = 0;
    for (const auto& x : counts.targets()) {
        for (const auto& [w, ids] : t.index()) events += double(counts.pair_count(x, w));
    }
    CHECK(boot.grand_total() == events);
    auto cats = categories_of("thesaurus.tsv");
    auto want = bootstrap_oracle(toks, cells_of(base), cats, cfg.window_radius);
    // The oracle knows nothing of the cut; the rare word is never a candidate, so
    // dropping its row is the whole difference.
    std::erase_if(want, [](const auto& kv) { return kv.first.first == "rare1"; });
    CHECK(cells_of(boot) == want);
}

TEST_CASE("concept profiles and distances") {
    CorpusConfig cfg;
    auto counts = count_cooccurrences(toy_tokens(cfg), cfg);
    auto t = load_thesaurus("thesaurus.tsv");
    auto m = build_base_wccm(counts, t);
    auto want = cells_of(m);
    std::map<std::string, oracle::Dense> cp;
    std::map<std::string, double> col;
    for (const auto& [k, v] : want) col[k.second] += v;
    for (const auto& [k, v] : want) cp[k.second][k.first] = v / col[k.second];

    for (const auto& c : t.categories()) {
        auto p = concept_profile(m, c.id, SoAKind::CP);
        double sum = 0;
        for (const auto& e : p.entries()) {
            sum += e.value;
            CHECK(e.value == doctest::Approx(cp[c.id][e.feature]).epsilon(1e-12));
        }
        CHECK(std::fabs(sum - 1) < 1e-9);
        CHECK(p.size() == cp[c.id].size());
        auto pmi = concept_profile(m, c.id, SoAKind::PMI);
        for (const auto& e : pmi.entries()) {
            double joint = want[{e.feature, c.id}];
            double row = 0;
            for (const auto& [k, v] : want) row += k.first == e.feature ? v : 0;
            double expect = std::log2(joint * m.grand_total() / (row * col[c.id]));
            CHECK(std::fabs(e.value - expect) < 1e-9);
        }
        CHECK(concept_distance(m, c.id, c.id, MeasureId::Cos).value == doctest::Approx(1.0));
    }
    for (const char* a : {"animal", "finance", "river"}) {
        for (const char* b : {"animal", "finance", "river"}) {
            CHECK(concept_distance(m, a, b, MeasureId::Cos).value ==
                  doctest::Approx(oracle::cos(cp[a], cp[b])).epsilon(1e-12));
            CHECK(concept_distance(m, a, b, MeasureId::JSD).value ==
                  doctest::Approx(oracle::jsd(cp[a], cp[b])).epsilon(1e-12));
        }
    }
    auto disjoint = Wccm::from_cells(WccmKind::base, LanguageMode::monolingual, {"p", "q", "r"},
                                     {{"x", "p", 1.0}, {"y", "q", 2.0}}, "");
    CHECK(concept_distance(disjoint, "p", "q", MeasureId::Cos).value == 0.0);
    CHECK_THROWS_AS(concept_profile(disjoint, "r", SoAKind::CP), EmptyProfileError);

    auto matrix = concept_distance_matrix(m, MeasureId::Cos);
    REQUIRE(matrix.categories.size() == 3);
    CHECK(matrix.values.size() == 9);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(matrix.at(i, j) == concept_distance(m, matrix.categories[i], matrix.categories[j],
                                                      MeasureId::Cos).value);
        }
    }
    auto with_empty = concept_distance_matrix(disjoint, MeasureId::Cos);
    CHECK(std::isnan(with_empty.at(2, 2)));
}

TEST_CASE("matrix files round-trip") {
    CorpusConfig cfg;
    auto toks = toy_tokens(cfg);
    auto t = load_thesaurus("thesaurus.tsv");
    auto base = build_base_wccm(count_cooccurrences(toks, cfg), t);
    auto boot = bootstrap_wccm(toks, base, SenseInventory::monolingual(t), cfg);
    for (const Wccm* m : {&base, &boot}) {
        std::stringstream buf;
        save_wccm(*m, buf);
        auto back = load_wccm(buf);
        CHECK(back == *m);
        CHECK(back.fingerprint() == m->fingerprint());
        CHECK(back.categories() == m->categories());
    }
    std::istringstream bad("#wccm\tkind=base\tmode=monolingual\tfingerprint=\n#category\tc\nw\tc\tx\n");
    CHECK_THROWS_AS(load_wccm(bad), ParseError);
}
