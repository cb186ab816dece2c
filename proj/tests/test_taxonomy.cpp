#include <doctest.h>

#include <cmath>
#include <functional>
#include <sstream>

#include "distsem/error.hpp"
#include "distsem/taxonomy.hpp"
#include "oracles.hpp"

using namespace distsem;

namespace {

Taxonomy toy() {
    std::ifstream in(oracle::fixture_path("taxonomy.tsv"));
    return Taxonomy::load(in);
}

struct RawEdge {
    std::string a, b, rel;
};

std::vector<RawEdge> raw_edges() {
    std::vector<RawEdge> out;
    std::istringstream in(oracle::read_fixture("taxonomy.tsv"));
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream f(line);
        std::string kind, a, b, rel;
        std::getline(f, kind, '\t');
        if (kind != "EDGE") continue;
        std::getline(f, a, '\t');
        std::getline(f, b, '\t');
        std::getline(f, rel, '\t');
        out.push_back({a, b, rel});
    }
    return out;
}

struct Best {
    bool found = false;
    int length = 0, changes = 0;
    std::vector<std::string> nodes;
};

// Enumerates every simple path and keeps the (length, changes, node sequence) minimum.
Best exhaustive_path(const std::vector<RawEdge>& edges, const std::string& from, const std::string& to,
                     bool hyponymy_only) {
    Best best;
    if (from == to) {
        best.found = true;
        best.nodes = {from};
        return best;
    }
    std::vector<std::string> nodes{from};
    std::vector<std::string> rels;
    std::function<void(const std::string&)> walk = [&](const std::string& at) {
        if (at == to) {
            int len = static_cast<int>(rels.size());
            int changes = 0;
            for (std::size_t k = 1; k < rels.size(); ++k) changes += rels[k] != rels[k - 1];
            if (!best.found || std::tie(len, changes, nodes) < std::tie(best.length, best.changes, best.nodes)) {
                best = {true, len, changes, nodes};
            }
            return;
        }
        for (const auto& e : edges) {
            if (hyponymy_only && e.rel != "isa") continue;
            for (int dir = 0; dir < 2; ++dir) {
                const std::string& u = dir ? e.b : e.a;
                const std::string& v = dir ? e.a : e.b;
                if (u != at || std::find(nodes.begin(), nodes.end(), v) != nodes.end()) continue;
                nodes.push_back(v);
                rels.push_back(e.rel);
                walk(v);
                nodes.pop_back();
                rels.pop_back();
            }
        }
    };
    walk(from);
    return best;
}

// Word frequencies and the hand-propagated credits they produce.
const std::map<std::string, std::uint64_t, std::less<>> kFreq = {
    {"dog", 4}, {"hound", 2}, {"tree", 3}, {"oak", 1}, {"animal", 2}, {"plant", 1}, {"thing", 1}, {"bark", 2}};

// 16 occurrences in all. bark credits dog and tree and their shared ancestors once.
const std::map<std::string, double> kProb = {
    {"entity", 16.0 / 16}, {"object", 16.0 / 16}, {"living", 15.0 / 16}, {"animal", 10.0 / 16},
    {"plant", 7.0 / 16},   {"dog", 8.0 / 16},     {"tree", 6.0 / 16}};

double ic(const std::string& c) { return -std::log2(kProb.at(c)); }

}  // namespace

TEST_CASE("toy taxonomy structure") {
    auto t = toy();
    CHECK(t.nodes().size() == 7);
    CHECK(t.roots() == std::vector<std::string>{"entity"});
    CHECK(t.max_depth() == 4);
    CHECK(t.depth("entity") == 0);
    CHECK(t.depth("object") == 1);
    CHECK(t.depth("tree") == 4);
    CHECK(t.depth("dog") == 4);
    CHECK(t.ancestors("tree") == std::set<std::string>{"tree", "plant", "living", "object", "entity"});
    CHECK(t.concepts_of("bark") == std::set<std::string>{"dog", "tree"});
    CHECK(t.concepts_of("cat").empty());
    CHECK(t.label("object") == "physical object");
}

TEST_CASE("taxonomy validation") {
    std::istringstream cycle("NODE\ta\ta\nNODE\tb\tb\nEDGE\ta\tb\tisa\nEDGE\tb\ta\tisa\n");
    CHECK_THROWS_AS(Taxonomy::load(cycle), ParseError);
    std::istringstream flat("NODE\ta\ta\n");
    CHECK_THROWS_AS(Taxonomy::load(flat), ParseError);
    std::istringstream unknown("NODE\ta\ta\nNODE\tb\tb\nEDGE\ta\tb\tisa\nWORD\tw\tz\n");
    CHECK_THROWS_AS(Taxonomy::load(unknown), ParseError);
    std::istringstream record("NODE\ta\ta\nNODE\tb\tb\nEDGE\ta\tb\tisa\nLINK\ta\tb\n");
    CHECK_THROWS_AS(Taxonomy::load(record), ParseError);
}

TEST_CASE("paths agree with exhaustive enumeration") {
    auto t = toy();
    auto edges = raw_edges();
    for (const auto& a : t.nodes()) {
        for (const auto& b : t.nodes()) {
            for (bool hyp : {false, true}) {
                auto want = exhaustive_path(edges, a, b, hyp);
                REQUIRE(want.found);
                auto got = hyp ? hyponymy_path(t, a, b) : shortest_path(t, a, b);
                CAPTURE(a);
                CAPTURE(b);
                CHECK(got.length == want.length);
                CHECK(got.changes == want.changes);
                CHECK(got.nodes == want.nodes);
            }
        }
    }
    CHECK(shortest_path(t, "dog", "dog").length == 0);
    CHECK(shortest_path(t, "dog", "animal").length == 1);
    CHECK(shortest_path(t, "dog", "animal").changes == 0);
    auto dp = shortest_path(t, "dog", "plant");
    CHECK(dp.length == 2);
    CHECK(dp.changes == 1);
    CHECK(rada_distance(t, "dog", "tree") == 1);
}

TEST_CASE("disconnected concepts have no path") {
    Taxonomy t({{"a", "a"}, {"b", "b"}, {"c", "c"}, {"d", "d"}},
               {{"b", "a", "isa"}, {"d", "c", "isa"}}, {});
    CHECK_THROWS_AS(shortest_path(t, "a", "d"), NoPathError);
    CHECK(hirst_stonge(t, "a", "d") == 0);
    CHECK_THROWS_AS(leacock_chodorow(t, "a", "d"), NoPathError);
}

TEST_CASE("Hirst-St-Onge arithmetic") {
    auto t = toy();
    CHECK(hirst_stonge(t, "dog", "dog") == 8);
    CHECK(hirst_stonge(t, "dog", "animal") == 7);
    CHECK(hirst_stonge(t, "dog", "tree") == 7);
    CHECK(hirst_stonge(t, "dog", "plant") == 5);
    CHECK(hirst_stonge(t, "dog", "plant", 8, 2) == 4);

    std::map<std::string, std::string> labels;
    std::vector<TaxonomyEdge> chain;
    for (int i = 0; i <= 8; ++i) labels["n" + std::to_string(i)] = "";
    for (int i = 1; i <= 8; ++i) chain.push_back({"n" + std::to_string(i), "n" + std::to_string(i - 1), "isa"});
    Taxonomy line(labels, chain, {});
    CHECK(hirst_stonge(line, "n0", "n8") == 0);
    CHECK(hirst_stonge(line, "n0", "n7") == 1);
}

TEST_CASE("Leacock-Chodorow values") {
    auto t = toy();
    CHECK(leacock_chodorow(t, "dog", "animal") == doctest::Approx(3.0));
    CHECK(leacock_chodorow(t, "dog", "dog") == doctest::Approx(3.0));
    // dog-animal-living-object-tree, four hyponymy edges against 2D = 8.
    CHECK(leacock_chodorow(t, "dog", "tree") == doctest::Approx(1.0));
    CHECK(hyponymy_path(t, "dog", "tree").nodes ==
          std::vector<std::string>{"dog", "animal", "living", "object", "tree"});
    CHECK(leacock_chodorow(t, "dog", "living") > leacock_chodorow(t, "dog", "tree"));
    CHECK(leacock_chodorow(t, "dog", "animal", std::exp(1.0)) == doctest::Approx(std::log(8.0)));

    std::map<std::string, std::string> labels;
    std::vector<TaxonomyEdge> chain;
    for (int i = 0; i <= 4; ++i) labels["n" + std::to_string(i)] = "";
    for (int i = 1; i <= 4; ++i) chain.push_back({"n" + std::to_string(i), "n" + std::to_string(i - 1), "isa"});
    for (int i = 1; i <= 4; ++i) {
        labels["m" + std::to_string(i)] = "";
        chain.push_back({"m" + std::to_string(i), i == 1 ? "n0" : "m" + std::to_string(i - 1), "isa"});
    }
    Taxonomy line(labels, chain, {});
    CHECK(leacock_chodorow(line, "n4", "m1") == doctest::Approx(-std::log2(5.0 / 8.0)));
    // Eight edges is exactly 2D.
    CHECK(std::fabs(leacock_chodorow(line, "n4", "m4")) < 1e-15);
    double prev = 1e9;
    for (int i = 1; i <= 4; ++i) {
        double v = leacock_chodorow(line, "n0", "n" + std::to_string(i));
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("information content equals the hand propagation") {
    auto t = toy();
    auto table = ic_from_counts(t, kFreq);
    CHECK(table.total() == 16);
    for (const auto& [c, p] : kProb) {
        CAPTURE(c);
        CHECK(std::fabs(table.prob(c) - p) < 1e-12);
        CHECK(std::fabs(table.ic(c) - ic(c)) < 1e-12);
        CHECK_FALSE(table.at(c).floored);
    }
    CHECK(table.prob("entity") == 1.0);
    CHECK(table.ic("entity") == 0.0);
    for (const auto& e : t.edges()) {
        if (e.relation != "isa") continue;
        CHECK(table.ic(e.parent) <= table.ic(e.child));
    }
}

TEST_CASE("single-leaf mass and floored concepts") {
    auto t = toy();
    auto table = ic_from_counts(t, {{"hound", 5}});
    for (const char* c : {"dog", "animal", "living", "object", "entity"}) CHECK(table.prob(c) == 1.0);
    CHECK(table.at("tree").floored);
    CHECK(table.prob("tree") == doctest::Approx(1.0 / 10));
    CHECK(table.at("plant").floored);
    CHECK_THROWS_AS(ic_from_counts(t, {{"cat", 5}}), ValidationError);

    Taxonomy two({{"a", "a"}, {"b", "b"}, {"c", "c"}}, {{"c", "a", "isa"}, {"c", "b", "isa"}}, {{"w", {"c"}}});
    CHECK_THROWS_AS(ic_from_counts(two, {{"w", 1}}), ConfigError);
}

TEST_CASE("lowest superordinate") {
    auto t = toy();
    auto table = ic_from_counts(t, kFreq);
    CHECK(lso(t, "dog", "dog") == "dog");
    CHECK(lso(t, "animal", "plant") == "living");
    CHECK(lso(t, "dog", "tree") == "living");
    CHECK(lso(t, "tree", "object") == "object");
    CHECK(lso(t, "dog", "entity", &table) == "entity");

    // Ancestor intersection with the deepest element.
    for (const auto& a : t.nodes()) {
        for (const auto& b : t.nodes()) {
            auto aa = t.ancestors(a), bb = t.ancestors(b);
            std::string best;
            int depth = -1;
            double best_ic = -1;
            for (const auto& c : aa) {
                if (!bb.count(c)) continue;
                int d = t.depth(c);
                double i = table.ic(c);
                if (d > depth || (d == depth && i > best_ic)) {
                    best = c;
                    depth = d;
                    best_ic = i;
                }
            }
            CHECK(lso(t, a, b, &table) == best);
        }
    }
}

TEST_CASE("Resnik, Jiang-Conrath and Lin against the spreadsheet") {
    auto t = toy();
    auto table = ic_from_counts(t, kFreq);
    CHECK(std::fabs(resnik(t, "dog", "tree", table) - ic("living")) < 1e-9);
    CHECK(std::fabs(jiang_conrath(t, "dog", "tree", table) - (ic("dog") + ic("tree") - 2 * ic("living"))) < 1e-9);
    CHECK(std::fabs(lin_taxonomy(t, "dog", "tree", table) - 2 * ic("living") / (ic("dog") + ic("tree"))) < 1e-9);
    CHECK(std::fabs(resnik(t, "dog", "animal", table) - ic("animal")) < 1e-9);
    CHECK(std::fabs(jiang_conrath(t, "dog", "animal", table) - (ic("dog") - ic("animal"))) < 1e-9);
    CHECK(std::fabs(lin_taxonomy(t, "dog", "animal", table) - 2 * ic("animal") / (ic("dog") + ic("animal"))) <
          1e-9);
    CHECK(std::fabs(jiang_conrath(t, "animal", "plant", table) - (ic("animal") + ic("plant") - 2 * ic("living"))) <
          1e-9);
    CHECK(resnik(t, "object", "entity", table) == 0.0);
    CHECK(resnik(t, "dog", "entity", table) == 0.0);
    CHECK(lin_taxonomy(t, "object", "entity", table) == 1.0);

    for (const auto& a : t.nodes()) {
        CHECK(jiang_conrath(t, a, a, table) == 0.0);
        CHECK(lin_taxonomy(t, a, a, table) == 1.0);
        for (const auto& b : t.nodes()) {
            CHECK(resnik(t, a, b, table) == resnik(t, b, a, table));
            CHECK(jiang_conrath(t, a, b, table) == doctest::Approx(jiang_conrath(t, b, a, table)));
            CHECK(jiang_conrath(t, a, b, table) >= 0);
            double l = lin_taxonomy(t, a, b, table);
            CHECK(l == doctest::Approx(lin_taxonomy(t, b, a, table)));
            CHECK(l >= 0);
            CHECK(l <= 1);
        }
    }
    ICTable partial({{"dog", {0.5, 1.0, false}}}, 2.0, 4);
    CHECK_THROWS_AS(resnik(t, "dog", "tree", partial), MissingRowError);
}

TEST_CASE("measure dispatch and word-level scores") {
    auto t = toy();
    auto table = ic_from_counts(t, kFreq);
    CHECK(taxo_measure(t, TaxoMeasure::hs, "dog", "tree", nullptr) == 7);
    CHECK(taxo_measure(t, TaxoMeasure::rada, "dog", "plant", nullptr) == 2);
    CHECK(taxo_measure(t, TaxoMeasure::res, "dog", "tree", &table) == resnik(t, "dog", "tree", table));
    CHECK_THROWS_AS(taxo_measure(t, TaxoMeasure::jc, "dog", "tree", nullptr), ConfigError);
    CHECK(taxo_is_distance(TaxoMeasure::jc));
    CHECK(taxo_is_distance(TaxoMeasure::rada));
    CHECK_FALSE(taxo_is_distance(TaxoMeasure::lin));
    for (TaxoMeasure m : {TaxoMeasure::hs, TaxoMeasure::lc, TaxoMeasure::rada, TaxoMeasure::res, TaxoMeasure::jc,
                          TaxoMeasure::lin}) {
        CHECK(parse_taxo_measure(to_string(m)) == m);
    }
    CHECK_THROWS_AS(parse_taxo_measure("wup"), ConfigError);

    // bark maps to dog and tree; the closest pairing with hound is dog-dog.
    CHECK(taxo_word_measure(t, TaxoMeasure::res, "bark", "hound", &table) == doctest::Approx(ic("dog")));
    CHECK(taxo_word_measure(t, TaxoMeasure::jc, "bark", "hound", &table) == 0.0);
    CHECK(taxo_word_measure(t, TaxoMeasure::rada, "bark", "plant", &table) == 1);
    CHECK_THROWS_AS(taxo_word_measure(t, TaxoMeasure::res, "cat", "dog", &table), OutOfVocabularyError);
}

TEST_CASE("IC files round-trip") {
    auto t = toy();
    auto table = ic_from_counts(t, {{"hound", 5}, {"oak", 3}});
    std::stringstream buf;
    save_ic(table, buf);
    auto back = load_ic(buf);
    CHECK(back.total() == table.total());
    CHECK(back.log_base() == table.log_base());
    REQUIRE(back.entries().size() == table.entries().size());
    for (const auto& [c, e] : table.entries()) {
        CHECK(back.prob(c) == e.prob);
        CHECK(back.ic(c) == e.ic);
        CHECK(back.at(c).floored == e.floored);
    }
    std::istringstream bad("#ic\tlog_base=2\ttotal=3\ndog\t1.5\t0\t0\n");
    CHECK_THROWS_AS(load_ic(bad), ParseError);
}
