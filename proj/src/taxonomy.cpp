#include "distsem/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <tuple>

#include "distsem/error.hpp"
#include "distsem/text_io.hpp"

namespace distsem {

Taxonomy::Taxonomy(std::map<std::string, std::string> labels, std::vector<TaxonomyEdge> edges,
                   std::map<std::string, std::set<std::string>, std::less<>> word_map,
                   std::string hyponymy_relation)
    : hyponymy_(std::move(hyponymy_relation)), word_map_(std::move(word_map)) {
    if (labels.empty()) throw ValidationError("taxonomy has no nodes");
    for (auto& [id, label] : labels) {
        ids_.push_back(id);
        labels_.push_back(label);
    }
    std::sort(edges.begin(), edges.end(), [](const TaxonomyEdge& a, const TaxonomyEdge& b) {
        return std::tie(a.child, a.parent, a.relation) < std::tie(b.child, b.parent, b.relation);
    });
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](const TaxonomyEdge& a, const TaxonomyEdge& b) {
                                return a.child == b.child && a.parent == b.parent && a.relation == b.relation;
                            }),
                edges.end());
    edges_ = std::move(edges);

    std::set<std::string> rels;
    for (const auto& e : edges_) rels.insert(e.relation);
    relations_.assign(rels.begin(), rels.end());

    const std::size_t n = ids_.size();
    adjacency_.resize(n);
    hypernyms_.resize(n);
    std::vector<std::vector<std::uint32_t>> hyponyms(n);
    for (const auto& e : edges_) {
        if (e.relation.empty()) throw ValidationError("edge " + e.child + " -> " + e.parent + " has no relation");
        auto c = index_of(e.child), p = index_of(e.parent);
        if (!c) throw ValidationError("edge refers to unknown concept '" + e.child + "'");
        if (!p) throw ValidationError("edge refers to unknown concept '" + e.parent + "'");
        if (*c == *p) throw ValidationError("self edge on '" + e.child + "'");
        auto r = static_cast<std::uint32_t>(
            std::lower_bound(relations_.begin(), relations_.end(), e.relation) - relations_.begin());
        adjacency_[*c].push_back({*p, r});
        adjacency_[*p].push_back({*c, r});
        if (e.relation == hyponymy_) {
            hypernyms_[*c].push_back(*p);
            hyponyms[*p].push_back(*c);
        }
    }
    for (auto& adj : adjacency_) {
        std::sort(adj.begin(), adj.end(),
                  [](const Arc& a, const Arc& b) { return std::tie(a.to, a.relation) < std::tie(b.to, b.relation); });
    }
    for (auto& h : hypernyms_) {
        std::sort(h.begin(), h.end());
        h.erase(std::unique(h.begin(), h.end()), h.end());
    }

    // Longest-path depths in topological order; leftovers mean a cycle.
    depth_.assign(n, 0);
    std::vector<std::size_t> pending(n);
    std::vector<std::uint32_t> queue;
    for (std::uint32_t v = 0; v < n; ++v) {
        pending[v] = hypernyms_[v].size();
        if (pending[v] == 0) queue.push_back(v);
    }
    std::size_t seen = 0;
    while (seen < queue.size()) {
        std::uint32_t v = queue[seen++];
        for (std::uint32_t c : hyponyms[v]) {
            depth_[c] = std::max(depth_[c], depth_[v] + 1);
            if (--pending[c] == 0) queue.push_back(c);
        }
    }
    if (seen != n) throw ValidationError("hyponymy relation '" + hyponymy_ + "' contains a cycle");
    max_depth_ = *std::max_element(depth_.begin(), depth_.end());
    if (max_depth_ < 1) throw ValidationError("taxonomy depth must be at least 1");

    for (const auto& [word, concepts] : word_map_) {
        for (const auto& c : concepts) {
            if (!index_of(c)) throw ValidationError("word '" + word + "' maps to unknown concept '" + c + "'");
        }
    }
}

std::optional<std::uint32_t> Taxonomy::index_of(std::string_view id) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id,
                               [](const std::string& a, std::string_view b) { return a < b; });
    if (it == ids_.end() || *it != id) return std::nullopt;
    return static_cast<std::uint32_t>(it - ids_.begin());
}

std::uint32_t Taxonomy::require(std::string_view id) const {
    auto i = index_of(id);
    if (!i) throw OutOfVocabularyError("unknown concept '" + std::string(id) + "'");
    return *i;
}

const std::string& Taxonomy::label(std::string_view id) const { return labels_[require(id)]; }

std::vector<std::string> Taxonomy::roots() const {
    std::vector<std::string> out;
    for (std::uint32_t v = 0; v < ids_.size(); ++v) {
        if (hypernyms_[v].empty()) out.push_back(ids_[v]);
    }
    return out;
}

int Taxonomy::depth(std::string_view id) const { return depth_[require(id)]; }

std::vector<std::string> Taxonomy::parents(std::string_view id) const {
    std::vector<std::string> out;
    for (std::uint32_t p : hypernyms_[require(id)]) out.push_back(ids_[p]);
    return out;
}

std::set<std::string> Taxonomy::ancestors(std::string_view id) const {
    std::vector<bool> mark(ids_.size(), false);
    std::vector<std::uint32_t> stack{require(id)};
    mark[stack.back()] = true;
    while (!stack.empty()) {
        std::uint32_t v = stack.back();
        stack.pop_back();
        for (std::uint32_t p : hypernyms_[v]) {
            if (!mark[p]) {
                mark[p] = true;
                stack.push_back(p);
            }
        }
    }
    std::set<std::string> out;
    for (std::uint32_t v = 0; v < ids_.size(); ++v) {
        if (mark[v]) out.insert(ids_[v]);
    }
    return out;
}

std::set<std::string> Taxonomy::concepts_of(std::string_view word) const {
    auto it = word_map_.find(word);
    return it == word_map_.end() ? std::set<std::string>{} : it->second;
}

Taxonomy::Path Taxonomy::search(std::string_view c1, std::string_view c2, bool hyponymy_only) const {
    const std::uint32_t from = require(c1), to = require(c2);
    if (from == to) return {0, 0, {ids_[from]}};
    std::optional<std::uint32_t> only;
    if (hyponymy_only) {
        auto it = std::lower_bound(relations_.begin(), relations_.end(), hyponymy_);
        if (it == relations_.end() || *it != hyponymy_) throw NoPathError("taxonomy has no hyponymy edges");
        only = static_cast<std::uint32_t>(it - relations_.begin());
    }

    // Dijkstra over (node, last relation) ordered by (length, changes, node
    // sequence). Node ids follow lexicographic order, so comparing id vectors
    // compares node names.
    struct Label {
        int length;
        int changes;
        std::vector<std::uint32_t> nodes;
        std::uint32_t relation;
    };
    auto worse = [](const Label& a, const Label& b) {
        return std::tie(a.length, a.changes, a.nodes) > std::tie(b.length, b.changes, b.nodes);
    };
    std::priority_queue<Label, std::vector<Label>, decltype(worse)> queue(worse);
    const std::uint32_t none = static_cast<std::uint32_t>(relations_.size());
    std::vector<bool> done(ids_.size() * (relations_.size() + 1), false);
    queue.push({0, 0, {from}, none});
    while (!queue.empty()) {
        Label cur = queue.top();
        queue.pop();
        std::uint32_t v = cur.nodes.back();
        std::size_t state = static_cast<std::size_t>(v) * (relations_.size() + 1) + cur.relation;
        if (done[state]) continue;
        done[state] = true;
        if (v == to) {
            Path out{cur.length, cur.changes, {}};
            for (std::uint32_t k : cur.nodes) out.nodes.push_back(ids_[k]);
            return out;
        }
        for (const auto& arc : adjacency_[v]) {
            if (only && arc.relation != *only) continue;
            if (done[static_cast<std::size_t>(arc.to) * (relations_.size() + 1) + arc.relation]) continue;
            if (std::find(cur.nodes.begin(), cur.nodes.end(), arc.to) != cur.nodes.end()) continue;
            Label next{cur.length + 1, cur.changes + (cur.relation != none && cur.relation != arc.relation ? 1 : 0),
                       cur.nodes, arc.relation};
            next.nodes.push_back(arc.to);
            queue.push(std::move(next));
        }
    }
    throw NoPathError("no path between '" + std::string(c1) + "' and '" + std::string(c2) + "'");
}

Taxonomy Taxonomy::load(std::istream& in, std::string hyponymy_relation) {
    std::map<std::string, std::string> labels;
    std::vector<TaxonomyEdge> edges;
    std::map<std::string, std::set<std::string>, std::less<>> words;
    std::string line;
    std::size_t lineno = 0;
    while (io::next_line(in, line)) {
        ++lineno;
        if (line.empty() || io::is_manifest_line(line)) continue;
        auto f = io::split(line, '\t');
        if (f[0] == "NODE") {
            if (f.size() != 3 || f[1].empty()) throw ParseError(lineno, "expected NODE<TAB>id<TAB>label");
            if (!labels.emplace(std::string(f[1]), std::string(f[2])).second) {
                throw ParseError(lineno, "duplicate node '" + std::string(f[1]) + "'");
            }
        } else if (f[0] == "EDGE") {
            if (f.size() != 4 || f[1].empty() || f[2].empty() || f[3].empty()) {
                throw ParseError(lineno, "expected EDGE<TAB>child<TAB>parent<TAB>relation");
            }
            edges.push_back({std::string(f[1]), std::string(f[2]), std::string(f[3])});
        } else if (f[0] == "WORD") {
            if (f.size() != 3 || f[1].empty() || f[2].empty()) {
                throw ParseError(lineno, "expected WORD<TAB>word<TAB>concept_id");
            }
            words[std::string(f[1])].emplace(f[2]);
        } else {
            throw ParseError(lineno, "unknown record type '" + std::string(f[0]) + "'");
        }
    }
    try {
        return Taxonomy(std::move(labels), std::move(edges), std::move(words), std::move(hyponymy_relation));
    } catch (const ValidationError& e) {
        throw ParseError(lineno, e.what());
    }
}

TaxonomyPath shortest_path(const Taxonomy& t, std::string_view c1, std::string_view c2) {
    return t.search(c1, c2, false);
}

TaxonomyPath hyponymy_path(const Taxonomy& t, std::string_view c1, std::string_view c2) {
    return t.search(c1, c2, true);
}

int rada_distance(const Taxonomy& t, std::string_view c1, std::string_view c2) {
    return shortest_path(t, c1, c2).length;
}

double hirst_stonge(const Taxonomy& t, std::string_view c1, std::string_view c2, double C, double k) {
    TaxonomyPath p;
    try {
        p = shortest_path(t, c1, c2);
    } catch (const NoPathError&) {
        return 0.0;
    }
    return std::max(0.0, C - p.length - k * p.changes);
}

double leacock_chodorow(const Taxonomy& t, std::string_view c1, std::string_view c2, double log_base) {
    int len = std::max(hyponymy_path(t, c1, c2).length, 1);
    return -std::log(static_cast<double>(len) / (2.0 * t.max_depth())) / std::log(log_base);
}

// ---------------------------------------------------------------------------
// Information content

ICTable::ICTable(std::map<std::string, Entry, std::less<>> entries, double log_base, std::uint64_t total)
    : entries_(std::move(entries)), log_base_(log_base), total_(total) {}

const ICTable::Entry& ICTable::at(std::string_view id) const {
    auto it = entries_.find(id);
    if (it == entries_.end()) throw MissingRowError("no IC entry for concept '" + std::string(id) + "'");
    return it->second;
}

ICTable ic_from_counts(const Taxonomy& t, const std::map<std::string, std::uint64_t, std::less<>>& word_frequencies,
                       double log_base) {
    if (!(log_base > 0) || log_base == 1) throw ConfigError("log base must be positive and not 1");
    auto roots = t.roots();
    if (roots.size() != 1) throw ConfigError("information content needs a taxonomy with a single root");
    std::map<std::string, std::uint64_t, std::less<>> credit;
    std::uint64_t total = 0;
    for (const auto& [word, concepts] : t.word_map()) {
        auto it = word_frequencies.find(word);
        if (it == word_frequencies.end() || it->second == 0) continue;
        std::set<std::string> reached;
        for (const auto& c : concepts) {
            auto a = t.ancestors(c);
            reached.insert(a.begin(), a.end());
        }
        for (const auto& c : reached) credit[c] += it->second;
        total += it->second;
    }
    if (total == 0) throw ValidationError("no mapped taxonomy word has a nonzero frequency");
    std::map<std::string, ICTable::Entry, std::less<>> entries;
    for (const auto& id : t.nodes()) {
        auto it = credit.find(id);
        ICTable::Entry e{};
        if (it == credit.end()) {
            e.prob = 1.0 / (2.0 * static_cast<double>(total));
            e.floored = true;
        } else {
            e.prob = static_cast<double>(it->second) / static_cast<double>(total);
        }
        e.ic = std::max(0.0, -std::log(e.prob) / std::log(log_base));
        entries.emplace(id, e);
    }
    return ICTable(std::move(entries), log_base, total);
}

std::string lso(const Taxonomy& t, std::string_view c1, std::string_view c2, const ICTable* ic) {
    auto a1 = t.ancestors(c1);
    auto a2 = t.ancestors(c2);
    std::optional<std::string> best;
    int best_depth = -1;
    double best_ic = -std::numeric_limits<double>::infinity();
    for (const auto& c : a1) {
        if (!a2.count(c)) continue;
        int d = t.depth(c);
        double v = (ic && ic->contains(c)) ? ic->ic(c) : 0.0;
        // Ancestors come in id order, so strict comparisons keep the smallest id on ties.
        if (d > best_depth || (d == best_depth && v > best_ic)) {
            best = c;
            best_depth = d;
            best_ic = v;
        }
    }
    if (!best) throw NoPathError("'" + std::string(c1) + "' and '" + std::string(c2) + "' share no hypernym");
    return *best;
}

double resnik(const Taxonomy& t, std::string_view c1, std::string_view c2, const ICTable& ic) {
    return ic.ic(lso(t, c1, c2, &ic));
}

double jiang_conrath(const Taxonomy& t, std::string_view c1, std::string_view c2, const ICTable& ic) {
    double l = ic.ic(lso(t, c1, c2, &ic));
    return ic.ic(c1) + ic.ic(c2) - 2.0 * l;
}

double lin_taxonomy(const Taxonomy& t, std::string_view c1, std::string_view c2, const ICTable& ic) {
    double l = ic.ic(lso(t, c1, c2, &ic));
    double s = ic.ic(c1) + ic.ic(c2);
    if (s == 0) return 1.0;
    return 2.0 * l / s;
}

// ---------------------------------------------------------------------------
// Dispatch

namespace {

constexpr std::pair<TaxoMeasure, std::string_view> kTaxoNames[] = {
    {TaxoMeasure::hs, "hs"},   {TaxoMeasure::lc, "lc"}, {TaxoMeasure::rada, "rada"},
    {TaxoMeasure::res, "res"}, {TaxoMeasure::jc, "jc"}, {TaxoMeasure::lin, "lin"},
};

}  // namespace

std::string_view to_string(TaxoMeasure m) {
    for (const auto& [id, name] : kTaxoNames) {
        if (id == m) return name;
    }
    return "?";
}

TaxoMeasure parse_taxo_measure(std::string_view name) {
    for (const auto& [id, n] : kTaxoNames) {
        if (n == name) return id;
    }
    throw ConfigError("unknown taxonomy measure '" + std::string(name) + "' (hs, lc, rada, res, jc, lin)");
}

bool taxo_is_distance(TaxoMeasure m) { return m == TaxoMeasure::rada || m == TaxoMeasure::jc; }

double taxo_measure(const Taxonomy& t, TaxoMeasure m, std::string_view c1, std::string_view c2, const ICTable* ic,
                    const TaxoConfig& config) {
    auto need_ic = [&]() -> const ICTable& {
        if (!ic) throw ConfigError("measure '" + std::string(to_string(m)) + "' needs an IC table");
        return *ic;
    };
    switch (m) {
        case TaxoMeasure::hs: return hirst_stonge(t, c1, c2, config.hs_C, config.hs_k);
        case TaxoMeasure::lc: return leacock_chodorow(t, c1, c2, config.log_base);
        case TaxoMeasure::rada: return rada_distance(t, c1, c2);
        case TaxoMeasure::res: return resnik(t, c1, c2, need_ic());
        case TaxoMeasure::jc: return jiang_conrath(t, c1, c2, need_ic());
        case TaxoMeasure::lin: return lin_taxonomy(t, c1, c2, need_ic());
    }
    throw ConfigError("unknown taxonomy measure");
}

double taxo_word_measure(const Taxonomy& t, TaxoMeasure m, std::string_view w1, std::string_view w2,
                         const ICTable* ic, const TaxoConfig& config) {
    auto s1 = t.concepts_of(w1), s2 = t.concepts_of(w2);
    if (s1.empty()) throw OutOfVocabularyError("word '" + std::string(w1) + "' maps to no concept");
    if (s2.empty()) throw OutOfVocabularyError("word '" + std::string(w2) + "' maps to no concept");
    const bool distance = taxo_is_distance(m);
    std::optional<double> best;
    for (const auto& a : s1) {
        for (const auto& b : s2) {
            double v;
            try {
                v = taxo_measure(t, m, a, b, ic, config);
            } catch (const NoPathError&) {
                continue;
            }
            if (!best || (distance ? v < *best : v > *best)) best = v;
        }
    }
    if (!best) throw NoPathError("no concept pair of '" + std::string(w1) + "' and '" + std::string(w2) + "' is connected");
    return *best;
}

// ---------------------------------------------------------------------------
// Serialization

void save_ic(const ICTable& ic, std::ostream& out) {
    out << "#ic\tlog_base=" << io::format_real(ic.log_base()) << "\ttotal=" << ic.total() << '\n';
    for (const auto& [c, e] : ic.entries()) {
        out << c << '\t' << io::format_real(e.prob) << '\t' << io::format_real(e.ic) << '\t' << (e.floored ? 1 : 0)
            << '\n';
    }
}

ICTable load_ic(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    double log_base = 2.0;
    std::uint64_t total = 0;
    std::map<std::string, ICTable::Entry, std::less<>> entries;
    while (io::next_line(in, line)) {
        ++lineno;
        if (line.empty() || io::is_manifest_line(line)) continue;
        auto f = io::split(line, '\t');
        if (f[0] == "#ic") {
            header = true;
            for (std::size_t k = 1; k < f.size(); ++k) {
                auto eq = f[k].find('=');
                if (eq == std::string_view::npos) throw ParseError(lineno, "malformed header field");
                auto key = f[k].substr(0, eq), value = f[k].substr(eq + 1);
                if (key == "log_base") log_base = io::parse_real(value, lineno);
                if (key == "total") total = io::parse_count(value, lineno);
            }
            continue;
        }
        if (!header) throw ParseError(lineno, "missing #ic header");
        if (f.size() != 4 || f[0].empty()) throw ParseError(lineno, "expected concept<TAB>prob<TAB>ic<TAB>floored");
        ICTable::Entry e{io::parse_real(f[1], lineno), io::parse_real(f[2], lineno), f[3] == "1"};
        if (!(e.prob > 0 && e.prob <= 1)) throw ParseError(lineno, "probability outside (0, 1]");
        if (!entries.emplace(std::string(f[0]), e).second) throw ParseError(lineno, "duplicate concept");
    }
    if (!header) throw ParseError(lineno + 1, "missing #ic header");
    return ICTable(std::move(entries), log_base, total);
}

}  // namespace distsem
