#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace distsem {

inline constexpr std::string_view kHyponymyRelation = "isa";

struct TaxonomyEdge {
    std::string child;
    std::string parent;
    std::string relation;
};

// Typed concept graph. Edges labelled with the hyponymy relation form the
// hypernym hierarchy (a DAG); every edge type takes part in path search.
class Taxonomy {
public:
    Taxonomy() = default;
    Taxonomy(std::map<std::string, std::string> labels, std::vector<TaxonomyEdge> edges,
             std::map<std::string, std::set<std::string>, std::less<>> word_map,
             std::string hyponymy_relation = std::string(kHyponymyRelation));

    const std::vector<std::string>& nodes() const { return ids_; }
    bool contains(std::string_view id) const { return index_of(id).has_value(); }
    const std::string& label(std::string_view id) const;
    const std::vector<TaxonomyEdge>& edges() const { return edges_; }
    const std::string& hyponymy_relation() const { return hyponymy_; }
    // Nodes without a hypernym, sorted.
    std::vector<std::string> roots() const;
    // Longest root-to-node chain of hyponymy edges.
    int depth(std::string_view id) const;
    // Maximum depth over all nodes.
    int max_depth() const { return max_depth_; }
    std::vector<std::string> parents(std::string_view id) const;
    // `id` and every hypernym above it, sorted.
    std::set<std::string> ancestors(std::string_view id) const;
    // Concepts a word maps to; empty if unmapped.
    std::set<std::string> concepts_of(std::string_view word) const;
    const std::map<std::string, std::set<std::string>, std::less<>>& word_map() const { return word_map_; }

    // NODE<TAB>id<TAB>label, EDGE<TAB>child<TAB>parent<TAB>relation, WORD<TAB>word<TAB>concept_id.
    static Taxonomy load(std::istream& in, std::string hyponymy_relation = std::string(kHyponymyRelation));

    // Path search backing shortest_path / hyponymy_path.
    struct Path {
        int length = 0;
        int changes = 0;
        std::vector<std::string> nodes;
    };
    Path search(std::string_view c1, std::string_view c2, bool hyponymy_only) const;

private:
    std::optional<std::uint32_t> index_of(std::string_view id) const;
    std::uint32_t require(std::string_view id) const;

    struct Arc {
        std::uint32_t to;
        std::uint32_t relation;
    };

    std::vector<std::string> ids_;  // sorted
    std::vector<std::string> labels_;
    std::vector<TaxonomyEdge> edges_;
    std::vector<std::string> relations_;       // distinct labels, sorted
    std::vector<std::vector<Arc>> adjacency_;  // undirected, all relations
    std::vector<std::vector<std::uint32_t>> hypernyms_;
    std::vector<int> depth_;
    int max_depth_ = 0;
    std::string hyponymy_;
    std::map<std::string, std::set<std::string>, std::less<>> word_map_;
};

// length in edges; changes = consecutive edges with different relation labels.
using TaxonomyPath = Taxonomy::Path;

// Shortest path over every edge type, both directions. Among equal lengths the
// fewest relation changes wins, then the lexicographically smallest node sequence.
TaxonomyPath shortest_path(const Taxonomy& t, std::string_view c1, std::string_view c2);

// Same search restricted to hyponymy edges.
TaxonomyPath hyponymy_path(const Taxonomy& t, std::string_view c1, std::string_view c2);

// Edge-counting distance over the whole graph.
int rada_distance(const Taxonomy& t, std::string_view c1, std::string_view c2);

// C - length - k * changes, floored at 0; 0 when no path exists.
double hirst_stonge(const Taxonomy& t, std::string_view c1, std::string_view c2, double C = 8.0, double k = 1.0);

// -log(len / 2D) over the hyponymy path, len = max(edges, 1).
double leacock_chodorow(const Taxonomy& t, std::string_view c1, std::string_view c2, double log_base = 2.0);

class ICTable {
public:
    struct Entry {
        double prob;
        double ic;
        bool floored;  // no corpus credit; prob set to 1 / (2 * total)
    };

    ICTable() = default;
    ICTable(std::map<std::string, Entry, std::less<>> entries, double log_base, std::uint64_t total);

    const Entry& at(std::string_view id) const;
    bool contains(std::string_view id) const { return entries_.find(id) != entries_.end(); }
    double ic(std::string_view id) const { return at(id).ic; }
    double prob(std::string_view id) const { return at(id).prob; }
    double log_base() const { return log_base_; }
    std::uint64_t total() const { return total_; }
    const std::map<std::string, Entry, std::less<>>& entries() const { return entries_; }

private:
    std::map<std::string, Entry, std::less<>> entries_;
    double log_base_ = 2.0;
    std::uint64_t total_ = 0;
};

// Each occurrence of a mapped word credits the union of its concepts and their
// hypernyms once. Requires a single root.
ICTable ic_from_counts(const Taxonomy& t, const std::map<std::string, std::uint64_t, std::less<>>& word_frequencies,
                       double log_base = 2.0);

// Deepest common hypernym (including the concepts themselves); ties go to the
// larger IC when a table is given, then to the smallest id.
std::string lso(const Taxonomy& t, std::string_view c1, std::string_view c2, const ICTable* ic = nullptr);

double resnik(const Taxonomy& t, std::string_view c1, std::string_view c2, const ICTable& ic);
double jiang_conrath(const Taxonomy& t, std::string_view c1, std::string_view c2, const ICTable& ic);
double lin_taxonomy(const Taxonomy& t, std::string_view c1, std::string_view c2, const ICTable& ic);

enum class TaxoMeasure { hs, lc, rada, res, jc, lin };

std::string_view to_string(TaxoMeasure m);
TaxoMeasure parse_taxo_measure(std::string_view name);
// Closeness for everything except rada and jc.
bool taxo_is_distance(TaxoMeasure m);

struct TaxoConfig {
    double log_base = 2.0;
    double hs_C = 8.0;
    double hs_k = 1.0;
};

double taxo_measure(const Taxonomy& t, TaxoMeasure m, std::string_view c1, std::string_view c2,
                    const ICTable* ic, const TaxoConfig& config = {});

// Word-level score: the closest value over all concept pairs of the two words.
double taxo_word_measure(const Taxonomy& t, TaxoMeasure m, std::string_view w1, std::string_view w2,
                         const ICTable* ic, const TaxoConfig& config = {});

void save_ic(const ICTable& ic, std::ostream& out);
ICTable load_ic(std::istream& in);

}  // namespace distsem
