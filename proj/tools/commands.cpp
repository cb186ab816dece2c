#include "commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "distsem/assoc.hpp"
#include "distsem/concept.hpp"
#include "distsem/corpus.hpp"
#include "distsem/error.hpp"
#include "distsem/eval.hpp"
#include "distsem/measures.hpp"
#include "distsem/profile.hpp"
#include "distsem/taxonomy.hpp"
#include "distsem/text_io.hpp"

namespace fs = std::filesystem;
using namespace distsem;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string content_hash(const std::string& bytes) {
    StreamDigest d;
    d.update(bytes);
    return d.hex();
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    return in;
}

// Provenance block written ahead of every result; readers skip "##" lines.
struct Manifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> inputs;  // path, hash
    std::vector<std::pair<std::string, std::string>> config;

    void input(const std::string& path) { inputs.emplace_back(path, content_hash(read_file(path))); }
    void input(const std::string& path, const std::string& bytes) { inputs.emplace_back(path, content_hash(bytes)); }
    void set(std::string key, std::string value) { config.emplace_back(std::move(key), std::move(value)); }

    void write(std::ostream& out) const {
        out << "##distsem\t" << kVersion << '\n';
        out << "##command\t" << command << '\n';
        for (const auto& [p, h] : inputs) out << "##input\t" << p << '\t' << h << '\n';
        for (const auto& [k, v] : config) out << "##config\t" << k << '=' << v << '\n';
    }
};

void emit(const std::string& out_path, const Manifest& manifest, const std::string& body) {
    std::ostringstream full;
    manifest.write(full);
    full << body;
    if (out_path.empty()) {
        std::cout << full.str();
        std::cout.flush();
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + out_path + "'");
    out << full.str();
}

// ---------------------------------------------------------------------------
// Shared option groups

struct CorpusOptions {
    std::vector<std::string> corpus;
    std::string doc_per = "file";
    int window = 5;
    std::string boundaries = "document";
    int min_freq = 1;
    bool no_lowercase = false;
    unsigned threads = 1;
    std::string triples;
    std::vector<std::string> relations;
    std::string counts;
    std::string cache_dir;

    CorpusConfig config() const {
        CorpusConfig c;
        c.window_radius = window;
        c.lowercase = !no_lowercase;
        c.respect_boundaries = parse_boundary(boundaries);
        c.min_token_frequency = min_freq;
        c.validate();
        return c;
    }

    void validate(bool allow_counts = true, bool allow_triples = true) const {
        int sources = (!corpus.empty()) + (!triples.empty()) + (!counts.empty());
        if (sources != 1) {
            std::string what = "exactly one of --corpus";
            if (allow_triples) what += ", --triples";
            if (allow_counts) what += ", --counts";
            throw ValidationError(what + " is required");
        }
        if (doc_per != "file" && doc_per != "line") throw ConfigError("--doc-per must be 'file' or 'line'");
        if (threads < 1) throw ConfigError("--threads must be >= 1");
        if (!relations.empty() && triples.empty()) throw ConfigError("--relations only applies to --triples");
        config();
    }
};

void add_corpus_options(CLI::App* app, CorpusOptions& o, bool allow_counts = true, bool allow_triples = true) {
    app->add_option("--corpus", o.corpus, "UTF-8 text files")->check(CLI::ExistingFile);
    app->add_option("--doc-per", o.doc_per, "file: one document per file; line: one per line")
        ->capture_default_str();
    app->add_option("--window", o.window, "window radius in tokens")->capture_default_str();
    app->add_option("--boundaries", o.boundaries, "document, sentence or none")->capture_default_str();
    app->add_option("--min-freq", o.min_freq, "minimum token frequency")->capture_default_str();
    app->add_flag("--no-lowercase", o.no_lowercase, "keep case");
    app->add_option("--threads", o.threads, "worker cap for counting")->capture_default_str();
    if (allow_triples) {
        app->add_option("--triples", o.triples, "head<TAB>relation<TAB>dependent file")->check(CLI::ExistingFile);
        app->add_option("--relations", o.relations, "closed relation label set for --triples")->delimiter(',');
    }
    if (allow_counts) app->add_option("--counts", o.counts, "previously saved counts")->check(CLI::ExistingFile);
    app->add_option("--cache-dir", o.cache_dir, "reuse counts keyed by input hash");
}

std::vector<std::string> read_documents(const CorpusOptions& o, Manifest& m) {
    std::vector<std::string> docs;
    for (const auto& path : o.corpus) {
        std::string bytes = read_file(path);
        m.input(path, bytes);
        if (o.doc_per == "file") {
            docs.push_back(std::move(bytes));
            continue;
        }
        std::istringstream in(bytes);
        std::string line;
        while (io::next_line(in, line)) {
            if (!line.empty()) docs.push_back(line);
        }
    }
    return docs;
}

void describe_corpus(const CorpusOptions& o, Manifest& m) {
    if (!o.corpus.empty()) {
        m.set("corpus", o.config().describe());
        m.set("doc_per", o.doc_per);
    }
}

std::string cache_key(const std::string& kind, const Manifest& m) {
    StreamDigest d;
    d.update(kind);
    for (const auto& [p, h] : m.inputs) {
        d.update("\n");
        d.update(h);
    }
    for (const auto& [k, v] : m.config) {
        d.update("\n");
        d.update(k + "=" + v);
    }
    return d.hex();
}

void save_cached(const fs::path& path, const std::function<void(std::ostream&)>& write) {
    fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw ValidationError("cannot write cache file '" + tmp.string() + "'");
        write(out);
    }
    fs::rename(tmp, path);
}

CooccurrenceCounts obtain_counts(const CorpusOptions& o, Manifest& m) {
    if (!o.counts.empty()) {
        m.input(o.counts);
        auto in = open_input(o.counts);
        return load_counts(in);
    }
    if (!o.triples.empty()) {
        m.input(o.triples);
        std::optional<std::set<std::string>> declared;
        if (!o.relations.empty()) declared = std::set<std::string>(o.relations.begin(), o.relations.end());
        auto in = open_input(o.triples);
        return ingest_triples(in, declared);
    }
    auto docs = read_documents(o, m);
    describe_corpus(o, m);
    fs::path cached;
    if (!o.cache_dir.empty()) {
        cached = fs::path(o.cache_dir) / ("counts-" + cache_key("counts", m) + ".tsv");
        if (fs::exists(cached)) {
            std::ifstream in(cached, std::ios::binary);
            return load_counts(in);
        }
    }
    auto counts = count_documents(docs, o.config(), o.threads);
    if (!cached.empty()) save_cached(cached, [&](std::ostream& out) { save_counts(counts, out); });
    return counts;
}

struct MeasureOptions {
    std::string measure = "cos";
    double log_base = 2.0;
    double alpha = 0.99;
    double gamma = 0.5;
    double beta = 0.5;
    double epsilon = 1e-8;
    std::string weight = "None";
    std::string crm_kind = "token";
    std::string crm_penalty = "add";
    std::vector<std::string> hindle_relations;
    int min_feature_freq = 1;

    MeasureId id() const { return parse_measure(measure); }

    MeasureConfig config() const {
        MeasureConfig c;
        c.log_base = log_base;
        c.alpha = alpha;
        c.gamma = gamma;
        c.beta = beta;
        c.epsilon = epsilon;
        c.weight = parse_weight(weight);
        c.crm_kind = parse_crm_kind(crm_kind);
        c.crm_penalty = parse_crm_penalty(crm_penalty);
        if (!hindle_relations.empty()) {
            c.hindle_relations = std::set<std::string>(hindle_relations.begin(), hindle_relations.end());
        }
        c.validate();
        return c;
    }

    ProfileConfig profile_config() const {
        if (min_feature_freq < 1) throw ConfigError("--min-feature-freq must be >= 1");
        ProfileConfig p;
        p.min_feature_frequency = min_feature_freq;
        p.log_base = log_base;
        return p;
    }

    void validate() const {
        id();
        config();
        profile_config();
    }

    void describe(Manifest& m) const {
        auto c = config();
        m.set("measure", std::string(info(id()).name));
        m.set("log_base", io::format_real(c.log_base));
        m.set("alpha", io::format_real(c.alpha));
        m.set("gamma", io::format_real(c.gamma));
        m.set("beta", io::format_real(c.beta));
        m.set("epsilon", io::format_real(c.epsilon));
        m.set("weight", std::string(to_string(c.weight)));
        m.set("crm", crm_kind + "/" + crm_penalty);
        std::string rels;
        for (const auto& r : c.hindle_relations) rels += (rels.empty() ? "" : ",") + r;
        m.set("hindle_relations", rels);
        m.set("min_feature_freq", std::to_string(min_feature_freq));
    }
};

void add_measure_options(CLI::App* app, MeasureOptions& o) {
    app->add_option("--measure", o.measure, "measure name")->capture_default_str();
    app->add_option("--log-base", o.log_base, "logarithm base")->capture_default_str();
    app->add_option("--alpha", o.alpha, "skew divergence weight")->capture_default_str();
    app->add_option("--gamma", o.gamma, "CRM harmonic-mean weight")->capture_default_str();
    app->add_option("--beta", o.beta, "CRM precision weight")->capture_default_str();
    app->add_option("--epsilon", o.epsilon, "zero-probability replacement")->capture_default_str();
    app->add_option("--weight", o.weight, "None, AvgWt or MaxWt")->capture_default_str();
    app->add_option("--crm-kind", o.crm_kind, "type, token or mi")->capture_default_str();
    app->add_option("--crm-penalty", o.crm_penalty, "add or dw")->capture_default_str();
    app->add_option("--hindle-relations", o.hindle_relations, "relations used by hindle_rel")->delimiter(',');
    app->add_option("--min-feature-freq", o.min_feature_freq, "drop rarer profile features")->capture_default_str();
}

std::string score_line(const Score& s) {
    return io::format_real(s.value) + '\t' + (s.flagged ? "flagged" : "ok");
}

// Sense inventory options used by the concept-level commands.
struct SenseOptions {
    std::string thesaurus;
    std::string lexicon;

    void validate() const {
        if (thesaurus.empty()) throw ValidationError("--thesaurus is required");
    }
};

void add_sense_options(CLI::App* app, SenseOptions& o) {
    app->add_option("--thesaurus", o.thesaurus, "category_id<TAB>label<TAB>words file")->check(CLI::ExistingFile);
    app->add_option("--lexicon", o.lexicon, "source<TAB>target bilingual lexicon")->check(CLI::ExistingFile);
}

struct LoadedSenses {
    Thesaurus thesaurus;
    std::optional<BilingualLexicon> lexicon;
    SenseInventory inventory;
};

LoadedSenses load_senses(const SenseOptions& o, Manifest& m) {
    LoadedSenses s;
    m.input(o.thesaurus);
    auto tin = open_input(o.thesaurus);
    s.thesaurus = Thesaurus::load(tin);
    if (!o.lexicon.empty()) {
        m.input(o.lexicon);
        auto lin = open_input(o.lexicon);
        s.lexicon = BilingualLexicon::load(lin);
        if (s.lexicon->empty()) throw ConfigError("empty bilingual lexicon");
        s.inventory = SenseInventory::crosslingual(*s.lexicon, s.thesaurus);
    } else {
        s.inventory = SenseInventory::monolingual(s.thesaurus);
    }
    return s;
}

Wccm load_wccm_file(const std::string& path, Manifest& m) {
    m.input(path);
    auto in = open_input(path);
    return load_wccm(in);
}

std::string render_rank(const RankResult& r, const BenchmarkSet& b) {
    std::ostringstream out;
    out << "rank\tword1\tword2\thuman\tscore\tflag\n";
    std::size_t k = 1;
    for (const auto& p : r.ranked) {
        out << k++ << '\t' << p.word1 << '\t' << p.word2 << '\t' << io::format_real(p.human) << '\t'
            << io::format_real(p.score) << '\t' << (p.flagged ? "flagged" : "ok") << '\n';
    }
    for (std::size_t i : r.skipped) {
        const auto& p = b.pairs[i];
        out << "-\t" << p.word1 << '\t' << p.word2 << '\t' << io::format_real(p.score) << "\t-\tskipped\n";
    }
    return out.str();
}

BenchmarkSet load_benchmark_file(const std::string& path, Manifest& m) {
    m.input(path);
    auto in = open_input(path);
    return load_benchmark(in, fs::path(path).stem().string());
}

// Word-level scoring from counts, or concept-level scoring when a WCCM is given.
struct Scoring {
    std::optional<CooccurrenceCounts> counts;
    std::optional<Wccm> wccm;
    std::optional<LoadedSenses> senses;
    std::unique_ptr<ProfileScorer> word;
    std::unique_ptr<ConceptScorer> concept_scorer;

    PairScorer scorer() {
        if (word) return [this](std::string_view a, std::string_view b) { return (*word)(a, b); };
        return [this](std::string_view a, std::string_view b) { return (*concept_scorer)(a, b); };
    }
};

void add_scoring_options(CLI::App* app, CorpusOptions& corpus, MeasureOptions& measure, SenseOptions& senses,
                         std::string& wccm) {
    add_corpus_options(app, corpus);
    add_measure_options(app, measure);
    add_sense_options(app, senses);
    app->add_option("--wccm", wccm, "score concepts from this WCCM instead of words")->check(CLI::ExistingFile);
}

void validate_scoring(const CorpusOptions& corpus, const MeasureOptions& measure, const SenseOptions& senses,
                      const std::string& wccm) {
    measure.validate();
    if (wccm.empty()) {
        corpus.validate();
    } else {
        senses.validate();
    }
}

std::unique_ptr<Scoring> build_scoring(const CorpusOptions& corpus, const MeasureOptions& measure,
                                       const SenseOptions& senses, const std::string& wccm, Manifest& m) {
    auto s = std::make_unique<Scoring>();
    if (wccm.empty()) {
        s->counts = obtain_counts(corpus, m);
        s->word = std::make_unique<ProfileScorer>(*s->counts, measure.id(), measure.config(), measure.profile_config());
    } else {
        s->wccm = load_wccm_file(wccm, m);
        s->senses = load_senses(senses, m);
        s->concept_scorer = std::make_unique<ConceptScorer>(*s->wccm, s->senses->inventory, measure.id(),
                                                            measure.config());
    }
    measure.describe(m);
    return s;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Distributional and taxonomy-based semantic distance toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    std::string out_path;

    Manifest manifest;
    std::function<std::string()> action;
    std::function<void()> check;

    // count
    CorpusOptions count_o;
    auto* count = app.add_subcommand("count", "co-occurrence counts from a corpus or triples");
    add_corpus_options(count, count_o, false);
    count->add_option("--out", out_path, "output file");
    count->callback([&] {
        check = [&] { count_o.validate(false); };
        action = [&] {
            auto counts = obtain_counts(count_o, manifest);
            std::ostringstream out;
            save_counts(counts, out);
            return out.str();
        };
    });

    // profile
    CorpusOptions prof_c;
    MeasureOptions prof_m;
    std::string prof_target, prof_soa = "CP";
    auto* profile = app.add_subcommand("profile", "distributional profile of one word");
    add_corpus_options(profile, prof_c);
    profile->add_option("--target", prof_target, "target word")->required();
    profile->add_option("--soa", prof_soa, "CP, PMI, Phi, Odds, Dice, Yule or Cos")->capture_default_str();
    profile->add_option("--log-base", prof_m.log_base, "logarithm base")->capture_default_str();
    profile->add_option("--min-feature-freq", prof_m.min_feature_freq, "drop rarer features")->capture_default_str();
    profile->add_option("--out", out_path, "output file");
    profile->callback([&] {
        check = [&] {
            prof_c.validate();
            parse_soa(prof_soa);
            prof_m.profile_config();
        };
        action = [&] {
            auto counts = obtain_counts(prof_c, manifest);
            manifest.set("soa", std::string(to_string(parse_soa(prof_soa))));
            manifest.set("log_base", io::format_real(prof_m.log_base));
            manifest.set("min_feature_freq", std::to_string(prof_m.min_feature_freq));
            auto p = build_profile(counts, prof_target, parse_soa(prof_soa), prof_m.profile_config());
            std::ostringstream out;
            save_profile(p, out);
            return out.str();
        };
    });

    // distance
    CorpusOptions dist_c;
    MeasureOptions dist_m;
    std::string dist_w1, dist_w2, dist_p1, dist_p2;
    auto* distance = app.add_subcommand("distance", "one measure between two words or two saved profiles");
    add_corpus_options(distance, dist_c);
    add_measure_options(distance, dist_m);
    distance->add_option("--w1", dist_w1, "first word");
    distance->add_option("--w2", dist_w2, "second word");
    distance->add_option("--profile1", dist_p1, "first saved profile")->check(CLI::ExistingFile);
    distance->add_option("--profile2", dist_p2, "second saved profile")->check(CLI::ExistingFile);
    distance->add_option("--out", out_path, "output file");
    distance->callback([&] {
        check = [&] {
            dist_m.validate();
            bool words = !dist_w1.empty() || !dist_w2.empty();
            bool profiles = !dist_p1.empty() || !dist_p2.empty();
            if (words == profiles) throw ValidationError("give either --w1/--w2 or --profile1/--profile2");
            if (words) {
                if (dist_w1.empty() || dist_w2.empty()) throw ValidationError("--w1 and --w2 are both required");
                dist_c.validate();
            } else if (dist_p1.empty() || dist_p2.empty()) {
                throw ValidationError("--profile1 and --profile2 are both required");
            }
        };
        action = [&] {
            std::optional<DistributionalProfile> a, b;
            std::string n1 = dist_w1, n2 = dist_w2;
            if (!dist_p1.empty()) {
                manifest.input(dist_p1);
                manifest.input(dist_p2);
                auto i1 = open_input(dist_p1);
                auto i2 = open_input(dist_p2);
                a = load_profile(i1);
                b = load_profile(i2);
                n1 = a->target();
                n2 = b->target();
            } else {
                auto counts = obtain_counts(dist_c, manifest);
                SoAKind kind = required_soa(dist_m.id(), dist_m.config());
                a = build_profile(counts, dist_w1, kind, dist_m.profile_config());
                b = build_profile(counts, dist_w2, kind, dist_m.profile_config());
            }
            dist_m.describe(manifest);
            Score s = compute(dist_m.id(), *a, *b, dist_m.config());
            std::ostringstream out;
            out << "word1\tword2\tmeasure\tvalue\tflag\n";
            out << n1 << '\t' << n2 << '\t' << info(dist_m.id()).name << '\t' << score_line(s) << '\n';
            return out.str();
        };
    });

    // rank
    CorpusOptions rank_c;
    MeasureOptions rank_m;
    SenseOptions rank_s;
    std::string rank_wccm, rank_bench;
    auto* rank = app.add_subcommand("rank", "rank benchmark pairs by a measure");
    add_scoring_options(rank, rank_c, rank_m, rank_s, rank_wccm);
    rank->add_option("--benchmark", rank_bench, "word1,word2,score CSV")->required()->check(CLI::ExistingFile);
    rank->add_option("--out", out_path, "output file");
    rank->callback([&] {
        check = [&] { validate_scoring(rank_c, rank_m, rank_s, rank_wccm); };
        action = [&] {
            auto bench = load_benchmark_file(rank_bench, manifest);
            auto scoring = build_scoring(rank_c, rank_m, rank_s, rank_wccm, manifest);
            auto result = rank_pairs(bench, scoring->scorer(), info(rank_m.id()).orientation);
            return render_rank(result, bench);
        };
    });

    // eval
    CorpusOptions eval_c;
    MeasureOptions eval_m;
    SenseOptions eval_s;
    std::string eval_wccm, eval_bench, eval_choice;
    auto* ev = app.add_subcommand("eval", "correlation with human scores or word-choice accuracy");
    add_scoring_options(ev, eval_c, eval_m, eval_s, eval_wccm);
    ev->add_option("--benchmark", eval_bench, "word1,word2,score CSV")->check(CLI::ExistingFile);
    ev->add_option("--word-choice", eval_choice, "target<TAB>alts<TAB>answer file")->check(CLI::ExistingFile);
    ev->add_option("--out", out_path, "output file");
    ev->callback([&] {
        check = [&] {
            validate_scoring(eval_c, eval_m, eval_s, eval_wccm);
            if (eval_bench.empty() == eval_choice.empty()) {
                throw ValidationError("give exactly one of --benchmark or --word-choice");
            }
        };
        action = [&] {
            std::ostringstream out;
            Orientation orient = info(eval_m.id()).orientation;
            if (!eval_bench.empty()) {
                auto bench = load_benchmark_file(eval_bench, manifest);
                auto scoring = build_scoring(eval_c, eval_m, eval_s, eval_wccm, manifest);
                auto ranked = rank_pairs(bench, scoring->scorer(), orient);
                auto rep = correlate(ranked, orient);
                out << "benchmark\tmeasure\tpairs\tskipped\tpearson\tspearman\toriented_pearson\toriented_spearman\n";
                out << bench.name << '\t' << info(eval_m.id()).name << '\t' << rep.pairs << '\t' << rep.skipped << '\t'
                    << io::format_real(rep.pearson) << '\t' << io::format_real(rep.spearman) << '\t'
                    << io::format_real(rep.oriented_pearson) << '\t' << io::format_real(rep.oriented_spearman)
                    << '\n';
            } else {
                manifest.input(eval_choice);
                auto in = open_input(eval_choice);
                auto problems = load_word_choice(in);
                auto scoring = build_scoring(eval_c, eval_m, eval_s, eval_wccm, manifest);
                auto res = solve_word_choice(problems, scoring->scorer(), orient);
                out << "target\tchosen\tanswer\tresult\n";
                for (std::size_t i = 0; i < problems.size(); ++i) {
                    const auto& o = res.outcomes[i];
                    out << problems[i].target << '\t'
                        << (o.chosen ? problems[i].alternatives[*o.chosen] : std::string("-")) << '\t'
                        << problems[i].alternatives[problems[i].answer_index] << '\t'
                        << (o.correct ? "correct" : "wrong") << (o.flagged ? ",flagged" : "") << '\n';
                }
                out << "#accuracy\t" << io::format_real(res.accuracy) << "\tcorrect=" << res.correct
                    << "\tproblems=" << problems.size() << "\tflagged=" << res.flagged << '\n';
            }
            return out.str();
        };
    });

    // wccm-build and xling-wccm
    CorpusOptions wb_c;
    SenseOptions wb_s;
    auto* wb = app.add_subcommand("wccm-build", "base word x category matrix");
    add_corpus_options(wb, wb_c, true, false);
    add_sense_options(wb, wb_s);
    wb->add_option("--out", out_path, "output file");

    CorpusOptions xl_c;
    SenseOptions xl_s;
    auto* xl = app.add_subcommand("xling-wccm", "cross-lingual base matrix through a bilingual lexicon");
    add_corpus_options(xl, xl_c, true, false);
    add_sense_options(xl, xl_s);
    xl->add_option("--out", out_path, "output file");

    auto wccm_build = [&](CorpusOptions& c, SenseOptions& s, bool crosslingual) {
        check = [&c, &s, crosslingual] {
            c.validate(true, false);
            s.validate();
            if (crosslingual && s.lexicon.empty()) throw ValidationError("--lexicon is required");
            if (!crosslingual && !s.lexicon.empty()) {
                throw ValidationError("--lexicon belongs to xling-wccm");
            }
        };
        action = [&] {
            auto senses = load_senses(s, manifest);
            fs::path cached;
            if (!c.cache_dir.empty() && !c.corpus.empty()) {
                Manifest probe = manifest;
                read_documents(c, probe);
                describe_corpus(c, probe);
                cached = fs::path(c.cache_dir) / ("wccm-" + cache_key("wccm", probe) + ".tsv");
                if (fs::exists(cached)) manifest = probe;
            }
            std::optional<Wccm> w;
            if (!cached.empty() && fs::exists(cached)) {
                std::ifstream in(cached, std::ios::binary);
                w = load_wccm(in);
            } else {
                auto counts = obtain_counts(c, manifest);
                w = build_wccm(counts, senses.inventory);
                if (!cached.empty()) save_cached(cached, [&](std::ostream& out) { save_wccm(*w, out); });
            }
            std::ostringstream out;
            save_wccm(*w, out);
            return out.str();
        };
    };
    wb->callback([&] { wccm_build(wb_c, wb_s, false); });
    xl->callback([&] { wccm_build(xl_c, xl_s, true); });

    // wccm-bootstrap
    CorpusOptions bs_c;
    SenseOptions bs_s;
    std::string bs_base;
    int bs_iterations = 1;
    double bs_log_base = 2.0;
    auto* bs = app.add_subcommand("wccm-bootstrap", "disambiguated second pass over the corpus");
    add_corpus_options(bs, bs_c, false, false);
    add_sense_options(bs, bs_s);
    bs->add_option("--base", bs_base, "base WCCM built from the same corpus")->required()->check(CLI::ExistingFile);
    bs->add_option("--iterations", bs_iterations, "bootstrap passes")->capture_default_str();
    bs->add_option("--log-base", bs_log_base, "PMI logarithm base")->capture_default_str();
    bs->add_option("--out", out_path, "output file");
    bs->callback([&] {
        check = [&] {
            bs_c.validate(false, false);
            bs_s.validate();
            if (bs_iterations < 1) throw ConfigError("--iterations must be >= 1");
            if (!(bs_log_base > 0) || bs_log_base == 1) throw ConfigError("--log-base must be positive and not 1");
        };
        action = [&] {
            auto base = load_wccm_file(bs_base, manifest);
            auto senses = load_senses(bs_s, manifest);
            auto docs = read_documents(bs_c, manifest);
            describe_corpus(bs_c, manifest);
            manifest.set("iterations", std::to_string(bs_iterations));
            manifest.set("log_base", io::format_real(bs_log_base));
            BootstrapConfig cfg{bs_iterations, bs_log_base};
            auto w = bootstrap_wccm_documents(docs, base, senses.inventory, bs_c.config(), cfg);
            std::ostringstream out;
            save_wccm(w, out);
            return out.str();
        };
    });

    // concept-distance
    MeasureOptions cd_m;
    std::string cd_wccm, cd_c1, cd_c2;
    bool cd_matrix = false;
    auto* cd = app.add_subcommand("concept-distance", "distance between thesaurus categories");
    add_measure_options(cd, cd_m);
    cd->add_option("--wccm", cd_wccm, "WCCM file")->required()->check(CLI::ExistingFile);
    cd->add_option("--c1", cd_c1, "first category id");
    cd->add_option("--c2", cd_c2, "second category id");
    cd->add_flag("--matrix", cd_matrix, "all category pairs");
    cd->add_option("--out", out_path, "output file");
    cd->callback([&] {
        check = [&] {
            cd_m.validate();
            if (cd_matrix == (!cd_c1.empty() || !cd_c2.empty())) {
                throw ValidationError("give either --c1/--c2 or --matrix");
            }
            if (!cd_matrix && (cd_c1.empty() || cd_c2.empty())) throw ValidationError("--c1 and --c2 are both required");
        };
        action = [&] {
            auto w = load_wccm_file(cd_wccm, manifest);
            cd_m.describe(manifest);
            std::ostringstream out;
            out << "category1\tcategory2\tmeasure\tvalue\tflag\n";
            if (cd_matrix) {
                auto mat = concept_distance_matrix(w, cd_m.id(), cd_m.config());
                for (std::size_t i = 0; i < mat.categories.size(); ++i) {
                    for (std::size_t j = 0; j < mat.categories.size(); ++j) {
                        double v = mat.at(i, j);
                        out << mat.categories[i] << '\t' << mat.categories[j] << '\t' << info(cd_m.id()).name << '\t'
                            << (std::isnan(v) ? std::string("nan\tundefined") : io::format_real(v) + "\tok") << '\n';
                    }
                }
            } else {
                Score s = concept_distance(w, cd_c1, cd_c2, cd_m.id(), cd_m.config());
                out << cd_c1 << '\t' << cd_c2 << '\t' << info(cd_m.id()).name << '\t' << score_line(s) << '\n';
            }
            return out.str();
        };
    });

    // taxo-distance
    std::string tx_file, tx_ic, tx_c1, tx_c2, tx_w1, tx_w2, tx_measure = "hs", tx_hyp(kHyponymyRelation);
    TaxoConfig tx_cfg;
    auto* tx = app.add_subcommand("taxo-distance", "taxonomy measure between concepts or words");
    tx->add_option("--taxonomy", tx_file, "NODE/EDGE/WORD file")->required()->check(CLI::ExistingFile);
    tx->add_option("--ic", tx_ic, "IC table from ic-build")->check(CLI::ExistingFile);
    tx->add_option("--measure", tx_measure, "hs, lc, rada, res, jc or lin")->capture_default_str();
    tx->add_option("--c1", tx_c1, "first concept id");
    tx->add_option("--c2", tx_c2, "second concept id");
    tx->add_option("--w1", tx_w1, "first word");
    tx->add_option("--w2", tx_w2, "second word");
    tx->add_option("--hyponymy", tx_hyp, "relation label of hypernym edges")->capture_default_str();
    tx->add_option("--log-base", tx_cfg.log_base, "logarithm base")->capture_default_str();
    tx->add_option("--C", tx_cfg.hs_C, "Hirst-St-Onge constant C")->capture_default_str();
    tx->add_option("--k", tx_cfg.hs_k, "Hirst-St-Onge constant k")->capture_default_str();
    tx->add_option("--out", out_path, "output file");
    tx->callback([&] {
        check = [&] {
            auto m = parse_taxo_measure(tx_measure);
            bool concepts = !tx_c1.empty() || !tx_c2.empty();
            bool words = !tx_w1.empty() || !tx_w2.empty();
            if (concepts == words) throw ValidationError("give either --c1/--c2 or --w1/--w2");
            if (concepts && (tx_c1.empty() || tx_c2.empty())) throw ValidationError("--c1 and --c2 are both required");
            if (words && (tx_w1.empty() || tx_w2.empty())) throw ValidationError("--w1 and --w2 are both required");
            if ((m == TaxoMeasure::res || m == TaxoMeasure::jc || m == TaxoMeasure::lin) && tx_ic.empty()) {
                throw ValidationError("--ic is required for " + tx_measure);
            }
            if (!(tx_cfg.log_base > 0) || tx_cfg.log_base == 1) throw ConfigError("--log-base must be positive and not 1");
        };
        action = [&] {
            manifest.input(tx_file);
            auto tin = open_input(tx_file);
            auto t = Taxonomy::load(tin, tx_hyp);
            std::optional<ICTable> ic;
            if (!tx_ic.empty()) {
                manifest.input(tx_ic);
                auto iin = open_input(tx_ic);
                ic = load_ic(iin);
            }
            auto m = parse_taxo_measure(tx_measure);
            manifest.set("measure", std::string(to_string(m)));
            manifest.set("hyponymy", tx_hyp);
            manifest.set("log_base", io::format_real(tx_cfg.log_base));
            manifest.set("C", io::format_real(tx_cfg.hs_C));
            manifest.set("k", io::format_real(tx_cfg.hs_k));
            const ICTable* icp = ic ? &*ic : nullptr;
            double v = tx_c1.empty() ? taxo_word_measure(t, m, tx_w1, tx_w2, icp, tx_cfg)
                                     : taxo_measure(t, m, tx_c1, tx_c2, icp, tx_cfg);
            std::ostringstream out;
            out << "item1\titem2\tmeasure\tvalue\n";
            out << (tx_c1.empty() ? tx_w1 : tx_c1) << '\t' << (tx_c1.empty() ? tx_w2 : tx_c2) << '\t' << to_string(m)
                << '\t' << io::format_real(v) << '\n';
            return out.str();
        };
    });

    // ic-build
    CorpusOptions ic_c;
    std::string ic_tax, ic_hyp(kHyponymyRelation);
    double ic_log_base = 2.0;
    auto* icb = app.add_subcommand("ic-build", "information content of taxonomy concepts from corpus frequencies");
    add_corpus_options(icb, ic_c, true, false);
    icb->add_option("--taxonomy", ic_tax, "NODE/EDGE/WORD file")->required()->check(CLI::ExistingFile);
    icb->add_option("--hyponymy", ic_hyp, "relation label of hypernym edges")->capture_default_str();
    icb->add_option("--log-base", ic_log_base, "logarithm base")->capture_default_str();
    icb->add_option("--out", out_path, "output file");
    icb->callback([&] {
        check = [&] {
            ic_c.validate(true, false);
            if (!(ic_log_base > 0) || ic_log_base == 1) throw ConfigError("--log-base must be positive and not 1");
        };
        action = [&] {
            manifest.input(ic_tax);
            auto tin = open_input(ic_tax);
            auto t = Taxonomy::load(tin, ic_hyp);
            auto counts = obtain_counts(ic_c, manifest);
            manifest.set("hyponymy", ic_hyp);
            manifest.set("log_base", io::format_real(ic_log_base));
            std::map<std::string, std::uint64_t, std::less<>> freq(counts.unigrams().begin(), counts.unigrams().end());
            auto table = ic_from_counts(t, freq, ic_log_base);
            std::ostringstream out;
            save_ic(table, out);
            return out.str();
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        check();
        for (const auto* sub : app.get_subcommands()) manifest.command = sub->get_name();
        std::string body = action();
        emit(out_path, manifest, body);
        return 0;
    } catch (const Error& e) {
        std::cerr << "distsem: " << e.what() << '\n';
        return e.kind() == Error::Kind::validation ? 2 : 1;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "distsem: " << e.what() << '\n';
        return 1;
    }
}
