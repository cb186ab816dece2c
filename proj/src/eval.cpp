#include "distsem/eval.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>

#include "distsem/error.hpp"
#include "distsem/text_io.hpp"

namespace distsem {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

}  // namespace

BenchmarkSet load_benchmark(std::istream& in, std::string name) {
    BenchmarkSet set;
    set.name = std::move(name);
    std::string line;
    std::size_t lineno = 0;
    bool header = false, have_scale = false;
    while (io::next_line(in, line)) {
        ++lineno;
        if (trim(line).empty() || io::is_manifest_line(line)) continue;
        auto raw = io::split(line, ',');
        std::vector<std::string_view> f;
        for (auto x : raw) f.push_back(trim(x));
        if (!header) {
            if (f.size() != 5 || f[0] != "word1" || f[1] != "word2" || f[2] != "score" || f[3] != "scale_min" ||
                f[4] != "scale_max") {
                throw ParseError(lineno, "expected header word1,word2,score,scale_min,scale_max");
            }
            header = true;
            continue;
        }
        if ((f.size() != 3 && f.size() != 5) || f[0].empty() || f[1].empty()) {
            throw ParseError(lineno, "expected word1,word2,score[,scale_min,scale_max]");
        }
        if (f.size() == 5 && !f[3].empty()) {
            double lo = io::parse_real(f[3], lineno), hi = io::parse_real(f[4], lineno);
            if (!(lo < hi)) throw ParseError(lineno, "scale_min must be below scale_max");
            if (have_scale && (lo != set.scale_min || hi != set.scale_max)) {
                throw ParseError(lineno, "scale differs from the one declared earlier");
            }
            set.scale_min = lo;
            set.scale_max = hi;
            have_scale = true;
        }
        if (!have_scale) throw ParseError(lineno, "no score scale declared yet");
        double score = io::parse_real(f[2], lineno);
        if (score < set.scale_min || score > set.scale_max) {
            throw ValidationError("line " + std::to_string(lineno) + ": score " + std::string(f[2]) +
                                  " outside the declared scale");
        }
        set.pairs.push_back({std::string(f[0]), std::string(f[1]), score});
    }
    if (set.pairs.empty()) throw ValidationError("benchmark has no pairs");
    if (set.pairs.size() < 2) throw ValidationError("benchmark needs at least 2 pairs");
    return set;
}

std::vector<WordChoiceProblem> load_word_choice(std::istream& in) {
    std::vector<WordChoiceProblem> out;
    std::string line;
    std::size_t lineno = 0;
    while (io::next_line(in, line)) {
        ++lineno;
        if (line.empty() || io::is_manifest_line(line)) continue;
        auto f = io::split(line, '\t');
        if (f.size() != 3 || f[0].empty()) throw ParseError(lineno, "expected target<TAB>alt1|alt2|...<TAB>answer_index");
        WordChoiceProblem p;
        p.target = std::string(f[0]);
        for (auto a : io::split(f[1], '|')) {
            if (a.empty()) throw ParseError(lineno, "empty alternative");
            p.alternatives.emplace_back(a);
        }
        p.answer_index = io::parse_count(f[2], lineno);
        if (p.answer_index >= p.alternatives.size()) throw ParseError(lineno, "answer_index outside the alternatives");
        out.push_back(std::move(p));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scorers

ProfileScorer::ProfileScorer(const CooccurrenceCounts& counts, MeasureId measure, MeasureConfig measure_config,
                             ProfileConfig profile_config)
    : counts_(counts),
      measure_(measure),
      measure_config_(std::move(measure_config)),
      profile_config_(profile_config),
      soa_(required_soa(measure, measure_config_)) {
    measure_config_.validate();
}

const DistributionalProfile* ProfileScorer::profile(std::string_view word) {
    auto it = cache_.find(word);
    if (it == cache_.end()) {
        std::optional<DistributionalProfile> p;
        try {
            p = build_profile(counts_, word, soa_, profile_config_);
        } catch (const MissingRowError&) {
        } catch (const EmptyProfileError&) {
        }
        if (!p) missing_.emplace_back(word);
        it = cache_.emplace(std::string(word), std::move(p)).first;
    }
    return it->second ? &*it->second : nullptr;
}

std::optional<Score> ProfileScorer::operator()(std::string_view w1, std::string_view w2) {
    const auto* a = profile(w1);
    const auto* b = profile(w2);
    if (!a || !b) return std::nullopt;
    try {
        return compute(measure_, *a, *b, measure_config_);
    } catch (const UndefinedError&) {
        return std::nullopt;
    }
}

ConceptScorer::ConceptScorer(const Wccm& wccm, const SenseInventory& senses, MeasureId measure,
                             MeasureConfig measure_config)
    : wccm_(wccm),
      senses_(senses),
      measure_(measure),
      measure_config_(std::move(measure_config)),
      soa_(required_soa(measure, measure_config_)) {
    measure_config_.validate();
    if (wccm.categories() != senses.categories()) {
        throw ConfigError("WCCM categories do not match the sense inventory");
    }
}

const DistributionalProfile* ConceptScorer::profile(std::uint32_t category) {
    auto it = cache_.find(category);
    if (it == cache_.end()) {
        std::optional<DistributionalProfile> p;
        try {
            p = concept_profile(wccm_, wccm_.categories()[category], soa_, measure_config_.log_base);
        } catch (const EmptyProfileError&) {
        }
        it = cache_.emplace(category, std::move(p)).first;
    }
    return it->second ? &*it->second : nullptr;
}

std::optional<Score> ConceptScorer::operator()(std::string_view w1, std::string_view w2) {
    const bool closeness = orientation() == Orientation::closeness;
    std::optional<Score> best;
    for (std::uint32_t c1 : senses_.senses(w1)) {
        const auto* a = profile(c1);
        if (!a) continue;
        for (std::uint32_t c2 : senses_.senses(w2)) {
            const auto* b = profile(c2);
            if (!b) continue;
            Score s;
            try {
                s = compute(measure_, *a, *b, measure_config_);
            } catch (const UndefinedError&) {
                continue;
            }
            if (!best || (closeness ? s.value > best->value : s.value < best->value)) best = std::move(s);
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Ranking and correlation

RankResult rank_pairs(const BenchmarkSet& benchmark, const PairScorer& scorer, Orientation orientation) {
    RankResult out;
    for (std::size_t i = 0; i < benchmark.pairs.size(); ++i) {
        const auto& p = benchmark.pairs[i];
        auto s = scorer(p.word1, p.word2);
        if (!s) {
            out.skipped.push_back(i);
            continue;
        }
        out.ranked.push_back({i, p.word1, p.word2, p.score, s->value, s->flagged});
    }
    if (2 * out.skipped.size() > benchmark.pairs.size()) {
        throw CoverageError(std::to_string(out.skipped.size()) + " of " + std::to_string(benchmark.pairs.size()) +
                            " pairs could not be scored");
    }
    const bool closeness = orientation == Orientation::closeness;
    std::stable_sort(out.ranked.begin(), out.ranked.end(), [closeness](const RankedPair& a, const RankedPair& b) {
        return closeness ? a.score > b.score : a.score < b.score;
    });
    return out;
}

namespace {

void check_inputs(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw ValidationError("correlation inputs differ in length");
    if (xs.size() < 2) throw ValidationError("correlation needs at least 2 observations");
}

}  // namespace

double pearson(std::span<const double> xs, std::span<const double> ys) {
    check_inputs(xs, ys);
    const double n = static_cast<double>(xs.size());
    double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double dx = xs[i] - mx, dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0 || syy == 0) throw UndefinedError("correlation is undefined for a constant input");
    double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> xs) {
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(xs.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
        double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
    check_inputs(xs, ys);
    auto rx = average_ranks(xs);
    auto ry = average_ranks(ys);
    return pearson(rx, ry);
}

CorrelationReport correlate(const RankResult& ranked, Orientation orientation) {
    // Correlate in benchmark order so the result does not depend on tie-breaking.
    std::vector<RankedPair> rows = ranked.ranked;
    std::sort(rows.begin(), rows.end(), [](const RankedPair& a, const RankedPair& b) { return a.index < b.index; });
    std::vector<double> human, score;
    for (const auto& r : rows) {
        human.push_back(r.human);
        score.push_back(r.score);
    }
    CorrelationReport rep;
    rep.pairs = rows.size();
    rep.skipped = ranked.skipped.size();
    rep.pearson = pearson(score, human);
    rep.spearman = spearman(score, human);
    const double sign = orientation == Orientation::closeness ? 1.0 : -1.0;
    rep.oriented_pearson = sign * rep.pearson;
    rep.oriented_spearman = sign * rep.spearman;
    return rep;
}

WordChoiceResult solve_word_choice(std::span<const WordChoiceProblem> problems, const PairScorer& scorer,
                                   Orientation orientation) {
    WordChoiceResult res;
    const bool closeness = orientation == Orientation::closeness;
    for (const auto& p : problems) {
        WordChoiceOutcome o;
        std::optional<double> best;
        for (std::size_t i = 0; i < p.alternatives.size(); ++i) {
            auto s = scorer(p.target, p.alternatives[i]);
            if (!s) continue;
            if (!best || (closeness ? s->value > *best : s->value < *best)) {
                best = s->value;
                o.chosen = i;
                o.flagged = false;
            } else if (s->value == *best) {
                o.flagged = true;
            }
        }
        if (!o.chosen) o.flagged = true;
        o.correct = o.chosen && *o.chosen == p.answer_index;
        res.correct += o.correct ? 1 : 0;
        res.flagged += o.flagged ? 1 : 0;
        res.outcomes.push_back(o);
    }
    res.accuracy = problems.empty() ? 0.0 : static_cast<double>(res.correct) / static_cast<double>(problems.size());
    return res;
}

}  // namespace distsem
