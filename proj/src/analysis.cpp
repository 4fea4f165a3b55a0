#include "analysis.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <sstream>

#include "errors.hpp"

namespace tracesynth {

namespace {

void check_universe(const Corpus& corpus, const SyscallUniverse& universe) {
    if (corpus.meta.universe_id != universe.fingerprint())
        fail(ErrorCode::validation, "corpus universe fingerprint " + corpus.meta.universe_id +
                                        " does not match the supplied universe (" +
                                        universe.fingerprint() + ")");
}

} // namespace

std::vector<std::uint32_t> usage_histogram(const Corpus& corpus,
                                           const SyscallUniverse& universe) {
    check_universe(corpus, universe);
    std::vector<std::uint32_t> hist(universe.size(), 0);
    for (const Trace& t : corpus.traces) {
        std::set<SyscallId> present(t.begin(), t.end());
        for (SyscallId id : present) {
            if (id >= universe.size())
                fail(ErrorCode::validation, "corpus references syscall id " + std::to_string(id) +
                                                " outside the universe");
            ++hist[id];
        }
    }
    return hist;
}

SeedReport analyze(const Corpus& corpus, const SyscallUniverse& universe) {
    SeedReport report;
    report.usage_histogram = usage_histogram(corpus, universe);
    report.trace_count = static_cast<std::uint32_t>(corpus.traces.size());
    for (std::uint32_t c : report.usage_histogram)
        if (c > 0)
            ++report.unique_syscalls;

    // Collect every ordered and unordered id pair realized by some trace,
    // then intersect with the ground truth.
    std::set<std::pair<SyscallId, SyscallId>> ordered, unordered;
    for (const Trace& t : corpus.traces) {
        for (std::size_t i = 0; i < t.size(); ++i)
            for (std::size_t j = i + 1; j < t.size(); ++j) {
                ordered.emplace(t[i], t[j]);
                if (t[i] != t[j])
                    unordered.emplace(std::min(t[i], t[j]), std::max(t[i], t[j]));
            }
    }
    for (const auto& pair : universe.deps().explicit_deps)
        if (ordered.count(pair))
            ++report.explicit_satisfied;
    for (const auto& pair : universe.deps().implicit_deps)
        if (unordered.count(pair))
            ++report.implicit_satisfied;
    return report;
}

AgreementReport agreement(const Corpus& a, const Corpus& b) {
    if (a.meta.universe_id != b.meta.universe_id)
        fail(ErrorCode::validation, "corpora were built against different universes (" +
                                        a.meta.universe_id + " vs " + b.meta.universe_id + ")");
    auto call_sets = [](const Corpus& c) {
        std::vector<std::set<SyscallId>> sets;
        sets.reserve(c.traces.size());
        for (const Trace& t : c.traces)
            sets.emplace_back(t.begin(), t.end());
        return sets;
    };
    const auto sa = call_sets(a);
    const auto sb = call_sets(b);
    auto subset = [](const std::set<SyscallId>& x, const std::set<SyscallId>& y) {
        return std::includes(y.begin(), y.end(), x.begin(), x.end());
    };

    AgreementReport rep;
    std::vector<bool> hit_a(sa.size(), false), hit_b(sb.size(), false);
    for (std::size_t i = 0; i < sa.size(); ++i)
        for (std::size_t j = 0; j < sb.size(); ++j)
            if (subset(sa[i], sb[j]) || subset(sb[j], sa[i])) {
                ++rep.equivalent_pairs;
                hit_a[i] = true;
                hit_b[j] = true;
            }
    rep.matched_in_a = static_cast<std::uint32_t>(std::count(hit_a.begin(), hit_a.end(), true));
    rep.matched_in_b = static_cast<std::uint32_t>(std::count(hit_b.begin(), hit_b.end(), true));
    if (!sa.empty())
        rep.pct_a = 100.0 * rep.matched_in_a / static_cast<double>(sa.size());
    if (!sb.empty())
        rep.pct_b = 100.0 * rep.matched_in_b / static_cast<double>(sb.size());
    return rep;
}

namespace {

void check_labels(const std::vector<SeedReport>& reports, const std::vector<std::string>& labels) {
    if (reports.empty())
        fail(ErrorCode::invalid_argument, "need at least one report");
    if (labels.size() != reports.size())
        fail(ErrorCode::invalid_argument, "labels (" + std::to_string(labels.size()) +
                                              ") do not match reports (" +
                                              std::to_string(reports.size()) + ")");
    for (const std::string& l : labels)
        if (l.empty())
            fail(ErrorCode::invalid_argument, "labels must be nonempty");
}

} // namespace

std::string comparison_table(const std::vector<SeedReport>& reports,
                             const std::vector<std::string>& labels) {
    check_labels(reports, labels);
    const char* headers[5] = {"corpus", "traces", "unique syscalls", "explicit", "implicit"};
    std::vector<std::array<std::string, 5>> rows;
    for (std::size_t i = 0; i < reports.size(); ++i)
        rows.push_back({labels[i], std::to_string(reports[i].trace_count),
                        std::to_string(reports[i].unique_syscalls),
                        std::to_string(reports[i].explicit_satisfied),
                        std::to_string(reports[i].implicit_satisfied)});
    std::size_t width[5];
    for (int c = 0; c < 5; ++c) {
        width[c] = std::string(headers[c]).size();
        for (const auto& row : rows)
            width[c] = std::max(width[c], row[c].size());
    }
    std::ostringstream out;
    auto emit_row = [&](const std::array<std::string, 5>& cells) {
        for (int c = 0; c < 5; ++c) {
            if (c)
                out << "  ";
            // left-align the label column, right-align the numbers
            if (c == 0)
                out << cells[c] << std::string(width[c] - cells[c].size(), ' ');
            else
                out << std::string(width[c] - cells[c].size(), ' ') << cells[c];
        }
        out << "\n";
    };
    emit_row({headers[0], headers[1], headers[2], headers[3], headers[4]});
    for (const auto& row : rows)
        emit_row(row);
    return out.str();
}

std::string comparison_csv(const std::vector<SeedReport>& reports,
                           const std::vector<std::string>& labels) {
    check_labels(reports, labels);
    std::string out = "label,traces,unique_syscalls,explicit_satisfied,implicit_satisfied\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        out += labels[i];
        out += ',';
        out += std::to_string(reports[i].trace_count);
        out += ',';
        out += std::to_string(reports[i].unique_syscalls);
        out += ',';
        out += std::to_string(reports[i].explicit_satisfied);
        out += ',';
        out += std::to_string(reports[i].implicit_satisfied);
        out += '\n';
    }
    return out;
}

std::string histogram_csv(const std::vector<std::uint32_t>& histogram,
                          const SyscallUniverse& universe) {
    if (histogram.size() != universe.size())
        fail(ErrorCode::invalid_argument, "histogram size does not match the universe");
    std::string out = "syscall,traces\n";
    for (std::size_t i = 0; i < histogram.size(); ++i) {
        out += universe.name_of(static_cast<SyscallId>(i));
        out += ',';
        out += std::to_string(histogram[i]);
        out += '\n';
    }
    return out;
}

} // namespace tracesynth
