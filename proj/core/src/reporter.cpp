#include "ghl/reporter.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "ghl/errors.hpp"
#include "ghl/util.hpp"

namespace fs = std::filesystem;

namespace ghl {

namespace {

std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string sanitize_file_stem(const std::string& key) {
    std::string out;
    out.reserve(key.size());
    for (char c : key) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')
            out.push_back(c);
        else
            out.push_back('_');
    }
    return out.empty() ? "function" : out;
}

void write_text_file(const fs::path& path, const std::string& body) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ReportError("cannot write report file: " + path.string());
    out << body;
    if (!out) throw ReportError("report write failed: " + path.string());
}

void append_metrics_row(std::ostringstream& os, const std::string& label,
                        const MetricsSummary& m) {
    os << "| " << label << " | " << format_count(m.truth_total) << " | "
       << format_count(m.generated_total) << " | " << format_ratio(m.ratio) << " | "
       << format_count(m.covered_truth) << " | " << format_count(m.valid_generated) << " | "
       << format_ratio(m.precision) << " | " << format_ratio(m.recall) << " | "
       << format_ratio(m.f1) << " | " << format_duration(m.duration_s) << " |\n";
}

const char* kMetricsHeader =
    "| Function | Truth (A) | Generated (B) | B/A | Covered (C) | Valid (D) | Precision | "
    "Recall | F1 | Duration |\n"
    "|---|---|---|---|---|---|---|---|---|---|\n";

}  // namespace

std::string format_count(double value) {
    std::string s = format_fixed(round_half_up(value, 2), 2);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s.empty() ? "0" : s;
}

std::string format_ratio(double value) { return format_fixed(round_half_up(value, 2), 2); }

std::string format_score(double value) { return format_fixed(round_half_up(value, 3), 3); }

std::string format_duration(double seconds) { return format_hms(seconds); }

std::string render_match_examples(const std::vector<std::string>& truth_keys,
                                  const std::vector<std::string>& generated_texts,
                                  const SimilarityMatrix& matrix, const MatchRule& rule,
                                  std::size_t top_k) {
    MatchSet set = match_threshold(matrix, rule);
    std::stable_sort(set.pairs.begin(), set.pairs.end(),
                     [](const MatchedPair& a, const MatchedPair& b) {
                         if (a.score != b.score) return a.score > b.score;
                         if (a.truth_index != b.truth_index) return a.truth_index < b.truth_index;
                         return a.generated_index < b.generated_index;
                     });
    std::ostringstream os;
    if (set.pairs.empty()) {
        os << "No matched pairs at this threshold.\n";
        return os.str();
    }
    const std::size_t n = std::min(top_k, set.pairs.size());
    for (std::size_t k = 0; k < n; ++k) {
        const auto& p = set.pairs[k];
        os << "- [" << format_ratio(p.score) << "] " << truth_keys.at(p.truth_index) << " <-> "
           << generated_texts.at(p.generated_index) << "\n";
    }
    return os.str();
}

std::string render_nearest_neighbors(const std::string& truth_key,
                                     const std::vector<std::string>& truth_keys,
                                     const std::vector<std::string>& generated_texts,
                                     const SimilarityMatrix& matrix, std::size_t top_k) {
    auto it = std::find(truth_keys.begin(), truth_keys.end(), truth_key);
    if (it == truth_keys.end()) throw ReportError("unknown truth case key: " + truth_key);
    const auto row = static_cast<std::size_t>(it - truth_keys.begin());

    std::vector<std::size_t> order(matrix.generated_count);
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return matrix.at(row, a) > matrix.at(row, b);
    });

    std::ostringstream os;
    os << "Nearest generated cases for " << truth_key << ":\n";
    const std::size_t n = std::min(top_k, order.size());
    for (std::size_t k = 0; k < n; ++k) {
        os << (k + 1) << ". (" << format_score(matrix.at(row, order[k])) << ") "
           << generated_texts.at(order[k]) << "\n";
    }
    if (n == 0) os << "(no generated cases)\n";
    return os.str();
}

std::string metrics_csv(const std::vector<StrategyFunctionReport>& rows) {
    std::ostringstream os;
    os << "function,truth_total,generated_total,ratio,covered_truth,valid_generated,precision,"
          "recall,f1,duration_s\n";
    for (const auto& r : rows) {
        const auto& m = r.aggregate;
        os << r.function_key << ',' << csv_number(m.truth_total) << ','
           << csv_number(m.generated_total) << ',' << csv_number(m.ratio) << ','
           << csv_number(m.covered_truth) << ',' << csv_number(m.valid_generated) << ','
           << csv_number(m.precision) << ',' << csv_number(m.recall) << ',' << csv_number(m.f1)
           << ',' << csv_number(m.duration_s) << '\n';
    }
    return os.str();
}

std::string emit_histogram_data(const Histogram& h) {
    std::ostringstream os;
    os << "# bin_width=" << csv_number(h.bin_width) << " threshold=" << csv_number(h.threshold_marker)
       << " total=" << h.total << "\n";
    os << "lower,upper,count\n";
    for (const auto& bin : h.bins)
        os << csv_number(bin.lower) << ',' << csv_number(bin.upper) << ',' << bin.count << '\n';
    return os.str();
}

std::string render_technique_tally(const std::vector<StrategyFunctionReport>& rows) {
    struct Tally {
        TechniqueCategory category;
        std::size_t functions = 0;
    };
    std::map<std::string, Tally> tally;
    for (const auto& r : rows)
        for (const auto& t : r.techniques) {
            auto [it, inserted] = tally.emplace(t.name, Tally{t.category, 0});
            ++it->second.functions;
        }
    std::vector<std::pair<std::string, Tally>> ordered(tally.begin(), tally.end());
    std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
        if (a.second.functions != b.second.functions) return a.second.functions > b.second.functions;
        return a.first < b.first;
    });
    std::ostringstream os;
    os << "| Technique | Category | Functions |\n|---|---|---|\n";
    for (const auto& [name, t] : ordered)
        os << "| " << name << " | " << to_string(t.category) << " | " << t.functions << " |\n";
    return os.str();
}

std::string render_summary(const DatasetReport& report) {
    std::ostringstream os;
    os << "# Test generation report: " << report.dataset_name << "\n";
    for (const auto& [strategy, rows] : report.strategies) {
        os << "\n## " << to_string(strategy) << "\n\n";
        if (rows.empty()) {
            os << "(no results)\n";
            continue;
        }
        os << kMetricsHeader;
        std::vector<MetricsSummary> aggregates;
        for (const auto& r : rows) {
            append_metrics_row(os, r.function_key, r.aggregate);
            aggregates.push_back(r.aggregate);
        }
        if (rows.size() > 1)
            append_metrics_row(os, "**Average**", aggregate_functions(aggregates));
        if (strategy != Strategy::zero_shot) {
            os << "\nTechniques applied:\n\n" << render_technique_tally(rows);
        }
    }
    return os.str();
}

std::string render_function_page(const std::string& function_key, const DatasetReport& report) {
    std::ostringstream os;
    os << "# Function: " << function_key << "\n";
    bool found = false;
    for (const auto& [strategy, rows] : report.strategies) {
        const StrategyFunctionReport* row = nullptr;
        for (const auto& r : rows)
            if (r.function_key == function_key) row = &r;
        if (row == nullptr) continue;
        found = true;
        os << "\n## " << to_string(strategy) << "\n\n";
        os << kMetricsHeader;
        append_metrics_row(os, function_key, row->aggregate);
        for (std::size_t i = 0; i < row->runs.size(); ++i)
            append_metrics_row(os, "run " + std::to_string(i + 1), row->runs[i]);
        if (!row->techniques.empty()) {
            os << "\nTechniques: ";
            for (std::size_t i = 0; i < row->techniques.size(); ++i) {
                if (i > 0) os << ", ";
                os << row->techniques[i].name;
            }
            os << "\n";
        }
        os << "\nStrongest matches:\n\n"
           << render_match_examples(row->truth_keys, row->generated_texts, row->matrix, row->rule,
                                    3);
        if (!row->failures.empty()) {
            os << "\nFailures:\n\n";
            for (const auto& f : row->failures)
                os << "- " << f.stage << " (chunk " << f.chunk_index << "): " << f.message
                   << "\n";
        }
    }
    if (!found) throw ReportError("function not present in report: " + function_key);
    return os.str();
}

void write_report(const fs::path& report_dir, const DatasetReport& report) {
    write_text_file(report_dir / "summary.md", render_summary(report));

    std::vector<std::string> function_keys;
    for (const auto& [_, rows] : report.strategies)
        for (const auto& r : rows)
            if (std::find(function_keys.begin(), function_keys.end(), r.function_key) ==
                function_keys.end())
                function_keys.push_back(r.function_key);

    for (const auto& key : function_keys)
        write_text_file(report_dir / "per_function" / (sanitize_file_stem(key) + ".md"),
                        render_function_page(key, report));

    for (const auto& [strategy, rows] : report.strategies) {
        write_text_file(report_dir / "tables" / (to_string(strategy) + "_metrics.csv"),
                        metrics_csv(rows));
        std::vector<double> scores;
        for (const auto& r : rows)
            scores.insert(scores.end(), r.matrix.scores.begin(), r.matrix.scores.end());
        Histogram h = similarity_histogram(scores, report.bin_width, report.threshold_marker);
        write_text_file(report_dir / "histograms" / (to_string(strategy) + ".csv"),
                        emit_histogram_data(h));
    }
}

}  // namespace ghl
