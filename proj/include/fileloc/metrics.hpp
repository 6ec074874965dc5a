#pragma once

// Temporal splitting and the per-issue retrieval metrics: hit@k, P@k, R@k
// for k in {1,5,10}, R-Precision and reciprocal rank, plus their means.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "fileloc/dataset.hpp"
#include "fileloc/errors.hpp"
#include "fileloc/models.hpp"

namespace fileloc {

inline constexpr std::array<std::size_t, 3> kMetricCutoffs = {1, 5, 10};

struct MetricsRow {
    IssueKey issue;
    std::array<double, 3> hit{};        // [tp@k >= 1]
    std::array<double, 3> precision{};  // tp@k / min(k, |ranking|)
    std::array<double, 3> recall{};     // tp@k / |positives|
    double r_precision = 0;
    double reciprocal_rank = 0;
    std::size_t first_positive_rank = 0;  // 1-based
};

inline MetricsRow metrics_for_issue(const Ranking& ranking,
                                    const std::set<std::string>& positives) {
    if (positives.empty()) throw EmptyInput("metrics need at least one positive");
    std::size_t n = ranking.size();
    for (const auto& p : positives) {
        bool present = std::any_of(ranking.begin(), ranking.end(),
                                   [&](const ScoredDoc& d) { return d.path == p; });
        if (!present) throw PositivesNotRanked("positive not in ranking: " + p);
    }

    MetricsRow row;
    auto tp_at = [&](std::size_t k) {
        std::size_t cutoff = std::min(k, n);
        std::size_t tp = 0;
        for (std::size_t i = 0; i < cutoff; ++i)
            if (positives.count(ranking[i].path)) ++tp;
        return tp;
    };
    for (std::size_t ki = 0; ki < kMetricCutoffs.size(); ++ki) {
        std::size_t k = kMetricCutoffs[ki];
        std::size_t tp = tp_at(k);
        row.hit[ki] = tp >= 1 ? 1.0 : 0.0;
        row.precision[ki] =
            static_cast<double>(tp) / static_cast<double>(std::min(k, n));
        row.recall[ki] = static_cast<double>(tp) / static_cast<double>(positives.size());
    }
    row.r_precision = static_cast<double>(tp_at(positives.size())) /
                      static_cast<double>(positives.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (positives.count(ranking[i].path)) {
            row.first_positive_rank = i + 1;
            break;
        }
    }
    row.reciprocal_rank = 1.0 / static_cast<double>(row.first_positive_rank);
    return row;
}

struct AggregateReport {
    std::array<double, 3> hit{};
    std::array<double, 3> precision{};
    std::array<double, 3> recall{};
    double r_precision = 0;
    double mrr = 0;
    std::size_t sample_count = 0;
};

inline AggregateReport aggregate(std::span<const MetricsRow> rows) {
    if (rows.empty()) throw EmptyInput("cannot aggregate zero rows");
    AggregateReport report;
    report.sample_count = rows.size();
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < kMetricCutoffs.size(); ++k) {
            report.hit[k] += row.hit[k];
            report.precision[k] += row.precision[k];
            report.recall[k] += row.recall[k];
        }
        report.r_precision += row.r_precision;
        report.mrr += row.reciprocal_rank;
    }
    double n = static_cast<double>(rows.size());
    for (std::size_t k = 0; k < kMetricCutoffs.size(); ++k) {
        report.hit[k] /= n;
        report.precision[k] /= n;
        report.recall[k] /= n;
    }
    report.r_precision /= n;
    report.mrr /= n;
    return report;
}

struct TimedSample {
    std::int64_t first_commit_time = 0;  // author time of the diff commit
    LabeledSample sample;
};

struct Split {
    std::vector<LabeledSample> validation;
    std::vector<LabeledSample> test;
    std::int64_t boundary_time = 0;
};

// Stable sort by (first-commit time, issue key); the first ceil(ratio * n)
// samples form the validation set.
inline Split temporal_split(std::vector<TimedSample> samples, double ratio = 0.5) {
    if (samples.empty()) throw EmptyInput("cannot split an empty dataset");
    if (ratio < 0 || ratio > 1) throw ConfigError("split ratio must be in [0, 1]");
    std::sort(samples.begin(), samples.end(), [](const TimedSample& a, const TimedSample& b) {
        if (a.first_commit_time != b.first_commit_time)
            return a.first_commit_time < b.first_commit_time;
        return a.sample.issue < b.sample.issue;
    });
    std::size_t cut = static_cast<std::size_t>(
        std::ceil(ratio * static_cast<double>(samples.size())));
    Split split;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (i < cut)
            split.validation.push_back(std::move(samples[i].sample));
        else
            split.test.push_back(std::move(samples[i].sample));
    }
    split.boundary_time = cut > 0 ? samples[cut - 1].first_commit_time
                                  : samples.front().first_commit_time;
    return split;
}

}  // namespace fileloc
