#pragma once

// Nonparametric statistics for the issue-type and identifier analyses:
// Kruskal-Wallis with tie correction and epsilon-squared effect size,
// Conover-Iman pairwise post-hoc, tie-aware Spearman correlation,
// identifier counting, effect-size binning and the isolate/holdout grouped
// comparisons.

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <regex>
#include <string>
#include <vector>

#include "fileloc/dataset.hpp"
#include "fileloc/errors.hpp"
#include "fileloc/metrics.hpp"

namespace fileloc {

// --- issue type consolidation -------------------------------------------------

enum class IssueCategory { bug, new_feature, improvement, task, other };

inline const char* category_name(IssueCategory c) {
    switch (c) {
        case IssueCategory::bug: return "Bug";
        case IssueCategory::new_feature: return "New Feature";
        case IssueCategory::improvement: return "Improvement";
        case IssueCategory::task: return "Task";
        case IssueCategory::other: return "Other";
    }
    return "?";
}

inline constexpr std::array<IssueCategory, 5> kAllCategories = {
    IssueCategory::bug, IssueCategory::new_feature, IssueCategory::improvement,
    IssueCategory::task, IssueCategory::other};

// Total mapping from raw tracker types to the overarching categories;
// unmapped raw types fall into Other.  Lookup is case-insensitive.
class TypeMapping {
public:
    static TypeMapping defaults() {
        TypeMapping m;
        m.set("bug", IssueCategory::bug);
        m.set("new feature", IssueCategory::new_feature);
        m.set("feature", IssueCategory::new_feature);
        m.set("feature request", IssueCategory::new_feature);
        m.set("improvement", IssueCategory::improvement);
        m.set("enhancement", IssueCategory::improvement);
        m.set("task", IssueCategory::task);
        m.set("sub-task", IssueCategory::task);
        m.set("subtask", IssueCategory::task);
        return m;
    }

    void set(const std::string& raw_type, IssueCategory category) {
        map_[ascii_lower(raw_type)] = category;
    }

    IssueCategory categorize(const std::string& raw_type) const {
        auto it = map_.find(ascii_lower(raw_type));
        return it == map_.end() ? IssueCategory::other : it->second;
    }

private:
    std::map<std::string, IssueCategory> map_;
};

// --- rank helpers ---------------------------------------------------------------

namespace detail {

// Average ranks (1-based); tied values share the mean of their rank range.
inline std::vector<double> average_ranks(const std::vector<double>& values) {
    std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

inline double t_sf(double t, double df) {
    boost::math::students_t dist(df);
    return boost::math::cdf(boost::math::complement(dist, t));
}

inline double chi2_sf(double x, double df) {
    boost::math::chi_squared dist(df);
    return boost::math::cdf(boost::math::complement(dist, x));
}

struct RankedGroups {
    std::vector<double> rank_sums;
    std::vector<std::size_t> sizes;
    std::size_t n = 0;
    double s2 = 0;  // tie-corrected rank variance
    double h = 0;   // tie-corrected Kruskal-Wallis statistic
    bool degenerate = false;  // all values identical
};

inline RankedGroups rank_groups(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2)
        throw DegenerateInput("need at least two groups");
    RankedGroups rg;
    std::vector<double> all;
    for (const auto& g : groups) {
        if (g.empty()) throw DegenerateInput("empty group");
        rg.sizes.push_back(g.size());
        all.insert(all.end(), g.begin(), g.end());
    }
    rg.n = all.size();
    if (rg.n < 3) throw DegenerateInput("need at least three observations");

    std::vector<double> ranks = average_ranks(all);
    std::size_t offset = 0;
    for (const auto& g : groups) {
        double sum = 0;
        for (std::size_t i = 0; i < g.size(); ++i) sum += ranks[offset + i];
        rg.rank_sums.push_back(sum);
        offset += g.size();
    }

    double n = static_cast<double>(rg.n);
    double correction = n * (n + 1.0) * (n + 1.0) / 4.0;
    double sum_sq = 0;
    for (double r : ranks) sum_sq += r * r;
    rg.s2 = (sum_sq - correction) / (n - 1.0);
    if (rg.s2 <= 0) {
        rg.degenerate = true;  // every observation tied at the same value
        rg.h = 0;
        return rg;
    }
    double between = 0;
    for (std::size_t gi = 0; gi < groups.size(); ++gi)
        between += rg.rank_sums[gi] * rg.rank_sums[gi] / static_cast<double>(rg.sizes[gi]);
    rg.h = (between - correction) / rg.s2;
    return rg;
}

}  // namespace detail

// --- Kruskal-Wallis -------------------------------------------------------------

struct GroupTestResult {
    double H = 0;
    double p = 1;
    double epsilon_sq = 0;  // H * (n+1) / (n^2 - 1)
    std::vector<std::size_t> group_sizes;
};

inline GroupTestResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
    auto rg = detail::rank_groups(groups);
    GroupTestResult result;
    result.group_sizes = rg.sizes;
    if (rg.degenerate) return result;  // H = 0, p = 1
    result.H = rg.h;
    result.p = detail::chi2_sf(rg.h, static_cast<double>(groups.size() - 1));
    double n = static_cast<double>(rg.n);
    result.epsilon_sq = rg.h * (n + 1.0) / (n * n - 1.0);
    return result;
}

// Conover-Iman pairwise comparisons on rank sums with the pooled
// tie-corrected variance; two-sided p-values, symmetric matrix with unit
// diagonal.
inline std::vector<std::vector<double>> conover_posthoc(
    const std::vector<std::vector<double>>& groups) {
    auto rg = detail::rank_groups(groups);
    std::size_t k = groups.size();
    std::vector<std::vector<double>> p(k, std::vector<double>(k, 1.0));
    if (rg.degenerate) return p;
    double n = static_cast<double>(rg.n);
    double df = n - static_cast<double>(k);
    if (df <= 0) throw DegenerateInput("no residual degrees of freedom");
    double d_factor = rg.s2 * (n - 1.0 - rg.h) / df;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            double diff = rg.rank_sums[i] / static_cast<double>(rg.sizes[i]) -
                          rg.rank_sums[j] / static_cast<double>(rg.sizes[j]);
            double variance =
                d_factor * (1.0 / static_cast<double>(rg.sizes[i]) +
                            1.0 / static_cast<double>(rg.sizes[j]));
            double value;
            if (variance <= 0) {
                value = diff == 0 ? 1.0 : 0.0;
            } else {
                double t = std::abs(diff) / std::sqrt(variance);
                value = std::min(1.0, 2.0 * detail::t_sf(t, df));
            }
            p[i][j] = p[j][i] = value;
        }
    }
    return p;
}

// --- Spearman -------------------------------------------------------------------

struct CorrelationResult {
    double rho = 0;
    double p = 1;
    std::size_t n = 0;
};

inline CorrelationResult spearman(const std::vector<double>& xs,
                                  const std::vector<double>& ys) {
    if (xs.size() != ys.size())
        throw LengthMismatch("spearman needs equally sized inputs");
    if (xs.size() < 3) throw DegenerateInput("spearman needs at least three pairs");
    auto rx = detail::average_ranks(xs);
    auto ry = detail::average_ranks(ys);
    double n = static_cast<double>(xs.size());
    double mean = (n + 1.0) / 2.0;
    double cov = 0, var_x = 0, var_y = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double dx = rx[i] - mean;
        double dy = ry[i] - mean;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if (var_x == 0 || var_y == 0)
        throw DegenerateInput("zero rank variance; rho undefined");
    CorrelationResult result;
    result.n = xs.size();
    result.rho = cov / std::sqrt(var_x * var_y);
    double denom = 1.0 - result.rho * result.rho;
    if (denom <= 0) {
        result.p = 0;
    } else {
        double t = result.rho * std::sqrt((n - 2.0) / denom);
        result.p = std::min(1.0, 2.0 * detail::t_sf(std::abs(t), n - 2.0));
    }
    return result;
}

// --- identifier counting ----------------------------------------------------------

// Counts camelCase identifiers, call-form identifiers and file names in raw
// issue text; overlapping matches collapse to the leftmost-longest one.
inline std::size_t count_identifiers(const std::string& text, const ExtensionFilter& filter) {
    static const std::regex camel_lower(R"(\b[a-z][a-z0-9]*(?:[A-Z][a-zA-Z0-9]*)+\b)");
    static const std::regex camel_upper(R"(\b[A-Z][a-z0-9]+(?:[A-Z][a-zA-Z0-9]*)+\b)");
    static const std::regex call_form(R"(\b[A-Za-z_][A-Za-z0-9_]*\(\))");

    std::string ext_alt;
    for (const auto& ext : filter.allowed) {
        if (!ext_alt.empty()) ext_alt += '|';
        ext_alt += ext;
    }
    const std::regex file_name(R"([A-Za-z0-9_\-]+\.(?:)" + ext_alt + R"()\b)");

    struct Span {
        std::size_t begin;
        std::size_t length;
    };
    std::vector<Span> spans;
    auto collect = [&](const std::regex& re) {
        for (auto it = std::sregex_iterator(text.begin(), text.end(), re);
             it != std::sregex_iterator(); ++it)
            spans.push_back({static_cast<std::size_t>(it->position(0)),
                             static_cast<std::size_t>(it->length(0))});
    };
    collect(camel_lower);
    collect(camel_upper);
    collect(call_form);
    collect(file_name);

    std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) {
        if (a.begin != b.begin) return a.begin < b.begin;
        return a.length > b.length;
    });
    std::size_t count = 0;
    std::size_t cursor = 0;
    for (const auto& span : spans) {
        if (count > 0 && span.begin < cursor) continue;
        cursor = span.begin + span.length;
        ++count;
    }
    return count;
}

// --- effect-size binning -----------------------------------------------------------

inline std::string bin_epsilon_squared(double eps2) {
    if (eps2 < 0.01) return "negligible";
    if (eps2 < 0.06) return "small";
    if (eps2 < 0.14) return "medium";
    return "large";
}

inline std::string bin_rho(double rho) {
    double a = std::abs(rho);
    if (a < 0.2) return "very weak";
    if (a < 0.4) return "weak";
    if (a < 0.6) return "moderate";
    if (a < 0.8) return "strong";
    return "very strong";
}

inline constexpr double kSignificanceAlpha = 0.05;

inline bool significant(double p) { return p < kSignificanceAlpha; }

// --- grouped comparisons ------------------------------------------------------------

// The eight ratio metrics used in the statistical analyses; hit@k is binary
// and excluded.
inline std::vector<std::pair<std::string, double>> ratio_metrics(const MetricsRow& row) {
    std::vector<std::pair<std::string, double>> out;
    for (std::size_t k = 0; k < kMetricCutoffs.size(); ++k)
        out.emplace_back("P@" + std::to_string(kMetricCutoffs[k]), row.precision[k]);
    for (std::size_t k = 0; k < kMetricCutoffs.size(); ++k)
        out.emplace_back("R@" + std::to_string(kMetricCutoffs[k]), row.recall[k]);
    out.emplace_back("RP", row.r_precision);
    out.emplace_back("MRR", row.reciprocal_rank);
    return out;
}

enum class GroupingMode { isolate, holdout };

struct CategorizedRow {
    IssueCategory category;
    MetricsRow row;
};

struct GroupedTest {
    std::string metric;
    GroupTestResult test;
    std::vector<IssueCategory> group_labels;  // isolate: category; holdout: held-out category
};

// isolate: one group per category present.  holdout: per category c, the
// complement (all rows except c); tests run across the complements.
inline std::vector<GroupedTest> holdout_compare(const std::vector<CategorizedRow>& rows,
                                                GroupingMode mode) {
    std::vector<IssueCategory> present;
    for (IssueCategory c : kAllCategories) {
        bool any = std::any_of(rows.begin(), rows.end(),
                               [&](const CategorizedRow& r) { return r.category == c; });
        if (any) present.push_back(c);
    }
    if (present.size() < 2)
        throw InsufficientGroups("need at least two issue categories, have " +
                                 std::to_string(present.size()));

    std::vector<std::string> metric_names;
    for (const auto& [name, value] : ratio_metrics(rows.front().row))
        metric_names.push_back(name);

    std::vector<GroupedTest> tests;
    for (std::size_t mi = 0; mi < metric_names.size(); ++mi) {
        std::vector<std::vector<double>> groups;
        for (IssueCategory c : present) {
            std::vector<double> values;
            for (const auto& r : rows) {
                bool include = mode == GroupingMode::isolate ? r.category == c
                                                             : r.category != c;
                if (include) values.push_back(ratio_metrics(r.row)[mi].second);
            }
            groups.push_back(std::move(values));
        }
        tests.push_back({metric_names[mi], kruskal_wallis(groups), present});
    }
    return tests;
}

}  // namespace fileloc
