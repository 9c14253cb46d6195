#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hwstack {

// Area under the ROC curve by the Mann-Whitney rank-sum statistic, with
// midranks for tied scores: equivalent to the fraction of (positive,
// negative) pairs ranked correctly, ties counting one half.
inline double auc_rank_sum(const std::vector<double>& pos, const std::vector<double>& neg) {
    if (pos.empty() || neg.empty()) throw std::invalid_argument("AUC needs both classes");
    std::vector<std::pair<double, bool>> all;
    all.reserve(pos.size() + neg.size());
    for (double s : pos) all.emplace_back(s, true);
    for (double s : neg) all.emplace_back(s, false);
    std::sort(all.begin(), all.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < all.size()) {
        std::size_t j = i;
        while (j < all.size() && all[j].first == all[i].first) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
        for (std::size_t t = i; t < j; ++t)
            if (all[t].second) rank_sum_pos += midrank;
        i = j;
    }
    const double np = static_cast<double>(pos.size());
    const double nn = static_cast<double>(neg.size());
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

// Fraction of pairs classified correctly by "same iff score > tau".
inline double accuracy_at(const std::vector<std::pair<double, bool>>& scores, double tau) {
    if (scores.empty()) throw std::invalid_argument("no scores");
    std::size_t correct = 0;
    for (const auto& [s, same] : scores)
        if ((s > tau) == same) ++correct;
    return static_cast<double>(correct) / static_cast<double>(scores.size());
}

struct MeanStdev {
    double mean = 0.0;
    double stdev = 0.0;
};

// Sample mean and (n-1)-normalized standard deviation.
inline MeanStdev mean_stdev(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("no samples");
    MeanStdev out;
    for (double x : xs) out.mean += x;
    out.mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) return out;
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.stdev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    return out;
}

}  // namespace hwstack
