#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "support/helpers.hpp"

// Brute-force reference computations, written against the nested-array layout
// so they stay independent of the library implementations they check.
namespace testsupport::oracle {

// max over layers, span tokens, and query tokens of the head mean
inline double span_score(const Tensor4& a, int first, int last) {
    double best = -1e300;
    for (std::size_t l = 0; l < a.size(); ++l) {
        for (int t = first; t <= last; ++t) {
            for (std::size_t q = 0; q < a[l][0][0].size(); ++q) {
                double sum = 0.0;
                for (std::size_t h = 0; h < a[l].size(); ++h) sum += a[l][h][static_cast<std::size_t>(t)][q];
                best = std::max(best, sum / static_cast<double>(a[l].size()));
            }
        }
    }
    return best;
}

inline std::vector<double> span_scores(const Tensor4& a, const std::vector<longdoc::TokenSpan>& spans) {
    std::vector<double> out;
    for (const auto& span : spans) out.push_back(span_score(a, span.first, span.last));
    return out;
}

inline double cosine(const std::vector<double>& x, const std::vector<double>& y) {
    long double dot = 0.0L;
    long double nx = 0.0L;
    long double ny = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        dot += static_cast<long double>(x[i]) * static_cast<long double>(y[i]);
        nx += static_cast<long double>(x[i]) * static_cast<long double>(x[i]);
        ny += static_cast<long double>(y[i]) * static_cast<long double>(y[i]);
    }
    return static_cast<double>(dot / (std::sqrt(nx) * std::sqrt(ny)));
}

inline double mean_over_sentences(const std::vector<double>& sheet, const std::set<int>& sentences) {
    double sum = 0.0;
    for (int s : sentences) sum += sheet[static_cast<std::size_t>(s)];
    return sum / static_cast<double>(sentences.size());
}

// 1-based rank of the best gold paragraph under descending scores, ties to
// the lower index
inline int gold_rank(const std::vector<double>& scores, const std::vector<int>& gold) {
    std::vector<int> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
    });
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        if (std::find(gold.begin(), gold.end(), order[rank]) != gold.end()) return static_cast<int>(rank) + 1;
    }
    return -1;
}

// degree-3 least squares via normal equations in long double
inline std::vector<double> cubic_fit(const std::vector<double>& values) {
    const int m = 4;
    long double ata[4][4] = {};
    long double atb[4] = {};
    for (std::size_t i = 0; i < values.size(); ++i) {
        long double x = static_cast<long double>(i);
        long double powers[4] = {1.0L, x, x * x, x * x * x};
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < m; ++c) ata[r][c] += powers[r] * powers[c];
            atb[r] += powers[r] * static_cast<long double>(values[i]);
        }
    }
    // gaussian elimination with partial pivoting
    for (int col = 0; col < m; ++col) {
        int pivot = col;
        for (int r = col + 1; r < m; ++r) {
            if (std::fabs(static_cast<double>(ata[r][col])) > std::fabs(static_cast<double>(ata[pivot][col]))) pivot = r;
        }
        std::swap(ata[col], ata[pivot]);
        std::swap(atb[col], atb[pivot]);
        for (int r = col + 1; r < m; ++r) {
            long double factor = ata[r][col] / ata[col][col];
            for (int c = col; c < m; ++c) ata[r][c] -= factor * ata[col][c];
            atb[r] -= factor * atb[col];
        }
    }
    std::vector<double> coefficients(4, 0.0);
    for (int r = m - 1; r >= 0; --r) {
        long double sum = atb[r];
        for (int c = r + 1; c < m; ++c) sum -= ata[r][c] * static_cast<long double>(coefficients[static_cast<std::size_t>(c)]);
        coefficients[static_cast<std::size_t>(r)] = static_cast<double>(sum / ata[r][r]);
    }
    return coefficients;
}

inline std::vector<int> union_expand(const std::vector<int>& sentence_paragraphs,
                                     const std::vector<std::vector<int>>& entity_paragraphs) {
    std::set<int> merged(sentence_paragraphs.begin(), sentence_paragraphs.end());
    for (const auto& ps : entity_paragraphs) merged.insert(ps.begin(), ps.end());
    return {merged.begin(), merged.end()};
}

}  // namespace testsupport::oracle
