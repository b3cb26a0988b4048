#include "longdoc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "longdoc/error.hpp"

namespace longdoc {

int gold_rank(const std::vector<double>& paragraph_scores, const std::vector<int>& gold_paragraphs) {
    if (gold_paragraphs.empty()) fail(ErrorKind::empty_gold, "no gold paragraphs to rank");
    std::vector<int> order(paragraph_scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (paragraph_scores[static_cast<std::size_t>(a)] != paragraph_scores[static_cast<std::size_t>(b)]) {
            return paragraph_scores[static_cast<std::size_t>(a)] > paragraph_scores[static_cast<std::size_t>(b)];
        }
        return a < b;
    });
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        if (std::find(gold_paragraphs.begin(), gold_paragraphs.end(), order[rank]) != gold_paragraphs.end()) {
            return static_cast<int>(rank) + 1;
        }
    }
    fail(ErrorKind::schema, "gold paragraph index outside the scored paragraphs");
}

LayerProfile profile_layers(const std::vector<RetrievalSample>& samples, AttentionBackend& backend,
                            const std::vector<int>& layers) {
    if (samples.empty()) fail(ErrorKind::schema, "no samples to profile");
    if (layers.empty()) fail(ErrorKind::config, "profile_layers needs a non-empty layer list");

    std::size_t max_subqueries = 0;
    for (const RetrievalSample& sample : samples) {
        if (sample.subqueries.empty()) {
            fail(ErrorKind::missing_subqueries, "sample " + sample.sample_id + " has no subquery decomposition");
        }
        max_subqueries = std::max(max_subqueries, sample.subqueries.size());
    }

    LayerProfile profile;
    profile.layer_ids = layers;
    profile.sample_count = static_cast<int>(samples.size());
    profile.subquery_sample_counts.assign(max_subqueries, 0);
    std::vector<std::vector<double>> rank_sums(layers.size(), std::vector<double>(max_subqueries, 0.0));

    for (const RetrievalSample& sample : samples) {
        for (std::size_t sq = 0; sq < sample.subqueries.size(); ++sq) {
            const Subquery& sub = sample.subqueries[sq];
            auto [tensor, alignment] = forward_with_attention(backend, sample.document, sub.text, layers);
            profile.subquery_sample_counts[sq] += 1;
            for (std::size_t li = 0; li < layers.size(); ++li) {
                AttentionTensor single = tensor.select_layers({layers[li]});
                std::vector<double> scores = paragraph_attention_scores(single, alignment);
                rank_sums[li][sq] += static_cast<double>(gold_rank(scores, sub.gold_paragraphs));
            }
        }
    }

    profile.ranks.assign(layers.size(), std::vector<double>(max_subqueries, 0.0));
    for (std::size_t li = 0; li < layers.size(); ++li) {
        for (std::size_t sq = 0; sq < max_subqueries; ++sq) {
            int n = profile.subquery_sample_counts[sq];
            profile.ranks[li][sq] = n > 0 ? rank_sums[li][sq] / static_cast<double>(n) : 0.0;
        }
    }
    for (std::size_t sq = 0; sq < max_subqueries; ++sq) {
        double best = std::numeric_limits<double>::max();
        int best_layer = layers.front();
        for (std::size_t li = 0; li < layers.size(); ++li) {
            if (profile.ranks[li][sq] < best) {
                best = profile.ranks[li][sq];
                best_layer = layers[li];
            }
        }
        profile.best_layer_per_subquery.push_back(best_layer);
    }
    return profile;
}

namespace {

// Householder QR least squares for the n x m Vandermonde system (m small).
std::vector<double> least_squares_polynomial(const std::vector<double>& values, int degree) {
    const int n = static_cast<int>(values.size());
    const int m = degree + 1;
    std::vector<double> a(static_cast<std::size_t>(n) * static_cast<std::size_t>(m));
    for (int i = 0; i < n; ++i) {
        double x = static_cast<double>(i);
        double power = 1.0;
        for (int j = 0; j < m; ++j) {
            a[static_cast<std::size_t>(i) * static_cast<std::size_t>(m) + static_cast<std::size_t>(j)] = power;
            power *= x;
        }
    }
    std::vector<double> b = values;

    for (int col = 0; col < m; ++col) {
        double norm = 0.0;
        for (int i = col; i < n; ++i) {
            double v = a[static_cast<std::size_t>(i) * static_cast<std::size_t>(m) + static_cast<std::size_t>(col)];
            norm += v * v;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) fail(ErrorKind::insufficient_points, "degenerate polynomial system");
        double pivot = a[static_cast<std::size_t>(col) * static_cast<std::size_t>(m) + static_cast<std::size_t>(col)];
        double alpha = pivot > 0.0 ? -norm : norm;
        std::vector<double> v(static_cast<std::size_t>(n), 0.0);
        v[static_cast<std::size_t>(col)] = pivot - alpha;
        for (int i = col + 1; i < n; ++i) {
            v[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i) * static_cast<std::size_t>(m) + static_cast<std::size_t>(col)];
        }
        double vtv = 0.0;
        for (int i = col; i < n; ++i) vtv += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
        if (vtv == 0.0) continue;
        for (int j = col; j < m; ++j) {
            double dot = 0.0;
            for (int i = col; i < n; ++i) {
                dot += v[static_cast<std::size_t>(i)] *
                       a[static_cast<std::size_t>(i) * static_cast<std::size_t>(m) + static_cast<std::size_t>(j)];
            }
            double factor = 2.0 * dot / vtv;
            for (int i = col; i < n; ++i) {
                a[static_cast<std::size_t>(i) * static_cast<std::size_t>(m) + static_cast<std::size_t>(j)] -=
                    factor * v[static_cast<std::size_t>(i)];
            }
        }
        double dot_b = 0.0;
        for (int i = col; i < n; ++i) dot_b += v[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
        double factor_b = 2.0 * dot_b / vtv;
        for (int i = col; i < n; ++i) b[static_cast<std::size_t>(i)] -= factor_b * v[static_cast<std::size_t>(i)];
    }

    std::vector<double> coefficients(static_cast<std::size_t>(m), 0.0);
    for (int row = m - 1; row >= 0; --row) {
        double sum = b[static_cast<std::size_t>(row)];
        for (int j = row + 1; j < m; ++j) {
            sum -= a[static_cast<std::size_t>(row) * static_cast<std::size_t>(m) + static_cast<std::size_t>(j)] *
                   coefficients[static_cast<std::size_t>(j)];
        }
        double diag = a[static_cast<std::size_t>(row) * static_cast<std::size_t>(m) + static_cast<std::size_t>(row)];
        if (diag == 0.0) fail(ErrorKind::insufficient_points, "singular polynomial system");
        coefficients[static_cast<std::size_t>(row)] = sum / diag;
    }
    return coefficients;
}

}  // namespace

std::array<double, 5> quartic_fit(const std::vector<double>& values) {
    if (values.size() < 5) {
        fail(ErrorKind::insufficient_points,
             "quartic fit needs at least 5 points, got " + std::to_string(values.size()));
    }
    std::vector<double> c = least_squares_polynomial(values, 4);
    return {c[0], c[1], c[2], c[3], c[4]};
}

double polynomial_residual(const std::vector<double>& values, std::span<const double> coefficients) {
    double residual = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        double x = static_cast<double>(i);
        double y = 0.0;
        double power = 1.0;
        for (double c : coefficients) {
            y += c * power;
            power *= x;
        }
        double d = values[i] - y;
        residual += d * d;
    }
    return residual;
}

std::vector<int> select_layers(const LayerProfile& profile) {
    std::vector<int> layers = profile.best_layer_per_subquery;
    std::sort(layers.begin(), layers.end());
    layers.erase(std::unique(layers.begin(), layers.end()), layers.end());
    return layers;
}

std::vector<int> needle_head_count(const AttentionTensor& attention, const TokenSpan& needle_token_span) {
    if (needle_token_span.first < 0 || needle_token_span.last >= attention.doc_token_count) {
        fail(ErrorKind::shape_mismatch, "needle span outside the document tokens");
    }
    std::vector<int> counts(static_cast<std::size_t>(attention.layer_count()), 0);
    for (int l = 0; l < attention.layer_count(); ++l) {
        for (int h = 0; h < attention.head_count; ++h) {
            double best = std::numeric_limits<double>::lowest();
            int best_token = 0;
            for (int t = 0; t < attention.doc_token_count; ++t) {
                for (int q = 0; q < attention.query_token_count; ++q) {
                    double v = attention.at(l, h, t, q);
                    if (v > best) {
                        best = v;
                        best_token = t;
                    }
                }
            }
            if (needle_token_span.contains(best_token)) counts[static_cast<std::size_t>(l)] += 1;
        }
    }
    return counts;
}

nlohmann::json layer_profile_to_json(const LayerProfile& profile) {
    return nlohmann::json{{"layers", profile.layer_ids},
                          {"ranks", profile.ranks},
                          {"subquery_sample_counts", profile.subquery_sample_counts},
                          {"best_layer_per_subquery", profile.best_layer_per_subquery},
                          {"selected_layers", select_layers(profile)},
                          {"sample_count", profile.sample_count}};
}

}  // namespace longdoc
