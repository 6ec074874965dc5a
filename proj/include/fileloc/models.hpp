#pragma once

// The four retrieval models.  VSM, LSI and rVSM score the concatenated
// name+content view; BM25 treats name and content as weighted fields
// (BM25F) with an additive lower bound (BM25+).  All rankings list every
// document exactly once, descending by score, ties broken by path.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "fileloc/errors.hpp"
#include "fileloc/index.hpp"

namespace fileloc {

enum class Model { vsm, lsi, rvsm, bm25 };

inline const char* model_name(Model m) {
    switch (m) {
        case Model::vsm: return "vsm";
        case Model::lsi: return "lsi";
        case Model::rvsm: return "rvsm";
        case Model::bm25: return "bm25";
    }
    return "?";
}

struct ModelConfig {
    Model model = Model::bm25;
    double k1 = 1.2;
    double b = 0.75;
    double delta = 1.0;
    double weight_name = 1.0;
    double weight_content = 1.0;
    std::size_t lsi_dims = 500;

    void validate() const {
        if (k1 <= 0) throw ConfigError("k1 must be > 0");
        if (b < 0 || b > 1) throw ConfigError("b must be in [0, 1]");
        if (delta < 0) throw ConfigError("delta must be >= 0");
        if (weight_name < 0 || weight_content < 0 || (weight_name == 0 && weight_content == 0))
            throw ConfigError("field weights must be >= 0 and not all zero");
        if (lsi_dims < 1) throw ConfigError("lsi_dims must be >= 1");
    }
};

struct ScoredDoc {
    std::string path;
    double score = 0.0;
};

using Ranking = std::vector<ScoredDoc>;

inline Ranking finalize_ranking(std::vector<ScoredDoc> scored) {
    std::sort(scored.begin(), scored.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.path < b.path;
    });
    return scored;
}

// Eq. 1 smooth IDF: ln((N+1)/(n+1)) + 1; unseen terms use n = 0.
inline double idf_smooth(const CorpusIndex& index, const std::string& term) {
    double n = static_cast<double>(index.doc_frequency(term));
    double N = static_cast<double>(index.doc_count());
    return std::log((N + 1.0) / (n + 1.0)) + 1.0;
}

// BM25 IDF: ln((N - n + 0.5)/(n + 0.5) + 1).
inline double idf_bm25(const CorpusIndex& index, const std::string& term) {
    double n = static_cast<double>(index.doc_frequency(term));
    double N = static_cast<double>(index.doc_count());
    return std::log((N - n + 0.5) / (n + 0.5) + 1.0);
}

// Saturating term-frequency component with the additive lower bound:
// (k1+1)*tf / (tf + k1*(1 - b + b*dlen/avg_len)) + delta.
inline double bm25_saturation(double tf, double dlen, double avg_len, double k1, double b,
                              double delta) {
    double norm = k1 * (1.0 - b + b * dlen / avg_len);
    double saturation = tf > 0 ? ((k1 + 1.0) * tf) / (tf + norm) : 0.0;
    return saturation + delta;
}

// Logistic boost over the normalized document length; g := 0 when all
// documents share one length.
inline double rvsm_length_multiplier(double len, double min_len, double max_len) {
    double g = max_len == min_len ? 0.0 : (len - min_len) / (max_len - min_len);
    return 1.0 / (1.0 + std::exp(-g));
}

namespace detail {

inline TermCounts term_counts(const TokenStream& tokens) {
    TermCounts counts;
    for (const auto& t : tokens) counts[t] += 1;
    return counts;
}

inline double cosine(const TermCounts& a, const TermCounts& b) {
    double dot = 0;
    auto it_a = a.begin();
    auto it_b = b.begin();
    while (it_a != a.end() && it_b != b.end()) {
        if (it_a->first < it_b->first) {
            ++it_a;
        } else if (it_b->first < it_a->first) {
            ++it_b;
        } else {
            dot += it_a->second * it_b->second;
            ++it_a;
            ++it_b;
        }
    }
    double norm_a = 0, norm_b = 0;
    for (const auto& [t, v] : a) norm_a += v * v;
    for (const auto& [t, v] : b) norm_b += v * v;
    if (norm_a == 0 || norm_b == 0) return 0;
    return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

enum class TfScheme { relative, log1p, raw };

inline TermCounts weighted_vector(const TermCounts& tf, std::size_t length,
                                  const CorpusIndex& index, TfScheme scheme) {
    TermCounts vec;
    for (const auto& [term, count] : tf) {
        double value = 0;
        switch (scheme) {
            case TfScheme::relative:
                value = length == 0 ? 0.0 : count / static_cast<double>(length);
                break;
            case TfScheme::log1p: value = std::log(count + 1.0); break;
            case TfScheme::raw: value = count; break;
        }
        vec[term] = value * idf_smooth(index, term);
    }
    return vec;
}

inline Ranking score_cosine_family(const TokenStream& query, const CorpusIndex& index,
                                   TfScheme scheme, bool rvsm_length_boost) {
    TermCounts q_tf = term_counts(query);
    TermCounts q_vec = weighted_vector(q_tf, query.size(), index, scheme);

    double min_len = static_cast<double>(index.min_len());
    double max_len = static_cast<double>(index.max_len());
    std::vector<ScoredDoc> scored;
    scored.reserve(index.doc_count());
    for (const auto& doc : index.docs()) {
        TermCounts d_vec = weighted_vector(doc.concat_tf, doc.concat_len(), index, scheme);
        double score = cosine(q_vec, d_vec);
        if (rvsm_length_boost)
            score *= rvsm_length_multiplier(static_cast<double>(doc.concat_len()), min_len,
                                            max_len);
        scored.push_back({doc.path, score});
    }
    return finalize_ranking(std::move(scored));
}

}  // namespace detail

// TF-IDF vector space model: relative term frequency times smooth IDF,
// ranked by cosine similarity against the query vector.
inline Ranking score_vsm(const TokenStream& query, const CorpusIndex& index) {
    return detail::score_cosine_family(query, index, detail::TfScheme::relative, false);
}

// rVSM: log term frequency and a logistic boost for longer documents.
inline Ranking score_rvsm(const TokenStream& query, const CorpusIndex& index) {
    return detail::score_cosine_family(query, index, detail::TfScheme::log1p, true);
}

// LSI over the VSM term-document matrix.  Query and documents are projected
// onto the top singular directions; scores keep the original query norm so
// that a full-rank decomposition reproduces VSM scores exactly.
inline Ranking score_lsi(const TokenStream& query, const CorpusIndex& index,
                         std::size_t dims) {
    if (dims < 1) throw ConfigError("lsi_dims must be >= 1");
    const auto& df = index.df();
    std::map<std::string, Eigen::Index> term_row;
    Eigen::Index rows = 0;
    for (const auto& [term, n] : df) term_row.emplace(term, rows++);
    Eigen::Index cols = static_cast<Eigen::Index>(index.doc_count());

    Eigen::MatrixXd matrix = Eigen::MatrixXd::Zero(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        const auto& doc = index.docs()[static_cast<std::size_t>(j)];
        auto vec = detail::weighted_vector(doc.concat_tf, doc.concat_len(), index,
                                           detail::TfScheme::relative);
        for (const auto& [term, value] : vec) matrix(term_row.at(term), j) = value;
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
        throw DecompositionFailure("SVD did not converge");
    Eigen::Index k = std::min<Eigen::Index>(static_cast<Eigen::Index>(dims),
                                            svd.singularValues().size());

    // Query vector in term space; components for unseen terms contribute to
    // the norm but lie outside the column space.
    TermCounts q_tf = detail::term_counts(query);
    TermCounts q_weighted =
        detail::weighted_vector(q_tf, query.size(), index, detail::TfScheme::relative);
    Eigen::VectorXd q = Eigen::VectorXd::Zero(rows);
    double q_norm_sq = 0;
    for (const auto& [term, value] : q_weighted) {
        q_norm_sq += value * value;
        auto it = term_row.find(term);
        if (it != term_row.end()) q(it->second) = value;
    }
    double q_norm = std::sqrt(q_norm_sq);

    Eigen::VectorXd q_latent = svd.matrixU().leftCols(k).transpose() * q;
    std::vector<ScoredDoc> scored;
    scored.reserve(index.doc_count());
    for (Eigen::Index j = 0; j < cols; ++j) {
        // U_k^T * a_j == S_k .* V_k(j, :)
        Eigen::VectorXd d_latent =
            svd.singularValues().head(k).cwiseProduct(svd.matrixV().row(j).head(k).transpose());
        double d_norm = d_latent.norm();
        double dot = q_latent.dot(d_latent);
        // an exactly-orthogonal pair picks up SVD rounding noise; snap it
        if (std::abs(dot) <= 1e-12 * q_norm * d_norm) dot = 0;
        double score = (q_norm == 0 || d_norm == 0) ? 0.0 : dot / (q_norm * d_norm);
        scored.push_back({index.docs()[static_cast<std::size_t>(j)].path, score});
    }
    return finalize_ranking(std::move(scored));
}

// BM25F+ per Eq. 4-6: weighted field term frequencies, weighted document
// length, and the additive delta applied for every query token.
inline Ranking score_bm25(const TokenStream& query, const CorpusIndex& index,
                          const ModelConfig& config) {
    config.validate();
    double l_avg = index.avg_weighted_len(config.weight_name, config.weight_content);
    std::vector<ScoredDoc> scored;
    scored.reserve(index.doc_count());
    for (const auto& doc : index.docs()) {
        double wlen = doc.weighted_len(config.weight_name, config.weight_content);
        double score = 0;
        for (const auto& token : query) {  // multiplicity counts
            auto name_it = doc.name_tf.find(token);
            auto content_it = doc.content_tf.find(token);
            double tf = config.weight_name *
                            (name_it == doc.name_tf.end() ? 0.0 : name_it->second) +
                        config.weight_content *
                            (content_it == doc.content_tf.end() ? 0.0 : content_it->second);
            score += idf_bm25(index, token) *
                     bm25_saturation(tf, wlen, l_avg, config.k1, config.b, config.delta);
        }
        scored.push_back({doc.path, score});
    }
    return finalize_ranking(std::move(scored));
}

inline Ranking score_with_model(const TokenStream& query, const CorpusIndex& index,
                                const ModelConfig& config) {
    switch (config.model) {
        case Model::vsm: return score_vsm(query, index);
        case Model::lsi: return score_lsi(query, index, config.lsi_dims);
        case Model::rvsm: return score_rvsm(query, index);
        case Model::bm25: return score_bm25(query, index, config);
    }
    throw ConfigError("unknown model");
}

}  // namespace fileloc
