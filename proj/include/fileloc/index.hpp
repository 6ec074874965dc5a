#pragma once

// Per-issue corpus index: document frequencies over the concatenated
// name+content view, per-field term frequencies and lengths, and the length
// statistics the scoring functions need.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "fileloc/errors.hpp"
#include "fileloc/text.hpp"

namespace fileloc {

struct Document {
    std::string path;
    TokenStream name_field;  // tokens of the file name
    TokenStream content_field;
};

using TermCounts = std::map<std::string, double>;  // ordered for deterministic sums

struct IndexedDocument {
    std::string path;
    TermCounts name_tf;
    TermCounts content_tf;
    TermCounts concat_tf;  // name + content merged
    std::size_t name_len = 0;
    std::size_t content_len = 0;

    std::size_t concat_len() const { return name_len + content_len; }
    double weighted_len(double w_name, double w_content) const {
        return w_name * static_cast<double>(name_len) +
               w_content * static_cast<double>(content_len);
    }
};

class CorpusIndex {
public:
    static CorpusIndex build(const std::vector<Document>& documents) {
        if (documents.empty()) throw EmptyCorpus("cannot index an empty corpus");
        CorpusIndex index;
        index.docs_.reserve(documents.size());
        for (const auto& doc : documents) {
            IndexedDocument d;
            d.path = doc.path;
            for (const auto& t : doc.name_field) {
                d.name_tf[t] += 1;
                d.concat_tf[t] += 1;
            }
            for (const auto& t : doc.content_field) {
                d.content_tf[t] += 1;
                d.concat_tf[t] += 1;
            }
            d.name_len = doc.name_field.size();
            d.content_len = doc.content_field.size();
            for (const auto& [term, count] : d.concat_tf) index.df_[term] += 1;
            index.docs_.push_back(std::move(d));
        }
        index.min_len_ = index.max_len_ = index.docs_.front().concat_len();
        for (const auto& d : index.docs_) {
            index.min_len_ = std::min(index.min_len_, d.concat_len());
            index.max_len_ = std::max(index.max_len_, d.concat_len());
        }
        return index;
    }

    std::size_t doc_count() const { return docs_.size(); }
    const std::vector<IndexedDocument>& docs() const { return docs_; }
    const std::map<std::string, std::size_t>& df() const { return df_; }

    std::size_t doc_frequency(const std::string& term) const {
        auto it = df_.find(term);
        return it == df_.end() ? 0 : it->second;
    }

    std::size_t min_len() const { return min_len_; }
    std::size_t max_len() const { return max_len_; }

    double avg_weighted_len(double w_name, double w_content) const {
        double total = 0;
        for (const auto& d : docs_) total += d.weighted_len(w_name, w_content);
        return total / static_cast<double>(docs_.size());
    }

private:
    std::map<std::string, std::size_t> df_;
    std::vector<IndexedDocument> docs_;
    std::size_t min_len_ = 0;
    std::size_t max_len_ = 0;
};

}  // namespace fileloc
