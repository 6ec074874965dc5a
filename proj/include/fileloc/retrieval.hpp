#pragma once

// Snapshot materialization and per-issue ranking: fetch the a-priori tree,
// preprocess its source files, build a fresh index and score it against the
// issue text.  An optional cache keyed by (snapshot commit, preprocessing)
// avoids re-reading identical snapshots; it is safe for concurrent use.

#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "fileloc/dataset.hpp"
#include "fileloc/git.hpp"
#include "fileloc/index.hpp"
#include "fileloc/models.hpp"
#include "fileloc/text.hpp"

namespace fileloc {

inline Document preprocess_file(const std::string& path, const std::string& bytes,
                                const PreprocessConfig& config) {
    auto slash = path.rfind('/');
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    Document doc;
    doc.path = path;
    doc.name_field = normalize(tokenize(base), config);
    if (doc.name_field.empty() && !base.empty()) doc.name_field.push_back(base);
    doc.content_field = normalize(tokenize(bytes), config);
    return doc;
}

inline TokenStream preprocess_issue_text(const std::string& text,
                                         const PreprocessConfig& config) {
    return preprocess_text(text, config);
}

// Source files of the snapshot tree, preprocessed, sorted by path.
inline std::vector<Document> materialize_snapshot(const GitRepo& repo, const CommitId& commit,
                                                  const ExtensionFilter& filter,
                                                  const PreprocessConfig& preprocess) {
    std::vector<TreeEntry> entries;
    for (auto& entry : repo.ls_tree(commit))
        if (filter.matches(entry.path)) entries.push_back(std::move(entry));
    std::sort(entries.begin(), entries.end(),
              [](const TreeEntry& a, const TreeEntry& b) { return a.path < b.path; });

    std::vector<std::string> oids;
    oids.reserve(entries.size());
    for (const auto& e : entries) oids.push_back(e.oid);
    std::vector<std::string> blobs = repo.read_blobs(oids);

    std::vector<Document> docs;
    docs.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i)
        docs.push_back(preprocess_file(entries[i].path, blobs[i], preprocess));
    return docs;
}

class SnapshotCache {
public:
    using Snapshot = std::shared_ptr<const std::vector<Document>>;

    Snapshot get_or_load(const GitRepo& repo, const CommitId& commit,
                         const ExtensionFilter& filter, const PreprocessConfig& preprocess) {
        std::string key = commit + "|" + preprocess.fingerprint();
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = cache_.find(key);
            if (it != cache_.end()) return it->second;
        }
        auto snapshot = std::make_shared<const std::vector<Document>>(
            materialize_snapshot(repo, commit, filter, preprocess));
        std::lock_guard<std::mutex> lock(mutex_);
        return cache_.emplace(key, std::move(snapshot)).first->second;
    }

private:
    std::mutex mutex_;
    std::unordered_map<std::string, Snapshot> cache_;
};

// Full per-issue scoring path: snapshot files -> index -> ranking.
inline Ranking rank_for_sample(const LabeledSample& sample, const GitRepo& repo,
                               const ModelConfig& model, const PreprocessConfig& preprocess,
                               const ExtensionFilter& filter,
                               SnapshotCache* cache = nullptr) {
    std::shared_ptr<const std::vector<Document>> docs;
    if (cache) {
        docs = cache->get_or_load(repo, sample.snapshot.commit, filter, preprocess);
    } else {
        docs = std::make_shared<const std::vector<Document>>(
            materialize_snapshot(repo, sample.snapshot.commit, filter, preprocess));
    }
    CorpusIndex index = CorpusIndex::build(*docs);
    TokenStream query = preprocess_issue_text(sample.issue_text(), preprocess);
    return score_with_model(query, index, model);
}

}  // namespace fileloc
