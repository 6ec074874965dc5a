#pragma once

// Run configuration: a JSON file with full command-line overrides (flags
// win over the file).

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "fileloc/dataset.hpp"
#include "fileloc/errors.hpp"
#include "fileloc/models.hpp"
#include "fileloc/stats.hpp"
#include "fileloc/text.hpp"

namespace fileloc {

enum class EvalSplit { validation, test, all };

struct RunConfig {
    std::filesystem::path repo_path;
    std::string head_ref = "HEAD";
    std::string project_prefix;
    std::filesystem::path issues_path;
    ExtensionFilter extensions = ExtensionFilter::defaults();
    PreprocessConfig preprocess;
    ModelConfig model;
    bool all_models = false;
    double split_ratio = 0.5;
    EvalSplit eval_split = EvalSplit::test;
    std::filesystem::path output_dir = "out";
    unsigned parallelism = 1;
    TypeMapping type_mapping = TypeMapping::defaults();
    std::size_t top_k = 10;
    bool dump_rankings = true;

    void validate_common() const {
        if (parallelism < 1) throw ConfigError("jobs must be >= 1");
        if (split_ratio < 0 || split_ratio > 1)
            throw ConfigError("split_ratio must be in [0, 1]");
        if (extensions.allowed.empty()) throw ConfigError("extension list must be non-empty");
        model.validate();
    }
};

namespace detail {

inline MarkupMode parse_markup_mode(const std::string& s) {
    if (s == "keep_raw") return MarkupMode::keep_raw;
    if (s == "strip_formatting") return MarkupMode::strip_formatting;
    if (s == "strip_blocks") return MarkupMode::strip_blocks;
    if (s == "blocks_to_marker") return MarkupMode::blocks_to_marker;
    throw ConfigError("unknown markup_mode '" + s + "'");
}

inline Model parse_model_name(const std::string& s, bool* all = nullptr) {
    if (all) *all = false;
    if (s == "vsm") return Model::vsm;
    if (s == "lsi") return Model::lsi;
    if (s == "rvsm") return Model::rvsm;
    if (s == "bm25") return Model::bm25;
    if (s == "all" && all) {
        *all = true;
        return Model::bm25;
    }
    throw ConfigError("unknown model '" + s + "'");
}

inline IssueCategory parse_category(const std::string& s) {
    std::string lower = ascii_lower(s);
    if (lower == "bug") return IssueCategory::bug;
    if (lower == "new feature") return IssueCategory::new_feature;
    if (lower == "improvement") return IssueCategory::improvement;
    if (lower == "task") return IssueCategory::task;
    if (lower == "other") return IssueCategory::other;
    throw ConfigError("unknown issue category '" + s + "'");
}

inline void reject_unknown_keys(const nlohmann::json& obj,
                                const std::vector<std::string>& known,
                                const std::string& where) {
    for (const auto& [key, value] : obj.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("unknown config key '" + key + "' in " + where);
}

}  // namespace detail

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    nlohmann::json obj = nlohmann::json::parse(in, nullptr, false);
    if (obj.is_discarded()) throw ConfigError("config file is not valid JSON");

    detail::reject_unknown_keys(
        obj,
        {"repo", "head", "prefix", "issues", "extensions", "preprocess", "model",
         "split_ratio", "eval_split", "out_dir", "jobs", "type_mapping", "top_k",
         "dump_rankings"},
        "config");

    RunConfig config;
    if (obj.contains("repo")) config.repo_path = obj["repo"].get<std::string>();
    if (obj.contains("head")) config.head_ref = obj["head"].get<std::string>();
    if (obj.contains("prefix")) config.project_prefix = obj["prefix"].get<std::string>();
    if (obj.contains("issues")) config.issues_path = obj["issues"].get<std::string>();
    if (obj.contains("extensions")) {
        config.extensions.allowed.clear();
        for (const auto& e : obj["extensions"])
            config.extensions.allowed.insert(ascii_lower(e.get<std::string>()));
    }
    if (obj.contains("preprocess")) {
        const auto& p = obj["preprocess"];
        detail::reject_unknown_keys(
            p, {"markup_mode", "lowercase", "stem", "subtoken_split", "marker_word"},
            "preprocess");
        if (p.contains("markup_mode"))
            config.preprocess.markup_mode =
                detail::parse_markup_mode(p["markup_mode"].get<std::string>());
        if (p.contains("lowercase")) config.preprocess.lowercase = p["lowercase"].get<bool>();
        if (p.contains("stem")) config.preprocess.stem = p["stem"].get<bool>();
        if (p.contains("subtoken_split"))
            config.preprocess.subtoken_split = p["subtoken_split"].get<bool>();
        if (p.contains("marker_word"))
            config.preprocess.marker_word = p["marker_word"].get<std::string>();
    }
    if (obj.contains("model")) {
        const auto& m = obj["model"];
        detail::reject_unknown_keys(
            m, {"name", "k1", "b", "delta", "weight_name", "weight_content", "lsi_dims"},
            "model");
        if (m.contains("name"))
            config.model.model =
                detail::parse_model_name(m["name"].get<std::string>(), &config.all_models);
        if (m.contains("k1")) config.model.k1 = m["k1"].get<double>();
        if (m.contains("b")) config.model.b = m["b"].get<double>();
        if (m.contains("delta")) config.model.delta = m["delta"].get<double>();
        if (m.contains("weight_name")) config.model.weight_name = m["weight_name"].get<double>();
        if (m.contains("weight_content"))
            config.model.weight_content = m["weight_content"].get<double>();
        if (m.contains("lsi_dims")) config.model.lsi_dims = m["lsi_dims"].get<std::size_t>();
    }
    if (obj.contains("split_ratio")) config.split_ratio = obj["split_ratio"].get<double>();
    if (obj.contains("eval_split")) {
        std::string s = obj["eval_split"].get<std::string>();
        if (s == "validation")
            config.eval_split = EvalSplit::validation;
        else if (s == "test")
            config.eval_split = EvalSplit::test;
        else if (s == "all")
            config.eval_split = EvalSplit::all;
        else
            throw ConfigError("unknown eval_split '" + s + "'");
    }
    if (obj.contains("out_dir")) config.output_dir = obj["out_dir"].get<std::string>();
    if (obj.contains("jobs")) config.parallelism = obj["jobs"].get<unsigned>();
    if (obj.contains("type_mapping")) {
        for (const auto& [raw, category] : obj["type_mapping"].items())
            config.type_mapping.set(raw, detail::parse_category(category.get<std::string>()));
    }
    if (obj.contains("top_k")) config.top_k = obj["top_k"].get<std::size_t>();
    if (obj.contains("dump_rankings")) config.dump_rankings = obj["dump_rankings"].get<bool>();
    return config;
}

}  // namespace fileloc
