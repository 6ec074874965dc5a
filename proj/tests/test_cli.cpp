#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "fileloc/git.hpp"
#include "support/e2e_fixture.hpp"
#include "support/fixtures.hpp"

using namespace fileloc;
using testsupport::GitFixture;
using testsupport::TempDir;

namespace {

CommandResult run_cli(const std::vector<std::string>& args) {
    std::vector<std::string> argv = {FILELOC_CLI_BIN};
    argv.insert(argv.end(), args.begin(), args.end());
    return run_command(argv);
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::size_t line_count(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++n;
    return n;
}

nlohmann::json parse_json_file(const std::filesystem::path& path) {
    return nlohmann::json::parse(slurp(path));
}

}  // namespace

TEST_CASE("exit codes") {
    TempDir tmp;

    SECTION("missing configuration is exit 2") {
        auto result = run_cli({"mine", "--prefix", "K", "--issues", "nope.jsonl"});
        CHECK(result.status == 2);  // no repo configured
    }

    SECTION("nonexistent repository is exit 3") {
        std::ofstream issues(tmp.path() / "issues.jsonl");
        issues.close();
        auto result = run_cli({"mine", "--repo", (tmp.path() / "missing").string(),
                               "--prefix", "K", "--issues",
                               (tmp.path() / "issues.jsonl").string(), "--out",
                               (tmp.path() / "out").string()});
        CHECK(result.status == 3);
    }

    SECTION("repository without commits is exit 3") {
        auto repo_dir = tmp.path() / "empty";
        run_command({"git", "init", "-q", "-b", "main", repo_dir.string()});
        std::ofstream issues(tmp.path() / "issues.jsonl");
        issues.close();
        auto result = run_cli({"mine", "--repo", repo_dir.string(), "--prefix", "K",
                               "--issues", (tmp.path() / "issues.jsonl").string(), "--out",
                               (tmp.path() / "out").string()});
        CHECK(result.status == 3);
    }

    SECTION("unknown subcommand is exit 2") {
        CHECK(run_cli({"frobnicate"}).status == 2);
    }
}

TEST_CASE("mine handles merge-linked issues end to end") {
    TempDir tmp;

    // the ten-commit topology, with the issue under test on a merge commit
    auto build_repo = [&](const std::string& name, const std::string& m1_summary,
                          const std::string& m3_summary) {
        auto dir = tmp.path() / name;
        GitFixture fixture(dir);
        fixture.write("f.java", "1");
        auto c1 = fixture.commit("1");
        fixture.write("f.java", "2");
        auto c2 = fixture.commit("2", {c1});
        fixture.write("f.java", "3");
        auto c3 = fixture.commit("3", {c2});
        fixture.write("f.java", "5");
        auto c5 = fixture.commit("5", {c2});
        fixture.write("f.java", "7");
        auto c7 = fixture.commit("7", {c2});
        fixture.write("f.java", "m2");
        auto m2 = fixture.commit("M2 merge", {c5, c7});
        fixture.write("f.java", "6");
        auto c6 = fixture.commit("6", {m2});
        fixture.write("f.java", "m1");
        auto m1 = fixture.commit(m1_summary, {c3, c5});
        fixture.write("f.java", "4");
        auto c4 = fixture.commit("4", {m1});
        fixture.write("f.java", "m3");
        fixture.commit(m3_summary, {c4, c6});
        return dir;
    };

    std::ofstream issues(tmp.path() / "issues.jsonl");
    issues << R"({"key":"T-1","type":"Bug","title":"t","body":"","created":1})" << "\n";
    issues.close();

    SECTION("issue on the clean merge survives") {
        auto repo = build_repo("repo_clean", "T-1 merge with entry", "M3 merge");
        auto out = tmp.path() / "out_clean";
        auto result = run_cli({"mine", "--repo", repo.string(), "--prefix", "T", "--issues",
                               (tmp.path() / "issues.jsonl").string(), "--out", out.string()});
        REQUIRE(result.status == 0);
        auto report = parse_json_file(out / "mining_report.json");
        CHECK(report.at("linked") == 1);
        CHECK(report.at("discarded_entry") == 0);
        CHECK(line_count(out / "links.jsonl") == 1);
    }

    SECTION("issue on the ambiguous merge is dropped with discarded_entry") {
        auto repo = build_repo("repo_ambiguous", "M1 merge", "T-1 ambiguous merge");
        auto out = tmp.path() / "out_ambiguous";
        auto result = run_cli({"mine", "--repo", repo.string(), "--prefix", "T", "--issues",
                               (tmp.path() / "issues.jsonl").string(), "--out", out.string()});
        REQUIRE(result.status == 0);
        auto report = parse_json_file(out / "mining_report.json");
        CHECK(report.at("linked") == 0);
        CHECK(report.at("discarded_entry") == 1);
    }
}

TEST_CASE("full pipeline on the synthetic project") {
    TempDir tmp;
    auto fixture = testsupport::build_e2e_fixture(tmp.path());
    auto out = tmp.path() / "out";

    std::vector<std::string> common = {"--repo",   fixture.repo.string(),
                                       "--prefix", "FIX",
                                       "--issues", fixture.issues.string(),
                                       "--out",    out.string()};

    auto run_stage = [&](const std::string& stage, std::vector<std::string> extra = {}) {
        std::vector<std::string> args = {stage};
        args.insert(args.end(), common.begin(), common.end());
        args.insert(args.end(), extra.begin(), extra.end());
        auto result = run_cli(args);
        CAPTURE(stage, result.err);
        REQUIRE(result.status == 0);
        return result;
    };

    run_stage("mine");

    SECTION("mining report matches the designed history") {
        auto report = parse_json_file(out / "mining_report.json");
        CHECK(report.at("max_linkable") == 8);
        CHECK(report.at("unknown_issues") == 1);  // FIX-77
        CHECK(report.at("discarded_path") == 1);  // FIX-6 spans parallel branches
        CHECK(report.at("discarded_merge") == 0);
        CHECK(report.at("discarded_entry") == 0);
        CHECK(report.at("linked") == 6);
    }

    run_stage("build");

    SECTION("dataset summary matches hand-computed statistics") {
        auto summary = parse_json_file(out / "dataset_summary.json");
        CHECK(summary.at("in_dataset") == 5);
        CHECK(summary.at("files_per_issue").at("min") == 4);
        CHECK(summary.at("files_per_issue").at("max") == 4);
        CHECK(summary.at("files_per_issue").at("mean") == 4.0);
        CHECK(summary.at("files_per_issue").at("median") == 4.0);
        CHECK(summary.at("positives_per_issue").at("min") == 1);
        CHECK(summary.at("positives_per_issue").at("max") == 1);
        CHECK(summary.at("positives_per_issue").at("mean") == 1.0);

        // FIX-4 (docs only) is absent; FIX-5's sample ranks the entry snapshot
        auto dataset = slurp(out / "dataset.jsonl");
        CHECK(dataset.find("FIX-4") == std::string::npos);
        CHECK(dataset.find(fixture.merge1) != std::string::npos);
    }

    SECTION("evaluate writes per-issue metrics and the aggregate table") {
        run_stage("evaluate", {"--model", "bm25", "--split", "test"});
        CHECK(line_count(out / "metrics.jsonl") == 2);  // FIX-5 and FIX-8
        auto aggregate = slurp(out / "aggregate.csv");
        CHECK(aggregate.rfind("metric,bm25", 0) == 0);
        CHECK(aggregate.find("MRR,") != std::string::npos);
    }

    SECTION("model=all evaluates all four models") {
        run_stage("evaluate", {"--model", "all", "--split", "all"});
        CHECK(line_count(out / "metrics.jsonl") == 20);  // 5 issues x 4 models
        auto header = slurp(out / "aggregate.csv");
        CHECK(header.rfind("metric,vsm,lsi,rvsm,bm25", 0) == 0);
    }

    SECTION("single-sample aggregate equals the row") {
        auto dataset = slurp(out / "dataset.jsonl");
        auto first_line = dataset.substr(0, dataset.find('\n') + 1);
        auto solo_out = tmp.path() / "solo";
        std::filesystem::create_directories(solo_out);
        std::ofstream(solo_out / "dataset.jsonl") << first_line;
        auto result = run_cli({"evaluate", "--repo", fixture.repo.string(), "--out",
                               solo_out.string(), "--model", "bm25", "--split", "all"});
        CAPTURE(result.err);
        REQUIRE(result.status == 0);
        REQUIRE(line_count(solo_out / "metrics.jsonl") == 1);
        nlohmann::json row = nlohmann::json::parse(slurp(solo_out / "metrics.jsonl"));
        std::istringstream lines(slurp(solo_out / "aggregate.csv"));
        std::string line;
        std::getline(lines, line);  // header
        std::map<std::string, double> table;
        while (std::getline(lines, line)) {
            auto comma = line.find(',');
            if (comma == std::string::npos) continue;
            table[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
        }
        CHECK(table.at("P@1") == row.at("P@1").get<double>());
        CHECK(table.at("R@10") == row.at("R@10").get<double>());
        CHECK(table.at("MRR") == row.at("RR").get<double>());
        CHECK(table.at("RP") == row.at("RP").get<double>());
    }

    SECTION("analyze emits the statistics files without hit@k") {
        run_stage("evaluate", {"--model", "all", "--split", "all"});
        run_stage("analyze", {"--model", "all"});
        auto dir = out / "analysis";
        for (const char* name : {"kw_isolate.csv", "kw_holdout.csv", "conover.csv",
                                 "spearman.csv", "spearman_by_type.csv",
                                 "metric_values_long.csv"}) {
            CAPTURE(name);
            CHECK(std::filesystem::exists(dir / name));
            auto content = slurp(dir / name);
            CHECK(content.find("hit@") == std::string::npos);
            CHECK(content.find("H@") == std::string::npos);
        }
        // three categories present, eight ratio metrics, four models
        CHECK(line_count(dir / "kw_isolate.csv") == 1 + 8 * 4);
    }

    SECTION("report summarizes artifacts and flags the model comparison") {
        run_stage("evaluate", {"--model", "all", "--split", "all"});
        auto result = run_stage("report");
        CHECK(result.out.find("max_linkable: 8") != std::string::npos);
        CHECK(result.out.find("in_dataset: 5") != std::string::npos);
        CHECK(result.out.find("mean MRR bm25") != std::string::npos);
        CHECK(result.out.find("expected mean MRR(bm25) >= mean MRR(rvsm)") !=
              std::string::npos);
        CHECK(std::filesystem::exists(out / "commit_sizes.csv"));
        // FIX-1 has two linked commits; its shares appear in the table
        CHECK(slurp(out / "commit_sizes.csv").find("FIX-1") != std::string::npos);
    }
}

TEST_CASE("rank subcommand") {
    TempDir tmp;
    auto fixture = testsupport::build_e2e_fixture(tmp.path());

    auto issue_file = tmp.path() / "query.txt";
    std::ofstream(issue_file) << "grammar table parse tree builds rules parser";

    auto rank_args = [&](std::vector<std::string> extra) {
        std::vector<std::string> args = {"rank", "--repo", fixture.repo.string()};
        args.insert(args.end(), extra.begin(), extra.end());
        return args;
    };

    SECTION("issue text matching a file's content puts it first") {
        auto result = run_cli(rank_args({"main", issue_file.string()}));
        REQUIRE(result.status == 0);
        REQUIRE(result.out.rfind("1\t", 0) == 0);
        CHECK(result.out.substr(0, result.out.find('\n')).find("src/Parser.java") !=
              std::string::npos);
    }

    SECTION("top-k larger than the corpus lists everything") {
        auto result = run_cli(rank_args({"main", issue_file.string(), "-k", "100"}));
        REQUIRE(result.status == 0);
        std::size_t lines = 0;
        for (char c : result.out)
            if (c == '\n') ++lines;
        CHECK(lines == 5);  // five source files at head
    }

    SECTION("same input twice gives identical output") {
        auto first = run_cli(rank_args({"main", issue_file.string()}));
        auto second = run_cli(rank_args({"main", issue_file.string()}));
        CHECK(first.out == second.out);
    }

    SECTION("unknown commit is exit 3") {
        auto result = run_cli(
            rank_args({"0000000000000000000000000000000000000000", issue_file.string()}));
        CHECK(result.status == 3);
    }
}

TEST_CASE("pipeline reruns are byte-identical") {
    TempDir tmp;
    auto fixture = testsupport::build_e2e_fixture(tmp.path());

    auto run_all = [&](const std::filesystem::path& out, const std::string& jobs) {
        for (const std::string stage : {"mine", "build", "evaluate"}) {
            std::vector<std::string> args = {stage,
                                             "--repo", fixture.repo.string(),
                                             "--prefix", "FIX",
                                             "--issues", fixture.issues.string(),
                                             "--out", out.string(),
                                             "--model", "all",
                                             "--split", "all",
                                             "-j", jobs};
            auto result = run_cli(args);
            CAPTURE(stage, result.err);
            REQUIRE(result.status == 0);
        }
    };

    run_all(tmp.path() / "out1", "1");
    run_all(tmp.path() / "out2", "3");  // parallel workers must not change bytes

    for (const char* name : {"links.jsonl", "mining_report.json", "dataset.jsonl",
                             "dataset_summary.json", "metrics.jsonl", "aggregate.csv",
                             "rankings.jsonl"}) {
        CAPTURE(name);
        CHECK(slurp(tmp.path() / "out1" / name) == slurp(tmp.path() / "out2" / name));
    }
}
