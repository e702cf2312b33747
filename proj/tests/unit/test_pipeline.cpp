#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "photoscreen/pipeline/commands.hpp"
#include "photoscreen/pipeline/report.hpp"

using namespace photoscreen;
using namespace photoscreen::pipeline;
namespace fs = std::filesystem;

namespace {

const fs::path kDataDir = PHOTOSCREEN_DATA_DIR;
const fs::path kFixtureDir = PHOTOSCREEN_FIXTURE_DIR;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("photoscreen_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

PipelineConfig desk_config(const fs::path& out) {
  return load_config(kDataDir / "configs" / "desk.json", std::nullopt, out.string(), 2);
}

// full desk pipeline shared across the test cases below
const fs::path& pipeline_out() {
  static TempDir dir("pipeline");
  static bool ran = false;
  if (!ran) {
    ran = true;
    const PipelineConfig config = desk_config(dir.path);
    REQUIRE(cmd_synth(config) == kExitOk);
    REQUIRE(cmd_aggregate(config) == kExitOk);
    REQUIRE(cmd_fit(config, "all") == kExitOk);
    REQUIRE(cmd_fit(config, "pre") == kExitOk);
    REQUIRE(cmd_fit(config, "ratings") == kExitOk);
    REQUIRE(cmd_classify(config, "all") == kExitOk);
    REQUIRE(cmd_classify(config, "pre") == kExitOk);
    REQUIRE(cmd_filters(config) == kExitOk);
    REQUIRE(cmd_report(config) == kExitOk);
  }
  return dir.path;
}

Json load_json(const fs::path& p) { return Json::parse(read_file_bytes(p)); }

}  // namespace

TEST_CASE("desk pipeline produces every artifact") {
  const fs::path& out = pipeline_out();
  for (const char* name :
       {"participants.jsonl", "posts.jsonl", "ratings.jsonl", "ground_truth.json",
        "all_data.csv", "pre_diagnosis.csv", "ratings_all.csv", "summary_stats.json",
        "correlations.json", "agreement.json", "fit_all.json", "draws_all.csv",
        "fit_pre.json", "fit_ratings.json", "classify_all.json", "cv_table_all.csv",
        "classify_pre.json", "filters_all.csv", "filters_pre.csv", "filters.json",
        "report.json", "report.txt"}) {
    CHECK_MESSAGE(fs::exists(out / name), name);
  }
}

TEST_CASE("pre-diagnosis dataset is a strict subset of all-data") {
  const fs::path& out = pipeline_out();
  const auto all = cohort::feature_matrix_from_csv(read_file_bytes(out / "all_data.csv"));
  const auto pre = cohort::feature_matrix_from_csv(read_file_bytes(out / "pre_diagnosis.csv"));
  CHECK(pre.rows() > 0);
  CHECK(pre.rows() < all.rows());

  const auto summary = load_json(out / "summary_stats.json");
  CHECK(summary.at("depressed_share").at("pre_diagnosis").get<double>() <
        summary.at("depressed_share").at("all_data").get<double>());
}

TEST_CASE("planted effects yield a decisive model and a strong classifier") {
  const fs::path& out = pipeline_out();
  const auto fit = load_json(out / "fit_all.json");
  CHECK(fit.at("bayes_factor").at("label").get<std::string>() == "Decisive");
  CHECK(fit.at("rhat_max").get<double>() < 1.1);
  CHECK(fit.at("frequentist").at("converged").get<bool>());

  const auto classify = load_json(out / "classify_all.json");
  CHECK(classify.at("run_report").at("f1").at("mean").get<double>() > 0.8);
  CHECK(classify.at("benchmark_mvr").at("recall").get<double>() == 0.510);
  CHECK(classify.at("benchmark_mvr").at("f1").get<double>() == 0.461);
  CHECK(classify.at("model_summary").at("trees").get<int>() ==
        classify.at("chosen_config").at("n_estimators").get<int>());

  const std::string runs_csv = read_file_bytes(out / "runs_all.csv");
  CHECK(runs_csv.rfind("run,tp,fp,fn,tn,recall,", 0) == 0);
  CHECK(std::count(runs_csv.begin(), runs_csv.end(), '\n') == 6);  // header + 5 runs
}

TEST_CASE("fit outputs carry provenance and a draws matrix of the right shape") {
  const fs::path& out = pipeline_out();
  const auto fit = load_json(out / "fit_all.json");
  CHECK(fit.at("config_hash").get<std::string>().size() == 64);
  CHECK(fit.at("seed").get<std::uint64_t>() == 20240801);

  std::ifstream draws(out / "draws_all.csv");
  std::string header;
  std::getline(draws, header);
  CHECK(header.rfind("intercept,", 0) == 0);
  std::size_t rows = 0;
  std::string line;
  while (std::getline(draws, line)) ++rows;
  CHECK(rows == 2 * 5000);  // 2 chains x (6000 - 1000) kept draws
}

TEST_CASE("filter analysis recovers the planted Inkwell/Valencia asymmetry") {
  const fs::path& out = pipeline_out();
  std::ifstream csv(out / "filters_all.csv");
  std::string line;
  std::getline(csv, line);  // header
  double inkwell_dep = 0.0, valencia_hea = 0.0;
  while (std::getline(csv, line)) {
    const auto f = csv_split(line);
    REQUIRE(f.size() == 5);
    if (f[0] == "Inkwell" && f[1] == "depressed") inkwell_dep = parse_double(f[4], "csv");
    if (f[0] == "Valencia" && f[1] == "healthy") valencia_hea = parse_double(f[4], "csv");
  }
  CHECK(inkwell_dep > 0.0);
  CHECK(valencia_hea > 0.0);

  const auto filters = load_json(out / "filters.json");
  CHECK(filters.at("all").at("chi2").get<double>() > 0.0);
  CHECK(filters.at("all").at("p").get<double>() < 0.05);
  CHECK(filters.contains("pre"));
}

TEST_CASE("report bundle contains all eight sections") {
  const fs::path& out = pipeline_out();
  const auto report = load_json(out / "report.json");
  const std::vector<std::string> sections =
      report.at("sections_present").get<std::vector<std::string>>();
  for (const char* name : {"dataset_summary", "bayesian", "frequentist", "bayes_factors",
                           "classifier", "chi_squared", "correlations", "agreement"}) {
    CHECK_MESSAGE(std::count(sections.begin(), sections.end(), name) == 1, name);
  }
  CHECK(report.at("warnings").empty());
  CHECK(report.at("config_hash").get<std::string>().size() == 64);

  // every section carries its own provenance
  CHECK(report.at("bayesian").at("all").at("config_hash").get<std::string>().size() == 64);
  CHECK(report.at("dataset_summary").at("config_hash").get<std::string>().size() == 64);

  const std::string text = read_file_bytes(out / "report.txt");
  CHECK(text.find("All-data model") != std::string::npos);
  CHECK(text.find("Pre-diagnosis model") != std::string::npos);
  CHECK(text.find("MVR mu") != std::string::npos);
}

TEST_CASE("synth and report are byte-deterministic across reruns") {
  const fs::path& out = pipeline_out();
  const std::string posts_before = read_file_bytes(out / "posts.jsonl");
  const std::string report_before = read_file_bytes(out / "report.json");

  const PipelineConfig config = desk_config(out);
  REQUIRE(cmd_synth(config) == kExitOk);
  REQUIRE(cmd_report(config) == kExitOk);
  CHECK(read_file_bytes(out / "posts.jsonl") == posts_before);
  CHECK(read_file_bytes(out / "report.json") == report_before);
}

TEST_CASE("missing classifier output degrades the report with a warning") {
  const fs::path& src = pipeline_out();
  TempDir dir("partial");
  for (const char* name : {"summary_stats.json", "fit_all.json", "fit_pre.json",
                           "fit_ratings.json", "filters.json", "correlations.json",
                           "agreement.json"}) {
    fs::copy_file(src / name, dir.path / name);
  }
  const PipelineConfig config = desk_config(dir.path);
  REQUIRE(cmd_report(config) == kExitOk);
  const auto report = load_json(dir.path / "report.json");
  CHECK(report.at("classifier").is_null());
  CHECK(report.at("sections_present").size() == 7);
  bool warned = false;
  for (const auto& w : report.at("warnings")) {
    if (w.get<std::string>().find("classifier") != std::string::npos) warned = true;
  }
  CHECK(warned);
}

TEST_CASE("unconverged chains exit with code 3 but still write diagnostics") {
  TempDir dir("rhat");
  // deliberately truncated chains on a small dataset: rhat lands above 1.1
  nlohmann::ordered_json cfg;
  cfg["schema_version"] = 1;
  cfg["seed"] = 12;
  cfg["out_dir"] = dir.path.string();
  cfg["inputs"] = nlohmann::ordered_json{
      {"participants", "out:participants.jsonl"},
      {"posts", "out:posts.jsonl"},
      {"synth_spec", (kDataDir / "specs" / "desk_cohort.json").string()}};
  cfg["mcmc"] = nlohmann::ordered_json{{"chains", 2}, {"iterations", 40}, {"burn_in", 10}};
  cfg["ppc"] = nlohmann::ordered_json{{"replicates", 50}};
  atomic_write_file(dir.path / "config.json", cfg.dump(2));
  const PipelineConfig config = load_config(dir.path / "config.json");

  REQUIRE(cmd_synth(config) == kExitOk);
  REQUIRE(cmd_aggregate(config) == kExitOk);
  const int code = run_command([&] { return cmd_fit(config, "all"); });
  CHECK(code == kExitConvergence);
  CHECK(fs::exists(dir.path / "fit_all.json"));  // diagnostics written regardless
  const auto fit = load_json(dir.path / "fit_all.json");
  CHECK(fit.at("rhat_max").get<double>() > 1.1);
}

TEST_CASE("exit codes: missing resources and validation failures") {
  TempDir dir("codes");
  const PipelineConfig config = desk_config(dir.path);

  // fit before aggregate: the matrix is missing
  CHECK(run_command([&] { return cmd_fit(config, "all"); }) == kExitMissing);
  CHECK(run_command([&] { return cmd_classify(config, "all"); }) == kExitMissing);

  // empty posts file fails validation
  REQUIRE(cmd_synth(config) == kExitOk);
  atomic_write_file(dir.path / "posts.jsonl", "");
  CHECK(run_command([&] { return cmd_aggregate(config); }) == kExitValidation);

  // bad dataset name
  CHECK(run_command([&] { return cmd_fit(config, "bogus"); }) == kExitValidation);
}

TEST_CASE("extract computes features from real images and isolates failures") {
  TempDir dir("extract");

  // cohort referencing fixture images, one corrupt, one carried-features post
  std::string participants =
      Json{{"id", "u1"}, {"group", "healthy"}}.dump() + "\n" +
      Json{{"id", "u2"},
           {"group", "depressed"},
           {"diagnosis_date", "2015-06-01"},
           {"cesd_score", 30}}
          .dump() +
      "\n";
  atomic_write_file(dir.path / "participants.jsonl", participants);

  const std::string faces = (kFixtureDir / "faces").string();
  const std::string codec = (kFixtureDir / "codec").string();
  std::string posts;
  posts += Json{{"id", "p1"}, {"participant_id", "u1"}, {"timestamp", "2015-01-01T10:00:00Z"},
                {"like_count", 3}, {"comment_count", 1}, {"filter", "Normal"},
                {"image_path", faces + "/img_015.png"}}  // portrait
               .dump() + "\n";
  posts += Json{{"id", "p2"}, {"participant_id", "u2"}, {"timestamp", "2015-02-01T10:00:00Z"},
                {"like_count", 0}, {"comment_count", 0}, {"filter", "Inkwell"},
                {"image_path", codec + "/truncated.png"}}  // corrupt
               .dump() + "\n";
  posts += Json{{"id", "p3"}, {"participant_id", "u1"}, {"timestamp", "2015-03-01T10:00:00Z"},
                {"like_count", 5}, {"comment_count", 2}, {"filter", "Normal"},
                {"image_path", faces + "/img_000.png"}}  // background
               .dump() + "\n";
  atomic_write_file(dir.path / "posts.jsonl", posts);

  nlohmann::ordered_json cfg;
  cfg["schema_version"] = 1;
  cfg["seed"] = 7;
  cfg["out_dir"] = dir.path.string();
  cfg["inputs"] = nlohmann::ordered_json{
      {"participants", (dir.path / "participants.jsonl").string()},
      {"posts", (dir.path / "posts.jsonl").string()},
      {"cascade", (kDataDir / "cascades" / "frontal_face.json").string()}};
  atomic_write_file(dir.path / "config.json", cfg.dump(2));

  const PipelineConfig config = load_config(dir.path / "config.json");
  REQUIRE(cmd_extract(config) == kExitOk);  // corrupt photo must not sink the batch

  const std::string features = read_file_bytes(dir.path / "posts_features.jsonl");
  std::size_t with_features = 0, without = 0;
  std::istringstream in(features);
  std::string line;
  while (std::getline(in, line)) {
    const Json j = Json::parse(line);
    if (j.contains("features")) {
      ++with_features;
      if (j.at("id") == "p1") {
        CHECK(j.at("features").at("has_face").get<bool>());
        CHECK(j.at("features").at("face_count").get<int>() == 1);
      }
    } else {
      ++without;
    }
  }
  CHECK(with_features == 2);
  CHECK(without == 1);

  const std::string errors = read_file_bytes(dir.path / "extract_errors.jsonl");
  CHECK(errors.find("p2") != std::string::npos);

  // idempotent re-run
  const std::string again_before = read_file_bytes(dir.path / "posts_features.jsonl");
  REQUIRE(cmd_extract(config) == kExitOk);
  CHECK(read_file_bytes(dir.path / "posts_features.jsonl") == again_before);

  // missing cascade is a missing resource
  cfg["inputs"]["cascade"] = (dir.path / "nope.json").string();
  atomic_write_file(dir.path / "config.json", cfg.dump(2));
  const PipelineConfig broken = load_config(dir.path / "config.json");
  CHECK(run_command([&] { return cmd_extract(broken); }) == kExitMissing);
}

TEST_CASE("config hashing reflects every override") {
  TempDir dir("hash");
  const PipelineConfig a = desk_config(dir.path);
  const PipelineConfig b = load_config(kDataDir / "configs" / "desk.json", 999,
                                       dir.path.string(), 2);
  CHECK(a.hash() != b.hash());
  CHECK(a.hash() == desk_config(dir.path).hash());
}
