#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bioverify/commands.hpp"

using namespace bioverify;
namespace fs = std::filesystem;

namespace {

std::string fixture_path(const char* rel) { return std::string(BIOVERIFY_FIXTURE_DIR "/") + rel; }

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("bioverify_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BIOVERIFY_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

// strips the volatile created_at line so reruns compare equal
std::string file_without_timestamps(const fs::path& p) {
  std::istringstream in(read_file(p));
  std::string line, out;
  while (std::getline(in, line))
    if (line.find("created_at") == std::string::npos) out += line + "\n";
  return out;
}

}  // namespace

TEST_CASE("cli exit codes: usage errors are 2") {
  CHECK(run_cli("verify-terms --kind no-such-kind --dataset x.json") == 2);
  CHECK(run_cli("verify-terms --kind disease-symptom") == 2);  // missing dataset
  CHECK(run_cli("verify-terms --kind disease-symptom --dataset /nonexistent.json") == 2);
  CHECK(run_cli("definitely-not-a-subcommand") == 2);
  CHECK(run_cli("--version") == 0);
}

TEST_CASE("verify-terms requires the right ontologies") {
  RunConfig config;
  config.kind = AssociationKind::DiseaseSymptom;
  config.dataset = fixture_path("datasets/disease_symptom_20.json");
  config.output_dir = fresh_dir("vt_missing_ont");
  config.ontologies["DOID"] = fixture_path("ontology/doid.obo");
  // SYMP missing
  std::ostringstream log;
  CHECK_THROWS_AS(run_verify_terms(config, log), UsageError);
}

TEST_CASE("a wrong-prefix ontology is named in the error") {
  RunConfig config;
  config.kind = AssociationKind::DiseaseSymptom;
  config.dataset = fixture_path("datasets/disease_symptom_20.json");
  config.output_dir = fresh_dir("vt_wrong_prefix");
  config.ontologies["DOID"] = fixture_path("ontology/symp.obo");  // SYMP file as DOID
  config.ontologies["SYMP"] = fixture_path("ontology/symp.obo");
  std::ostringstream log;
  try {
    run_verify_terms(config, log);
    FAIL("expected UsageError");
  } catch (const UsageError& e) {
    const std::string what = e.what();
    CHECK(what.find("prefix mismatch") != std::string::npos);
    CHECK(what.find("DOID") != std::string::npos);
    CHECK(what.find("SYMP") != std::string::npos);
  }
}

TEST_CASE("verify-terms writes reports in every configured format") {
  RunConfig config;
  config.kind = AssociationKind::DiseaseSymptom;
  config.dataset = fixture_path("datasets/disease_symptom_20.json");
  config.output_dir = fresh_dir("vt_ok");
  config.ontologies["DOID"] = fixture_path("ontology/doid.obo");
  config.ontologies["SYMP"] = fixture_path("ontology/symp.obo");
  std::ostringstream log;
  CHECK(run_verify_terms(config, log) == 0);
  CHECK(fs::exists(config.output_dir / "term_accuracy.csv"));
  CHECK(fs::exists(config.output_dir / "term_accuracy.json"));
  CHECK(fs::exists(config.output_dir / "term_accuracy.md"));
  CHECK(fs::exists(config.output_dir / "manifest.json"));
  const std::string csv = read_file(config.output_dir / "term_accuracy.csv");
  CHECK(csv.find("Symptom,name,12,20,60.00") != std::string::npos);
  CHECK(csv.find("Symptom,name/synonym,15,20,75.00") != std::string::npos);
}

TEST_CASE("verify-terms on an empty dataset renders n/a rows") {
  const fs::path dir = fresh_dir("vt_empty");
  write_file(dir / "empty.json", "[]");
  RunConfig config;
  config.kind = AssociationKind::DiseaseSymptom;
  config.dataset = dir / "empty.json";
  config.output_dir = dir / "out";
  config.ontologies["DOID"] = fixture_path("ontology/doid.obo");
  config.ontologies["SYMP"] = fixture_path("ontology/symp.obo");
  std::ostringstream log;
  CHECK(run_verify_terms(config, log) == 0);
  const std::string csv = read_file(config.output_dir / "term_accuracy.csv");
  CHECK(csv.find("Disease,name,0,0,n/a") != std::string::npos);
}

TEST_CASE("verify-assoc recovers the hand-planted literature fixture") {
  RunConfig config;
  config.kind = AssociationKind::DiseaseDrug;
  config.dataset = fixture_path("datasets/disease_drug_5.json");
  config.corpus = fixture_path("corpus/literature_small.jsonl");
  config.output_dir = fresh_dir("va_small");
  std::ostringstream log;
  CHECK(run_verify_assoc(config, log) == 0);
  const std::string csv = read_file(config.output_dir / "coverage.csv");
  // hand-counted plants: P1 2/5 verified avg 1.50; P2 3/5 avg 1.67; P3 4/5 avg 2.00
  CHECK(csv.find("Disease-Drug,2009-2014,60.00,40.00,1.50,2,5") != std::string::npos);
  CHECK(csv.find("Disease-Drug,2015-2019,40.00,60.00,1.67,3,5") != std::string::npos);
  CHECK(csv.find("Disease-Drug,2020-2024,20.00,80.00,2.00,4,5") != std::string::npos);

  // hits.jsonl carries one line per record per period
  std::istringstream hits(read_file(config.output_dir / "hits.jsonl"));
  std::string line;
  std::size_t lines = 0;
  while (std::getline(hits, line)) ++lines;
  CHECK(lines == 15);  // 5 records x 3 periods
}

TEST_CASE("verify-assoc with an empty corpus warns and exits zero") {
  const fs::path dir = fresh_dir("va_empty");
  write_file(dir / "empty.jsonl", "");
  RunConfig config;
  config.kind = AssociationKind::DiseaseDrug;
  config.dataset = fixture_path("datasets/disease_drug_5.json");
  config.corpus = dir / "empty.jsonl";
  config.output_dir = dir / "out";
  std::ostringstream log;
  CHECK(run_verify_assoc(config, log) == 0);
  CHECK(log.str().find("corpus is empty") != std::string::npos);
  const std::string csv = read_file(config.output_dir / "coverage.csv");
  CHECK(csv.find("Disease-Drug,2009-2014,100.00,0.00,n/a,0,5") != std::string::npos);
}

TEST_CASE("consistency produces one row per model per kind") {
  RunConfig config;
  config.output_dir = fresh_dir("cons");
  config.kind_datasets["disease-drug"] = fixture_path("datasets/consistency_dd.json");
  config.kind_datasets["disease-symptom"] = fixture_path("datasets/consistency_ds.json");
  config.kind_datasets["disease-gene"] = fixture_path("datasets/consistency_dg.json");
  config.model_corpora["gpt-4o"] = fixture_path("corpus/sim_gpt-4o.jsonl");
  config.model_corpora["gpt-4"] = fixture_path("corpus/sim_gpt-4.jsonl");
  std::ostringstream log;
  CHECK(run_consistency(config, log) == 0);
  const std::string csv = read_file(config.output_dir / "consistency.csv");
  CHECK(csv.find("gpt-4o,2,50.00,Disease-Drug,4") != std::string::npos);
  CHECK(csv.find("gpt-4o,3,75.00,Disease-Symptom,4") != std::string::npos);
  CHECK(csv.find("gpt-4o,1,33.33,Disease-Gene,3") != std::string::npos);
  CHECK(csv.find("gpt-4,1,25.00,Disease-Drug,4") != std::string::npos);
  CHECK(csv.find("gpt-4,1,25.00,Disease-Symptom,4") != std::string::npos);
  CHECK(csv.find("gpt-4,0,0.00,Disease-Gene,3") != std::string::npos);
}

TEST_CASE("consistency with a single model yields one row per kind") {
  RunConfig config;
  config.output_dir = fresh_dir("cons_single");
  config.kind_datasets["disease-drug"] = fixture_path("datasets/consistency_dd.json");
  config.kind_datasets["disease-symptom"] = fixture_path("datasets/consistency_ds.json");
  config.kind_datasets["disease-gene"] = fixture_path("datasets/consistency_dg.json");
  config.model_corpora["gpt-4o"] = fixture_path("corpus/sim_gpt-4o.jsonl");
  std::ostringstream log;
  CHECK(run_consistency(config, log) == 0);
  std::istringstream csv(read_file(config.output_dir / "consistency.csv"));
  std::string line;
  std::size_t data_rows = 0;
  while (std::getline(csv, line))
    if (!line.empty() && line[0] != '#' && line.rfind("Model,", 0) != 0) ++data_rows;
  CHECK(data_rows == 3);
}

TEST_CASE("consistency skips models whose corpus is missing") {
  RunConfig config;
  config.output_dir = fresh_dir("cons_missing");
  config.kind_datasets["disease-drug"] = fixture_path("datasets/consistency_dd.json");
  config.model_corpora["gpt-4o"] = fixture_path("corpus/sim_gpt-4o.jsonl");
  config.model_corpora["ghost"] = "/nonexistent/sim.jsonl";
  std::ostringstream log;
  CHECK(run_consistency(config, log) == 0);
  CHECK(log.str().find("ghost") != std::string::npos);
  const std::string csv = read_file(config.output_dir / "consistency.csv");
  CHECK(csv.find("ghost") == std::string::npos);
  CHECK(csv.find("gpt-4o") != std::string::npos);
}

TEST_CASE("generate with the mock transport reaches its target offline") {
  RunConfig config;
  config.kind = AssociationKind::DiseaseSymptom;
  config.output_dir = fresh_dir("gen");
  config.mock_fixture = fixture_path("responses/disease_symptom_mock.json");
  config.target_records = 30;
  config.batch_size = 10;
  std::ostringstream log;
  CHECK(run_generate(config, log) == 0);
  CHECK(fs::exists(config.output_dir / "disease-symptom.json"));
  const auto session = nlohmann::json::parse(read_file(config.output_dir / "session_manifest.json"));
  CHECK(session["session"]["requests_sent"] == 3);
  CHECK(session["records"] == 30);
  CHECK(session["target_reached"] == true);
  // the written dataset parses back with the same count (duplicates kept)
  const auto parsed = parse_associations(read_file(config.output_dir / "disease-symptom.json"),
                                         AssociationKind::DiseaseSymptom);
  CHECK(parsed.records.size() == 30);
}

TEST_CASE("generate --mode abstracts writes a loadable simulated corpus") {
  const fs::path dir = fresh_dir("gen_abs");
  write_file(dir / "diseases.txt", "Hypertension\nAsthma\nMalaria\n");
  RunConfig config;
  config.generate_mode = "abstracts";
  config.disease_list = dir / "diseases.txt";
  config.target_records = 5;
  config.mock_fixture = fixture_path("responses/invalid_json_mock.json");  // plain-text content
  config.model = "gpt-4o";
  config.output_dir = dir / "out";
  std::ostringstream log;
  CHECK(run_generate(config, log) == 0);
  const auto loaded = load_corpus_file(config.output_dir / "gpt-4o_abstracts.jsonl");
  CHECK(loaded.corpus.docs.size() == 5);
  CHECK(loaded.skipped_malformed == 0);
  CHECK(loaded.corpus.docs[0].title == "Hypertension");

  RunConfig bad = config;
  bad.abstract_template = "no placeholder here";
  CHECK_THROWS_AS(run_generate(bad, log), UsageError);
}

TEST_CASE("generate exits 1 when every response is unparseable") {
  RunConfig config;
  config.kind = AssociationKind::DiseaseSymptom;
  config.output_dir = fresh_dir("gen_fail");
  config.mock_fixture = fixture_path("responses/invalid_json_mock.json");
  config.target_records = 20;
  std::ostringstream log;
  CHECK(run_generate(config, log) == 1);
  CHECK(log.str().find("budget exhausted") != std::string::npos);

  const int code = run_cli("generate --kind disease-symptom --target 20 --mock " +
                           fixture_path("responses/invalid_json_mock.json") + " --output-dir " +
                           (fresh_dir("gen_fail_cli")).string());
  CHECK(code == 1);
}

TEST_CASE("single-threaded reruns are byte-identical; workers only change speed") {
  RunConfig base;
  base.kind = AssociationKind::DiseaseSymptom;
  base.dataset = fixture_path("datasets/disease_symptom_20.json");
  base.ontologies["DOID"] = fixture_path("ontology/doid.obo");
  base.ontologies["SYMP"] = fixture_path("ontology/symp.obo");
  base.workers = 1;

  RunConfig run1 = base;
  run1.output_dir = fresh_dir("det1");
  RunConfig run2 = base;
  run2.output_dir = fresh_dir("det2");
  RunConfig run8 = base;
  run8.workers = 8;
  run8.output_dir = fresh_dir("det8");

  std::ostringstream log;
  REQUIRE(run_verify_terms(run1, log) == 0);
  REQUIRE(run_verify_terms(run2, log) == 0);
  REQUIRE(run_verify_terms(run8, log) == 0);

  CHECK(read_file(run1.output_dir / "term_accuracy.csv") ==
        read_file(run2.output_dir / "term_accuracy.csv"));
  CHECK(read_file(run1.output_dir / "term_accuracy.csv") ==
        read_file(run8.output_dir / "term_accuracy.csv"));
  CHECK(file_without_timestamps(run1.output_dir / "manifest.json") ==
        file_without_timestamps(run2.output_dir / "manifest.json"));
}

TEST_CASE("generate records retries when the mock scripts failures first") {
  RunConfig config;
  config.kind = AssociationKind::DiseaseSymptom;
  config.output_dir = fresh_dir("gen_retry");
  config.mock_fixture = fixture_path("responses/disease_symptom_retry_mock.json");
  config.target_records = 10;
  std::ostringstream log;
  CHECK(run_generate(config, log) == 0);
  const auto session = nlohmann::json::parse(read_file(config.output_dir / "session_manifest.json"));
  CHECK(session["session"]["retries"] == 2);
  CHECK(session["session"]["requests_sent"] == 3);
  CHECK(session["records"] == 10);
}

TEST_CASE("the binary itself is deterministic across reruns") {
  const fs::path dir = fresh_dir("bin_det");
  const std::string common = "verify-assoc --kind disease-drug --dataset " +
                             fixture_path("datasets/disease_drug_5.json") + " --corpus " +
                             fixture_path("corpus/literature_small.jsonl") + " --workers 1";
  REQUIRE(run_cli(common + " --output-dir " + (dir / "r1").string()) == 0);
  REQUIRE(run_cli(common + " --output-dir " + (dir / "r2").string()) == 0);
  CHECK(read_file(dir / "r1" / "coverage.csv") == read_file(dir / "r2" / "coverage.csv"));
  CHECK(read_file(dir / "r1" / "hits.jsonl") == read_file(dir / "r2" / "hits.jsonl"));
  // manifests agree on everything except their own run parameters
  const auto m1 = nlohmann::json::parse(read_file(dir / "r1" / "manifest.json"));
  const auto m2 = nlohmann::json::parse(read_file(dir / "r2" / "manifest.json"));
  CHECK(m1["inputs"] == m2["inputs"]);
  CHECK(m1["provenance_digest"] == m2["provenance_digest"]);
}

TEST_CASE("cli end-to-end: fixtures then verify-assoc through the binary") {
  const fs::path dir = fresh_dir("cli_e2e");
  const std::string fix = (dir / "fix").string();
  REQUIRE(run_cli("fixtures --docs 400 --records 30 --seed 5 --output-dir " + fix) == 0);
  CHECK(fs::exists(fix + "/corpus.jsonl"));
  CHECK(fs::exists(fix + "/dataset.json"));
  CHECK(fs::exists(fix + "/fixture_manifest.json"));

  const std::string out = (dir / "out").string();
  REQUIRE(run_cli("verify-assoc --kind disease-symptom --dataset " + fix + "/dataset.json" +
                  " --corpus " + fix + "/corpus.jsonl --ontology DOID=" + fix + "/ontology.obo" +
                  " --output-dir " + out) == 0);
  CHECK(fs::exists(out + "/coverage.csv"));
  CHECK(fs::exists(out + "/hits.jsonl"));
}

TEST_CASE("config file values apply and flags win") {
  const fs::path dir = fresh_dir("cfg");
  write_file(dir / "run.conf",
             "kind = disease-symptom\n"
             "# comment line\n"
             "dataset = " + fixture_path("datasets/disease_symptom_20.json") + "\n"
             "ontology.DOID = " + fixture_path("ontology/doid.obo") + "\n"
             "ontology.SYMP = " + fixture_path("ontology/symp.obo") + "\n"
             "output_dir = " + (dir / "from_config").string() + "\n");
  REQUIRE(run_cli("--config " + (dir / "run.conf").string() + " verify-terms") == 0);
  CHECK(fs::exists(dir / "from_config" / "term_accuracy.csv"));

  // the flag overrides the configured output_dir
  REQUIRE(run_cli("--config " + (dir / "run.conf").string() + " verify-terms --output-dir " +
                  (dir / "from_flag").string()) == 0);
  CHECK(fs::exists(dir / "from_flag" / "term_accuracy.csv"));

  RunConfig config;
  CHECK_THROWS_AS(apply_config_entry(config, "no_such_key", "1"), UsageError);
}

TEST_CASE("verify-assoc honors --synonyms on the synonym-built fixture") {
  const fs::path dir = fresh_dir("syn_toggle");
  RunConfig fx;
  fx.output_dir = dir / "fix";
  fx.seed = 11;
  fx.fixture_docs = 500;
  fx.fixture_records = 60;
  std::ostringstream log;
  REQUIRE(run_fixtures(fx, log) == 0);

  auto run_mode = [&](bool synonyms, const char* tag) {
    RunConfig config;
    config.kind = AssociationKind::DiseaseSymptom;
    config.dataset = dir / "fix" / "dataset.json";
    config.corpus = dir / "fix" / "corpus.jsonl";
    config.ontologies["DOID"] = dir / "fix" / "ontology.obo";
    config.synonyms = synonyms;
    config.output_dir = dir / tag;
    REQUIRE(run_verify_assoc(config, log) == 0);
    return read_file(config.output_dir / "coverage.csv");
  };
  const std::string on = run_mode(true, "on");
  const std::string off = run_mode(false, "off");
  CHECK(on != off);  // the fixture plants synonym-only co-occurrences

  const auto manifest =
      nlohmann::json::parse(read_file(dir / "fix" / "fixture_manifest.json"));
  // spot-check one period's verified counts against the fixture manifest
  const auto& expected_on = manifest["expected_synonyms_on"]["2009-2014"]["verified_count"];
  const auto& expected_off = manifest["expected_synonyms_off"]["2009-2014"]["verified_count"];
  CHECK(on.find("," + std::to_string(expected_on.get<std::size_t>()) + ",60") != std::string::npos);
  CHECK(off.find("," + std::to_string(expected_off.get<std::size_t>()) + ",60") !=
        std::string::npos);
}
