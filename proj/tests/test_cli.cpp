// Stage-level integration: run-config parsing, the file pipeline
// (ground -> extract -> expand -> train -> eval), and manifests.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "schemaqa/cli/run_config.hpp"
#include "schemaqa/cli/stages.hpp"
#include "schemaqa/model/checkpoint.hpp"

using namespace schemaqa;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

void write(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    out << contents;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string question_line(const std::string& id, const std::string& stem,
                          const std::vector<std::string>& choices, const std::string& answer) {
    std::string line =
        "{\"id\":\"" + id + "\",\"question\":{\"stem\":\"" + stem + "\",\"choices\":[";
    const char* labels = "ABCDE";
    for (std::size_t i = 0; i < choices.size(); ++i) {
        if (i) line += ",";
        line +=
            "{\"label\":\"" + std::string(1, labels[i]) + "\",\"text\":\"" + choices[i] + "\"}";
    }
    line += "]}";
    if (!answer.empty()) line += ",\"answerKey\":\"" + answer + "\"";
    line += "}";
    return line;
}

}  // namespace

TEST_CASE("run config parsing") {
    auto rc = cli::RunConfig::from_json(
        R"({"kg":"kg.tsv","out":"out","encoder":"kagnet","sge":true,"threads":2,"seed":9})",
        "inline");
    CHECK(rc.kg_path == "kg.tsv");
    CHECK(rc.out_path == "out");
    CHECK(rc.threads == 2);
    CHECK(rc.train.encoder_kind == model::EncoderKind::kagnet);
    CHECK(rc.train.sge_enabled);
    CHECK(rc.train.rng_seed == 9);

    CHECK_THROWS_WITH_AS(cli::RunConfig::from_json(R"({"kgg":"typo.tsv"})", "inline"),
                         doctest::Contains("unknown config key 'kgg'"), Error);
    CHECK_THROWS_AS(cli::RunConfig::from_json(R"({"threads":"many"})", "inline"), Error);
    CHECK_THROWS_AS(cli::RunConfig::from_json(R"([1,2])", "inline"), Error);
}

TEST_CASE("file checksum is content-determined") {
    auto dir = temp_dir("schemaqa_checksum");
    write(dir / "a.txt", "hello");
    write(dir / "b.txt", "hello");
    write(dir / "c.txt", "other");
    CHECK(cli::file_checksum((dir / "a.txt").string()) ==
          cli::file_checksum((dir / "b.txt").string()));
    CHECK(cli::file_checksum((dir / "a.txt").string()) !=
          cli::file_checksum((dir / "c.txt").string()));
}

TEST_CASE("staged pipeline equals the in-process pipeline") {
    auto dir = temp_dir("schemaqa_stages");

    // Tiny world: each question concept links to its correct choice.
    std::string kg_text;
    std::vector<std::pair<std::string, std::string>> facts = {
        {"sun", "day"}, {"moon", "night"}, {"fish", "water"}, {"bird", "sky"}};
    for (const auto& [q, a] : facts) {
        kg_text += "RelatedTo\t" + q + "\t" + a + "\t1.0\n";
        kg_text += "IsA\t" + q + "\tthing\t1.0\n";
    }
    write(dir / "kg.tsv", kg_text);

    std::string data;
    int id = 0;
    for (int rep = 0; rep < 3; ++rep) {
        for (const auto& [q, a] : facts) {
            std::vector<std::string> choices = {"vexing", "quorum", "zephyr", "oblong"};
            std::size_t pos = static_cast<std::size_t>(id) % 5;
            choices.insert(choices.begin() + static_cast<std::ptrdiff_t>(pos), a);
            data += question_line("s" + std::to_string(id), "what goes with the " + q + "?",
                                  choices, std::string(1, "ABCDE"[pos]));
            data += "\n";
            ++id;
        }
    }
    write(dir / "data.jsonl", data);

    model::TrainConfig cfg;
    cfg.encoder_kind = model::EncoderKind::mhgrn;
    cfg.learning_rate = 0.02;
    cfg.batch_size = 10;
    cfg.max_epochs = 8;
    cfg.statement_dim = 12;
    cfg.concept_dim = 8;
    cfg.sge_enabled = true;
    cfg.rng_seed = 11;

    auto kg = kg::load_kg_text((dir / "kg.tsv").string());

    // Stage by stage, through files.
    cli::stage_ground(kg, (dir / "kg.tsv").string(), (dir / "data.jsonl").string(),
                      (dir / "grounded.jsonl").string(), cfg, 2);
    cli::stage_extract(kg, (dir / "kg.tsv").string(), (dir / "grounded.jsonl").string(),
                       (dir / "graphs.jsonl").string(), cfg, 2);
    cli::stage_expand(kg, (dir / "kg.tsv").string(), (dir / "graphs.jsonl").string(),
                      (dir / "expanded.jsonl").string(), cfg, 2);

    cli::TrainPaths staged;
    staged.kg_path = (dir / "kg.tsv").string();
    staged.train_path = (dir / "data.jsonl").string();
    staged.dev_path = (dir / "data.jsonl").string();
    staged.train_graphs_path = (dir / "expanded.jsonl").string();
    staged.dev_graphs_path = (dir / "expanded.jsonl").string();
    staged.out_dir = (dir / "run_staged").string();
    double staged_acc = cli::stage_train(kg, staged, cfg);

    cli::TrainPaths direct = staged;
    direct.train_graphs_path.clear();
    direct.dev_graphs_path.clear();
    direct.out_dir = (dir / "run_direct").string();
    double direct_acc = cli::stage_train(kg, direct, cfg);

    CHECK(staged_acc == direct_acc);
    CHECK(slurp(dir / "run_staged/training_log.jsonl") ==
          slurp(dir / "run_direct/training_log.jsonl"));

    // Same checkpoint bits either way.
    CHECK(cli::file_checksum((dir / "run_staged/checkpoint.bin").string()) ==
          cli::file_checksum((dir / "run_direct/checkpoint.bin").string()));

    double eval_acc = cli::stage_eval(kg, (dir / "kg.tsv").string(),
                                      (dir / "run_staged/checkpoint.bin").string(),
                                      (dir / "data.jsonl").string(), "",
                                      (dir / "eval_out").string());
    CHECK(eval_acc == staged_acc);
    std::string csv = slurp(dir / "eval_out/predictions.csv");
    CHECK(csv.rfind("question_id,predicted_label,correct\n", 0) == 0);

    // Evaluating from precomputed graph files gives byte-identical predictions.
    cli::stage_eval(kg, (dir / "kg.tsv").string(),
                    (dir / "run_staged/checkpoint.bin").string(),
                    (dir / "data.jsonl").string(), (dir / "expanded.jsonl").string(),
                    (dir / "eval_staged").string());
    CHECK(slurp(dir / "eval_staged/predictions.csv") == csv);

    // Manifests exist and carry input checksums.
    std::string manifest = slurp(dir / "run_staged/manifest.json");
    CHECK(manifest.find("fnv1a64:") != std::string::npos);
    CHECK(manifest.find("\"command\": \"train\"") != std::string::npos);

    cli::stage_score(kg, (dir / "kg.tsv").string(),
                     (dir / "run_staged/checkpoint.bin").string(),
                     (dir / "data.jsonl").string(), "", (dir / "scores.jsonl").string(), 2);
    std::string scores = slurp(dir / "scores.jsonl");
    CHECK(std::count(scores.begin(), scores.end(), '\n') == id * 5);

    // Threaded extraction matches the sequential bytes.
    cli::stage_extract(kg, (dir / "kg.tsv").string(), (dir / "grounded.jsonl").string(),
                       (dir / "graphs_seq.jsonl").string(), cfg, 1);
    CHECK(slurp(dir / "graphs.jsonl") == slurp(dir / "graphs_seq.jsonl"));
}

TEST_CASE("ingest stage writes a loadable snapshot") {
    auto dir = temp_dir("schemaqa_ingest");
    write(dir / "kg.tsv", "IsA\tdog\tanimal\t1.0\nAtLocation\tdog\thouse\t2.0\n");
    cli::stage_ingest((dir / "kg.tsv").string(), (dir / "kg.bin").string(), {});
    auto kg = kg::load_kg_any((dir / "kg.bin").string());
    CHECK(kg.num_triples() == 2);
    CHECK(std::filesystem::exists(dir / "kg.bin.manifest.json"));
}
