#include "doctest.h"
#include "lipgan/config.hpp"
#include "lipgan/errors.hpp"
#include "temp_dir.hpp"

using namespace lipgan;

TEST_SUITE("config") {
  TEST_CASE("defaults validate and round-trip through the canonical form") {
    ExperimentConfig cfg;
    cfg.validate();
    const auto text = cfg.to_string();
    CHECK(ExperimentConfig::parse(text).to_string() == text);
    CHECK(text.find("[curriculum]\nmax_len = 25\n") != std::string::npos);
  }

  TEST_CASE("every field survives a round trip") {
    ExperimentConfig cfg;
    cfg.corpus_path = "data/corpus.txt";
    cfg.level = TokenLevel::character;
    cfg.cell = CellKind::lstm;
    cfg.mode = "wgan-gp";
    cfg.lambda = 0.1;
    cfg.lr = 3.3e-4;
    cfg.curriculum.teacher_ratio_start = 1.0 / 3.0;
    cfg.curriculum.variable_length = false;
    cfg.seed = 18446744073709551615ull;
    cfg.log_wall_time = true;
    const auto back = ExperimentConfig::parse(cfg.to_string());
    CHECK(back.to_string() == cfg.to_string());
    CHECK(back.lambda == 0.1);
    CHECK(back.curriculum.teacher_ratio_start == 1.0 / 3.0);
    CHECK(back.seed == cfg.seed);
    CHECK(back.level == TokenLevel::character);
    CHECK(back.cell == CellKind::lstm);
    CHECK_FALSE(back.curriculum.variable_length);
  }

  TEST_CASE("parsing sections, comments and blank lines") {
    const auto cfg = ExperimentConfig::parse(
        "# experiment\n"
        "[train]\n"
        "mode = wgan-clip   # weight clipping\n"
        "clip=0.05\n"
        "\n"
        "[model]\n"
        "  hidden = 64\n");
    CHECK(cfg.mode == "wgan-clip");
    CHECK(cfg.clip == 0.05);
    CHECK(cfg.hidden == 64);
    CHECK(std::holds_alternative<Clip>(cfg.training_mode()));
  }

  TEST_CASE("rejections") {
    CHECK_THROWS_AS(ExperimentConfig::parse("[train]\nno_such_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("[model]\nlambda = 1\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("[train]\nlambda\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("[train\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("batch_size = -3\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("batch_size = 3.5\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("lr = nan\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("variable_len = maybe\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("cell = rnn\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("level = byte\n"), ConfigError);
  }

  TEST_CASE("range validation") {
    const auto bad = [](const char* assignment) {
      ExperimentConfig cfg;
      cfg.apply_override(assignment);
      return cfg;
    };
    CHECK_THROWS_AS(bad("mode=wgan").validate(), ConfigError);
    CHECK_THROWS_AS(bad("lambda=-1").validate(), ConfigError);
    CHECK_THROWS_AS(bad("parts=1").validate(), ConfigError);
    CHECK_THROWS_AS(bad("hidden=0").validate(), ConfigError);
    CHECK_THROWS_AS(bad("n_critic=0").validate(), ConfigError);
    CHECK_THROWS_AS(bad("batch_size=0").validate(), ConfigError);
    CHECK_THROWS_AS(bad("beta1=1").validate(), ConfigError);
    CHECK_THROWS_AS(bad("teacher_start=2").validate(), ConfigError);
    CHECK_THROWS_AS(bad("eval_interval=0").validate(), ConfigError);
    CHECK_THROWS_AS(bad("divergence_bound=0").validate(), ConfigError);
    CHECK_NOTHROW(bad("lambda=100").validate());
  }

  TEST_CASE("overrides") {
    ExperimentConfig cfg;
    cfg.apply_override("lambda=100");
    cfg.apply_override(" hidden = 8 ");
    CHECK(cfg.lambda == 100.0);
    CHECK(cfg.hidden == 8);
    CHECK_THROWS_AS(cfg.apply_override("hidden"), ConfigError);
    CHECK_THROWS_AS(cfg.apply_override("bogus=1"), ConfigError);
  }

  TEST_CASE("load from a file") {
    TempDir dir("config");
    spit(dir / "exp.ini", "[run]\nseed = 7\n");
    CHECK(ExperimentConfig::load(dir / "exp.ini").seed == 7);
    CHECK_THROWS_AS(ExperimentConfig::load(dir / "missing.ini"), IoError);
  }

  TEST_CASE("derived settings") {
    ExperimentConfig cfg;
    cfg.lr = 2e-3;
    cfg.curriculum.max_length = 5;
    const auto t = cfg.train_config();
    CHECK(t.critic_adam.learning_rate == 2e-3);
    CHECK(t.generator_adam.learning_rate == 2e-3);
    CHECK(std::holds_alternative<OneSidedLP>(t.mode));
    CHECK(cfg.effective_eval_len() == 5);
    cfg.eval_len = 9;
    CHECK(cfg.effective_eval_len() == 9);
    CHECK(cfg.model_shape(30).vocab_size == 30);
  }
}
