#include <doctest.h>

#include <sstream>

#include "qflow/run_config.hpp"

using namespace qflow;

TEST_CASE("config parsing and overrides") {
    const std::string text =
        "# experiment\n"
        "[run]\n"
        "seed = 99\n"
        "out = runs/exp\n"
        "\n"
        "[solver]\n"
        "steps = 200\n"
        "gamma = 5.5\n"
        "scheduler = false\n"
        "\n"
        "[train]\n"
        "epochs = 40\n"
        "hidden = 32,16\n";
    RunConfig cfg = RunConfig::from_text(text);
    CHECK(cfg.seed == 99);
    CHECK(cfg.train.seed == 99);
    CHECK(cfg.out == "runs/exp");
    CHECK(cfg.solver.steps == 200);
    CHECK(cfg.solver.scheduler.gamma == 5.5);
    CHECK_FALSE(cfg.solver.scheduler_enabled);
    CHECK(cfg.train.epochs == 40);
    CHECK(cfg.arch().widths == std::vector<int>{8, 32, 16, 7});

    // flags override file values deterministically
    cfg.set("solver.steps", "500");
    cfg.set("run.seed", "7");
    CHECK(cfg.solver.steps == 500);
    CHECK(cfg.seed == 7);
    CHECK(cfg.train.seed == 7);
}

TEST_CASE("invalid config fields are named") {
    CHECK_THROWS_WITH_AS(RunConfig::from_text("[run]\nbogus = 1\n"),
                         doctest::Contains("unknown key: run.bogus"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(RunConfig::from_text("[solver]\nsteps = tenish\n"),
                         doctest::Contains("solver.steps"), std::invalid_argument);
    CHECK_THROWS_AS(RunConfig::from_text("steps = 5\n"), std::invalid_argument);  // key outside section
    CHECK_THROWS_AS(RunConfig::from_text("[solver]\nsteps 5\n"), std::invalid_argument);
    CHECK_THROWS_AS(RunConfig::from_text("[train]\nhidden = \n"), std::invalid_argument);
    CHECK_THROWS_AS(RunConfig::from_file("/nonexistent/qflow.ini"), std::runtime_error);
}

TEST_CASE("echo round-trips the resolved config") {
    RunConfig cfg;
    cfg.set("run.seed", "123");
    cfg.set("solver.gamma", "2.25");
    cfg.set("train.learning_rate", "0.001");
    cfg.set("rectify.filter", "angle_below_half_pi");
    std::ostringstream os;
    cfg.echo(os);

    const RunConfig back = RunConfig::from_text(os.str());
    CHECK(back.seed == cfg.seed);
    CHECK(back.solver.scheduler.gamma == cfg.solver.scheduler.gamma);
    CHECK(back.train.learning_rate == cfg.train.learning_rate);
    CHECK(back.rectify_filter == cfg.rectify_filter);
    CHECK(back.hidden == cfg.hidden);

    // echo is deterministic
    std::ostringstream os2;
    cfg.echo(os2);
    CHECK(os.str() == os2.str());
}
