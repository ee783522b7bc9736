#include "blendlab/config.hpp"
#include "blendlab/error.hpp"
#include "doctest.h"

using namespace blendlab;

TEST_CASE("key = value parsing") {
    const auto kv = parse_key_values("# comment\n a = 1 \n\nb=x y # trailing\n");
    CHECK(kv.size() == 2);
    CHECK(kv.at("a") == "1");
    CHECK(kv.at("b") == "x y");
    CHECK_THROWS_WITH_AS(parse_key_values("a = 1\nnonsense\n"), "config line 2: expected key = value", Error);
    CHECK_THROWS_WITH_AS(parse_key_values(" = 3"), "config line 1: empty key", Error);
    CHECK_THROWS_WITH_AS(parse_key_values("a=1\na=2"), "config line 2: duplicate key a", Error);
}

TEST_CASE("overrides replace or add keys") {
    auto kv = parse_key_values("a = 1");
    apply_override(kv, "a=2");
    apply_override(kv, " c = 3 ");
    CHECK(kv.at("a") == "2");
    CHECK(kv.at("c") == "3");
    CHECK_THROWS_AS(apply_override(kv, "novalue"), Error);
    CHECK_THROWS_AS(apply_override(kv, "=1"), Error);
}

TEST_CASE("commands round-trip through their names") {
    for (Command c : {Command::Cover, Command::Skeleton, Command::Synthesize, Command::VerifyA, Command::VerifyB,
                      Command::Pipeline})
        CHECK(parse_command(command_name(c)) == c);
    CHECK_THROWS_WITH_AS(parse_command("frobnicate"), "unknown command: frobnicate", Error);
}

TEST_CASE("the default config builds for every command") {
    const auto kv = parse_key_values(kDefaultConfig);
    for (Command c : {Command::Cover, Command::Skeleton, Command::Synthesize, Command::VerifyA, Command::VerifyB,
                      Command::Pipeline}) {
        const auto cfg = ExperimentConfig::build(kv, c);
        CHECK(cfg.system.lambda == 1.5);
        for (const auto& key : required_keys(c)) CHECK(cfg.echo.count(key) == 1);
    }
    const auto cfg = ExperimentConfig::build(kv, Command::Pipeline);
    CHECK(cfg.m_list == std::vector<std::size_t>{20});
    CHECK(cfg.skeleton.m == 20);
    CHECK(cfg.mode.mode == Mode::A);
    CHECK(cfg.weights == std::vector<double>{0.5, 0.0, 0.5, 0.0});
    CHECK(ExperimentConfig::build(kv, Command::VerifyB).mode.mode == Mode::B);
    CHECK(ExperimentConfig::build(kv, Command::Cover).widths.size() == 8);
}

TEST_CASE("the first missing key is named") {
    auto kv = parse_key_values(kDefaultConfig);
    kv.erase("eps_E");
    kv.erase("K0");
    CHECK_THROWS_WITH_AS(ExperimentConfig::build(kv, Command::Skeleton), "missing config key: eps_E", Error);
    // Cover does not need skeleton keys.
    CHECK_NOTHROW(ExperimentConfig::build(kv, Command::Cover));
    kv = parse_key_values(kDefaultConfig);
    kv.erase("seed");
    CHECK_NOTHROW(ExperimentConfig::build(kv, Command::Synthesize));
    CHECK_THROWS_WITH_AS(ExperimentConfig::build(kv, Command::VerifyA), "missing config key: seed", Error);
}

TEST_CASE("bad and unknown values") {
    auto kv = parse_key_values(kDefaultConfig);
    kv["colour"] = "red";
    CHECK_THROWS_WITH_AS(ExperimentConfig::build(kv, Command::Cover), "unknown config key: colour", Error);
    kv = parse_key_values(kDefaultConfig);
    kv["lambda"] = "fast";
    CHECK_THROWS_WITH_AS(ExperimentConfig::build(kv, Command::Cover), "bad value for lambda: fast", Error);
    kv = parse_key_values(kDefaultConfig);
    kv["widths"] = "";
    CHECK_THROWS_WITH_AS(ExperimentConfig::build(kv, Command::Cover), "no widths", Error);
    kv = parse_key_values(kDefaultConfig);
    kv["m_list"] = "";
    CHECK_THROWS_WITH_AS(ExperimentConfig::build(kv, Command::Skeleton), "no m values", Error);
    kv = parse_key_values(kDefaultConfig);
    kv["m_list"] = "12,2.5";
    CHECK_THROWS_WITH_AS(ExperimentConfig::build(kv, Command::Skeleton), "bad value for m_list: 2.5", Error);
    kv = parse_key_values(kDefaultConfig);
    kv["mode"] = "C";
    CHECK_THROWS_WITH_AS(ExperimentConfig::build(kv, Command::Pipeline), "bad value for mode: C", Error);
}
