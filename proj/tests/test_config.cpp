#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "core/config.hpp"

using namespace standage;

namespace {

std::string config_temp_dir()
{
    static std::string dir = [] {
        char buf[] = "/tmp/standage_cfg_XXXXXX";
        if (mkdtemp(buf) == nullptr)
            std::abort();
        return std::string(buf);
    }();
    return dir;
}

std::string write_config(const char *stem, const std::string &body)
{
    const std::string path = config_temp_dir() + "/" + stem;
    std::ofstream(path) << body;
    return path;
}

}  // namespace

TEST_CASE("RunConfig: parses key = value with comments and blanks")
{
    const std::string path = write_config("basic.cfg",
                                          "# a comment\n"
                                          "out_dir = /tmp/run\n"
                                          "\n"
                                          "seed=42   # trailing comment\n"
                                          "  threads =  3  \n"
                                          "sigma_scale = 0.5\n"
                                          "weighted = true\n");
    const RunConfig cfg = RunConfig::load(path);
    CHECK(cfg.get_string("out_dir") == "/tmp/run");
    CHECK(cfg.get_u64("seed", 0) == 42);
    CHECK(cfg.get_long("threads", 1) == 3);
    CHECK(cfg.get_double("sigma_scale", 1.0) == 0.5);
    CHECK(cfg.get_bool("weighted", false));
    CHECK(cfg.has("seed"));
    CHECK(!cfg.has("missing"));
}

TEST_CASE("RunConfig: fallbacks apply only when the key is absent")
{
    RunConfig cfg;
    CHECK(cfg.get_double("x", 7.5) == 7.5);
    CHECK(cfg.get_long("n", -2) == -2);
    CHECK(cfg.get_u64("seed", 9) == 9);
    CHECK(cfg.get_bool("flag", true));
    CHECK(cfg.get_string("name", "none") == "none");
    cfg.set("x", "1.25");
    CHECK(cfg.get_double("x", 7.5) == 1.25);
}

TEST_CASE("RunConfig: typed getters name the offending key")
{
    RunConfig cfg;
    cfg.set("threads", "many");
    cfg.set("weighted", "maybe");
    cfg.set("sigma_scale", "0.5x");

    const auto check_names = [&](auto call, const char *key) {
        try
        {
            call();
            FAIL_CHECK("expected ValidationError for " << key);
        }
        catch (const ValidationError &e)
        {
            CHECK(std::string(e.what()).find(key) != std::string::npos);
        }
    };
    check_names([&] { cfg.get_long("threads", 1); }, "threads");
    check_names([&] { cfg.get_bool("weighted", false); }, "weighted");
    check_names([&] { cfg.get_double("sigma_scale", 1.0); }, "sigma_scale");
    check_names([&] { cfg.get_string("absent"); }, "absent");
}

TEST_CASE("RunConfig: boolean spellings")
{
    RunConfig cfg;
    for (const char *v : {"1", "true", "yes", "on", "TRUE", "Yes"})
    {
        cfg.set("b", v);
        CHECK(cfg.get_bool("b", false));
    }
    for (const char *v : {"0", "false", "no", "off", "False"})
    {
        cfg.set("b", v);
        CHECK(!cfg.get_bool("b", true));
    }
}

TEST_CASE("RunConfig: malformed lines report the line number")
{
    const std::string path =
        write_config("broken.cfg", "out_dir = /tmp\njust words\n");
    try
    {
        RunConfig::load(path);
        FAIL("expected ValidationError");
    }
    catch (const ValidationError &e)
    {
        const std::string what = e.what();
        CHECK(what.find("line 2") != std::string::npos);
        CHECK(what.find("just words") != std::string::npos);
    }
    CHECK_THROWS_AS(RunConfig::load(config_temp_dir() + "/absent.cfg"),
                    ValidationError);
}

TEST_CASE("RunConfig: merge_override lets the overlay win")
{
    RunConfig base;
    base.set("seed", "1");
    base.set("out_dir", "/a");
    RunConfig overlay;
    overlay.set("seed", "42");
    overlay.set("threads", "2");
    base.merge_override(overlay);
    CHECK(base.get_u64("seed", 0) == 42);
    CHECK(base.get_string("out_dir") == "/a");
    CHECK(base.get_long("threads", 0) == 2);
}

TEST_CASE("RunConfig: serialize emits sorted lines that reload identically")
{
    RunConfig cfg;
    cfg.set("zeta", "9");
    cfg.set("alpha", "1");
    cfg.set("mid", "x y");
    const std::string text = cfg.serialize();
    CHECK(text == "alpha = 1\nmid = x y\nzeta = 9\n");

    const std::string path = write_config("replay.cfg", text);
    const RunConfig back = RunConfig::load(path);
    CHECK(back.entries() == cfg.entries());
    CHECK(back.serialize() == text);
}
