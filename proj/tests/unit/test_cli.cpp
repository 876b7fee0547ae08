#include "kglab/cli.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args)
{
    args.insert(args.begin(), "kg-lab");
    std::ostringstream out;
    std::ostringstream err;
    const int code = kglab::cli::parse_and_dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, ClassifyExample)
{
    const auto r = run({"classify", "--n", "2", "--psi", "pow:c=1,tau=2"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("Converges"), std::string::npos);
    EXPECT_NE(r.out.find("MeasureZero"), std::string::npos);
    EXPECT_EQ(r.out.rfind("# kg-lab v", 0), 0u);
}

TEST(Cli, SlabExample)
{
    const auto r = run({"slab", "--q", "1,1", "--delta", "0.5"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("\n2,\"(1,1)\",0.5,0.125,1.0,"), std::string::npos) << r.out;
}

TEST(Cli, SlabFallsBackOutsideEnvelope)
{
    const auto r = run({"slab", "--q", "2000,1", "--delta", "0.5", "--samples", "1000"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("monte-carlo"), std::string::npos);
}

TEST(Cli, MeasureColumnsAndDeterminism)
{
    const std::vector<std::string> args{"measure", "--n", "2", "--psi", "pow:c=0.25,tau=1",
                                        "--window", "10,100", "--samples", "5000", "--seed", "42"};
    const auto a = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_NE(a.out.find("\nn,psi,N,Q,samples,seed,value,std_error,elapsed_s\n"), std::string::npos);
    EXPECT_EQ(run(args).out, a.out);
    auto threaded = args;
    threaded.insert(threaded.end(), {"--threads", "3"});
    EXPECT_EQ(run(threaded).out, a.out);
}

TEST(Cli, JsonRoundTrip)
{
    const auto r = run({"measure", "--n", "2", "--psi", "pow:c=0.25,tau=1", "--window", "10,100",
                        "--samples", "2000", "--seed", "7", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    for (const auto* key : {"command", "params", "results", "seed", "elapsed_s", "version"})
        EXPECT_TRUE(j.contains(key)) << key;
    for (const auto* key : {"subcommand", "n", "psi", "window", "samples", "seed", "format", "out"})
        EXPECT_TRUE(j["params"].contains(key)) << key;
    EXPECT_EQ(j["params"]["window"], "10,100");
    EXPECT_EQ(j["seed"], 7);
    EXPECT_EQ(j["results"][0]["samples"], 2000);
    EXPECT_EQ(j["elapsed_s"], 0.0);
}

TEST(Cli, UsageErrors)
{
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"bogus"}).code, 2);
    EXPECT_EQ(run({"measure", "--n", "2"}).code, 2);
    const auto bad_psi = run({"measure", "--n", "2", "--psi", "foo", "--window", "1,2"});
    EXPECT_EQ(bad_psi.code, 2);
    EXPECT_NE(bad_psi.err.find("psi"), std::string::npos);
    EXPECT_EQ(run({"measure", "--n", "2", "--psi", "pow:c=1,tau=1", "--window", "5,2"}).code, 2);
    EXPECT_EQ(run({"measure", "--n", "2", "--psi", "pow:c=1,tau=1", "--window", "1,2", "--format", "xml"}).code, 2);
    EXPECT_EQ(run({"dim", "--m", "1", "--n", "2", "--tau", "-1"}).code, 2);
    EXPECT_EQ(run({"lift", "--n", "2", "--psi", "pow:c=0.5,tau=1", "--x-hat", "0.3", "--q-hat", "1", "--C", "2"}).code, 2);
}

TEST(Cli, HelpExitsZero)
{
    const auto r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("measure"), std::string::npos);
    EXPECT_EQ(run({"measure", "--help"}).code, 0);
}

TEST(Cli, JsonConfig)
{
    const auto path = std::filesystem::temp_directory_path() / "kglab_cli_config.json";
    {
        std::ofstream f(path);
        f << R"({"n": 2, "psi": "pow:c=0.25,tau=1", "window": [10, 100], "samples": 3000, "seed": 5})";
    }
    const auto direct = run({"measure", "--n", "2", "--psi", "pow:c=0.25,tau=1", "--window", "10,100",
                             "--samples", "3000", "--seed", "5"});
    const auto via = run({"measure", "--json-config", path.string()});
    EXPECT_EQ(via.code, 0) << via.err;
    EXPECT_EQ(via.out, direct.out);
    // Command-line flags override the file.
    const auto over = run({"measure", "--json-config", path.string(), "--seed", "6"});
    EXPECT_NE(over.out.find(",3000,6,"), std::string::npos) << over.out;
    std::filesystem::remove(path);
    EXPECT_EQ(run({"measure", "--json-config", "/nonexistent.json"}).code, 2);
}

TEST(Cli, OutFile)
{
    const auto path = std::filesystem::temp_directory_path() / "kglab_cli_out.csv";
    const auto r = run({"dim", "--m", "2", "--n", "3", "--tau", "1", "--out", path.string()});
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_NE(ss.str().find("\n2,3,1.0,4.0,"), std::string::npos);
    std::filesystem::remove(path);
}

TEST(Cli, OtherCommands)
{
    EXPECT_NE(run({"shells", "--n", "3", "--k", "2"}).out.find("\n3,2,98,49\n"), std::string::npos);
    const auto list = run({"shells", "--n", "2", "--k", "1", "--list"});
    EXPECT_NE(list.out.find("2,1,0,\"(1,-1)\""), std::string::npos);

    const auto count = run({"count", "--psi", "pow:c=1,tau=1", "--x", "0,0", "--Q", "3"});
    EXPECT_NE(count.out.find(",3,48,"), std::string::npos) << count.out;

    const auto ratio = run({"count", "--n", "2", "--psi", "pow:c=0.25,tau=1", "--points", "10",
                            "--Q-list", "20,40", "--format", "json"});
    ASSERT_EQ(ratio.code, 0) << ratio.err;
    EXPECT_EQ(nlohmann::json::parse(ratio.out)["results"].size(), 2u);

    const auto lift = run({"lift", "--n", "3", "--psi", "pow:c=1,tau=1", "--x-hat", "0.9,0.9",
                           "--q-hat", "1,1"});
    ASSERT_EQ(lift.code, 0) << lift.err;
    EXPECT_NE(lift.out.find("\"(1,1,-2)\""), std::string::npos);
    EXPECT_NE(lift.out.find("tall-q_n,1"), std::string::npos);

    const auto thm = run({"theorem", "--n", "2", "--psi", "pow:c=1,tau=2", "--N-list", "10,20",
                          "--Q", "100", "--samples", "2000", "--format", "json"});
    ASSERT_EQ(thm.code, 0) << thm.err;
    const auto j = nlohmann::json::parse(thm.out);
    EXPECT_EQ(j["results"]["predicted_branch"], "MeasureZero");
    EXPECT_TRUE(j["results"]["schedule_csv"].is_string());

    EXPECT_NE(run({"classify", "--n", "2", "--psi", "pow:c=1,tau=1"}).out.find("FullMeasure"), std::string::npos);
}
