#include <gtest/gtest.h>

#include <filesystem>

#include "afcmem/scenario.hpp"

using namespace afcmem;

namespace {

json bundled(const std::string& name) {
    return json::parse(io::read_file(std::string(AFCMEM_SCENARIOS) + "/" + name + ".json"));
}

std::string config_error(const json& j) {
    try {
        parse_scenario(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

json results(const Artifacts& a) {
    const std::string* r = a.find("results.json");
    return r ? json::parse(*r) : json();
}

}  // namespace

TEST(ScenarioParse, BundledFilesParse) {
    for (const char* n : {"cold_cavity", "pit_modes", "comb_storage", "efficiency_sweep", "design_matched"})
        EXPECT_NO_THROW(parse_scenario(bundled(n))) << n;
}

TEST(ScenarioParse, ErrorsNameTheField) {
    auto j = bundled("comb_storage");
    j["cavity"]["r1"] = 1.5;
    EXPECT_NE(config_error(j).find("cavity.r1"), std::string::npos);

    j = bundled("comb_storage");
    j["grid"]["count"] = 1000;
    EXPECT_NE(config_error(j).find("grid.count"), std::string::npos);

    j = bundled("comb_storage");
    j["afc"]["finesse"] = 0.5;
    EXPECT_NE(config_error(j).find("afc.finesse"), std::string::npos);

    j = bundled("comb_storage");
    j["afc"]["delta_hz"] = "wide";
    EXPECT_NE(config_error(j).find("afc.delta_hz"), std::string::npos);

    j = bundled("comb_storage");
    j["pulse"]["center_s"] = 1.0;
    EXPECT_NE(config_error(j).find("pulse.center_s"), std::string::npos);
}

TEST(ScenarioParse, UnknownFieldsRejected) {
    auto j = bundled("comb_storage");
    j["cavity"]["mirror"] = 0.5;
    EXPECT_NE(config_error(j).find("cavity.mirror"), std::string::npos);
    j = bundled("comb_storage");
    j["extra"] = 1;
    EXPECT_NE(config_error(j).find("extra"), std::string::npos);
    j = bundled("comb_storage");
    j["outputs"] = {"results", "plots"};
    EXPECT_NE(config_error(j).find("outputs"), std::string::npos);
}

TEST(ScenarioParse, MissingSections) {
    auto j = bundled("comb_storage");
    j.erase("afc");
    EXPECT_NE(config_error(j).find("afc"), std::string::npos);
    j = bundled("cold_cavity");
    j.erase("cavity");
    EXPECT_NE(config_error(j).find("cavity"), std::string::npos);
    j = bundled("cold_cavity");
    j["kind"] = "teleport";
    EXPECT_NE(config_error(j).find("kind"), std::string::npos);
    EXPECT_THROW(parse_scenario_text("{\"name\": "), ConfigError);
    EXPECT_THROW(parse_scenario_text("[1, 2]"), ConfigError);
}

TEST(ScenarioRun, ColdCavity) {
    const auto r = results(run_scenario(parse_scenario(bundled("cold_cavity"))));
    EXPECT_NEAR(r["fsr_sim_hz"].get<double>(), r["fsr_theory_hz"].get<double>(), 1e-3 * 41.6e9);
    EXPECT_NEAR(r["finesse_sim"].get<double>(), r["finesse_formula"].get<double>(),
                0.02 * r["finesse_formula"].get<double>());
}

TEST(ScenarioRun, StorageEnhancement) {
    const auto a = run_scenario(parse_scenario(bundled("comb_storage")));
    const auto r = results(a);
    EXPECT_GT(r["efficiency"].get<double>(), r["bare_efficiency"].get<double>());
    EXPECT_GT(r["enhancement"].get<double>(), 5.0);
    EXPECT_NE(a.find("trace_cavity.csv"), nullptr);
    EXPECT_NE(a.find("profile.csv"), nullptr);
    EXPECT_EQ(a.find("index.csv"), nullptr);
}

TEST(ScenarioRun, EfficiencySweepTracksClosedForm) {
    const auto r = results(run_scenario(parse_scenario(bundled("efficiency_sweep"))));
    EXPECT_LT(r["max_relative_error"].get<double>(), 0.15);
}

TEST(ScenarioRun, OutputsSelectArtifacts) {
    auto j = bundled("comb_storage");
    j["outputs"] = {"results"};
    const auto a = run_scenario(parse_scenario(j));
    ASSERT_EQ(a.files.size(), 1u);
    EXPECT_EQ(a.files[0].first, "results.json");
}

TEST(Manifest, DeterministicAndSensitiveToInput) {
    const auto sc = parse_scenario(bundled("comb_storage"));
    const auto m1 = manifest(sc.name, sc.canonical, run_scenario(sc));
    const auto m2 = manifest(sc.name, sc.canonical, run_scenario(parse_scenario(bundled("comb_storage"))));
    EXPECT_EQ(m1, m2);
    auto j = bundled("comb_storage");
    j["afc"]["d_peak"] = 0.8;
    const auto sc2 = parse_scenario(j);
    const auto m3 = manifest(sc2.name, sc2.canonical, run_scenario(sc2));
    EXPECT_NE(json::parse(m1)["scenario_hash"], json::parse(m3)["scenario_hash"]);
    EXPECT_NE(m1, m3);
}

TEST(Manifest, Fnv1aVectors) {
    EXPECT_EQ(hex(fnv1a("")), "cbf29ce484222325");
    EXPECT_EQ(hex(fnv1a("a")), "af63dc4c8601ec8c");
}

TEST(WriteArtifacts, WritesFilesAndManifest) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "afcmem_write_test";
    fs::remove_all(dir);
    Artifacts a;
    a.add("results.json", "{}\n");
    write_artifacts(dir, "t", "{}", a);
    EXPECT_TRUE(fs::exists(dir / "results.json"));
    const auto m = json::parse(io::read_file((dir / "manifest.json").string()));
    EXPECT_EQ(m["files"][0]["bytes"], 3);
    fs::remove_all(dir);
}

TEST(WriteArtifacts, UnwritableDirectoryIsIoError) {
    Artifacts a;
    a.add("results.json", "{}\n");
    EXPECT_THROW(write_artifacts("/proc/afcmem/out", "t", "{}", a), IoError);
}
