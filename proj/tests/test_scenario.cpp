#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "appslice/scenario.hpp"
#include "doctest.h"

#ifdef APPSLICE_CLI
#include <sys/wait.h>
#include <unistd.h>
#endif

using namespace appslice;

namespace {

std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

bool has_error_at(const std::vector<Diagnostic>& diags, const std::string& path) {
    for (const Diagnostic& d : diags)
        if (d.severity == Severity::Error && d.path == path) return true;
    return false;
}

}  // namespace

TEST_CASE("the six shipped presets match their generators byte for byte") {
    const std::vector<std::string> names = preset_names();
    REQUIRE(names == std::vector<std::string>{"fig5_net", "fig5_cpu", "fig7a_appslice",
                                              "fig7a_besteffort", "fig7b_static",
                                              "fig7b_dynamic"});
    for (const std::string& name : names) {
        const Scenario sc = make_preset(name);
        CHECK(sc.name == name);
        const std::string expected = serialize_scenario(sc).dump(2) + "\n";
        const auto file = std::filesystem::path(SCENARIO_DIR) / (name + ".json");
        CHECK(read_file(file) == expected);
    }
    CHECK_THROWS_AS(make_preset("fig9_imaginary"), Error);
}

TEST_CASE("scenarios survive a serialize/parse round trip unchanged") {
    for (const std::string& name : preset_names()) {
        const Scenario sc = make_preset(name);
        const Scenario back = parse_scenario(serialize_scenario(sc));
        CHECK(back == sc);
        const auto file = std::filesystem::path(SCENARIO_DIR) / (name + ".json");
        CHECK(load_scenario(file) == sc);
    }
}

TEST_CASE("all presets validate without errors") {
    for (const std::string& name : preset_names()) {
        const Scenario sc = make_preset(name);
        auto diags = validate_scenario(sc);
        CHECK_FALSE(has_errors(diags));
        CHECK(diags.empty());
    }
}

TEST_CASE("validation pinpoints cross-document mistakes") {
    Scenario sc = make_preset("fig5_net");

    SUBCASE("slice entry without a matching function") {
        sc.spec.app_slice.per_function["ghost"] = sc.spec.app_slice.per_function["faceMatching"];
        CHECK(has_error_at(validate_scenario(sc), "/appSlice/perFunction/ghost"));
    }

    SUBCASE("pinned tier missing from the fabric") {
        sc.spec.app_slice.per_function["videoSensor"].compute.tier = Tier::Cloud;
        sc.spec.app.functions[0].slice->compute.tier = Tier::Cloud;
        sc.fabric.tiers.pop_back();  // drop cloud
        sc.fabric.links.pop_back();  // and the edge->cloud link
        CHECK(has_error_at(validate_scenario(sc),
                           "/appSlice/perFunction/videoSensor/compute/tier"));
    }

    SUBCASE("load schedule going backwards in time") {
        sc.fabric.load_schedule.push_back(
            {5.0, LinkId{Tier::Device, Tier::Edge}, LoadKind::TrafficMbps, 1.0});
        sc.fabric.load_schedule.push_back(
            {2.0, LinkId{Tier::Device, Tier::Edge}, LoadKind::TrafficMbps, 0.0});
        CHECK(has_error_at(validate_scenario(sc), "/fabric/loadSchedule/1/timeS"));
    }

    SUBCASE("load event on a link the fabric does not have") {
        sc.fabric.load_schedule.push_back(
            {0.0, LinkId{Tier::Edge, Tier::Device}, LoadKind::TrafficMbps, 1.0});
        CHECK(has_error_at(validate_scenario(sc), "/fabric/loadSchedule/0/target"));
    }

    SUBCASE("duplicate link definition") {
        sc.fabric.links.push_back(sc.fabric.links.front());
        CHECK(has_error_at(validate_scenario(sc), "/fabric/links/2"));
    }

    SUBCASE("anchor table that is not monotone") {
        std::swap(sc.profile.net_anchors_mbps[0].second,
                  sc.profile.net_anchors_mbps[1].second);
        auto diags = validate_scenario(sc);
        CHECK(has_errors(diags));
        bool profile_error = false;
        for (const Diagnostic& d : diags)
            if (d.path.rfind("/workload/profile", 0) == 0) profile_error = true;
        CHECK(profile_error);
    }

    SUBCASE("pipeline pointed at a function the app lacks") {
        sc.pipeline.target_function = "ghost";
        CHECK(has_error_at(validate_scenario(sc), "/workload/pipeline/targetFunction"));
    }
}

TEST_CASE("strict parsing rejects stray or ill-typed fields") {
    const json good = serialize_scenario(make_preset("fig5_net"));

    json doc = good;
    doc["extra"] = 1;
    CHECK_THROWS_AS(parse_scenario(doc), SchemaError);

    doc = good;
    doc["runtime"]["fudge"] = 2;
    CHECK_THROWS_AS(parse_scenario(doc), SchemaError);

    doc = good;
    doc["fabric"]["links"][0]["color"] = "red";
    CHECK_THROWS_AS(parse_scenario(doc), SchemaError);

    doc = good;
    doc["workload"]["trace"]["appearances"][0]["nickname"] = "p";
    CHECK_THROWS_AS(parse_scenario(doc), SchemaError);

    doc = good;
    doc["durationS"] = "long";
    CHECK_THROWS_AS(parse_scenario(doc), SchemaError);

    doc = good;
    doc["runtime"]["growthPolicy"] = "tripling";
    CHECK_THROWS_AS(parse_scenario(doc), SchemaError);

    doc = good;
    doc.erase("app");
    CHECK_THROWS_AS(parse_scenario(doc), SchemaError);

    doc = good;
    doc["durationS"] = -3;
    CHECK_THROWS_AS(parse_scenario(doc), ValidationError);
}

TEST_CASE("load schedule targets round trip in arrow form") {
    const Scenario sc = make_preset("fig7a_appslice");
    REQUIRE(sc.fabric.load_schedule.size() == 2);
    CHECK(std::get<LinkId>(sc.fabric.load_schedule[0].target) ==
          LinkId{Tier::Device, Tier::Edge});
    CHECK(sc.fabric.load_schedule[0].value == 4.75);
    CHECK(std::get<Tier>(sc.fabric.load_schedule[1].target) == Tier::Edge);
    CHECK(sc.fabric.load_schedule[1].value == 71900.0);

    const json doc = serialize_scenario(sc);
    CHECK(doc["fabric"]["loadSchedule"][0]["target"] == json("device->edge"));
    CHECK(doc["fabric"]["loadSchedule"][0]["kind"] == json("trafficMbps"));
    CHECK(doc["fabric"]["loadSchedule"][1]["target"] == json("edge"));
    CHECK(doc["fabric"]["loadSchedule"][1]["kind"] == json("cpuBurnMillicpu"));
}

TEST_CASE("a missing scenario file raises a syntax error") {
    CHECK_THROWS_AS(load_scenario("/nonexistent/nowhere.json"), SyntaxError);
}

TEST_CASE("contended runs: slicing holds service, best effort collapses") {
    const RunReport sliced = run_scenario(make_preset("fig7a_appslice"));
    CHECK(sliced.alerts == 10);
    CHECK(sliced.total_cost == 160000.0);
    CHECK(sliced.adjustments.empty());
    CHECK(sliced.simulated_s == 20.0);
    CHECK(sliced.metrics.size() == 10);
    CHECK(sliced.admission_notes.empty());
    REQUIRE(sliced.allocation.has_value());
    CHECK_FALSE(sliced.allocation->best_effort);
    CHECK_FALSE(sliced.failure.has_value());

    const RunReport loose = run_scenario(make_preset("fig7a_besteffort"));
    CHECK(loose.alerts == 1);
    CHECK(loose.total_cost == 0.0);
    REQUIRE(loose.allocation.has_value());
    CHECK(loose.allocation->best_effort);
}

TEST_CASE("an undersized guarantee recovers only with adjustment enabled") {
    const RunReport fixed = run_scenario(make_preset("fig7b_static"));
    CHECK(fixed.alerts == 4);
    CHECK(fixed.adjustments.empty());

    const RunReport adaptive = run_scenario(make_preset("fig7b_dynamic"));
    CHECK(adaptive.alerts == 10);
    CHECK(adaptive.total_cost == 160000.0);
    CHECK_FALSE(adaptive.alert_floor_clamped);
    REQUIRE(adaptive.adjustments.size() == 1);
    const Adjustment& a = adaptive.adjustments[0];
    CHECK(a.time_s == 0.0);
    CHECK(a.function == "faceDetection");
    CHECK(a.resource == Resource::Network);
    CHECK(a.action == AdjustAction::Grow);
    CHECK(a.from_value == 0.5);
    CHECK(a.to_value == 5.0);
    CHECK(adaptive.adjustments_jsonl() ==
          "{\"timeS\":0.0,\"function\":\"faceDetection\",\"resource\":\"network\","
          "\"action\":\"grow\",\"from\":0.5,\"to\":5.0}\n");
}

TEST_CASE("identical scenarios produce identical reports") {
    const RunReport a = run_scenario(make_preset("fig7b_dynamic"));
    const RunReport b = run_scenario(make_preset("fig7b_dynamic"));
    CHECK(a.to_json().dump(2) == b.to_json().dump(2));
    CHECK(a.metrics_csv() == b.metrics_csv());
    CHECK(a.adjustments_jsonl() == b.adjustments_jsonl());
}

TEST_CASE("the reported alert count is the series estimate") {
    for (const char* name : {"fig7a_appslice", "fig7a_besteffort", "fig7b_static"}) {
        const Scenario sc = make_preset(name);
        const RunReport report = run_scenario(sc);
        REQUIRE(report.service.size() == 10);
        const AlertEstimate estimate = alerts_for_series(report.service, sc.profile);
        CHECK(report.alerts == estimate.alerts);
        CHECK(report.alert_floor_clamped == estimate.floor_clamped);
    }
}

TEST_CASE("the metrics table has one row per function per tick") {
    const RunReport report = run_scenario(make_preset("fig7a_appslice"));
    const std::string csv = report.metrics_csv();
    std::istringstream lines(csv);
    std::string line;
    REQUIRE(std::getline(lines, line));
    CHECK(line ==
          "time_s,function,delivered_mbps,demand_mbps,granted_millicpu,"
          "used_millicpu,latency_ms,per,alerts_cum");
    int rows = 0;
    bool first_checked = false;
    while (std::getline(lines, line)) {
        if (!first_checked) {
            CHECK(line.rfind("0.0,alertsManager,", 0) == 0);
            first_checked = true;
        }
        ++rows;
    }
    CHECK(rows == 10 * 6);
}

TEST_CASE("service sweeps walk the calibration ladder") {
    const Scenario net_base = make_preset("fig5_net");
    std::vector<SweepInput> net_points;
    for (double v : {5.0, 3.0, 0.5, 0.25}) net_points.push_back({v, std::nullopt});
    const auto net = run_sweep(net_base, net_points);
    REQUIRE(net.size() == 4);
    CHECK(net[0].alerts == 10);
    CHECK(net[0].bottleneck == "none");
    CHECK(net[1].alerts == 9);
    CHECK(net[1].bottleneck == "network");
    CHECK(net[2].alerts == 4);
    CHECK(net[3].alerts == 1);

    CHECK(sweep_csv(net) ==
          "net_mbps,cpu_cores,alerts,bottleneck\n"
          "5.0,2.0,10,none\n"
          "3.0,2.0,9,network\n"
          "0.5,2.0,4,network\n"
          "0.25,2.0,1,network\n");

    const Scenario cpu_base = make_preset("fig5_cpu");
    std::vector<SweepInput> cpu_points;
    for (double v : {2.0, 1.0, 0.5, 0.1}) cpu_points.push_back({std::nullopt, v});
    const auto cpu = run_sweep(cpu_base, cpu_points);
    REQUIRE(cpu.size() == 4);
    CHECK(cpu[0].alerts == 10);
    CHECK(cpu[0].bottleneck == "none");
    CHECK(cpu[1].alerts == 8);
    CHECK(cpu[1].bottleneck == "compute");
    CHECK(cpu[2].alerts == 5);
    CHECK(cpu[3].alerts == 1);

    const auto joint = run_sweep(net_base, {{0.5, 0.5}, {3.0, 1.0}});
    REQUIRE(joint.size() == 2);
    CHECK(joint[0].alerts == 4);
    CHECK(joint[0].bottleneck == "network");
    CHECK(joint[1].alerts == 8);
    CHECK(joint[1].bottleneck == "compute");
}

#ifdef APPSLICE_CLI

namespace {

int run_cli(const std::string& args, const std::filesystem::path& stdout_file) {
    const std::string cmd = std::string(APPSLICE_CLI) + " " + args + " > " +
                            stdout_file.string() + " 2> " + stdout_file.string() +
                            ".err";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct TempDir {
    std::filesystem::path path;
    TempDir(const char* tag) {
        path = std::filesystem::temp_directory_path() /
               (std::string("appslice_") + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("the cli writes exactly what the library computes") {
    TempDir tmp("run");
    const auto scenario = std::filesystem::path(SCENARIO_DIR) / "fig7b_dynamic.json";
    const auto out = tmp.path / "out";
    const int code =
        run_cli("run " + scenario.string() + " --out " + out.string(),
                tmp.path / "stdout");
    CHECK(code == 0);
    CHECK(read_file(tmp.path / "stdout") ==
          "fig7b_dynamic: alerts=10 cost=160000 adjustments=1\n");

    const RunReport report = run_scenario(make_preset("fig7b_dynamic"));
    CHECK(read_file(out / "report.json") == report.to_json().dump(2) + "\n");
    CHECK(read_file(out / "metrics.csv") == report.metrics_csv());
    CHECK(read_file(out / "adjustments.jsonl") == report.adjustments_jsonl());
}

TEST_CASE("cli flags override the scenario document") {
    TempDir tmp("flags");
    const auto scenario = std::filesystem::path(SCENARIO_DIR) / "fig7a_appslice.json";
    const auto out = tmp.path / "out";
    const int code =
        run_cli("run " + scenario.string() + " --best-effort --out " + out.string(),
                tmp.path / "stdout");
    CHECK(code == 0);
    CHECK(read_file(tmp.path / "stdout") ==
          "fig7a_appslice: alerts=1 cost=0 adjustments=0\n");
}

TEST_CASE("cli validate accepts the shipped presets") {
    TempDir tmp("validate");
    const auto scenario = std::filesystem::path(SCENARIO_DIR) / "fig5_net.json";
    const int code = run_cli("validate " + scenario.string(), tmp.path / "stdout");
    CHECK(code == 0);
    CHECK(read_file(tmp.path / "stdout") == "fig5_net: ok\n");
}

TEST_CASE("cli sweep emits the library csv") {
    TempDir tmp("sweep");
    const auto scenario = std::filesystem::path(SCENARIO_DIR) / "fig5_net.json";
    const int code = run_cli("sweep --axis net --values 5 3 0.5 0.25 --base " +
                                 scenario.string(),
                             tmp.path / "stdout");
    CHECK(code == 0);
    std::vector<SweepInput> points;
    for (double v : {5.0, 3.0, 0.5, 0.25}) points.push_back({v, std::nullopt});
    CHECK(read_file(tmp.path / "stdout") ==
          sweep_csv(run_sweep(make_preset("fig5_net"), points)));
}

TEST_CASE("a missing input exits with the validation code and writes nothing") {
    TempDir tmp("missing");
    const auto out = tmp.path / "out";
    const int code = run_cli("run /nonexistent/nowhere.json --out " + out.string(),
                             tmp.path / "stdout");
    CHECK(code == 2);
    CHECK_FALSE(std::filesystem::exists(out / "report.json"));
}

TEST_CASE("an unplaceable scenario exits with the allocation code") {
    TempDir tmp("alloc");
    Scenario sc = make_preset("fig7a_appslice");
    for (auto& tier : sc.fabric.tiers)
        if (tier.id != Tier::Device) tier.total_millicpu = 100;
    const auto file = tmp.path / "tiny.json";
    std::ofstream(file) << serialize_scenario(sc).dump(2) << "\n";

    const auto out = tmp.path / "out";
    const int code =
        run_cli("run " + file.string() + " --out " + out.string(), tmp.path / "stdout");
    CHECK(code == 3);
    CHECK_FALSE(std::filesystem::exists(out / "report.json"));
}

#endif  // APPSLICE_CLI
