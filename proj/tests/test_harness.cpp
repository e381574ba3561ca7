#include <gtest/gtest.h>

#include <sstream>

#include "ipmuq/harness/config.hpp"
#include "ipmuq/harness/moment_io.hpp"
#include "ipmuq/harness/runner.hpp"

using namespace ipmuq;
using namespace ipmuq::harness;

namespace {

json small_sod() {
    json j = preset_config("sod1d");
    j.merge_patch(json::parse(R"({"problem": {"nx": 30}, "solver": {"t_end": 0.03}, "basis": {"order": 2},
                                  "quadrature": {"level": 4}, "reference": {"points": 8}})"));
    return j;
}

std::string config_error(const json& j) {
    try {
        parse_config(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, AllPresetsParse) {
    for (const auto& name : preset_names()) {
        SCOPED_TRACE(name);
        const ExperimentConfig c = parse_config(preset_config(name));
        EXPECT_EQ(c.problem, name);
        EXPECT_EQ(c.stochastic_dim, c.info().dim);
        EXPECT_EQ(c.ladder.has_value(), is_adaptive(c.method));
    }
    EXPECT_THROW(preset_config("nope"), ConfigError);
}

TEST(Config, AdaptivePresetsUseSmallerDecreaseThreshold) {
    for (const auto& name : preset_names()) {
        const ExperimentConfig c = parse_config(preset_config(name));
        if (c.ladder) EXPECT_LT(c.ladder->delta_dec, c.ladder->delta_inc) << name;
    }
}

TEST(Config, ErrorsNameTheField) {
    json j = small_sod();
    j["solver"]["cfl"] = -1.0;
    EXPECT_NE(config_error(j).find("solver.cfl"), std::string::npos);

    j = small_sod();
    j["quadrature"]["family"] = "simpson";
    EXPECT_NE(config_error(j).find("quadrature.family"), std::string::npos);

    j = small_sod();
    j["solver"]["typo"] = 1;
    EXPECT_NE(config_error(j).find("solver.typo"), std::string::npos);

    j = small_sod();
    j["basis"]["order"] = "two";
    EXPECT_NE(config_error(j).find("basis.order"), std::string::npos);

    j = small_sod();
    j["problem"]["uncertain"] = {{"shift", {0.1, -0.1}}};
    EXPECT_NE(config_error(j).find("problem.uncertain"), std::string::npos);
}

TEST(Config, MethodConstraints) {
    json j = small_sod();
    j["method"] = "sg";
    EXPECT_TRUE(config_error(j).empty());
    EXPECT_EQ(parse_config(j).closure, "quadratic");
    j["closure"] = "euler";
    EXPECT_NE(config_error(j).find("closure"), std::string::npos);

    j = small_sod();
    j["method"] = "osipm";
    EXPECT_FALSE(config_error(j).empty());  // One-Shot needs a steady problem

    j = preset_config("naca1d");
    j.erase("retardation");
    EXPECT_FALSE(config_error(j).empty());

    j = preset_config("naca1d");
    j.erase("ladder");
    EXPECT_FALSE(config_error(j).empty());

    j = small_sod();
    j["ladder"] = preset_config("naca1d")["ladder"];
    EXPECT_FALSE(config_error(j).empty());  // ladder without an adaptive method
}

TEST(Config, AdaptiveLadderMustBeNested) {
    json j = preset_config("shocktube3d");
    j["ladder"]["quadrature"][0] = {{"family", "gauss_legendre"}, {"level", 3}};
    EXPECT_THROW(parse_config(j), ConfigError);
}

TEST(Snapshot, RoundTripIsExact) {
    const ExperimentConfig c = parse_config(small_sod());
    const Snapshot s = run_experiment(c).snapshot;
    std::stringstream buf;
    write_snapshot(buf, s);
    const Snapshot t = read_snapshot(buf);
    EXPECT_EQ(t.method, "ipm");
    EXPECT_EQ(t.mesh_hash, s.mesh_hash);
    EXPECT_EQ(t.time, s.time);
    EXPECT_EQ(t.orders, s.orders);
    ASSERT_EQ(t.moments.size(), s.moments.size());
    for (std::size_t j = 0; j < s.moments.size(); ++j) EXPECT_EQ(t.moments[j], s.moments[j]);
}

TEST(Snapshot, MalformedInputReportsLine) {
    std::istringstream in("ipmuq-moments 1\nmethod ipm\np 1\nm x\n");
    try {
        read_snapshot(in);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line, 4);
    }
    std::istringstream bad_magic("hello\n");
    EXPECT_THROW(read_snapshot(bad_magic), ParseError);
}

TEST(Snapshot, CompatibilityChecks) {
    const ExperimentConfig c = parse_config(small_sod());
    const FvMesh mesh = build_mesh(c);
    const Snapshot s = run_experiment(c).snapshot;

    EXPECT_NO_THROW(snapshot_moments<3>(s, mesh, 1));
    EXPECT_THROW(snapshot_moments<3>(s, make_mesh_1d(0.0, 1.0, 31), 1), IncompatibleSnapshot);
    EXPECT_THROW(snapshot_moments<3>(s, mesh, 2), IncompatibleSnapshot);
    EXPECT_THROW(snapshot_moments<4>(s, mesh, 1), IncompatibleSnapshot);

    const std::vector<int> lower(static_cast<std::size_t>(mesh.cells()), 1);
    EXPECT_THROW(snapshot_moments<3>(s, mesh, 1, &lower), IncompatibleSnapshot);
    const auto kept = snapshot_moments<3>(s, mesh, 1, &lower, true);
    for (std::size_t j = 0; j < kept.size(); ++j) {
        ASSERT_EQ(kept[j].rows(), 2);
        EXPECT_EQ(kept[j], s.moments[j].topRows(2));
    }
    const std::vector<int> higher(static_cast<std::size_t>(mesh.cells()), 3);
    EXPECT_THROW(snapshot_moments<3>(s, mesh, 1, &higher, true), IncompatibleSnapshot);
}

TEST(Runner, CompareWithItselfIsZero) {
    const ExperimentConfig c = parse_config(small_sod());
    const Snapshot s = run_experiment(c).snapshot;
    for (const auto& [e, v] : compare_snapshots(c, s, s)) {
        EXPECT_EQ(e, 0.0);
        EXPECT_EQ(v, 0.0);
    }
}

TEST(Runner, ReproducibleFromConfig) {
    json j = small_sod();
    const Snapshot a = run_experiment(parse_config(j)).snapshot;
    j["workers"] = 4;
    const Snapshot b = run_experiment(parse_config(j)).snapshot;
    for (std::size_t k = 0; k < a.moments.size(); ++k) EXPECT_EQ(a.moments[k], b.moments[k]);
}

TEST(Runner, ErrorsAgainstReferenceShrinkAndAppearInCsv) {
    const ExperimentConfig c = parse_config(small_sod());
    const Snapshot ref = run_reference(c);
    EXPECT_EQ(ref.method, "reference");
    const RunOutput out = run_experiment(c, ref);
    ASSERT_FALSE(out.history.empty());
    for (const auto& row : out.history) {
        ASSERT_TRUE(row.mean_error.has_value());
        EXPECT_GE(*row.variance_error, 0.0);
    }
    EXPECT_LT(*out.history.back().mean_error, 1e-2);

    std::ostringstream csv;
    write_history_csv(csv, out.history);
    const std::string text = csv.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "iteration,pseudo_time,wall_seconds,residual,rel_E_error,rel_Var_error");
    EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), out.history.size() + 1);
}

TEST(Runner, CoupledCollocationCsvHasRescaledClock) {
    json j = small_sod();
    j["method"] = "sc_coupled";
    const ExperimentConfig c = parse_config(j);
    const RunOutput out = run_experiment(c, run_reference(c));
    std::ostringstream csv;
    write_history_csv(csv, out.history);
    EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')),
              "iteration,pseudo_time,wall_seconds,rescaled_seconds,residual,rel_E_error,rel_Var_error");
}

TEST(Runner, BurgersShockSgRuns) {
    json j = preset_config("burgers-shock");
    j.merge_patch(json::parse(R"({"problem": {"nx": 40}, "solver": {"t_end": 0.05}})"));
    const ExperimentConfig c = parse_config(j);
    const RunOutput out = run_experiment(c);
    EXPECT_EQ(out.snapshot.method, "sg");
    EXPECT_NEAR(out.snapshot.time, 0.05, 1e-14);
}
