// Copyright 2026 The QTS Tomography Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qts/commands.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

using namespace qts;
namespace fs = std::filesystem;

namespace {

const Table& table(const CommandResult& r, const std::string& name) {
    for (const auto& t : r.tables) {
        if (t.name == name) return t;
    }
    throw std::runtime_error("no table " + name);
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("qts_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int cli(const std::string& args, const fs::path& dir) {
    const std::string cmd = std::string(QTS_CLI_PATH) + " " + args + " > " + (dir / "stdout.txt").string() +
                            " 2> " + (dir / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const char* kTwoQubit =
    "[model]\nkind = kink\nn = 2\nj = 1\ndelta = 0\n"
    "[probe]\njp = 1\n"
    "[bath]\nW_mK = 10\nT_mK = 12\n";

}  // namespace

TEST_CASE("spectrum command") {
    const auto one = spectrum_command(preset_config("smoke"));
    const Table& t = table(one, "spectrum");
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][1] == doctest::Approx(-2.0));
    CHECK(t.rows[1][1] == doctest::Approx(2.0));
    CHECK(t.rows[1][2] == doctest::Approx(4.0));

    const auto two = spectrum_command(parse_config(kTwoQubit));
    const Table& s = table(two, "spectrum");
    REQUIRE(s.rows.size() == 4);
    CHECK(s.rows[0][1] == doctest::Approx(-1.0));
    CHECK(s.rows[2][1] == doctest::Approx(-1.0));
    CHECK(s.rows[3][1] == doctest::Approx(3.0));
}

TEST_CASE("sweep command tables") {
    const auto r = sweep_command(preset_config("smoke"));
    const Table& grid = table(r, "grid");
    CHECK(grid.columns.size() == 5);
    double top = 0.0;
    for (const auto& row : grid.rows) top = std::max(top, row[4]);
    CHECK(top == doctest::Approx(1.0));
    const Table& amp = table(r, "amplitudes");
    CHECK(amp.rows.size() == 4);
    for (const auto& row : amp.rows) {
        CHECK(row[2] == doctest::Approx(0.5).epsilon(2e-3));
        CHECK(row[5] == doctest::Approx(0.5).epsilon(1e-12));
    }
    CHECK(table(r, "references").rows.size() == 2);
}

TEST_CASE("evolve: initial slope equals the sweep escape rate") {
    RunConfig cfg = preset_config("fig3");
    const EvolveSetup s = prepare_evolve(cfg);
    CHECK(s.gamma0 > 0.0);
    CHECK(s.times.size() == 201);
    CHECK(s.times.back() == doctest::Approx(10.0 / s.gamma0));

    const double h = 1e-4 / s.gamma0;
    PopulationState p0;
    p0.probabilities = Eigen::VectorXd::Zero(s.rates.size());
    p0.probabilities(0) = 1.0;
    const auto early = evolve(s.rates, p0, {h});
    CHECK((1.0 - early.front().probabilities(0)) / h == doctest::Approx(s.gamma0).epsilon(1e-3));

    // Same number from the sweep at the ground-state resonance of l = 1.
    cfg.positions = {1};
    const SweepResult sweep = run_sweep(cfg.model, sweep_spec(cfg), cfg.bath);
    Eigen::Index j = 0;
    sweep.grid.epsilon_rel.row(0).cwiseAbs().minCoeff(&j);
    REQUIRE(std::abs(sweep.grid.epsilon_rel(0, j)) < 1e-9);
    CHECK(sweep.grid.rate(0, j) == doctest::Approx(s.gamma0).epsilon(1e-3));

    const auto r = evolve_command(cfg);
    const Table& traj = table(r, "trajectory");
    CHECK(traj.rows.size() == 201);
    for (const auto& row : traj.rows) {
        double sum = 0.0;
        for (std::size_t c = 1; c < row.size(); ++c) sum += row[c];
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
}

TEST_CASE("evolve far off resonance stays put") {
    RunConfig cfg = preset_config("fig3");
    cfg.evolve_epsilon = -50.0;
    cfg.t_max = 1.0;
    const auto r = evolve_command(cfg);
    const Table& traj = table(r, "trajectory");
    CHECK(traj.rows.back()[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("validate command flags the imperfect references") {
    const auto r = validate_command(preset_config("fig3"));
    CHECK(table(r, "references").rows.size() == 8);
    CHECK(r.warnings.size() == 8);
    const auto clean = validate_command(parse_config(kTwoQubit));
    CHECK(clean.warnings.empty());
}

TEST_CASE("output header carries the resolved configuration") {
    const RunConfig cfg = preset_config("smoke");
    const auto r = spectrum_command(cfg);
    const auto h = output_header(cfg, r);
    CHECK(h[0].rfind("qts ", 0) == 0);
    CHECK(h[1] == "command: spectrum");
    CHECK(std::find(h.begin(), h.end(), "config: jp = 1000") != h.end());

    const std::string csv = render_csv(r.tables[0], h);
    CHECK(csv.find("# command: spectrum\n") != std::string::npos);
    CHECK(csv.find("n,energy_ghz,energy_rel_ghz,residual\n") != std::string::npos);
    const auto doc = nlohmann::json::parse(render_tree(r.tables[0], h));
    CHECK(doc["rows"].size() == 2);
    CHECK(doc["header"][1] == "command: spectrum");
}

TEST_CASE("CLI exit codes") {
    const fs::path d = scratch("exit");
    CHECK(cli("--version", d) == 0);
    CHECK(cli("", d) == 1);
    CHECK(cli("sweep", d) == 1);
    CHECK(cli("sweep --preset nope", d) == 1);
    CHECK(cli("sweep --config /nonexistent.ini", d) == 1);
    CHECK(cli("sweep --preset smoke --config x.ini", d) == 1);

    std::ofstream(d / "bad.ini") << "[model]\nkind = kink\nn = 3\n";
    CHECK(cli("validate --config " + (d / "bad.ini").string(), d) == 1);
    CHECK(slurp(d / "stderr.txt").find("model.j: required") != std::string::npos);

    // Asking Lanczos for the impossible is a numerical failure.
    std::ofstream(d / "hard.ini") << "[model]\nkind = kink\nn = 10\nj = 1\ndelta = 1\n[probe]\njp = 1\n"
                                     "[bath]\nW_mK = 10\nT_mK = 12\n[experiment]\ndense_limit = 0\ntol = 1e-300\n";
    CHECK(cli("spectrum --config " + (d / "hard.ini").string() + " --out " + (d / "o").string(), d) == 2);

    CHECK(cli("sweep --preset smoke --out " + (d / "ok").string(), d) == 0);
    for (const char* f : {"grid.csv", "references.csv", "spectrum.csv", "peaks.csv", "amplitudes.csv"}) {
        CHECK(fs::exists(d / "ok" / f));
    }
    CHECK(cli("spectrum --preset smoke --format tree --out " + (d / "tree").string(), d) == 0);
    CHECK(fs::exists(d / "tree" / "spectrum.json"));
}

TEST_CASE("repeated runs are byte-identical") {
    const fs::path d = scratch("determinism");
    REQUIRE(cli("sweep --preset fig3 --out " + (d / "a").string(), d) == 0);
    REQUIRE(cli("sweep --preset fig3 --threads 4 --out " + (d / "b").string(), d) == 0);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(d / "a")) {
        ++files;
        CAPTURE(e.path().filename().string());
        CHECK(slurp(e.path()) == slurp(d / "b" / e.path().filename()));
    }
    CHECK(files == 5);
}
