#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "helpers.hpp"

using namespace mhdbox;
using namespace mhdbox::testing;

namespace {

RunConfig quick_config() {
    RunConfig cfg;
    cfg.n = 16;
    cfg.epsilon = 0.05;
    cfg.init.s = 2;
    cfg.init.k_max = 2;
    cfg.energy_s = 2;
    cfg.dynamics.dt = 2e-3;
    cfg.t_end = 0.5;
    cfg.energy.sample_stride = 7;
    cfg.validate();
    return cfg;
}

std::filesystem::path fresh_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("mhdbox_" + tag);
    std::filesystem::remove_all(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("epsilon = 0 run completes with zero residuals and energies", "[runner]") {
    RunConfig cfg = quick_config();
    cfg.init.epsilon = 0.0;
    cfg.epsilon = 0.0;
    const RunArtifacts a = run(cfg);
    CHECK(a.report.status == "Completed");
    CHECK(a.report.energies.total == 0.0);
    CHECK(a.report.invariants.divergence_u == 0.0);
    CHECK(a.report.invariants.parity_u == 0.0);
    CHECK(a.report.invariants.mean == 0.0);
    CHECK(a.report.invariants.balance == 0.0);
}

TEST_CASE("zero solution over two decades is BOUNDED everywhere", "[runner]") {
    RunConfig cfg;
    cfg.n = 8;
    cfg.epsilon = 0.0;
    cfg.init.s = 2;
    cfg.energy_s = 2;
    cfg.init.k_max = 2;
    cfg.dynamics.dt = 0.1;
    cfg.energy.sample_stride = 2;
    cfg.t_end = 100.0;
    cfg.validate();
    const RunArtifacts a = run(cfg);
    CHECK(a.report.status == "Completed");
    REQUIRE(a.report.verdicts_available);
    for (const auto& [name, e] : a.report.verdicts) {
        INFO(name);
        CHECK(e.bounded);
        CHECK(e.final_value == 0.0);
    }
}

TEST_CASE("ledger row count is 1 + floor(steps/stride) + 1", "[runner]") {
    const RunConfig cfg = quick_config();
    const RunArtifacts a = run(cfg);
    const long long rows =
        static_cast<long long>(std::count(a.ledger_csv.begin(), a.ledger_csv.end(), '\n'));
    CHECK(rows == 1 + cfg.steps() / cfg.energy.sample_stride + 1);
}

TEST_CASE("report JSON round-trips to an equal report", "[runner]") {
    const RunArtifacts a = run(quick_config());
    const auto dir = fresh_dir("roundtrip");
    emit_report(a, dir);

    std::ifstream in(dir / "report.json");
    REQUIRE(in);
    Json j;
    in >> j;
    const RunReport back = report_from_json(j);
    CHECK(back == a.report);
    std::filesystem::remove_all(dir);
}

TEST_CASE("identical configs give byte-identical ledgers and reports", "[runner]") {
    const RunConfig cfg = quick_config();
    const RunArtifacts a = run(cfg);
    const RunArtifacts b = run(cfg);
    CHECK(a.ledger_csv == b.ledger_csv);
    CHECK(to_json(a.report)["invariants"] == to_json(b.report)["invariants"]);
    CHECK(to_json(a.report)["energies"] == to_json(b.report)["energies"]);

    const auto dir1 = fresh_dir("det1");
    const auto dir2 = fresh_dir("det2");
    emit_report(a, dir1);
    emit_report(b, dir2);
    CHECK(slurp(dir1 / "ledger.csv") == slurp(dir2 / "ledger.csv"));
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
}

TEST_CASE("snapshots are emitted at the requested times and read back exactly", "[runner]") {
    RunConfig cfg = quick_config();
    cfg.snapshot_times = {0.0, 0.25};
    cfg.validate();
    const RunArtifacts a = run(cfg);
    REQUIRE(a.snapshots.size() == 2);
    CHECK(a.snapshots[0].time == 0.0);
    CHECK(std::abs(a.snapshots[1].time - 0.25) <= cfg.dynamics.dt);
    REQUIRE(a.snapshots[0].fields.size() == 6);
    CHECK(a.snapshots[0].fields[0].first == "u1");
    CHECK(a.snapshots[0].fields[5].first == "b3");

    const auto dir = fresh_dir("snap");
    emit_report(a, dir);
    const SnapshotRecord back = read_snapshot(dir / "snapshot_1");
    CHECK(back.time == a.snapshots[1].time);
    REQUIRE(back.fields.size() == 6);
    for (int i = 0; i < 6; ++i) {
        CHECK(back.fields[i].first == a.snapshots[1].fields[i].first);
        CHECK(max_diff(back.fields[i].second, a.snapshots[1].fields[i].second) == 0.0);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("snapshot blob layout is little-endian float64 pairs", "[runner]") {
    const Grid grid(8);
    SnapshotRecord snap;
    snap.time = 1.5;
    SpectralField f(grid);
    f.at_wave(1, 2, 3) = Complex{0.25, -0.5};
    snap.fields.emplace_back("u1", f);
    const std::string blob = serialize_snapshot_blob(snap);
    REQUIRE(blob.size() == grid.size() * 16);
    const std::size_t idx = grid.flat(1, 2, 3);
    double re = 0.0, im = 0.0;
    std::memcpy(&re, blob.data() + 16 * idx, 8);
    std::memcpy(&im, blob.data() + 16 * idx + 8, 8);
    CHECK(re == 0.25);
    CHECK(im == -0.5);
}

TEST_CASE("sweep mode runs each epsilon and tabulates final energies", "[runner]") {
    RunConfig cfg = quick_config();
    cfg.mode = RunMode::Sweep;
    cfg.sweep_epsilons = {0.01, 0.02};
    cfg.validate();
    const RunArtifacts a = run(cfg);
    REQUIRE(a.report.sweep.size() == 2);
    CHECK(a.report.sweep[0].status == "Completed");
    CHECK(a.report.sweep[0].final_etotal < a.report.sweep[1].final_etotal);
    REQUIRE(a.children.size() == 2);
    CHECK(a.children[0].first == "eps_0.01");
    CHECK(!a.children[0].second.ledger_csv.empty());
}

TEST_CASE("linearized mode reports oracle errors and orders", "[runner]") {
    RunConfig cfg;
    cfg.n = 8;
    cfg.epsilon = 1.0;
    cfg.t_end = 1.0;
    cfg.mode = RunMode::Linearized;
    cfg.convergence_dts = {4e-3, 2e-3, 1e-3};
    cfg.validate();
    const RunArtifacts a = run(cfg);
    REQUIRE(a.report.linear_errors.size() == 3);
    for (const auto& p : a.report.linear_errors) CHECK(p.rel_error <= 1e-6);
    REQUIRE(a.report.linear_orders.size() == 2);
    // only the coarse pair is truncation-dominated; the finest error sits at
    // the round-off floor and its ratio is not a meaningful order
    CHECK(std::abs(a.report.linear_orders.front() - 4.0) <= 0.3);
    CHECK(a.report.offmode_max <= 1e-13);
}
