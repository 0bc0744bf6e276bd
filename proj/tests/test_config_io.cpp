#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "nhlattice/config.hpp"
#include "nhlattice/error.hpp"
#include "nhlattice/io.hpp"

using namespace nhl;
using nlohmann::json;
namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

namespace {

std::string key_of(const json& doc) {
  try {
    config_from_json(doc);
  } catch (const InvalidArgument& e) {
    return e.key();
  }
  return "<accepted>";
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nhl_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("phase tokens") {
  CHECK(parse_phase("pi") == kPi);
  CHECK(parse_phase("-pi") == -kPi);
  CHECK(parse_phase("pi/2") == kPi / 2);
  CHECK(parse_phase("-pi/4") == -kPi / 4);
  CHECK(parse_phase("3*pi/4") == doctest::Approx(3 * kPi / 4));
  CHECK(parse_phase(" 0.25 ") == 0.25);
  CHECK(parse_phase("-1e-3") == -1e-3);
  for (const char* bad : {"", "pie", "pi/", "pi/0", "2pi", "*pi", "abc", "1.5.2"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_phase(bad), InvalidArgument);
  }
}

TEST_CASE("minimal document gets defaults") {
  const ExperimentConfig c = config_from_json(json::parse(R"({"experiment": "transport_gaussian",
      "lattice": {"phi": "pi/2", "defects": [{"site": 4, "v_real": 2}]},
      "excitation": {"type": "gaussian", "n0": -30, "w0": 5, "q0": "-pi/2"}})"));
  CHECK(c.experiment == Experiment::transport_gaussian);
  CHECK(c.lattice.phi == kPi / 2);
  CHECK(c.lattice.kappa == 1.0);
  REQUIRE(c.lattice.defects.size() == 1);
  CHECK(c.lattice.defects[0].xi_imag == 0.0);
  CHECK(c.excitation.q0 == -kPi / 2);
  CHECK(c.timing.dt == 1e-3);
}

TEST_CASE("unknown keys and bad values name the key") {
  CHECK(key_of(json::parse(R"({"experiment": "storage", "bogus": 1})")) == "bogus");
  CHECK(key_of(json::parse(R"({"experiment": "storage", "lattice": {"kapa": 1}})")) == "lattice.kapa");
  CHECK(key_of(json::parse(R"({"experiment": "storage", "lattice": {"defects": [{"site": 1, "v": 2}]}})")) ==
        "lattice.defects[0].v");
  CHECK(key_of(json::parse(R"({"experiment": "teleport"})")) == "experiment");
  CHECK(key_of(json::parse(R"({"lattice": {}})")) == "experiment");
  CHECK(key_of(json::parse(R"({"experiment": "storage", "timing": {"dt": "fast"}})")) == "timing.dt");
  CHECK(key_of(json::parse(R"({"experiment": "storage", "storage": {"N": 2.5}})")) == "storage.N");
  CHECK(key_of(json::parse(R"({"experiment": "storage", "lattice": {"phi": "pi/x"}})")) == "lattice.phi");
  CHECK(key_of(json::parse(R"({"experiment": "storage", "units": "SI"})")) == "units");
  CHECK(key_of(json::parse(R"({"experiment": "storage", "units": "energy=kappa; time=1/kappa; phase=rad"})")) ==
        "<accepted>");
}

TEST_CASE("every preset round-trips through JSON") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const ExperimentConfig c = resolve(preset(name));
    const json j = to_json(c);
    const ExperimentConfig back = config_from_json(json::parse(j.dump()));
    CHECK(to_json(back) == j);
    CHECK(config_hash(back) == config_hash(c));
  }
  CHECK(config_hash(preset("fig6a")) != config_hash(preset("fig6b")));
  CHECK(config_hash(preset("fig6a")).size() == 16);
}

TEST_CASE("load_config reads configs and manifests") {
  const fs::path dir = scratch_dir("load");
  const ExperimentConfig c = resolve(preset("fig3d"));
  {
    std::ofstream(dir / "c.json") << to_json(c).dump(2);
    std::ofstream(dir / "m.json") << json{{"manifest_version", 1}, {"config", to_json(c)}}.dump();
    std::ofstream(dir / "broken.json") << "{ nope";
  }
  CHECK(to_json(load_config(dir / "c.json")) == to_json(c));
  CHECK(to_json(load_config(dir / "m.json")) == to_json(c));
  CHECK_THROWS_AS(load_config(dir / "broken.json"), InvalidArgument);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), InvalidArgument);
}

}

TEST_SUITE("io") {

TEST_CASE("doubles survive text exactly") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int k = 0; k < 1000; ++k) {
    const double x = u(rng) * std::pow(10.0, (k % 40) - 20);
    CHECK(parse_double(format_double(x)) == x);
  }
  CHECK(parse_double(format_double(5e-324)) == 5e-324);
  CHECK_THROWS_AS(parse_double("1.0x"), InvalidArgument);
}

TEST_CASE("trajectory CSV round-trips bit for bit") {
  Trajectory t;
  std::mt19937 rng(2);
  std::normal_distribution<double> g;
  for (int s = 0; s < 4; ++s) {
    t.times.push_back(0.25 * s);
    StateVector v;
    v.site_labels = {-2, -1, 0, 1};
    for (int k = 0; k < 4; ++k) v.amplitudes.emplace_back(g(rng) * 1e-7, g(rng));
    t.norm_series.push_back(v.norm());
    t.states.push_back(v);
  }
  const std::string csv = trajectory_csv(t);
  CHECK(csv.rfind("t,site,re,im\n", 0) == 0);
  const Trajectory back = parse_trajectory_csv(csv);
  REQUIRE(back.n_samples() == 4);
  CHECK(back.times == t.times);
  for (int s = 0; s < 4; ++s) {
    CHECK(back.states[s].site_labels == t.states[s].site_labels);
    CHECK(back.states[s].amplitudes == t.states[s].amplitudes);
  }
  CHECK_THROWS_AS(parse_trajectory_csv("time,site\n"), InvalidArgument);
}

TEST_CASE("metrics round-trip exactly") {
  const ExperimentResult r = run_experiment(preset("reduction-hermitian"));
  const MetricsRecord rec = metrics_record(r);
  const MetricsRecord back = parse_metrics(format_metrics(rec));
  CHECK(back == rec);
  CHECK(reduction_metrics_from(back) == *r.reduction);
  CHECK(metric(back, "preset") == "reduction-hermitian");

  TransportMetrics tm;
  tm.centroid_series = {0.1, -2.0 / 3.0, 1e-300};
  tm.velocity_estimate = 1.9999999999999998;
  tm.reflection_fraction = 1e-17;
  ExperimentResult tr;
  tr.config = preset("fig3d");
  tr.transport = tm;
  CHECK(transport_metrics_from(parse_metrics(format_metrics(metrics_record(tr)))) == tm);

  StorageMetrics sm;
  sm.efficiency = 0.1 + 0.2;
  sm.release_direction = RetrievalPhase::reversed;
  sm.sweep_xi = {0.4, 0.6};
  sm.sweep_efficiency = {1.0 / 3.0, 2.0};
  ExperimentResult sr;
  sr.config = preset("fig6b");
  sr.storage = sm;
  CHECK(storage_metrics_from(parse_metrics(format_metrics(metrics_record(sr)))) == sm);
  CHECK_THROWS_AS(parse_metrics("novalue\n"), InvalidArgument);
}

TEST_CASE("atomic write replaces the file and leaves no temporary behind") {
  const fs::path dir = scratch_dir("atomic");
  atomic_write(dir / "a.txt", "first");
  atomic_write(dir / "a.txt", "second");
  std::ifstream in(dir / "a.txt");
  std::string text((std::istreambuf_iterator<char>(in)), {});
  CHECK(text == "second");
  CHECK_FALSE(fs::exists(dir / "a.txt.tmp"));
}

TEST_CASE("outputs land in the output directory only") {
  const fs::path dir = scratch_dir("outputs");
  const ExperimentResult r = run_experiment(preset("fig2"));
  const auto files = write_outputs(r, dir / "run", OutputFormat::csv_svg);
  CHECK(files == std::vector<std::string>{"dispersion.csv", "metrics.txt", "manifest.json"});
  std::size_t count = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir)) count += e.is_regular_file();
  CHECK(count == 3);
  std::ifstream in(dir / "run" / "manifest.json");
  const json m = json::parse(in);
  CHECK(m["manifest_version"] == kManifestVersion);
  CHECK(m["config_hash"] == config_hash(r.config));
  CHECK(m["artifacts"].size() == 2);
}

TEST_CASE("dispersion CSV has one row per (phi, q)") {
  const auto rows = run_dispersion_scan(1.0, 0.4, 0.8, {0.0, 1.0}, uniform_q_grid(5));
  const std::string csv = dispersion_csv(rows);
  CHECK(csv.rfind("phi,q,reE,imE,vg\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);
}

}
