#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "q3p/error.hpp"
#include "q3p/serialize.hpp"
#include "q3p/svg.hpp"
#include "q3p/units.hpp"

using namespace q3p;

namespace {

PlacementProblem sample_problem() {
  const std::vector<GaussianComponent> comps{{{1.0, 1.0}, 0.7, 1.0}, {{3.0, 2.0}, 0.5, 0.4}};
  const auto g = synthesize_mixture(comps, GridGeometry{{41, 31}, {0.1, 0.1}, {0.0, 0.0}});
  const std::vector<Point2> sites{{1.0, 1.0}, {2.1, 1.3}, {3.0, 2.0}};
  CompileOptions o;
  o.variance = 0.6;
  o.exclusion_radius = 1.2;
  return compile_problem(g, sites, o);
}

}  // namespace

TEST_CASE("shortest round-trip doubles") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  for (double x : {1.0 / 3.0, 6.02214076e23, -1e-300, 12.566370614359172}) {
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("problem and register JSON round trip exactly") {
  const auto p = sample_problem();
  const auto back = problem_from_json(json::parse(problem_to_json(p).dump()));
  CHECK(back.sites == p.sites);
  CHECK(back.gamma == p.gamma);
  CHECK(back.v == p.v);
  CHECK(back.k_const == p.k_const);
  CHECK(back.exclusion_radius == p.exclusion_radius);
  CHECK(back.pairs == p.pairs);
  CHECK(exact_solve(back, true).bits == exact_solve(p, true).bits);

  auto bad = problem_to_json(p);
  bad["v"].erase(0);
  CHECK_THROWS_AS(problem_from_json(bad), ParseError);
  bad = problem_to_json(p);
  bad["pairs"] = "both";
  CHECK_THROWS_AS(problem_from_json(bad), ParseError);

  const auto reg = Register::from_sites({{0, 0}, {5, 0}, {2.5, 4.33}}, units::kDefaultC6, 8.5, GridFrame{{1.0, 2.0}, 2.5});
  const auto r2 = register_from_json(json::parse(register_to_json(reg).dump()));
  CHECK(r2.sites == reg.sites);
  CHECK(r2.field_sites == reg.field_sites);
  CHECK(r2.blockade_radius == reg.blockade_radius);
  CHECK(r2.frame.um_per_unit == 2.5);
  CHECK_THROWS_AS(register_from_json(json::parse(R"({"sites": [[0, 0], [0]]})")), ParseError);
}

TEST_CASE("pulse JSON round trip") {
  const auto g = PulseProgram::global(Waveform({{0, 0}, {1, 3}, {2, 0}}), Waveform::ramp(-5, 5, 2));
  const auto g2 = pulse_from_json(pulse_to_json(g));
  for (double t : {0.0, 0.4, 1.0, 1.7, 2.0}) {
    CHECK(g2.omega_at(t) == g.omega_at(t));
    CHECK(g2.delta_at(0, t) == g.delta_at(0, t));
  }
  const auto l = PulseProgram::local(Waveform::constant(1, 1), {Waveform::ramp(0, 1, 1), Waveform::ramp(0, -1, 1)});
  const auto l2 = pulse_from_json(pulse_to_json(l));
  CHECK(l2.delta_at(1, 0.5) == -0.5);
  CHECK_THROWS_AS(pulse_from_json(json::parse(R"({"mode": "burst", "omega": [], "delta": []})")), ParseError);
}

TEST_CASE("noise JSON") {
  const auto hw = NoiseModel::hardware_fit();
  const auto n = noise_from_json(json::parse(R"({"preset": "hardware", "epsilon": 0.05})"));
  CHECK(n.epsilon == 0.05);
  CHECK(n.epsilon_prime == hw.epsilon_prime);
  CHECK(n.gamma_eff == hw.gamma_eff);
  const auto r = noise_from_json(noise_to_json(hw));
  CHECK(r.omega_inhomogeneity == hw.omega_inhomogeneity);
  CHECK(noise_from_json(json::object()).has_dynamical_noise() == false);
  CHECK_THROWS_AS(noise_from_json(json::parse(R"({"epsilom": 0.1})")), ParseError);
  CHECK_THROWS_AS(noise_from_json(json::parse(R"({"preset": "lab"})")), ParseError);
  CHECK_THROWS(noise_from_json(json::parse(R"({"epsilon": 1.5})")));
}

TEST_CASE("histogram CSV") {
  SampleHistogram h;
  h.counts = {{"011", 3}, {"100", 9}, {"000", 3}};
  h.shots = 15;
  std::ostringstream out;
  write_histogram_csv(h, out);
  CHECK(out.str() == "bitstring,count\n100,9\n000,3\n011,3\n");
  std::istringstream in(out.str());
  const auto back = read_histogram_csv(in);
  CHECK(back.counts == h.counts);
  CHECK(back.shots == 15);
  CHECK(histogram_from_json(histogram_to_json(h)).counts == h.counts);

  std::istringstream broken("bitstring,count\n100,9\n0x1,2\n");
  try {
    read_histogram_csv(broken, "h.csv");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("h.csv") != std::string::npos);
  }
  std::istringstream ragged("bitstring,count\n100,9\n01,2\n");
  CHECK_THROWS_AS(read_histogram_csv(ragged), ParseError);
  std::istringstream duplicate("bitstring,count\n10,1\n10,2\n");
  CHECK_THROWS_AS(read_histogram_csv(duplicate), ParseError);
}

TEST_CASE("landscape CSV round trip") {
  Landscape l;
  l.deltas = {-1.5, 0.0, 2.25};
  l.durations = {0.0, 0.5};
  l.probability = {{1.0, 0.25}, {1.0, 0.125}, {1.0, 1.0 / 3.0}};
  std::ostringstream out;
  write_landscape_csv(l, out);
  std::istringstream in(out.str());
  const auto back = read_landscape_csv(in);
  CHECK(back.deltas == l.deltas);
  CHECK(back.durations == l.durations);
  CHECK(back.probability == l.probability);
  std::istringstream short_row("delta\\T,0,1\n0,1\n");
  CHECK_THROWS_AS(read_landscape_csv(short_row), ParseError);
}

TEST_CASE("cycle records and components round trip") {
  CycleRecord c{{1.0, 2.0, -3.0, 0.5}, {}, -0.75};
  c.histogram.counts = {{"10", 4}};
  c.histogram.shots = 4;
  const auto back = cycle_from_json(json::parse(cycle_to_json(c).dump()));
  CHECK(back.params == c.params);
  CHECK(back.cost_estimate == c.cost_estimate);
  CHECK(back.histogram.counts == c.histogram.counts);

  const std::vector<GaussianComponent> comps{{{1.0, 2.0}, 0.5, 2.0}};
  const auto cb = components_from_json(components_to_json(comps));
  CHECK(cb[0].center == comps[0].center);
  CHECK(cb[0].amplitude == 2.0);
  CHECK(components_from_json(json::parse(R"([{"center": [0, 0], "variance": 1}])"))[0].amplitude == 1.0);
  CHECK_THROWS_AS(components_from_json(json::parse(R"([{"center": [0, 0]}])")), ParseError);
}

TEST_CASE("files") {
  const auto dir = std::filesystem::temp_directory_path() / "q3p_serialize_test";
  std::filesystem::create_directories(dir);
  write_json_file(json{{"a", 1}}, dir / "x.json");
  CHECK(read_json_file(dir / "x.json").at("a") == 1);
  write_text_file("not json", dir / "y.json");
  CHECK_THROWS_AS(read_json_file(dir / "y.json"), ParseError);
  CHECK_THROWS_AS(read_text_file(dir / "missing.txt"), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("SVG output flags the winner") {
  SampleHistogram h;
  for (int i = 0; i < 30; ++i) h.counts[Bitstring::from_mask(static_cast<std::uint32_t>(i), 5).str()] = 100 - i;
  h.counts["11111"] = 1;
  for (const auto& [k, c] : h.counts) h.shots += c;
  const auto svg = histogram_svg(h, "00010");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find(R"("winner": "00010")") != std::string::npos);
  CHECK(svg.find("class=\"winner\"") != std::string::npos);
  // A winner outside the top bars is still drawn.
  const auto tail = histogram_svg(h, "11111");
  CHECK(tail.find("class=\"winner\"") != std::string::npos);
  CHECK(tail.find(">11111<") != std::string::npos);

  Landscape l;
  l.deltas = {-1.0, 1.0};
  l.durations = {0.0, 1.0};
  l.probability = {{1.0, 0.2}, {1.0, 0.7}};
  const auto map = landscape_svg(l);
  CHECK(map.find("<metadata>") != std::string::npos);
  CHECK(map.find("</svg>") != std::string::npos);
}
