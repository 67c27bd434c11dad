#include "q3p/serialize.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "q3p/error.hpp"
#include "q3p/grid_io.hpp"

namespace q3p {

namespace {

template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ParseError(what, 0, e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(what, 0, e.what());
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& text, const std::string& source, std::size_t line) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw ParseError(source, line, "not a number: '" + text + "'");
  return v;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

json components_to_json(const std::vector<GaussianComponent>& components) {
  json arr = json::array();
  for (const auto& c : components) {
    arr.push_back({{"center", c.center}, {"variance", c.variance}, {"amplitude", c.amplitude}});
  }
  return {{"components", arr}};
}

std::vector<GaussianComponent> components_from_json(const json& j) {
  return guarded("components", [&] {
    const json& arr = j.is_array() ? j : j.at("components");
    std::vector<GaussianComponent> out;
    for (const auto& c : arr) {
      out.push_back({c.at("center").get<std::vector<double>>(), c.at("variance").get<double>(),
                     c.value("amplitude", 1.0)});
    }
    return out;
  });
}

json register_to_json(const Register& reg) {
  return {{"sites", reg.sites},
          {"field_sites", reg.field_sites},
          {"c6", reg.c6},
          {"blockade_radius", reg.blockade_radius},
          {"frame", {{"origin", reg.frame.origin}, {"um_per_unit", reg.frame.um_per_unit}}}};
}

Register register_from_json(const json& j) {
  return guarded("register", [&] {
    Register reg;
    reg.sites = j.at("sites").get<std::vector<Point2>>();
    reg.c6 = j.value("c6", reg.c6);
    reg.blockade_radius = j.value("blockade_radius", blockade_radius_for(reg.c6, units::kDefaultOmegaMax));
    if (j.contains("frame")) {
      reg.frame.origin = j.at("frame").at("origin").get<Point2>();
      reg.frame.um_per_unit = j.at("frame").at("um_per_unit").get<double>();
    }
    if (j.contains("field_sites")) {
      reg.field_sites = j.at("field_sites").get<std::vector<Point2>>();
    } else {
      for (const auto& s : reg.sites) reg.field_sites.push_back(reg.frame.to_field(s));
    }
    reg.validate();
    return reg;
  });
}

json problem_to_json(const PlacementProblem& p) {
  json v = json::array();
  for (Eigen::Index i = 0; i < p.v.rows(); ++i) {
    std::vector<double> row(p.v.row(i).begin(), p.v.row(i).end());
    v.push_back(row);
  }
  json j = {{"sites", p.sites},
            {"variance", p.variance},
            {"amplitudes", p.amplitudes},
            {"gamma", p.gamma},
            {"v", v},
            {"k_const", p.k_const},
            {"exclusion_radius", p.exclusion_radius},
            {"dims", p.dims},
            {"pairs", p.pairs == PairConvention::kOrderedPairs ? "ordered" : "unordered"},
            {"warnings", p.warnings}};
  if (p.frame) j["frame"] = frame_to_json(*p.frame);
  return j;
}

PlacementProblem problem_from_json(const json& j) {
  return guarded("problem", [&] {
    PlacementProblem p;
    p.sites = j.at("sites").get<std::vector<Point2>>();
    p.variance = j.at("variance").get<double>();
    p.amplitudes = j.at("amplitudes").get<std::vector<double>>();
    p.gamma = j.at("gamma").get<std::vector<double>>();
    const auto rows = j.at("v").get<std::vector<std::vector<double>>>();
    p.v.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size()) throw InvalidArgument("V must be square");
      for (std::size_t k = 0; k < rows.size(); ++k) p.v(i, k) = rows[i][k];
    }
    p.k_const = j.value("k_const", 0.0);
    p.exclusion_radius = j.value("exclusion_radius", 0.0);
    p.dims = j.value("dims", std::size_t{2});
    const auto pairs = j.value("pairs", std::string("ordered"));
    if (pairs == "ordered") {
      p.pairs = PairConvention::kOrderedPairs;
    } else if (pairs == "unordered") {
      p.pairs = PairConvention::kUnorderedPairs;
    } else {
      throw InvalidArgument("pairs must be 'ordered' or 'unordered'");
    }
    p.warnings = j.value("warnings", std::vector<std::string>{});
    if (j.contains("frame")) p.frame = frame_from_json(j.at("frame"));
    p.validate();
    return p;
  });
}

json waveform_to_json(const Waveform& w) {
  json knots = json::array();
  for (const auto& k : w.knots()) knots.push_back({k.time, k.value});
  return knots;
}

Waveform waveform_from_json(const json& j) {
  std::vector<Knot> knots;
  for (const auto& k : j) knots.push_back({k.at(0).get<double>(), k.at(1).get<double>()});
  return Waveform(std::move(knots));
}

json pulse_to_json(const PulseProgram& pulse) {
  json deltas = json::array();
  for (const auto& d : pulse.delta) deltas.push_back(waveform_to_json(d));
  return {{"mode", pulse.mode == PulseMode::kGlobal ? "global" : "local"},
          {"omega", waveform_to_json(pulse.omega)},
          {"delta", deltas}};
}

PulseProgram pulse_from_json(const json& j) {
  return guarded("pulse", [&] {
    const auto mode = j.at("mode").get<std::string>();
    std::vector<Waveform> deltas;
    for (const auto& d : j.at("delta")) deltas.push_back(waveform_from_json(d));
    auto omega = waveform_from_json(j.at("omega"));
    if (mode == "global") {
      if (deltas.size() != 1) throw InvalidArgument("global pulse needs exactly one detuning channel");
      return PulseProgram::global(std::move(omega), std::move(deltas.front()));
    }
    if (mode == "local") return PulseProgram::local(std::move(omega), std::move(deltas));
    throw InvalidArgument("pulse mode must be 'global' or 'local'");
  });
}

json placement_to_json(const Placement& placement) {
  return {{"bitstring", placement.bits.str()},
          {"count", placement.count},
          {"cost", placement.cost},
          {"positions", placement.positions}};
}

json noise_to_json(const NoiseModel& n) {
  return {{"epsilon", n.epsilon},
          {"epsilon_prime", n.epsilon_prime},
          {"omega_rel_sigma", n.omega_rel_sigma},
          {"omega_inhomogeneity", n.omega_inhomogeneity},
          {"spacing_sigma", n.spacing_sigma},
          {"delta_shift_sigma", n.delta_shift_sigma},
          {"gamma_eff", n.gamma_eff}};
}

NoiseModel noise_from_json(const json& j) {
  return guarded("noise", [&] {
    NoiseModel n;
    if (j.contains("preset")) {
      if (j.at("preset").get<std::string>() != "hardware") throw InvalidArgument("unknown noise preset");
      n = NoiseModel::hardware_fit();
    }
    for (const auto& [key, value] : j.items()) {
      if (key == "preset") continue;
      double* field = key == "epsilon"               ? &n.epsilon
                      : key == "epsilon_prime"       ? &n.epsilon_prime
                      : key == "omega_rel_sigma"     ? &n.omega_rel_sigma
                      : key == "omega_inhomogeneity" ? &n.omega_inhomogeneity
                      : key == "spacing_sigma"       ? &n.spacing_sigma
                      : key == "delta_shift_sigma"   ? &n.delta_shift_sigma
                      : key == "gamma_eff"           ? &n.gamma_eff
                                                     : nullptr;
      if (field == nullptr) throw InvalidArgument("unknown noise key '" + key + "'");
      *field = value.get<double>();
    }
    n.validate();
    return n;
  });
}

json histogram_to_json(const SampleHistogram& h) {
  json counts = json::object();
  for (const auto& [k, c] : h.counts) counts[k] = c;
  return {{"shots", h.shots}, {"counts", counts}};
}

SampleHistogram histogram_from_json(const json& j) {
  return guarded("histogram", [&] {
    SampleHistogram h;
    h.shots = j.at("shots").get<std::size_t>();
    for (const auto& [k, c] : j.at("counts").items()) h.counts[k] = c.get<std::size_t>();
    h.validate();
    return h;
  });
}

json cycle_to_json(const CycleRecord& r) {
  return {{"params", r.params}, {"cost_estimate", r.cost_estimate}, {"histogram", histogram_to_json(r.histogram)}};
}

CycleRecord cycle_from_json(const json& j) {
  return guarded("cycle", [&] {
    return CycleRecord{j.at("params").get<std::vector<double>>(), histogram_from_json(j.at("histogram")),
                       j.at("cost_estimate").get<double>()};
  });
}

void write_histogram_csv(const SampleHistogram& h, std::ostream& out) {
  out << "bitstring,count\n";
  for (const auto& [k, c] : h.sorted()) out << k << ',' << c << '\n';
}

SampleHistogram read_histogram_csv(std::istream& in, const std::string& source) {
  SampleHistogram h;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    line = strip_cr(line);
    if (line.empty()) continue;
    if (n == 1 && line.rfind("bitstring", 0) == 0) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 2) throw ParseError(source, n, "expected 'bitstring,count'");
    try {
      (void)Bitstring::parse(cells[0]);
    } catch (const Error& e) {
      throw ParseError(source, n, e.what());
    }
    std::size_t count = 0;
    auto [ptr, ec] = std::from_chars(cells[1].data(), cells[1].data() + cells[1].size(), count);
    if (ec != std::errc{} || ptr != cells[1].data() + cells[1].size()) {
      throw ParseError(source, n, "bad count '" + cells[1] + "'");
    }
    if (h.counts.contains(cells[0])) throw ParseError(source, n, "duplicate bitstring " + cells[0]);
    if (!h.counts.empty() && h.counts.begin()->first.size() != cells[0].size()) {
      throw ParseError(source, n, "bitstring length differs from earlier rows");
    }
    h.counts[cells[0]] = count;
    h.shots += count;
  }
  return h;
}

void write_landscape_csv(const Landscape& l, std::ostream& out) {
  out << "delta\\T";
  for (double t : l.durations) out << ',' << format_double(t);
  out << '\n';
  for (std::size_t r = 0; r < l.deltas.size(); ++r) {
    out << format_double(l.deltas[r]);
    for (double p : l.probability[r]) out << ',' << format_double(p);
    out << '\n';
  }
}

Landscape read_landscape_csv(std::istream& in, const std::string& source) {
  Landscape l;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (n == 1) {
      for (std::size_t c = 1; c < cells.size(); ++c) l.durations.push_back(parse_double(cells[c], source, n));
      continue;
    }
    if (cells.size() != l.durations.size() + 1) throw ParseError(source, n, "row length does not match header");
    l.deltas.push_back(parse_double(cells[0], source, n));
    std::vector<double> row;
    for (std::size_t c = 1; c < cells.size(); ++c) row.push_back(parse_double(cells[c], source, n));
    l.probability.push_back(std::move(row));
  }
  if (l.durations.empty()) throw ParseError(source, 0, "empty landscape");
  return l;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

void write_json_file(const json& j, const std::filesystem::path& path) {
  write_text_file(j.dump(2) + "\n", path);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text_file(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace q3p
