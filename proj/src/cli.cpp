#include "q3p/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "q3p/emulator.hpp"
#include "q3p/error.hpp"
#include "q3p/field.hpp"
#include "q3p/grid_io.hpp"
#include "q3p/ising.hpp"
#include "q3p/qae.hpp"
#include "q3p/register.hpp"
#include "q3p/serialize.hpp"
#include "q3p/svg.hpp"
#include "q3p/units.hpp"
#include "q3p/vqa.hpp"

namespace q3p {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void setup_logging() {
  auto logger = spdlog::get("q3p");
  if (!logger) {
    logger = spdlog::stderr_color_mt("q3p");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
  }
  const char* env = std::getenv("Q3P_LOG");
  logger->set_level(env != nullptr ? spdlog::level::from_str(env) : spdlog::level::warn);
}

// Everything needed to reproduce a run. Thread counts are left out so the
// manifest does not depend on them.
struct Run {
  std::string subcommand;
  std::vector<std::string> argv;
  json params = json::object();
  std::optional<std::uint64_t> seed;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string manifest;
};

void write_manifest(const Run& run) {
  json j = {{"tool", "q3p"},
            {"version", kToolVersion},
            {"subcommand", run.subcommand},
            {"argv", run.argv},
            {"params", run.params},
            {"inputs", run.inputs},
            {"outputs", run.outputs}};
  j["seed"] = run.seed ? json(*run.seed) : json(nullptr);
  const fs::path path = run.manifest.empty() ? fs::path(run.outputs.front() + ".manifest.json") : fs::path(run.manifest);
  write_json_file(j, path);
}

NoiseModel load_noise(const std::string& spec) {
  if (spec.empty()) return {};
  if (spec == "hardware") return NoiseModel::hardware_fit();
  return noise_from_json(read_json_file(spec));
}

void write_histogram(const SampleHistogram& h, const std::string& path, const std::string& format) {
  if (format == "json") {
    write_json_file(histogram_to_json(h), path);
  } else {
    std::ostringstream s;
    write_histogram_csv(h, s);
    write_text_file(s.str(), path);
  }
}

json winner_json(const PlacementProblem& problem, const SampleHistogram& h, const std::string& winner,
                 const std::string& most_sampled) {
  const auto placement = extract_placement(problem, Bitstring::parse(winner));
  json j = placement_to_json(placement);
  j["W"] = h.counts.at(winner);
  j["N"] = h.shots;
  j["frequency"] = h.frequency(winner);
  j["most_sampled"] = most_sampled;
  j["most_sampled_cost"] = cost(problem, Bitstring::parse(most_sampled));
  return j;
}

void check_aligned(const PlacementProblem& p, const Register& r) {
  if (p.size() != r.size()) {
    throw InvalidArgument("problem has " + std::to_string(p.size()) + " sites but the register has " +
                          std::to_string(r.size()));
  }
}

GridGeometry geometry_from(const std::vector<std::size_t>& shape, std::vector<double> spacing,
                           std::vector<double> origin) {
  if (spacing.size() == 1) spacing.assign(shape.size(), spacing.front());
  if (origin.empty()) origin.assign(shape.size(), 0.0);
  GridGeometry g{shape, std::move(spacing), std::move(origin)};
  g.validate();
  return g;
}

// ---- subcommands ----

struct SynthArgs {
  std::string components, out;
  std::vector<std::size_t> shape;
  std::vector<double> spacing, origin;
  bool normalize = false;
};

void cmd_synth(const SynthArgs& a, Run& run) {
  const json doc = read_json_file(a.components);
  const auto comps = components_from_json(doc);
  GridGeometry grid;
  if (!a.shape.empty()) {
    grid = geometry_from(a.shape, a.spacing.empty() ? std::vector<double>{1.0} : a.spacing, a.origin);
  } else if (doc.is_object() && doc.contains("grid")) {
    const auto& g = doc.at("grid");
    grid = geometry_from(g.at("shape").get<std::vector<std::size_t>>(),
                         g.value("spacing", std::vector<double>{1.0}), g.value("origin", std::vector<double>{}));
  } else {
    throw UsageError("synth needs --shape or a \"grid\" entry in the components file");
  }
  auto field = synthesize_mixture(comps, grid);
  if (a.normalize) field = normalize(field);
  save_grid(field, a.out);
  run.params = {{"components", components_to_json(comps)},
                {"shape", grid.shape},
                {"spacing", grid.spacing},
                {"origin", grid.origin},
                {"normalize", a.normalize}};
  run.inputs = {a.components};
  run.outputs = {a.out};
}

struct SliceArgs {
  std::string grid, prefix;
  std::vector<double> origin, u{1, 0, 0}, v{0, 1, 0};
  std::size_t nu = 0, nv = 0, count = 1;
  double du = 0.0, dv = 0.0, step = 0.5, smooth = 0.0;
  bool normalize = false;
};

void cmd_slice(const SliceArgs& a, Run& run) {
  const auto volume = load_grid(a.grid);
  if (volume.dims() != 3) throw InvalidArgument("slice needs a 3D grid");
  const auto& geo = volume.geometry();
  const auto vec3 = [](const std::vector<double>& x, const char* name) {
    if (x.size() != 3) throw UsageError(std::string("--") + name + " needs three values");
    return Vec3{x[0], x[1], x[2]};
  };
  SlicePlane plane;
  plane.origin = a.origin.empty() ? Vec3{geo.origin[0], geo.origin[1], geo.origin[2]} : vec3(a.origin, "origin");
  plane.u = vec3(a.u, "u");
  plane.v = vec3(a.v, "v");
  plane.nu = a.nu != 0 ? a.nu : geo.shape[0];
  plane.nv = a.nv != 0 ? a.nv : geo.shape[1];
  plane.du = a.du > 0.0 ? a.du : geo.spacing[0];
  plane.dv = a.dv > 0.0 ? a.dv : geo.spacing[1];
  auto slices = slice_volume(volume, plane, a.count, a.step);
  for (std::size_t k = 0; k < slices.size(); ++k) {
    auto s = slices[k];
    if (a.smooth > 0.0) s = log_smooth(s, a.smooth);
    if (a.normalize) s = normalize(s);
    char suffix[32];
    std::snprintf(suffix, sizeof suffix, "_%03zu.json", k);
    const std::string path = a.prefix + suffix;
    save_grid(s, path, GridFormat::kJson);
    run.outputs.push_back(path);
  }
  run.params = {{"origin", plane.origin}, {"u", plane.u},          {"v", plane.v},
                {"nu", plane.nu},         {"nv", plane.nv},        {"du", plane.du},
                {"dv", plane.dv},         {"count", a.count},      {"step", a.step},
                {"smooth", a.smooth},     {"normalize", a.normalize}};
  run.inputs = {a.grid};
}

// Sites in micrometres: {"sites": [[x, y], ...]} or a bare array.
std::vector<Point2> guarded_sites(const json& doc) {
  try {
    return (doc.is_array() ? doc : doc.at("sites")).get<std::vector<Point2>>();
  } catch (const json::exception& e) {
    throw ParseError("sites", 0, e.what());
  }
}

struct RegisterArgs {
  std::string grid, sites, out;
  double threshold = 0.5, lattice = units::kDefaultLatticeSpacing, pitch = 1.0, c6 = units::kDefaultC6;
  double omega_ref_mhz = 2.0, um_per_unit = 1.0;
  std::vector<std::size_t> traps;
};

void cmd_register(const RegisterArgs& a, Run& run) {
  const double omega_ref = units::mhz(a.omega_ref_mhz);
  Register reg;
  if (!a.sites.empty()) {
    const json doc = read_json_file(a.sites);
    if (!(a.um_per_unit > 0.0)) throw InvalidArgument("--um-per-unit must be positive");
    reg = Register::from_sites(guarded_sites(doc), a.c6, blockade_radius_for(a.c6, omega_ref),
                               GridFrame{{0.0, 0.0}, a.um_per_unit});
    run.inputs = {a.sites};
  } else {
    RegisterOptions o;
    o.threshold = a.threshold;
    o.lattice_spacing_um = a.lattice;
    o.pitch = a.pitch;
    o.c6 = a.c6;
    o.omega_ref = omega_ref;
    reg = build_register(load_grid(a.grid), o);
    run.inputs = {a.grid};
  }
  json extra = json::object();
  if (!a.traps.empty()) {
    if (a.traps.size() != 2) throw UsageError("--traps takes rows and cols");
    const auto layout = triangular_layout(a.traps[0], a.traps[1], a.lattice);
    auto fit = fit_to_traps(reg, layout);
    reg = fit.reg;
    extra = {{"trap_of_site", fit.trap_of_site}, {"translation", fit.translation}, {"fit_cost", fit.cost}};
  }
  json j = register_to_json(reg);
  for (auto& [k, v] : extra.items()) j[k] = v;
  write_json_file(j, a.out);
  spdlog::info("register with {} sites, blockade radius {:.3f} um", reg.size(), reg.blockade_radius);
  run.params = {{"threshold", a.threshold}, {"lattice_spacing_um", a.lattice}, {"pitch", a.pitch},
                {"c6", a.c6},               {"omega_ref", omega_ref},        {"traps", a.traps},
                {"um_per_unit", a.um_per_unit}};
  run.outputs = {a.out};
}

struct CompileArgs {
  std::string grid, reg, out, amplitudes = "ones", pairs = "ordered";
  double variance = 1.0, exclusion = 0.0;
};

void cmd_compile(const CompileArgs& a, Run& run) {
  const auto field = load_grid(a.grid);
  const auto reg = register_from_json(read_json_file(a.reg));
  CompileOptions o;
  o.variance = a.variance;
  o.exclusion_radius = a.exclusion;
  o.pairs = a.pairs == "ordered" ? PairConvention::kOrderedPairs : PairConvention::kUnorderedPairs;
  if (a.amplitudes == "local") o.amplitudes = local_amplitudes(field, reg.field_sites, a.variance);
  const auto problem = compile_problem(field, reg.field_sites, o);
  for (const auto& w : problem.warnings) spdlog::warn("{}", w);
  write_json_file(problem_to_json(problem), a.out);
  run.params = {{"variance", a.variance},
                {"amplitudes", a.amplitudes},
                {"exclusion_radius", a.exclusion},
                {"pairs", a.pairs}};
  run.inputs = {a.grid, a.reg};
  run.outputs = {a.out};
}

struct ExactArgs {
  std::string problem, out;
  bool ignore_exclusion = false;
};

void cmd_exact(const ExactArgs& a, Run& run) {
  const auto problem = problem_from_json(read_json_file(a.problem));
  const auto placement = exact_solve(problem, !a.ignore_exclusion);
  write_json_file(placement_to_json(placement), a.out);
  std::cout << placement.bits.str() << ' ' << format_double(placement.cost) << '\n';
  run.params = {{"enforce_exclusion", !a.ignore_exclusion}};
  run.inputs = {a.problem};
  run.outputs = {a.out};
}

struct SamplingArgs {
  std::string problem, reg, noise, out_hist, out_winner, svg, format = "csv";
  std::uint64_t seed = 0;
  std::size_t shots = 0, trajectories = 0;
  double duration = units::kDefaultDuration, omega_max_mhz = 2.0, delta_max_mhz = 4.0, dt = 0.0;
};

void emit_sampling_outputs(const SamplingArgs& a, const PlacementProblem& problem, const SampleHistogram& h,
                           const std::string& winner, const std::string& modal, json winner_extra, Run& run) {
  write_histogram(h, a.out_hist, a.format);
  json w = winner_json(problem, h, winner, modal);
  for (auto& [k, v] : winner_extra.items()) w[k] = v;
  write_json_file(w, a.out_winner);
  run.outputs = {a.out_hist, a.out_winner};
  if (!a.svg.empty()) {
    write_text_file(histogram_svg(h, winner), a.svg);
    run.outputs.push_back(a.svg);
  }
  std::cout << winner << ' ' << format_double(cost(problem, Bitstring::parse(winner))) << ' '
            << h.counts.at(winner) << '/' << h.shots << '\n';
}

json sampling_params(const SamplingArgs& a, const NoiseModel& noise) {
  return {{"shots", a.shots},
          {"duration", a.duration},
          {"omega_max", units::mhz(a.omega_max_mhz)},
          {"delta_max", units::mhz(a.delta_max_mhz)},
          {"dt", a.dt},
          {"trajectories", a.trajectories},
          {"noise", noise_to_json(noise)},
          {"format", a.format}};
}

struct QaeArgs : SamplingArgs {
  double c_mhz = 0.0;
};

void cmd_qae(const QaeArgs& a, Run& run) {
  const auto problem = problem_from_json(read_json_file(a.problem));
  const auto reg = register_from_json(read_json_file(a.reg));
  check_aligned(problem, reg);
  QaeOptions o;
  o.schedule.duration = a.duration;
  o.schedule.omega_max = units::mhz(a.omega_max_mhz);
  o.schedule.delta_max = units::mhz(a.delta_max_mhz);
  o.schedule.initial_detuning = a.c_mhz > 0.0 ? units::mhz(a.c_mhz) : o.schedule.delta_max;
  o.shots = a.shots;
  o.noise = load_noise(a.noise);
  o.noise.seed = a.seed;
  o.trajectories = a.trajectories;
  o.dt = a.dt;
  spdlog::info("qae: {} qubits, T = {} us, {} shots", reg.size(), a.duration, a.shots);
  const auto r = run_qae(problem, reg, o);
  emit_sampling_outputs(a, problem, r.histogram, r.winner, r.most_sampled, {{"final_deltas", r.final_deltas}}, run);
  run.params = sampling_params(a, o.noise);
  run.params["initial_detuning"] = o.schedule.initial_detuning;
  run.inputs = {a.problem, a.reg};
  if (!a.noise.empty() && a.noise != "hardware") run.inputs.push_back(a.noise);
}

struct VqaArgs : SamplingArgs {
  std::string preset, minimizer = "gp", trace;
  std::size_t m = 9, cycles = 50, random = 10, final_shots = 0;
  bool cycles_set = false, shots_set = false;
};

void cmd_vqa(const VqaArgs& a, Run& run) {
  const auto problem = problem_from_json(read_json_file(a.problem));
  const auto reg = register_from_json(read_json_file(a.reg));
  check_aligned(problem, reg);
  OptimizerConfig c = a.preset.empty() ? OptimizerConfig{} : OptimizerConfig::preset(a.preset);
  if (a.preset.empty() || a.cycles_set) c.n_c = a.cycles;
  if (a.preset.empty() || a.shots_set) c.shots_per_cycle = a.shots;
  c.m = a.m;
  c.n_r = a.random;
  c.final_shots = a.final_shots;
  c.minimizer = a.minimizer == "dummy" ? Minimizer::kDummy : Minimizer::kGp;
  c.bounds = {units::mhz(a.omega_max_mhz), units::mhz(a.delta_max_mhz)};
  c.duration = a.duration;
  c.seed = a.seed;
  c.noise = load_noise(a.noise);
  c.trajectories = a.trajectories;
  c.dt = a.dt;
  spdlog::info("vqa: {} qubits, m = {}, {} cycles, {} shots per cycle", reg.size(), c.m, c.n_c, c.shots_per_cycle);
  const auto r = run_vqa(problem, reg, c);
  if (r.failure) spdlog::error("optimizer stopped early: {}", *r.failure);

  SamplingArgs out = a;
  emit_sampling_outputs(out, problem, r.histogram, r.winner, r.most_sampled,
                        {{"best_params", r.best_params},
                         {"best_cycle", r.best_index},
                         {"best_cost_estimate", r.trace[r.best_index].cost_estimate}},
                        run);
  if (!a.trace.empty()) {
    std::string lines;
    for (const auto& rec : r.trace) lines += cycle_to_json(rec).dump() + "\n";
    write_text_file(lines, a.trace);
    run.outputs.push_back(a.trace);
  }
  run.params = sampling_params(a, c.noise);
  run.params["shots"] = c.shots_per_cycle;
  run.params.update({{"preset", a.preset},
                     {"m", c.m},
                     {"n_c", c.n_c},
                     {"n_r", c.n_r},
                     {"final_shots", c.final_shots},
                     {"minimizer", a.minimizer}});
  run.inputs = {a.problem, a.reg};
  if (!a.noise.empty() && a.noise != "hardware") run.inputs.push_back(a.noise);
  if (r.failure) throw Error("optimizer aborted: " + *r.failure);
}

struct LandscapeArgs {
  std::string reg, target, noise, out, svg;
  std::optional<std::uint64_t> seed;
  double omega_mhz = 2.0, dmin_mhz = -4.0, dmax_mhz = 4.0, tmin = 0.0, tmax = 2.0;
  std::size_t dsteps = 8, tsteps = 8, shots = 0;
};

void cmd_landscape(const LandscapeArgs& a, Run& run) {
  auto noise = load_noise(a.noise);
  if ((a.shots > 0 || noise.has_dynamical_noise()) && !a.seed) {
    throw UsageError("landscape with sampling or dynamical noise needs --seed");
  }
  if (a.shots == 0 && noise.has_dynamical_noise()) throw UsageError("dynamical noise needs --shots > 0");
  noise.seed = a.seed.value_or(0);
  const auto reg = register_from_json(read_json_file(a.reg));
  const auto target = Bitstring::parse(a.target);
  const auto deltas = linspace(units::mhz(a.dmin_mhz), units::mhz(a.dmax_mhz), a.dsteps);
  const auto durations = linspace(a.tmin, a.tmax, a.tsteps);
  const auto l = landscape_scan(reg, target, units::mhz(a.omega_mhz), deltas, durations, a.shots, noise);
  std::ostringstream s;
  write_landscape_csv(l, s);
  write_text_file(s.str(), a.out);
  run.outputs = {a.out};
  if (!a.svg.empty()) {
    write_text_file(landscape_svg(l), a.svg);
    run.outputs.push_back(a.svg);
  }
  run.params = {{"target", a.target},       {"omega", units::mhz(a.omega_mhz)}, {"deltas", deltas},
                {"durations", durations},   {"shots", a.shots},                 {"noise", noise_to_json(noise)}};
  run.inputs = {a.reg};
}

struct PlotArgs {
  std::string hist, landscape, winner, out;
};

void cmd_plot(const PlotArgs& a, Run& run) {
  if (a.hist.empty() == a.landscape.empty()) throw UsageError("plot needs exactly one of --hist or --landscape");
  if (!a.hist.empty()) {
    std::istringstream in(read_text_file(a.hist));
    const auto h = read_histogram_csv(in, a.hist);
    write_text_file(histogram_svg(h, a.winner), a.out);
    run.inputs = {a.hist};
  } else {
    std::istringstream in(read_text_file(a.landscape));
    write_text_file(landscape_svg(read_landscape_csv(in, a.landscape)), a.out);
    run.inputs = {a.landscape};
  }
  run.params = {{"winner", a.winner}};
  run.outputs = {a.out};
}

std::vector<std::string> strip_threads(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--threads") {
      ++i;
      continue;
    }
    if (args[i].rfind("--threads=", 0) == 0) continue;
    out.push_back(args[i]);
  }
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  setup_logging();
  CLI::App app{"Quantum placement pipeline: density grids to Rydberg-register solutions", "q3p"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  std::string manifest;
  app.add_option("--threads", threads, "worker threads (0 = all logical cores)")->capture_default_str();
  app.add_option("--manifest", manifest, "manifest path (default: <first output>.manifest.json)");

  SynthArgs synth;
  auto* s_synth = app.add_subcommand("synth", "sample a Gaussian mixture on a grid");
  s_synth->add_option("--components", synth.components, "mixture JSON")->required()->check(CLI::ExistingFile);
  s_synth->add_option("--out", synth.out, "output grid (.json or .dx)")->required();
  s_synth->add_option("--shape", synth.shape, "grid points per axis (overrides the file)");
  s_synth->add_option("--spacing", synth.spacing, "grid spacing, one value or one per axis");
  s_synth->add_option("--origin", synth.origin, "grid origin");
  s_synth->add_flag("--normalize", synth.normalize, "rescale to unit integral")->capture_default_str();

  SliceArgs slice;
  auto* s_slice = app.add_subcommand("slice", "cut 2D slices from a 3D grid");
  s_slice->add_option("--grid", slice.grid, "3D grid (.dx or .json)")->required()->check(CLI::ExistingFile);
  s_slice->add_option("--out-prefix", slice.prefix, "slices go to <prefix>_NNN.json")->required();
  s_slice->add_option("--origin", slice.origin, "plane origin x y z (default: grid origin)");
  s_slice->add_option("--u", slice.u, "first in-plane axis")->expected(3)->capture_default_str();
  s_slice->add_option("--v", slice.v, "second in-plane axis")->expected(3)->capture_default_str();
  s_slice->add_option("--nu", slice.nu, "points along u (0 = grid x size)")->capture_default_str();
  s_slice->add_option("--nv", slice.nv, "points along v (0 = grid y size)")->capture_default_str();
  s_slice->add_option("--du", slice.du, "spacing along u (0 = grid x spacing)")->capture_default_str();
  s_slice->add_option("--dv", slice.dv, "spacing along v (0 = grid y spacing)")->capture_default_str();
  s_slice->add_option("--count", slice.count, "number of parallel slices")->capture_default_str();
  s_slice->add_option("--step", slice.step, "distance between slices")->capture_default_str();
  s_slice->add_option("--smooth", slice.smooth, "Laplacian-of-Gaussian sigma in cells (0 = off)")
      ->capture_default_str();
  s_slice->add_flag("--normalize", slice.normalize, "rescale each slice to unit integral")->capture_default_str();

  RegisterArgs regargs;
  auto* s_reg = app.add_subcommand("register", "place atoms on a density slice or from explicit sites");
  auto* reg_grid = s_reg->add_option("--grid", regargs.grid, "2D grid to threshold")->check(CLI::ExistingFile);
  auto* reg_sites = s_reg->add_option("--sites", regargs.sites, "JSON list of [x, y] sites in um")
                        ->check(CLI::ExistingFile);
  reg_grid->excludes(reg_sites);
  s_reg->add_option("--out", regargs.out, "register JSON")->required();
  s_reg->add_option("--threshold", regargs.threshold, "fraction of the field maximum")->capture_default_str();
  s_reg->add_option("--lattice-spacing", regargs.lattice, "atom spacing in um")->capture_default_str();
  s_reg->add_option("--pitch", regargs.pitch, "candidate lattice pitch in grid units")->capture_default_str();
  s_reg->add_option("--c6", regargs.c6, "C6 in rad/us um^6")->capture_default_str();
  s_reg->add_option("--omega-ref", regargs.omega_ref_mhz, "Rabi frequency for the blockade radius, MHz")
      ->capture_default_str();
  s_reg->add_option("--um-per-unit", regargs.um_per_unit, "with --sites: micrometres per grid unit")
      ->capture_default_str();
  s_reg->add_option("--traps", regargs.traps, "fit onto a rows x cols triangular trap layout")->expected(2);

  CompileArgs comp;
  auto* s_comp = app.add_subcommand("compile", "build the Ising placement problem");
  s_comp->add_option("--grid", comp.grid, "2D density grid")->required()->check(CLI::ExistingFile);
  s_comp->add_option("--register", comp.reg, "register JSON")->required()->check(CLI::ExistingFile);
  s_comp->add_option("--out", comp.out, "problem JSON")->required();
  s_comp->add_option("--variance", comp.variance, "Gaussian variance in grid units^2")->capture_default_str();
  s_comp->add_option("--amplitudes", comp.amplitudes, "ones or local")
      ->check(CLI::IsMember({"ones", "local"}))
      ->capture_default_str();
  s_comp->add_option("--exclusion", comp.exclusion, "exclusion radius in grid units")->capture_default_str();
  s_comp->add_option("--pairs", comp.pairs, "ordered (both i,j and j,i) or unordered")
      ->check(CLI::IsMember({"ordered", "unordered"}))
      ->capture_default_str();

  ExactArgs exact;
  auto* s_exact = app.add_subcommand("exact", "solve a placement problem exactly");
  s_exact->add_option("--problem", exact.problem, "problem JSON")->required()->check(CLI::ExistingFile);
  s_exact->add_option("--out", exact.out, "placement JSON")->required();
  s_exact->add_flag("--ignore-exclusion", exact.ignore_exclusion, "allow sites inside the exclusion radius")
      ->capture_default_str();

  const auto add_sampling = [](CLI::App* sub, SamplingArgs& a, std::size_t default_shots) {
    a.shots = default_shots;
    sub->add_option("--problem", a.problem, "problem JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--register", a.reg, "register JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", a.seed, "random seed")->required();
    sub->add_option("--shots", a.shots, "samples")->capture_default_str();
    sub->add_option("--duration", a.duration, "pulse duration in us")->capture_default_str();
    sub->add_option("--omega-max", a.omega_max_mhz, "peak Rabi frequency, MHz")->capture_default_str();
    sub->add_option("--delta-max", a.delta_max_mhz, "detuning bound, MHz")->capture_default_str();
    sub->add_option("--noise", a.noise, "noise JSON file or 'hardware'");
    sub->add_option("--trajectories", a.trajectories, "noisy trajectories (0 = one per shot)")
        ->capture_default_str();
    sub->add_option("--dt", a.dt, "time step in us (0 = automatic)")->capture_default_str();
    sub->add_option("--out-hist", a.out_hist, "histogram output")->required();
    sub->add_option("--out-winner", a.out_winner, "winner JSON")->required();
    sub->add_option("--svg", a.svg, "optional bar chart");
    sub->add_option("--format", a.format, "histogram format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  };

  QaeArgs qae;
  auto* s_qae = app.add_subcommand("qae", "adiabatic evolution with local detunings");
  add_sampling(s_qae, qae, 1000);
  s_qae->add_option("--c", qae.c_mhz, "initial detuning magnitude, MHz (0 = delta-max)")->capture_default_str();

  VqaArgs vqa;
  auto* s_vqa = app.add_subcommand("vqa", "Bayesian optimization of a global pulse");
  add_sampling(s_vqa, vqa, 200);
  s_vqa->add_option("--preset", vqa.preset, "paper-mup (50 cycles) or paper-si (200 cycles)")
      ->check(CLI::IsMember({"paper-mup", "paper-si"}));
  s_vqa->add_option("--m", vqa.m, "control points per channel")->capture_default_str();
  auto* vqa_cycles = s_vqa->add_option("--cycles", vqa.cycles, "optimizer cycles n_c")->capture_default_str();
  s_vqa->add_option("--random", vqa.random, "random warm-up cycles n_r")->capture_default_str();
  s_vqa->add_option("--minimizer", vqa.minimizer, "gp or dummy")
      ->check(CLI::IsMember({"gp", "dummy"}))
      ->capture_default_str();
  s_vqa->add_option("--final-shots", vqa.final_shots, "shots at the best parameters (0 = --shots)")
      ->capture_default_str();
  s_vqa->add_option("--trace", vqa.trace, "per-cycle JSON lines");

  LandscapeArgs land;
  auto* s_land = app.add_subcommand("landscape", "readout probability over a constant-pulse grid");
  s_land->add_option("--register", land.reg, "register JSON")->required()->check(CLI::ExistingFile);
  s_land->add_option("--target", land.target, "bitstring to read out")->required();
  s_land->add_option("--omega", land.omega_mhz, "Rabi frequency, MHz")->capture_default_str();
  s_land->add_option("--delta-min", land.dmin_mhz, "lowest detuning, MHz")->capture_default_str();
  s_land->add_option("--delta-max", land.dmax_mhz, "highest detuning, MHz")->capture_default_str();
  s_land->add_option("--delta-steps", land.dsteps, "detuning rows")->capture_default_str();
  s_land->add_option("--t-min", land.tmin, "shortest duration, us")->capture_default_str();
  s_land->add_option("--t-max", land.tmax, "longest duration, us")->capture_default_str();
  s_land->add_option("--t-steps", land.tsteps, "duration columns")->capture_default_str();
  s_land->add_option("--shots", land.shots, "samples per cell (0 = exact)")->capture_default_str();
  s_land->add_option("--seed", land.seed, "random seed (needed when sampling)");
  s_land->add_option("--noise", land.noise, "noise JSON file or 'hardware'");
  s_land->add_option("--out", land.out, "landscape CSV")->required();
  s_land->add_option("--svg", land.svg, "optional heatmap");

  PlotArgs plot;
  auto* s_plot = app.add_subcommand("plot", "render a histogram or landscape CSV as SVG");
  s_plot->add_option("--hist", plot.hist, "histogram CSV")->check(CLI::ExistingFile);
  s_plot->add_option("--landscape", plot.landscape, "landscape CSV")->check(CLI::ExistingFile);
  s_plot->add_option("--winner", plot.winner, "bitstring to highlight");
  s_plot->add_option("--out", plot.out, "SVG output")->required();

  std::string replay_path;
  auto* s_replay = app.add_subcommand("replay", "re-run the command recorded in a manifest");
  s_replay->add_option("manifest", replay_path, "manifest JSON")->required()->check(CLI::ExistingFile);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  set_thread_limit(threads);
  Run run;
  run.argv = strip_threads(args);
  run.manifest = manifest;
  try {
    if (*s_replay) {
      const json m = read_json_file(replay_path);
      std::vector<std::string> again{"q3p"};
      for (const auto& a : m.at("argv")) again.push_back(a.get<std::string>());
      if (threads > 0) {
        again.push_back("--threads");
        again.push_back(std::to_string(threads));
      }
      return run_cli(again);
    }
    if (*s_synth) {
      run.subcommand = "synth";
      cmd_synth(synth, run);
    } else if (*s_slice) {
      run.subcommand = "slice";
      cmd_slice(slice, run);
    } else if (*s_reg) {
      if (regargs.grid.empty() == regargs.sites.empty()) throw UsageError("register needs --grid or --sites");
      run.subcommand = "register";
      cmd_register(regargs, run);
    } else if (*s_comp) {
      run.subcommand = "compile";
      cmd_compile(comp, run);
    } else if (*s_exact) {
      run.subcommand = "exact";
      cmd_exact(exact, run);
    } else if (*s_qae) {
      run.subcommand = "qae";
      run.seed = qae.seed;
      cmd_qae(qae, run);
    } else if (*s_vqa) {
      run.subcommand = "vqa";
      run.seed = vqa.seed;
      vqa.cycles_set = vqa_cycles->count() > 0;
      vqa.shots_set = s_vqa->get_option("--shots")->count() > 0;
      cmd_vqa(vqa, run);
    } else if (*s_land) {
      run.subcommand = "landscape";
      run.seed = land.seed;
      cmd_landscape(land, run);
    } else if (*s_plot) {
      run.subcommand = "plot";
      cmd_plot(plot, run);
    }
    write_manifest(run);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run_cli(int argc, const char* const* argv) {
  return run_cli(std::vector<std::string>(argv, argv + argc));
}

}  // namespace q3p
