#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dstft/error.hpp"
#include "dstft/io.hpp"
#include "dstft/signals.hpp"
#include "dstft/transform.hpp"
#include "dstft/wavefront.hpp"
#include "dstft/windowchange.hpp"

namespace dstft::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kTool = "dstft-cli 1";

struct Global {
  unsigned threads = 1;
  bool fast_reduce = false;
  std::string out_dir = ".";

  Execution exec() const { return {std::max(1u, threads), !fast_reduce}; }
  json to_json() const {
    return {{"threads", threads}, {"deterministic", !fast_reduce}, {"out_dir", out_dir}};
  }
};

struct LatticeFlags {
  std::string origin, step, count;
};

struct ShiftFlags {
  std::string lower, upper, step;
};

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(Errc::parse, what + ": cannot read '" + item + "' as a number");
    }
  }
  if (out.empty()) throw Error(Errc::parse, what + " is empty");
  return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<Window> parse_windows(const std::string& text) {
  std::vector<Window> out;
  for (const auto& s : split(text, ';')) out.push_back(Window::parse(s));
  if (out.empty()) throw Error(Errc::parse, "no window given");
  return out;
}

std::vector<std::string> grammar(const std::vector<Window>& ws) {
  std::vector<std::string> out;
  for (const auto& w : ws) out.push_back(w.grammar());
  return out;
}

std::vector<double> broadcast(std::vector<double> v, std::size_t n, const std::string& what) {
  if (v.size() == 1 && n > 1) v.assign(n, v[0]);
  if (v.size() != n) throw Error(Errc::parse, what + " needs " + std::to_string(n) + " entries");
  return v;
}

Lattice make_lattice(const LatticeFlags& flags) {
  if (flags.count.empty() || flags.step.empty() || flags.origin.empty()) {
    throw Error(Errc::parse, "lattice needs --origin, --step and --count");
  }
  const auto counts = parse_list(flags.count, "--count");
  const auto steps = parse_list(flags.step, "--step");
  const auto origins = parse_list(flags.origin, "--origin");
  const std::size_t n = std::max({counts.size(), steps.size(), origins.size()});
  std::vector<std::size_t> count;
  for (double c : broadcast(counts, n, "--count")) {
    if (c < 1 || c != std::floor(c)) throw Error(Errc::parse, "--count entries must be positive integers");
    count.push_back(static_cast<std::size_t>(c));
  }
  return Lattice::make(broadcast(origins, n, "--origin"), broadcast(steps, n, "--step"), std::move(count));
}

Lattice make_shifts(const ShiftFlags& flags, const Lattice& signal, const DirectionFrame& frame) {
  if (flags.lower.empty() && flags.upper.empty() && flags.step.empty()) return default_shift_lattice(signal, frame);
  if (flags.lower.empty() || flags.upper.empty() || flags.step.empty()) {
    throw Error(Errc::parse, "shift lattice needs --shift-lower, --shift-upper and --shift-step together");
  }
  const std::size_t k = frame.k();
  const auto lo = broadcast(parse_list(flags.lower, "--shift-lower"), k, "--shift-lower");
  const auto hi = broadcast(parse_list(flags.upper, "--shift-upper"), k, "--shift-upper");
  const auto step = broadcast(parse_list(flags.step, "--shift-step"), k, "--shift-step");
  std::vector<std::size_t> count(k);
  for (std::size_t a = 0; a < k; ++a) {
    if (!(hi[a] > lo[a]) || !(step[a] > 0.0)) throw Error(Errc::parse, "shift range must be increasing with a positive step");
    count[a] = static_cast<std::size_t>(std::llround((hi[a] - lo[a]) / step[a])) + 1;
  }
  return Lattice::make(lo, step, std::move(count));
}

DirectionFrame make_frame(const std::string& dirs, std::size_t n, std::size_t k_default) {
  if (dirs.empty()) return canonical_frame(k_default, n);
  return build_frame(parse_directions(dirs), n);
}

json frame_json(const DirectionFrame& frame) {
  return {{"n", frame.n()}, {"k", frame.k()}, {"directions", frame.directions()},
          {"completion", to_string(frame.completion())}};
}

json shift_json(const Lattice& l) { return lattice_to_json(l); }

void require_file(const std::string& path, const std::string& flag) {
  if (path.empty()) throw Error(Errc::parse, flag + " is required");
  if (!fs::is_regular_file(path)) throw Error(Errc::io, "input file '" + path + "' does not exist");
}

fs::path prepare_out(const Global& g, const std::string& name) {
  std::error_code ec;
  fs::create_directories(g.out_dir, ec);
  if (ec) throw Error(Errc::io, "cannot create output directory '" + g.out_dir + "'");
  return fs::path(g.out_dir) / name;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(Errc::io, "cannot write '" + path.string() + "'");
  os << text;
  if (!os) throw Error(Errc::io, "write failed for '" + path.string() + "'");
}

json manifest(const std::string& command, const Global& g, json config) {
  return {{"tool", kTool}, {"command", command}, {"global", g.to_json()}, {"config", std::move(config)}};
}

void emit_manifest(const Global& g, const json& m) {
  write_text(prepare_out(g, m["command"].get<std::string>() + ".manifest.json"), m.dump(2) + "\n");
}

void write_report(const Global& g, const std::string& name, json report, const json& m) {
  report["manifest"] = m;
  write_text(prepare_out(g, name), report.dump(2) + "\n");
}

std::string fixed(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

// gen --------------------------------------------------------------------

struct GenOptions {
  std::string recipe, kind, dirs, center, xi0, out = "signal.json";
  double offset = 0.0, sigma = 1.0, width = 0.0;
  LatticeFlags lattice;
};

SignalRecipe gen_recipe(const GenOptions& o, std::size_t n) {
  if (!o.recipe.empty()) {
    require_file(o.recipe, "--recipe");
    std::ifstream is(o.recipe);
    json j;
    try {
      j = json::parse(is);
    } catch (const json::parse_error& e) {
      throw Error(Errc::parse, "'" + o.recipe + "': " + e.what());
    }
    return recipe_from_json(j);
  }
  if (o.kind.empty()) throw Error(Errc::parse, "gen needs --recipe or --kind");
  auto center = o.center.empty() ? std::vector<double>(n, 0.0) : broadcast(parse_list(o.center, "--center"), n, "--center");
  auto dir = [&] {
    if (o.dirs.empty()) throw Error(Errc::parse, "--kind " + o.kind + " needs --dirs");
    const auto v = parse_directions(o.dirs);
    if (v.size() != 1 || v[0].size() != n) throw Error(Errc::parse, "--dirs must hold one " + std::to_string(n) + "-vector");
    return v[0];
  };
  SignalRecipe r;
  if (o.kind == "gaussian") {
    r = SignalRecipe::gaussian(center, o.sigma);
  } else if (o.kind == "jump_ridge") {
    r = SignalRecipe::jump_ridge(dir(), o.offset, o.sigma);
  } else if (o.kind == "ridge_spike") {
    r = SignalRecipe::ridge_spike(dir(), o.offset, o.width, o.sigma);
  } else if (o.kind == "plane_wave") {
    r = SignalRecipe::plane_wave(broadcast(parse_list(o.xi0, "--xi0"), n, "--xi0"), o.sigma);
  } else {
    throw Error(Errc::unknown_kind, "unknown signal kind '" + o.kind + "'");
  }
  r.center = center;
  return r;
}

int cmd_gen(const Global& g, const GenOptions& o, std::ostream& out) {
  const auto lattice = make_lattice(o.lattice);
  const auto recipe = gen_recipe(o, lattice.dim());
  auto recipe_json = recipe_to_json(recipe);
  recipe_json["version"] = "SIG v1";
  const auto m = manifest("gen", g, {{"recipe", recipe_json}, {"lattice", lattice_to_json(lattice)}, {"out", o.out}});
  const auto field = render(recipe, lattice);
  write_field(field, prepare_out(g, o.out), Dtype::automatic, m);
  emit_manifest(g, m);
  out << "wrote " << (fs::path(g.out_dir) / o.out).string() << "\n";
  return ok;
}

// dstft / synth / roundtrip ----------------------------------------------

struct TransformOptions {
  std::string in, windows = "gaussian:sigma=1", synthesis, dirs, out;
  ShiftFlags shifts;
  bool raw = false;
  std::string out_origin;
};

int cmd_dstft(const Global& g, const TransformOptions& o, std::ostream& out) {
  require_file(o.in, "--in");
  const auto f = read_field(o.in);
  const auto analysis = parse_windows(o.windows);
  const auto synthesis = o.synthesis.empty() ? analysis : parse_windows(o.synthesis);
  const auto frame = make_frame(o.dirs, f.lattice.dim(), analysis.size());
  const auto shifts = make_shifts(o.shifts, f.lattice, frame);
  const std::string name = o.out.empty() ? "coeffs.json" : o.out;
  const auto m = manifest("dstft", g,
                          {{"in", o.in}, {"windows", grammar(analysis)}, {"synthesis_windows", grammar(synthesis)},
                           {"frame", frame_json(frame)}, {"shift_lattice", shift_json(shifts)}, {"out", name}});
  const auto coeffs = dstft_forward(f, frame, WindowBank(analysis, synthesis), shifts, g.exec());
  write_coefficients(coeffs, prepare_out(g, name), m);
  emit_manifest(g, m);
  out << "wrote " << (fs::path(g.out_dir) / name).string() << "\n";
  return ok;
}

int cmd_synth(const Global& g, const TransformOptions& o, std::ostream& out) {
  require_file(o.in, "--in");
  auto coeffs = read_coefficients(o.in);
  if (!o.synthesis.empty()) coeffs.bank = WindowBank(coeffs.bank.analysis, parse_windows(o.synthesis));
  const auto origin = o.out_origin.empty()
                          ? coeffs.signal_origin
                          : broadcast(parse_list(o.out_origin, "--out-origin"), coeffs.frame.n(), "--out-origin");
  const auto lattice = Lattice::make(origin, coeffs.freq_lattice.signal_step(), coeffs.freq_lattice.count());
  const std::string name = o.out.empty() ? "synthesis.json" : o.out;
  json config = {{"in", o.in}, {"synthesis_windows", grammar(coeffs.bank.synthesis)},
                 {"out_lattice", lattice_to_json(lattice)}, {"raw", o.raw}, {"out", name}};
  SampledField result;
  if (o.raw) {
    result = synthesis(coeffs, coeffs.bank.synthesis, lattice, g.exec());
  } else {
    const auto p = pairing(coeffs.bank);
    config["pairing"] = {p.real(), p.imag()};
    result = invert(coeffs, coeffs.bank, lattice, g.exec());
  }
  const auto m = manifest("synth", g, config);
  write_field(result, prepare_out(g, name), Dtype::c128, m);
  emit_manifest(g, m);
  out << "wrote " << (fs::path(g.out_dir) / name).string() << "\n";
  return ok;
}

int cmd_roundtrip(const Global& g, const TransformOptions& o, std::ostream& out) {
  require_file(o.in, "--in");
  const auto f = read_field(o.in);
  const auto analysis = parse_windows(o.windows);
  const auto synthesis_windows = o.synthesis.empty() ? analysis : parse_windows(o.synthesis);
  const WindowBank bank(analysis, synthesis_windows);
  const auto frame = make_frame(o.dirs, f.lattice.dim(), analysis.size());
  const auto shifts = make_shifts(o.shifts, f.lattice, frame);
  const auto p = pairing(bank);
  const std::string name = o.out.empty() ? "roundtrip.json" : o.out;
  const auto m = manifest("roundtrip", g,
                          {{"in", o.in}, {"windows", grammar(analysis)}, {"synthesis_windows", grammar(synthesis_windows)},
                           {"frame", frame_json(frame)}, {"shift_lattice", shift_json(shifts)}, {"out", name}});
  const auto coeffs = dstft_forward(f, frame, bank, shifts, g.exec());
  const auto recon = invert(coeffs, bank, f.lattice, g.exec());
  const double err = relative_l2_error(recon, f);
  json report = {{"rel_l2_error", err},
                 {"pairing", {p.real(), p.imag()}},
                 {"grids", {{"signal", lattice_to_json(f.lattice)}, {"shift", shift_json(shifts)},
                            {"frequency_step", coeffs.freq_lattice.steps()}}}};
  write_report(g, name, report, m);
  emit_manifest(g, m);
  out << "rel_l2_error " << fixed(err) << "\n";
  return ok;
}

// parseval ----------------------------------------------------------------

struct ParsevalOptions {
  std::string in, in2, windows = "gaussian:sigma=1", synthesis, out = "parseval.json";
  ShiftFlags shifts;
  std::size_t k = 1;
};

int cmd_parseval(const Global& g, const ParsevalOptions& o, std::ostream& out) {
  require_file(o.in, "--in");
  const auto f1 = read_field(o.in);
  SampledField f2 = f1;
  if (!o.in2.empty()) {
    require_file(o.in2, "--in2");
    f2 = read_field(o.in2);
  }
  const auto analysis = parse_windows(o.windows);
  const auto synthesis_windows = o.synthesis.empty() ? analysis : parse_windows(o.synthesis);
  const WindowBank bank(analysis, synthesis_windows);
  const auto frame = canonical_frame(analysis.size(), f1.lattice.dim());
  const auto shifts = make_shifts(o.shifts, f1.lattice, frame);
  const auto m = manifest("parseval", g,
                          {{"in", o.in}, {"in2", o.in2.empty() ? o.in : o.in2}, {"windows", grammar(analysis)},
                           {"synthesis_windows", grammar(synthesis_windows)}, {"frame", frame_json(frame)},
                           {"shift_lattice", shift_json(shifts)}, {"out", o.out}});
  const auto r = parseval_check(f1, f2, bank, frame, shifts, g.exec());
  json report = {{"lhs", {r.lhs.real(), r.lhs.imag()}},
                 {"rhs", {r.rhs.real(), r.rhs.imag()}},
                 {"rel_err", r.rhs_degenerate ? json(nullptr) : json(r.rel_err)},
                 {"abs_err", r.abs_err},
                 {"scale", r.scale},
                 {"rhs_degenerate", r.rhs_degenerate}};
  write_report(g, o.out, report, m);
  emit_manifest(g, m);
  if (r.rhs_degenerate) {
    out << "rhs degenerate; abs_err " << fixed(r.abs_err) << " scale " << fixed(r.scale) << "\n";
  } else {
    out << "rel_err " << fixed(r.rel_err) << "\n";
  }
  return ok;
}

// window-compare ----------------------------------------------------------

struct CompareOptions {
  std::string in, recipe, windows = "gaussian:sigma=1", synthesis, target = "hann:a=1";
  std::string box = "-8,8", levels = "0.125:0.5,0.0625:0.25,0.03125:0.125";
  std::string out = "window_compare.json", table = "window_compare.csv";
  ShiftFlags shifts;
  double interior = -1.0, extent = 6.0;
};

int cmd_window_compare(const Global& g, const CompareOptions& o, std::ostream& out) {
  const auto analysis = parse_windows(o.windows);
  const auto gamma = o.synthesis.empty() ? analysis : parse_windows(o.synthesis);
  const auto h = parse_windows(o.target);
  const WindowBank bank(analysis, gamma);
  if (h.size() != analysis.size()) throw Error(Errc::parse, "--target needs as many windows as --windows");
  json config = {{"windows", grammar(analysis)}, {"synthesis_windows", grammar(gamma)},
                 {"target_windows", grammar(h)}, {"interior", o.interior}, {"out", o.out}};

  if (!o.in.empty() || o.recipe.empty()) {
    require_file(o.in, "--in");
    const auto f = read_field(o.in);
    const auto frame = canonical_frame(analysis.size(), f.lattice.dim());
    const auto shifts = make_shifts(o.shifts, f.lattice, frame);
    config["in"] = o.in;
    config["shift_lattice"] = shift_json(shifts);
    const auto m = manifest("window-compare", g, config);
    const auto r = verify_window_change(f, frame, bank, h, {shifts, o.interior, 0.5}, g.exec());
    write_report(g, o.out,
                 {{"lhs_norm", r.lhs_norm}, {"rhs_norm", r.rhs_norm}, {"rel_err", r.rel_err},
                  {"pairing", {r.pairing.real(), r.pairing.imag()}}, {"scored_points", r.scored_points},
                  {"grids", r.grids}},
                 m);
    emit_manifest(g, m);
    out << "rel_err " << fixed(r.rel_err) << "\n";
    return ok;
  }

  require_file(o.recipe, "--recipe");
  std::ifstream is(o.recipe);
  json rj;
  try {
    rj = json::parse(is);
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse, "'" + o.recipe + "': " + e.what());
  }
  const auto recipe = recipe_from_json(rj);
  const auto box = parse_list(o.box, "--box");
  if (box.size() % 2 != 0) throw Error(Errc::parse, "--box takes lower,upper pairs");
  ConvergenceSetup setup;
  for (std::size_t i = 0; i < box.size(); i += 2) {
    setup.box_lower.push_back(box[i]);
    setup.box_upper.push_back(box[i + 1]);
  }
  const std::size_t n = setup.box_lower.size();
  for (const auto& level : split(o.levels, ',')) {
    const auto colon = level.find(':');
    if (colon == std::string::npos) throw Error(Errc::parse, "level '" + level + "' must read signal_step:shift_step");
    setup.levels.emplace_back(parse_list(level.substr(0, colon), "--levels")[0],
                              parse_list(level.substr(colon + 1), "--levels")[0]);
  }
  setup.shift_extent = o.extent;
  setup.interior_radius = o.interior >= 0.0 ? o.interior : std::max(0.0, o.extent - 2.0);
  setup.signal = [&](std::span<const double> t) { return recipe.evaluate(t, 0.0); };
  config["recipe"] = recipe_to_json(recipe);
  config["box"] = box;
  config["levels"] = setup.levels;
  config["shift_extent"] = o.extent;
  config["interior"] = setup.interior_radius;
  config["table"] = o.table;
  const auto m = manifest("window-compare", g, config);
  const auto frame = canonical_frame(analysis.size(), n);
  const auto rows = window_change_convergence(setup, frame, bank, h, g.exec());
  json table = json::array();
  for (const auto& r : rows) {
    table.push_back({{"signal_step", r.signal_step}, {"shift_step", r.shift_step}, {"rel_err", r.rel_err},
                     {"order", std::isnan(r.order) ? json(nullptr) : json(r.order)}});
  }
  write_report(g, o.out, {{"rel_err", rows.back().rel_err}, {"convergence", table}}, m);
  write_text(prepare_out(g, o.table), convergence_csv(rows));
  emit_manifest(g, m);
  out << convergence_csv(rows);
  return ok;
}

// wavefront ---------------------------------------------------------------

struct WavefrontOptions {
  std::string in, windows = "bump:a=1", dirs, centers, directions, truth;
  std::vector<std::string> alternates;
  std::string out = "wavefront.json", csv = "wavefront.csv";
  WavefrontParams params;
};

int cmd_wavefront(const Global& g, const WavefrontOptions& o, std::ostream& out) {
  require_file(o.in, "--in");
  const auto f = read_field(o.in);
  const auto windows = parse_windows(o.windows);
  const auto frame = make_frame(o.dirs, f.lattice.dim(), windows.size());
  if (o.centers.empty()) throw Error(Errc::parse, "--centers is required");
  const auto centers = parse_directions(o.centers);
  const auto directions = o.directions.empty() ? std::vector<std::vector<double>>{} : parse_directions(o.directions);
  std::vector<SingularFront> fronts;
  json truth_json = nullptr;
  if (!o.truth.empty()) {
    require_file(o.truth, "--truth");
    std::ifstream is(o.truth);
    try {
      truth_json = json::parse(is);
    } catch (const json::parse_error& e) {
      throw Error(Errc::parse, "'" + o.truth + "': " + e.what());
    }
    fronts = ground_truth(recipe_from_json(truth_json));
  }
  const auto& p = o.params;
  json config = {{"in", o.in}, {"windows", grammar(windows)}, {"frame", frame_json(frame)}, {"centers", centers},
                 {"directions", directions}, {"radius", p.radius}, {"half_angle", p.half_angle},
                 {"r_min", p.r_min}, {"r_max", p.r_max}, {"shells", p.shells},
                 {"threshold", p.thresholds.n_threshold}, {"floor", p.thresholds.floor},
                 {"shift_step", p.shift_step}, {"allow_noncompact", p.allow_noncompact},
                 {"alternates", o.alternates}, {"truth", truth_json}, {"out", o.out}, {"csv", o.csv}};
  const auto m = manifest("wavefront", g, config);

  std::vector<WindowBank> banks{WindowBank::self_dual(windows)};
  for (const auto& alt : o.alternates) banks.push_back(WindowBank::self_dual(parse_windows(alt)));
  const auto table = window_robustness(f, frame, banks, centers, directions, p, g.exec());
  const auto& map = table.entries[0].map;

  json report = wavefront_json(map);
  std::string csv = wavefront_csv(map);
  if (!o.truth.empty()) {
    const double a = windows[0].support_radius();
    std::size_t mismatches = 0;
    std::ostringstream with_truth;
    std::istringstream rows(csv);
    std::string line;
    std::getline(rows, line);
    with_truth << line << ",expected\n";
    for (std::size_t c = 0; c < map.cells.size(); ++c) {
      const auto& cell = map.cells[c];
      const bool expect = expected_singular(fronts, frame.directions(), cell.center, cell.direction, p.radius, a,
                                            p.half_angle);
      const bool got = cell.report.verdict == Verdict::singular;
      const bool regular = is_regular(cell.report.verdict);
      if (expect != got || (!expect && !regular)) ++mismatches;
      report["cells"][c]["expected"] = expect ? "Singular" : "Regular";
      std::getline(rows, line);
      with_truth << line << ',' << (expect ? "Singular" : "Regular") << '\n';
    }
    csv = with_truth.str();
    report["truth_mismatches"] = mismatches;
  }
  if (banks.size() > 1) {
    json entries = json::array();
    for (const auto& e : table.entries) entries.push_back(wavefront_json(e.map));
    report["robustness"] = {{"agree", table.agree}, {"disagreements", table.disagreements}, {"banks", entries}};
  }
  write_report(g, o.out, report, m);
  write_text(prepare_out(g, o.csv), csv);
  emit_manifest(g, m);
  out << csv;
  return ok;
}

int code_for(Errc c) {
  switch (c) {
    case Errc::io: return io_error;
    case Errc::pairing_degenerate: return degenerate;
    default: return config_error;
  }
}

void add_lattice_flags(CLI::App* app, LatticeFlags& l) {
  app->add_option("--origin", l.origin, "lattice origin, comma separated (one value broadcasts)");
  app->add_option("--step", l.step, "lattice step per axis");
  app->add_option("--count", l.count, "samples per axis");
}

void add_shift_flags(CLI::App* app, ShiftFlags& s) {
  app->add_option("--shift-lower", s.lower, "lowest shift per axis");
  app->add_option("--shift-upper", s.upper, "highest shift per axis");
  app->add_option("--shift-step", s.step, "shift step per axis");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Directional short-time Fourier transforms and wave-front analysis"};
  app.require_subcommand(1);
  Global g;
  bool deterministic = true;
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--deterministic", deterministic, "ordered reductions, byte-identical output (default)");
  app.add_flag("--fast-reduce", g.fast_reduce, "parallel reductions; results may differ in the last bits");
  app.add_option("--out-dir", g.out_dir, "directory for every output file");

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "render a test signal to an SFLD file");
  gen_cmd->add_option("--recipe", gen.recipe, "SIG v1 recipe JSON");
  gen_cmd->add_option("--kind", gen.kind, "gaussian | jump_ridge | ridge_spike | plane_wave");
  gen_cmd->add_option("--dirs", gen.dirs, "ridge normal u");
  gen_cmd->add_option("--offset", gen.offset, "c in u.t = c");
  gen_cmd->add_option("--sigma", gen.sigma, "envelope width");
  gen_cmd->add_option("--width", gen.width, "ridge_spike width (0: lattice step)");
  gen_cmd->add_option("--center", gen.center, "envelope center");
  gen_cmd->add_option("--xi0", gen.xi0, "plane wave frequency");
  gen_cmd->add_option("--out", gen.out, "output header name");
  add_lattice_flags(gen_cmd, gen.lattice);

  TransformOptions tr;
  auto* dstft_cmd = app.add_subcommand("dstft", "forward transform to a DSTC file");
  auto* synth_cmd = app.add_subcommand("synth", "synthesis / inversion from a DSTC file");
  auto* rt_cmd = app.add_subcommand("roundtrip", "forward then inverse, report the error");
  for (auto* c : {dstft_cmd, synth_cmd, rt_cmd}) {
    c->add_option("--in", tr.in, "input file");
    c->add_option("--out", tr.out, "output name");
    c->add_option("--synthesis-windows", tr.synthesis, "synthesis windows, ';' separated");
  }
  for (auto* c : {dstft_cmd, rt_cmd}) {
    c->add_option("--windows", tr.windows, "analysis windows, ';' separated");
    c->add_option("--dirs", tr.dirs, "directions, e.g. 0.7071,0.7071;1,0");
    add_shift_flags(c, tr.shifts);
  }
  synth_cmd->add_flag("--raw", tr.raw, "skip the division by the pairing");
  synth_cmd->add_option("--out-origin", tr.out_origin, "origin of the output lattice");

  ParsevalOptions pv;
  auto* pv_cmd = app.add_subcommand("parseval", "both sides of the Parseval identity");
  pv_cmd->add_option("--in", pv.in, "first signal");
  pv_cmd->add_option("--in2", pv.in2, "second signal (default: the first)");
  pv_cmd->add_option("--windows", pv.windows, "analysis windows g");
  pv_cmd->add_option("--synthesis-windows", pv.synthesis, "windows psi");
  pv_cmd->add_option("--out", pv.out, "report name");
  add_shift_flags(pv_cmd, pv.shifts);

  CompareOptions wc;
  auto* wc_cmd = app.add_subcommand("window-compare", "check the window-change identity");
  wc_cmd->add_option("--in", wc.in, "signal file (single report)");
  wc_cmd->add_option("--recipe", wc.recipe, "SIG v1 recipe (convergence table)");
  wc_cmd->add_option("--windows", wc.windows, "analysis windows g");
  wc_cmd->add_option("--synthesis-windows", wc.synthesis, "synthesis windows gamma");
  wc_cmd->add_option("--target", wc.target, "target windows h");
  wc_cmd->add_option("--box", wc.box, "signal box lower,upper per axis");
  wc_cmd->add_option("--levels", wc.levels, "signal_step:shift_step, comma separated");
  wc_cmd->add_option("--extent", wc.extent, "shifts cover [-extent, extent]");
  wc_cmd->add_option("--interior", wc.interior, "scored |y| bound");
  wc_cmd->add_option("--out", wc.out, "report name");
  wc_cmd->add_option("--table", wc.table, "convergence CSV name");
  add_shift_flags(wc_cmd, wc.shifts);

  WavefrontOptions wf;
  auto* wf_cmd = app.add_subcommand("wavefront", "directional wave-front map");
  wf_cmd->add_option("--in", wf.in, "signal file");
  wf_cmd->add_option("--windows", wf.windows, "analysis windows");
  wf_cmd->add_option("--dirs", wf.dirs, "frame directions");
  wf_cmd->add_option("--centers", wf.centers, "ball centers, ';' separated vectors");
  wf_cmd->add_option("--directions", wf.directions, "cone axes, ';' separated (default grid)");
  wf_cmd->add_option("--alt-windows", wf.alternates, "alternate banks for the robustness check");
  wf_cmd->add_option("--truth", wf.truth, "SIG v1 recipe whose ground truth is compared");
  wf_cmd->add_option("--radius", wf.params.radius, "ball radius r");
  wf_cmd->add_option("--half-angle", wf.params.half_angle, "cone half angle (radians)");
  wf_cmd->add_option("--r-min", wf.params.r_min, "innermost shell radius");
  wf_cmd->add_option("--r-max", wf.params.r_max, "outer shell bound");
  wf_cmd->add_option("--shells", wf.params.shells, "number of shells");
  wf_cmd->add_option("--threshold", wf.params.thresholds.n_threshold, "decay order counted as regular");
  wf_cmd->add_option("--floor", wf.params.thresholds.floor, "noise floor");
  wf_cmd->add_option("--shift-step", wf.params.shift_step, "shift lattice step");
  wf_cmd->add_flag("--allow-noncompact", wf.params.allow_noncompact, "accept non-compact windows");
  wf_cmd->add_option("--out", wf.out, "JSON report name");
  wf_cmd->add_option("--csv", wf.csv, "CSV name");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : config_error;
  }
  if (g.fast_reduce && app.count("--deterministic") > 0) {
    err << "error: --deterministic and --fast-reduce are exclusive\n";
    return config_error;
  }

  try {
    if (*gen_cmd) return cmd_gen(g, gen, out);
    if (*dstft_cmd) return cmd_dstft(g, tr, out);
    if (*synth_cmd) return cmd_synth(g, tr, out);
    if (*rt_cmd) return cmd_roundtrip(g, tr, out);
    if (*pv_cmd) return cmd_parseval(g, pv, out);
    if (*wc_cmd) return cmd_window_compare(g, wc, out);
    if (*wf_cmd) return cmd_wavefront(g, wf, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return config_error;
  }
  return config_error;
}

}  // namespace dstft::cli
