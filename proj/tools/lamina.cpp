// Batch front end. Every subcommand writes its result (CSV or JSON) to
// --output or stdout and, when --output is given, a manifest next to it.
//
// Exit status: 0 success, 1 failed acceptance rows, 2 invalid input,
// 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lamina/acceptance.hpp"
#include "lamina/brownian.hpp"
#include "lamina/dimension.hpp"
#include "lamina/errors.hpp"
#include "lamina/estimators.hpp"
#include "lamina/parallel.hpp"
#include "lamina/surface.hpp"
#include "lamina/suspension.hpp"

using json = nlohmann::ordered_json;
using namespace lamina;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Config {
  std::string command;
  std::string preset = "fuchsian-boundary";
  std::optional<std::size_t> N;
  std::optional<double> horizon;
  double step = 1e-2;
  std::uint64_t seed = 1;
  std::size_t bins = 64;
  int depth = 12;
  std::vector<double> radii;
  std::vector<double> r;
  std::string genus = "2";
  double resolution = 0.0;
  std::string output;
  std::string format;
  int threads = 0;
  std::string filter;
  bool filter_set = false;
  double tolerance_scale = 1.0;
};

json echo(const Config& c) {
  json j;
  j["command"] = c.command;
  j["preset"] = c.preset;
  if (c.N) j["N"] = *c.N;
  if (c.horizon) j["horizon"] = *c.horizon;
  j["step"] = c.step;
  j["seed"] = c.seed;
  j["bins"] = c.bins;
  j["depth"] = c.depth;
  j["radii"] = c.radii;
  j["r"] = c.r;
  j["genus"] = c.genus;
  j["resolution"] = c.resolution;
  j["output"] = c.output;
  j["format"] = c.format;
  j["threads"] = resolve_threads(c.threads);
  if (c.filter_set) j["filter"] = c.filter;
  j["tolerance_scale"] = c.tolerance_scale;
  return j;
}

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// CSV cell quoting for free text.
std::string cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

// One row of estimator output.
struct Row {
  std::string quantity;
  double value = 0.0;
  double std_error = 0.0;
  std::size_t N = 0;
  double horizon = 0.0;
  double step = 0.0;
  std::uint64_t seed = 0;
};

Row row_of(const EstimatorReport& r) { return {r.quantity, r.value, r.std_error, r.samples, r.horizon, r.step, r.seed}; }

std::string rows_csv(const std::vector<Row>& rows) {
  std::string s = "quantity,value,std_error,N,horizon,step,seed\n";
  for (const Row& r : rows) {
    s += cell(r.quantity) + "," + g17(r.value) + "," + g17(r.std_error) + "," + std::to_string(r.N) + "," +
         g17(r.horizon) + "," + g17(r.step) + "," + std::to_string(r.seed) + "\n";
  }
  return s;
}

json rows_json(const std::vector<Row>& rows) {
  json a = json::array();
  for (const Row& r : rows) {
    a.push_back({{"quantity", r.quantity}, {"value", r.value}, {"std_error", r.std_error}, {"N", r.N},
                 {"horizon", r.horizon}, {"step", r.step}, {"seed", r.seed}});
  }
  return a;
}

json report_json(const EstimatorReport& r) {
  json j = rows_json({row_of(r)})[0];
  j["warnings"] = r.warnings;
  return j;
}

json dimension_json(const DimensionReport& d) {
  json j;
  j["box_dimension"] = d.box_dimension;
  j["fit_r_squared"] = d.fit_r_squared;
  j["radii"] = d.radii_used;
  j["box_counts"] = d.box_counts;
  j["moran_dimension"] = d.moran_dimension ? json(*d.moran_dimension) : json(nullptr);
  j["degenerate"] = d.degenerate;
  j["warnings"] = d.warnings;
  return j;
}

json local_json(const LocalDimensionReport& l) {
  return {{"slope", l.slope},   {"intercept", l.intercept},         {"r_squared", l.r_squared},
          {"radii", l.radii},   {"mean_log_mass", l.mean_log_mass}, {"centers", l.centers},
          {"low_confidence", l.low_confidence}};
}

// Result of a subcommand: either CSV text or a JSON document, plus any
// warnings worth repeating on stderr.
struct Output {
  std::string text;
  std::vector<std::string> warnings;
  int status = 0;
};

Output emit_rows(const Config& c, const std::vector<Row>& rows, json extra = json::object()) {
  if (c.format == "csv") return {rows_csv(rows)};
  json j;
  j["results"] = rows_json(rows);
  for (auto& [k, v] : extra.items()) j[k] = v;
  return {j.dump(2) + "\n"};
}

EstimatorOptions options(const Config& c) {
  EstimatorOptions o;
  o.step = c.step;
  o.threads = c.threads;
  return o;
}

std::vector<double> radii_or(const Config& c, const std::vector<double>& fallback) {
  return c.radii.empty() ? fallback : c.radii;
}

Output run_drift(const Config& c) {
  const EstimatorReport r = drift_estimate(c.N.value_or(4096), c.horizon.value_or(50.0), c.step, c.seed, c.threads);
  Output o = emit_rows(c, {row_of(r)}, {{"warnings", r.warnings}});
  o.warnings = r.warnings;
  return o;
}

Output run_dynkin(const Config& c) {
  const EstimatorReport r = dynkin_check(c.horizon.value_or(1.0), c.N.value_or(10000), c.seed, c.step, c.threads);
  return emit_rows(c, {row_of(r)});
}

Output run_heat_kernel(const Config& c) {
  const double t = c.horizon.value_or(1.0);
  std::vector<Row> rows;
  for (double r : c.r.empty() ? std::vector<double>{0.0, 0.5, 1.0, 2.0, 4.0} : c.r) {
    rows.push_back({"heat_kernel(r=" + g17(r) + ")", heat_kernel({t, r}), 0.0, 0, t, 0.0, 0});
  }
  rows.push_back({"mass", heat_kernel_mass(t), 0.0, 0, t, 0.0, 0});
  if (c.N) {
    const RadialKsReport ks = heat_kernel_ks_check(t, *c.N, c.step, c.seed, c.threads);
    rows.push_back({"ks_distance", ks.ks, 0.0, ks.samples, t, ks.step, ks.seed});
  }
  return emit_rows(c, rows);
}

Output run_exponent(const Config& c) {
  const SuspensionFoliation f = make_preset(c.preset);
  const EstimatorReport r = lyapunov_exponent(f, c.horizon.value_or(50.0), c.N.value_or(2048), c.seed, options(c));
  Output o = emit_rows(c, {row_of(r)}, {{"preset", f.name()}, {"warnings", r.warnings}});
  o.warnings = r.warnings;
  return o;
}

Output run_entropy(const Config& c) {
  const SuspensionFoliation f = make_preset(c.preset);
  const EntropyReport e = kaimanovich_entropy(f, c.horizon.value_or(50.0), c.N.value_or(2048), c.seed, options(c));
  Row pointwise = row_of(e.estimate);
  pointwise.quantity = "entropy_pointwise";
  pointwise.value = e.pointwise;
  pointwise.std_error = e.pointwise_std_error;
  Output o = emit_rows(c, {row_of(e.estimate), pointwise}, {{"preset", f.name()}, {"warnings", e.estimate.warnings}});
  o.warnings = e.estimate.warnings;
  return o;
}

Output run_harmonic_measure(const Config& c) {
  const SuspensionFoliation f = make_preset(c.preset);
  const double horizon = c.horizon.value_or(50.0);
  const std::size_t N = c.N.value_or(4096);
  const FiberHistogram h = harmonic_measure(f, horizon, N, c.bins, c.seed, options(c));
  if (c.format == "csv") {
    std::string s = "bin,count,fraction\n";
    for (std::size_t b = 0; b < h.bins(); ++b) {
      s += std::to_string(b) + "," + std::to_string(h.counts()[b]) + "," +
           g17(static_cast<double>(h.counts()[b]) / static_cast<double>(h.total())) + "\n";
    }
    return {s};
  }
  json j;
  j["preset"] = f.name();
  j["fiber"] = to_string(f.fiber_type());
  j["N"] = N;
  j["horizon"] = horizon;
  j["step"] = c.step;
  j["seed"] = c.seed;
  j["bands"] = h.bands();
  j["sectors"] = h.sectors();
  j["counts"] = h.counts();
  j["chi_square_uniform"] = h.chi_square_uniform();
  if (!c.radii.empty()) j["local_dimension"] = local_json(local_dimension(h.points, c.radii));
  return {j.dump(2) + "\n"};
}

Output run_limit_set(const Config& c) {
  const SuspensionFoliation f = make_preset(c.preset);
  LimitSetOptions lo;
  lo.resolution = c.resolution > 0.0 ? c.resolution : preset_scales(f).resolution;
  const LimitSetSample s = sample_limit_set(f.rep(), c.depth, ProjectivePoint::from_complex(0.0), lo);
  if (c.format == "csv") {
    std::string out = "re,im\n";
    for (const auto& p : s.points) {
      const Complex z = p.affine();
      out += g17(z.real()) + "," + g17(z.imag()) + "\n";
    }
    return {out};
  }
  json pts = json::array();
  for (const auto& p : s.points) pts.push_back({p.affine().real(), p.affine().imag()});
  json j;
  j["preset"] = f.name();
  j["depth"] = c.depth;
  j["resolution"] = lo.resolution;
  j["count"] = s.points.size();
  j["points"] = std::move(pts);
  return {j.dump(1) + "\n"};
}

Output run_dimension(const Config& c) {
  const SuspensionFoliation f = make_preset(c.preset);
  const PresetScales sc = preset_scales(f);
  LimitSetOptions lo;
  lo.resolution = c.resolution > 0.0 ? c.resolution : sc.resolution;
  const LimitSetSample s = sample_limit_set(f.rep(), c.depth, ProjectivePoint::from_complex(0.0), lo);
  DimensionReport d = box_counting(s.points, radii_or(c, sc.box_radii));

  std::optional<MoranResult> moran;
  std::optional<IFSSystem> ifs;
  if (!f.circles().empty()) {
    const Chart ch = schottky_chart(f);
    ifs = build_holonomy_ifs(f, ch.center, ch.radius, first_return_words(f.rep(), {0, false}, 8));
    moran = moran_dimension(*ifs);
    d.moran_dimension = moran->dimension;
  }
  if (c.format == "csv") {
    std::vector<Row> rows = {{"box_dimension", d.box_dimension, 0.0, s.points.size(), 0.0, 0.0, 0}};
    if (moran) {
      rows.push_back({"moran_dimension", moran->dimension, 0.0, ifs->maps.size(), 0.0, 0.0, 0});
      rows.push_back({"moran_lower", moran->lower, 0.0, ifs->maps.size(), 0.0, 0.0, 0});
      rows.push_back({"moran_upper", moran->upper, 0.0, ifs->maps.size(), 0.0, 0.0, 0});
    }
    return {rows_csv(rows), d.warnings};
  }
  json j;
  j["preset"] = f.name();
  j["points"] = s.points.size();
  j["resolution"] = lo.resolution;
  j["box"] = dimension_json(d);
  if (moran) {
    j["ifs"] = {{"maps", ifs->maps.size()},
                {"kappa", ifs->kappa},
                {"min_separation", ifs->min_separation},
                {"moran", {{"dimension", moran->dimension}, {"lower", moran->lower}, {"upper", moran->upper}}}};
  }
  return {j.dump(2) + "\n", d.warnings};
}

Output run_verify_inequality(const Config& c) {
  const SuspensionFoliation f = make_preset(c.preset);
  InequalityParams p;
  p.horizon = c.horizon.value_or(p.horizon);
  p.N = c.N.value_or(p.N);
  p.harmonic_N = std::max(p.harmonic_N, p.N);
  p.step = c.step;
  p.seed = c.seed;
  p.depth = c.depth;
  p.resolution = c.resolution;
  p.threads = c.threads;
  const InequalityRun run = verify_dimension_inequality(f, p);
  const InequalityReport& r = run.report;
  if (c.format == "csv") {
    const auto n = p.N;
    return {rows_csv({{"d_hat", r.d_hat, 0.0, run.box.radii_used.size(), 0.0, 0.0, 0},
                      {"h_hat", r.h_hat, run.entropy ? run.entropy->estimate.std_error : 0.0, n, p.horizon, p.step, p.seed},
                      {"lambda_hat", r.lambda_hat, run.lyapunov.std_error, n, p.horizon, p.step, p.seed},
                      {"ratio", r.ratio, 0.0, n, p.horizon, p.step, p.seed},
                      {"margin", r.margin, 0.0, n, p.horizon, p.step, p.seed},
                      {"pass", r.pass ? 1.0 : 0.0, 0.0, n, p.horizon, p.step, p.seed}}),
            r.notes};
  }
  json j;
  j["preset"] = f.name();
  j["pass"] = r.pass;
  j["d_hat"] = r.d_hat;
  j["h_hat"] = r.h_hat;
  j["lambda_hat"] = r.lambda_hat;
  j["ratio"] = r.ratio;
  j["margin"] = r.margin;
  j["tolerance"] = r.tolerance;
  j["entropy_source"] = r.entropy_source;
  j["notes"] = r.notes;
  j["lyapunov"] = report_json(run.lyapunov);
  if (run.entropy) {
    j["entropy"] = report_json(run.entropy->estimate);
    j["entropy"]["pointwise"] = run.entropy->pointwise;
  }
  if (run.harmonic_dimension) j["harmonic_measure_dimension"] = local_json(*run.harmonic_dimension);
  j["box"] = dimension_json(run.box);
  return {j.dump(2) + "\n", r.notes};
}

Output run_jacobian(const Config& c) {
  const double t = c.horizon.value_or(1.0);
  const JacobianReport j = flow_jacobian_check(t, c.N.value_or(1 << 20), c.seed);
  return emit_rows(c, {{"area_ratio", j.ratio, j.std_error, j.samples, t, 0.0, c.seed},
                       {"expected", j.expected, 0.0, j.samples, t, 0.0, c.seed},
                       {"relative_error", j.relative_error, 0.0, j.samples, t, 0.0, c.seed}});
}

Output run_surface(const Config& c) {
  Integer g;
  try {
    g = Integer(c.genus);
  } catch (const std::exception&) {
    throw ParameterError("genus must be an integer, got " + c.genus);
  }
  const auto ctx = RuledSurfaceContext::for_genus(g);
  const DivisorClass K = canonical_class(ctx), E = ample_target(ctx);
  const WitnessCertificate w = reider_very_ample_witness(E, ctx);
  const DoubleCoverInvariants dc = double_cover_invariants(ctx);

  if (c.format == "text") {
    std::ostringstream os;
    os << "genus " << to_string(ctx.genus) << ", chi " << to_string(ctx.chi) << "\n"
       << "K_X = " << to_string(K) << "\n"
       << "E = " << to_string(E) << ", E + K_X = " << to_string(E + K)
       << (is_ample(E + K, ctx) ? " (ample)" : " (not ample)") << "\n"
       << "L = " << to_string(w.L) << ", 4L + K_X = " << to_string(w.four_L_plus_K)
       << (w.identity_holds ? " = 2E" : " != 2E") << "\n"
       << "double cover: chi = " << to_string(dc.chi_cover) << ", euler class = " << to_string(dc.euler_class_cover)
       << ", ratio = " << to_string(dc.ratio) << "\n";
    return {os.str()};
  }
  if (c.format == "csv") {
    std::string s = "quantity,value\n";
    for (const auto& [k, v] : std::vector<std::pair<std::string, std::string>>{
             {"genus", to_string(ctx.genus)},          {"chi", to_string(ctx.chi)},
             {"K_X", to_string(K)},                    {"E", to_string(E)},
             {"E_plus_K", to_string(E + K)},           {"L", to_string(w.L)},
             {"four_L_plus_K", to_string(w.four_L_plus_K)}, {"chi_cover", to_string(dc.chi_cover)},
             {"euler_class_cover", to_string(dc.euler_class_cover)}, {"ratio", to_string(dc.ratio)}}) {
      s += k + "," + cell(v) + "\n";
    }
    return {s};
  }
  json j;
  j["genus"] = to_string(ctx.genus);
  j["chi"] = to_string(ctx.chi);
  j["K_X"] = to_string(K);
  j["E"] = to_string(E);
  j["E_plus_K"] = to_string(E + K);
  j["E_plus_K_ample"] = is_ample(E + K, ctx);
  j["witness"] = {{"L", to_string(w.L)},
                  {"four_L_plus_K", to_string(w.four_L_plus_K)},
                  {"identity_holds", w.identity_holds},
                  {"L_ample", w.L_ample},
                  {"torsion_root_exists", w.torsion_root_exists}};
  j["double_cover"] = {{"chi", to_string(dc.chi_cover)},
                       {"euler_class", to_string(dc.euler_class_cover)},
                       {"ratio", to_string(dc.ratio)}};
  return {j.dump(2) + "\n"};
}

Output run_verify(const Config& c) {
  SuiteOptions opt;
  opt.seed = c.seed;
  opt.threads = c.threads;
  opt.tolerance_scale = c.tolerance_scale;
  if (c.filter_set) opt.filter = c.filter;
  opt.on_row = [](const CriterionRow& r) { print_row(std::cerr, r); };
  const std::vector<CriterionRow> rows = verify_suite(opt);

  Output o;
  for (const auto& r : rows) o.status = r.pass ? o.status : 1;
  if (c.format == "csv") {
    o.text = "id,name,expected,observed,tolerance,pass\n";
    for (const auto& r : rows) {
      o.text += r.id + "," + r.name + "," + cell(r.expected) + "," + cell(r.observed) + "," + cell(r.tolerance) +
                "," + (r.pass ? "true" : "false") + "\n";
    }
    return o;
  }
  json a = json::array();
  for (const auto& r : rows) {
    a.push_back({{"id", r.id}, {"name", r.name}, {"expected", r.expected}, {"observed", r.observed},
                 {"tolerance", r.tolerance}, {"pass", r.pass}});
  }
  o.text = json{{"seed", c.seed}, {"criteria", a}}.dump(2) + "\n";
  return o;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

json manifest(const Config& c, double wall) {
  json j;
  j["tool"] = "lamina";
  j["version"] = kVersion;
  j["timestamp"] = utc_now();
  j["wall_time_seconds"] = wall;
  j["config"] = echo(c);
  // Streams are keyed by (seed, purpose, path index), so the worker that
  // consumes a stream never affects its numbers.
  j["rng"] = {{"engine", "mt19937_64"},
              {"seeding", "seed_seq(seed low, seed high, purpose, index low, index high)"},
              {"purposes", {{"path", 1}, {"start", 2}, {"fiber", 3}, {"pilot", 4}, {"sample", 5}}},
              {"stream_index", "path or sample index, independent of the worker"}};
  return j;
}

int fail(int code, const std::string& what) {
  std::cerr << "error: " << what << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  Config c;
  CLI::App app{"Brownian motion, holonomy and dimension estimates for suspension laminations"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "key = value file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"drift", "mean radial speed d(o, B_t) / t"},
      {"dynkin", "mean of log phi(B_t) / t (horizon is t)"},
      {"heat-kernel", "heat kernel values, total mass and optional KS check (horizon is t)"},
      {"exponent", "Lyapunov exponent of the holonomy"},
      {"entropy", "heat-kernel entropy of the leaves"},
      {"harmonic-measure", "fiber histogram of the harmonic measure"},
      {"limit-set", "sample of the limit set"},
      {"dimension", "box-counting and Moran dimension of the limit set"},
      {"verify-inequality", "dimension >= entropy / |exponent| check"},
      {"jacobian", "area scaling of the geodesic flow (horizon is t)"},
      {"surface", "intersection-theory certificates for the ruled surface"},
      {"verify", "acceptance suite"},
  };
  for (const auto& [name, help] : commands) {
    app.add_subcommand(name, help)->callback([&c, name = name] { c.command = name; });
  }

  app.add_option("--preset", c.preset, "fuchsian-boundary | schottky | schottky(c,r) | trivial");
  app.add_option("--N", c.N, "number of paths or samples");
  app.add_option("--horizon", c.horizon, "time horizon (or t)");
  app.add_option("--step", c.step, "time step in (0, 0.1]");
  app.add_option("--seed", c.seed, "master seed");
  app.add_option("--bins", c.bins, "histogram bins");
  app.add_option("--depth", c.depth, "word-length cap for limit sets");
  app.add_option("--radii", c.radii, "radii for dimension fits")->delimiter(',');
  app.add_option("--r", c.r, "heat-kernel radii")->delimiter(',');
  app.add_option("--genus", c.genus, "genus of the base curve");
  app.add_option("--resolution", c.resolution, "limit-set resolution (0: preset default)");
  app.add_option("--output", c.output, "result file (default stdout)");
  app.add_option("--format", c.format, "csv | json | text (surface only)");
  app.add_option("--threads", c.threads, "worker threads (0: LAMINA_THREADS or all cores)");
  auto* filter = app.add_option("--filter", c.filter, "verify: comma-separated criterion ids or names (none: empty selection)")
                     ->expected(0, 1);
  app.add_option("--tolerance-scale", c.tolerance_scale, "verify: multiplies statistical tolerances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  c.filter_set = filter->count() > 0;

  if (c.format.empty()) c.format = c.command == "surface" ? "json" : "csv";
  if (c.format != "csv" && c.format != "json" && !(c.format == "text" && c.command == "surface")) {
    return fail(2, "unsupported format '" + c.format + "' for " + c.command);
  }

  std::ofstream file;
  if (!c.output.empty()) {
    file.open(c.output);
    if (!file) return fail(2, "cannot write " + c.output);
  }

  const auto t0 = std::chrono::steady_clock::now();
  Output out;
  try {
    // Preset names are checked up front so a typo fails before any work.
    if (c.command != "surface" && c.command != "verify") make_preset(c.preset);
    if (c.command == "drift") out = run_drift(c);
    else if (c.command == "dynkin") out = run_dynkin(c);
    else if (c.command == "heat-kernel") out = run_heat_kernel(c);
    else if (c.command == "exponent") out = run_exponent(c);
    else if (c.command == "entropy") out = run_entropy(c);
    else if (c.command == "harmonic-measure") out = run_harmonic_measure(c);
    else if (c.command == "limit-set") out = run_limit_set(c);
    else if (c.command == "dimension") out = run_dimension(c);
    else if (c.command == "verify-inequality") out = run_verify_inequality(c);
    else if (c.command == "jacobian") out = run_jacobian(c);
    else if (c.command == "surface") out = run_surface(c);
    else out = run_verify(c);
  } catch (const ParameterError& e) {
    return fail(2, e.what());
  } catch (const DependencyError& e) {
    return fail(2, e.what());
  } catch (const Error& e) {
    return fail(3, e.what());
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  for (const auto& w : out.warnings) std::cerr << "warning: " << w << '\n';
  if (c.output.empty()) {
    std::cout << out.text;
    return out.status;
  }
  file << out.text;
  std::ofstream m(c.output + ".manifest.json");
  if (!file || !m) return fail(2, "cannot write " + c.output);
  m << manifest(c, wall).dump(2) << '\n';
  return out.status;
}
