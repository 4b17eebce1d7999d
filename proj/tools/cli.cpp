#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <CLI11.hpp>

#include "bgpolymer/bgpolymer.hpp"
#include "bgpolymer/io.hpp"

namespace bgpolymer::cli {
namespace {

namespace fs = std::filesystem;

// Bad flags, config or model input: exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Pass/fail thresholds of the deterministic suites.
constexpr double kInvolutionTol = 1e-10;
constexpr double kRatioTol = 1e-14;
constexpr double kJacobianTol = 1e-5;
constexpr double kQTol = 1e-8;
constexpr double kSplitTol = 1e-9;
constexpr double kPolynomialTol = 1e-7;

struct RunConfig {
  std::string command;
  std::string config_path;

  std::string model = "log-gamma";
  std::optional<double> a, b, mu, lambda, beta;
  bool reflected = false;

  std::uint64_t seed = 42;
  double level = 1e-3;
  std::string output;
  std::string format;
  unsigned workers = 0;

  // simulate
  std::size_t m = 50;
  std::size_t n = 50;
  std::size_t replicas = 1;
  std::vector<std::size_t> site;
  bool all_ones = false;

  // verify
  std::string suite = "all";
  std::string perturb;
  std::size_t points = 10000;
  std::size_t samples = 100000;
  std::size_t lattice_replicas = 10000;

  // characterize
  std::string which;
  std::vector<double> params;
  std::optional<double> rate_b;
};

// ---------------------------------------------------------------------------
// config file handling: JSON keys become flags placed before the user's own,
// so flags given on the command line win (options keep the last value).

std::string scalar_to_arg(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string joined;
    for (const auto& e : v) {
      if (!joined.empty()) joined += ',';
      joined += scalar_to_arg(e);
    }
    return joined;
  }
  return v.dump();
}

std::vector<std::string> config_to_args(const json& config) {
  std::vector<std::string> args;
  for (const auto& [key, value] : config.items()) {
    if (key == "command") continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back("--" + key);
      continue;
    }
    args.push_back("--" + key);
    args.push_back(scalar_to_arg(value));
  }
  return args;
}

json load_json_file(const std::string& path, std::string_view what) {
  std::ifstream in(path);
  if (!in) throw UsageError(std::string(what) + " '" + path + "' cannot be opened");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(std::string(what) + " '" + path + "' is not valid JSON: " + e.what());
  }
}

// Rewrites argv with the --config file's entries spliced in after the subcommand.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  const json config = load_json_file(path, "config file");
  if (!config.is_object()) throw UsageError("config file must hold a JSON object");
  std::vector<std::string> out{args[0]};
  std::size_t rest = 1;
  if (args.size() > 1 && args[1].rfind("-", 0) != 0) {
    out.push_back(args[1]);
    rest = 2;
  } else if (config.contains("command")) {
    out.push_back(config.at("command").get<std::string>());
  }
  for (auto& a : config_to_args(config)) out.push_back(std::move(a));
  out.insert(out.end(), args.begin() + static_cast<std::ptrdiff_t>(rest), args.end());
  return out;
}

// ---------------------------------------------------------------------------
// model resolution

ModelSpec resolve_model(const RunConfig& c) {
  ModelSpec m;
  if (const auto basic = parse_basic_model(c.model)) {
    m = preset(*basic);
  } else if (fs::exists(c.model)) {
    try {
      m = model_from_json(load_json_file(c.model, "model file"));
    } catch (const ParameterError& e) {
      throw UsageError(e.what());
    }
  } else {
    throw UsageError("model '" + c.model +
                     "' is neither a preset (log-gamma, strict-weak, beta, inverse-beta) nor a file");
  }
  if (c.a) m.a = *c.a;
  if (c.b) m.b = *c.b;
  if (c.mu) m.mu = *c.mu;
  if (c.lambda) m.lambda = *c.lambda;
  if (c.beta) m.beta = *c.beta;
  if (c.reflected) m.reflected = true;
  try {
    m.validate();
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  return m;
}

double parse_signed(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw UsageError("'" + std::string(text) + "' is not a number");
  }
  return v;
}

/*
 * --perturb KEY=DELTA builds a deliberately non-invariant triple (h unchanged).
 *   r1|r2|y.shape1|shape2=DELTA   shifts one shape of one coordinate law
 *   mu|lambda|beta=DELTA          recomputes the triple with the shifted
 *                                 parameter and swaps in only the first of
 *                                 Y, R2, R1 whose law changes
 */
InvariantModel apply_perturbation(const ModelSpec& spec, const std::string& text) {
  InvariantModel im = invariant_model(spec);
  if (text.empty()) return im;
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw UsageError("--perturb expects KEY=DELTA, got '" + text + "'");
  const std::string key = text.substr(0, eq);
  const double delta = parse_signed(std::string_view(text).substr(eq + 1));
  try {
    const auto dot = key.find('.');
    if (dot != std::string::npos) {
      const std::string coord = key.substr(0, dot);
      const std::string shape = key.substr(dot + 1);
      if (shape != "shape1" && shape != "shape2") throw UsageError("unknown shape '" + shape + "'");
      const int which = shape == "shape1" ? 1 : 2;
      AffineLaw* law = coord == "r1" ? &im.triple.r1 : coord == "r2" ? &im.triple.r2
                       : coord == "y" ? &im.triple.y : nullptr;
      if (!law) throw UsageError("unknown coordinate '" + coord + "'");
      *law = perturb_shape(*law, which, delta);
      return im;
    }
    ModelSpec shifted = spec;
    if (key == "mu") shifted.mu += delta;
    else if (key == "lambda") shifted.lambda += delta;
    else if (key == "beta") shifted.beta += delta;
    else throw UsageError("unknown perturbation key '" + key + "'");
    const StationaryTriple other = stationary_triple(shifted);
    if (!(other.y == im.triple.y)) im.triple.y = other.y;
    else if (!(other.r2 == im.triple.r2)) im.triple.r2 = other.r2;
    else im.triple.r1 = other.r1;
  } catch (const ParameterError& e) {
    throw UsageError(std::string("perturbation gives invalid parameters: ") + e.what());
  }
  return im;
}

json resolved_config(const RunConfig& c, const std::optional<ModelSpec>& model) {
  json j = {{"command", c.command}, {"seed", c.seed}};
  if (model) j["model"] = to_json(*model);
  return j;
}

// ---------------------------------------------------------------------------
// output

void emit(const RunConfig& c, std::ostream& out, const std::string& content) {
  if (c.output.empty()) {
    out << content;
    return;
  }
  atomic_write(c.output, content);
}

struct Check {
  TestReport report;
  json extra = json::object();
};

json check_json(const Check& c) {
  json j = to_json(c.report);
  for (const auto& [k, v] : c.extra.items()) j[k] = v;
  return j;
}

void print_table(std::ostream& out, const std::vector<Check>& checks) {
  std::size_t width = 4;
  for (const auto& c : checks) width = std::max(width, c.report.name.size());
  std::size_t passed = 0;
  for (const auto& c : checks) {
    const auto& r = c.report;
    passed += r.pass ? 1 : 0;
    std::ostringstream stat;
    stat << std::setprecision(4) << r.statistic;
    std::ostringstream thr;
    thr << std::setprecision(4) << r.threshold;
    out << (r.pass ? "PASS  " : "FAIL  ") << std::left << std::setw(static_cast<int>(width) + 2)
        << r.name << "stat=" << std::setw(12) << stat.str() << " threshold=" << std::setw(10)
        << thr.str();
    if (r.p_value < 1.0) out << " p=" << std::setprecision(3) << r.p_value;
    out << '\n';
  }
  out << "summary: " << passed << "/" << checks.size() << " checks passed\n";
}

int report_checks(const RunConfig& c, const json& header, const std::vector<Check>& checks,
                  std::ostream& out) {
  std::string lines = header.dump() + '\n';
  for (const auto& ch : checks) lines += check_json(ch).dump() + '\n';
  const std::string format = c.format.empty() ? "table" : c.format;
  if (!c.output.empty()) atomic_write(c.output, lines);
  if (format == "json") {
    if (c.output.empty()) out << lines;
  } else {
    print_table(out, checks);
  }
  const bool ok = std::all_of(checks.begin(), checks.end(), [](const Check& ch) { return ch.report.pass; });
  return ok ? kPass : kCheckFailed;
}

Check threshold_check(std::string name, double value, double tol, std::uint64_t seed,
                      std::size_t n_points, json extra = json::object()) {
  Check ch;
  ch.report.name = std::move(name);
  ch.report.statistic = value;
  ch.report.threshold = tol;
  ch.report.n1 = n_points;
  ch.report.seed = seed;
  ch.report.pass = value < tol;
  ch.extra = std::move(extra);
  return ch;
}

// ---------------------------------------------------------------------------
// verify suites

void suite_involution(const InvariantModel& im, const RunConfig& c, std::vector<Check>& out) {
  const DomainSpec d = im.domain();
  const auto inv = involution_check(d, c.points, derive_seed(c.seed, 11));
  out.push_back(threshold_check("involution T(T(x)) = x", inv.max_roundtrip, kInvolutionTol, c.seed,
                                inv.n_points));
  out.push_back(threshold_check("ratio persistence", inv.max_ratio, kRatioTol, c.seed, inv.n_points));
  const auto jac = jacobian_check(d, std::min<std::size_t>(c.points, 1000), derive_seed(c.seed, 12));
  Check entries = threshold_check("jacobian entries vs finite differences", jac.max_entry, kJacobianTol,
                                  c.seed, jac.n_points, {{"zero_violations", jac.zero_violations}});
  entries.report.pass = entries.report.pass && jac.zero_violations == 0;
  out.push_back(std::move(entries));
  out.push_back(threshold_check("jacobian determinant", jac.max_det, kJacobianTol, c.seed, jac.n_points));
}

void suite_q(const InvariantModel& im, const json& model_json, const RunConfig& c,
             std::vector<Check>& out) {
  const auto r = q_invariance_check(DensityTriple::from(im), c.points, derive_seed(c.seed, 21));
  out.push_back(threshold_check("q-invariance", r.max_abs, kQTol, c.seed, r.n_points,
                                {{"model", model_json}, {"n_points", r.n_points},
                                 {"max_discrepancy", r.max_abs}, {"max_relative", r.max_relative}}));
}

void suite_identity(const InvariantModel& im, const json& model_json, const RunConfig& c,
                    std::vector<Check>& out) {
  const DensityTriple t = DensityTriple::from(im);
  const PointPlan plan(t, derive_seed(c.seed, 31));
  double split = 0.0;
  double poly = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 0; used < c.points; ++k) {
    const InvolutionPoint p = plan.point(k);
    if (!t.in_support(p) || !in_involution_domain(im.h, p)) continue;
    try {
      split = std::max(split, std::abs(split_identity_residual(t, p).residual()));
    } catch (const DomainError&) {
      // a perturbed triple may send T3 outside Y's support
      split = std::numeric_limits<double>::infinity();
    }
    poly = std::max(poly, polynomial_identity_residual(t, p.ratio(), p.y).relative());
    ++used;
  }
  out.push_back(threshold_check("split identity", split, kSplitTol, c.seed, used,
                                {{"model", model_json}, {"n_points", used}, {"max_discrepancy", split}}));
  out.push_back(threshold_check("polynomial identity (relative)", poly, kPolynomialTol, c.seed, used,
                                {{"model", model_json}, {"n_points", used}, {"max_discrepancy", poly}}));
}

void add_reports(const std::vector<TestReport>& reports, std::vector<Check>& out) {
  for (const auto& r : reports) out.push_back({r, json::object()});
}

void suite_stationarity(const InvariantModel& im, const RunConfig& c, std::vector<Check>& out) {
  for (Site x : {Site{1, 1}, Site{2, 5}, Site{10, 10}}) {
    add_reports(stationarity_check(im, x, c.lattice_replicas, derive_seed(c.seed, 40 + x.i), c.level,
                                   c.workers),
                out);
  }
  // Analytic E[log R] needs unshifted laws with positive scale.
  const auto& t = im.triple;
  if (t.r1.shift() == 0.0 && t.r2.shift() == 0.0 && t.r1.scale() > 0.0 && t.r2.scale() > 0.0) {
    out.push_back({log_Z_mean_check(im, 20, 20, c.lattice_replicas, derive_seed(c.seed, 50), 4.0,
                                    c.workers),
                   json::object()});
  }
}

void suite_characterization(const RunConfig& c, std::vector<Check>& out) {
  add_reports(characterization_check(Characterization::Lukacs, 2, 3, 1, c.samples,
                                     derive_seed(c.seed, 61), c.level),
              out);
  add_reports(characterization_check(Characterization::LukacsCorollary, 2, 3, 1, c.samples,
                                     derive_seed(c.seed, 62), c.level),
              out);
  add_reports(characterization_check(Characterization::SeshadriWesolowski, 1, 1, 1, c.samples,
                                     derive_seed(c.seed, 63), c.level),
              out);
}

// ---------------------------------------------------------------------------
// commands

int cmd_classify(const RunConfig& c, std::ostream& out) {
  if (!c.a || !c.b) throw UsageError("classify needs --a and --b");
  const ModelCase mc = classify(*c.a, *c.b, c.reflected);
  const json header = artifact_header("classify", c.seed,
                                      {{"command", "classify"}, {"a", *c.a}, {"b", *c.b},
                                       {"reflected", c.reflected}});
  json result = header;
  result["case"] = case_tag(mc);
  result["description"] = case_description(mc);
  std::ostringstream text;
  text << case_description(mc) << '\n';
  if (mc != ModelCase::Invalid) {
    const auto p = default_parameters(underlying_basic_model(mc));
    ModelSpec spec{*c.a, *c.b, c.mu.value_or(p[0]), c.lambda.value_or(p[1]), c.beta.value_or(p[2]),
                   c.reflected};
    try {
      spec.validate();
    } catch (const ParameterError& e) {
      throw UsageError(e.what());
    }
    const InvariantModel im = invariant_model(spec);
    text << "h(y) = " << *c.a << " + " << *c.b << "*y\n";
    text << "parameters: mu=" << spec.mu << " lambda=" << spec.lambda << " beta=" << spec.beta << '\n';
    text << "triple (R1, R2, Y): " << describe(im.triple) << '\n';
    text << "domain: D" << (im.sign == DomainSign::plus ? '+' : '-') << '\n';
    result["model"] = to_json(spec);
    result["triple"] = to_json(im.triple);
    result["domain"] = im.sign == DomainSign::plus ? "D+" : "D-";
  }
  emit(c, out, c.format == "json" ? result.dump(2) + '\n' : text.str());
  return kPass;
}

int cmd_simulate(const RunConfig& c, std::ostream& out) {
  if (c.m == 0 || c.n == 0) throw UsageError("--m and --n must be at least 1");
  if (c.replicas == 0) throw UsageError("--replicas must be at least 1");
  if (!c.site.empty() && c.site.size() != 2) throw UsageError("--site expects i,j");

  if (c.all_ones) {
    json cfg = {{"command", "simulate"}, {"all_ones", true}, {"m", c.m}, {"n", c.n}};
    json doc = artifact_header("simulate", c.seed, cfg);
    doc["field"] = to_json(sweep(EdgeWeights::all_ones(c.m, c.n)));
    emit(c, out, doc.dump() + '\n');
    return kPass;
  }

  const ModelSpec model = resolve_model(c);
  json cfg = resolved_config(c, model);
  cfg["m"] = c.m;
  cfg["n"] = c.n;
  cfg["replicas"] = c.replicas;
  if (!c.site.empty()) cfg["site"] = c.site;
  json header = artifact_header("simulate", c.seed, cfg);

  if (!c.site.empty()) {
    const Site x{c.site[0], c.site[1]};
    if (x.i == 0 || x.j == 0) throw UsageError("--site must be interior (i, j >= 1)");
    const auto samples = interior_ratio_samples(model, x, c.replicas, c.seed, c.workers);
    if (c.format == "json") {
      json rows = json::array();
      for (const auto& s : samples) rows.push_back({{"replica", s.replica}, {"R1", s.r1}, {"R2", s.r2}});
      header["site"] = {x.i, x.j};
      header["samples"] = std::move(rows);
      emit(c, out, header.dump() + '\n');
    } else {
      std::ostringstream csv;
      csv.imbue(std::locale::classic());
      csv << "# command=simulate version=" << kVersion << " seed=" << c.seed
          << " config_hash=" << config_hash(cfg) << '\n';
      write_ratio_csv(csv, x, samples);
      emit(c, out, csv.str());
    }
    return kPass;
  }

  if (c.replicas == 1) {
    header["field"] = to_json(simulate_field(model, c.m, c.n, c.seed));
  } else {
    header["log_Z"] = log_Z_samples(model, c.m, c.n, c.replicas, c.seed, c.workers);
    try {
      header["expected_log_Z"] = expected_log_Z(model, c.m, c.n);
    } catch (const ParameterError&) {
      // no closed form for shifted or reflected boundary laws
    }
  }
  emit(c, out, header.dump() + '\n');
  return kPass;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  static const std::vector<std::string> kSuites{"involution", "q", "identity", "invariance",
                                                "stationarity", "characterization"};
  if (c.suite != "all" && std::find(kSuites.begin(), kSuites.end(), c.suite) == kSuites.end()) {
    throw UsageError("unknown suite '" + c.suite + "'");
  }
  if (c.points == 0 || c.samples < 1000 || c.lattice_replicas < 2) {
    throw UsageError("--points must be >= 1, --samples >= 1000, --replicas >= 2");
  }
  const ModelSpec model = resolve_model(c);
  const InvariantModel im = apply_perturbation(model, c.perturb);
  json cfg = resolved_config(c, model);
  cfg["suite"] = c.suite;
  cfg["perturb"] = c.perturb;
  cfg["points"] = c.points;
  cfg["samples"] = c.samples;
  cfg["replicas"] = c.lattice_replicas;
  cfg["level"] = c.level;
  const json header = artifact_header("verify", c.seed, cfg);
  json model_json = to_json(model);
  if (!c.perturb.empty()) model_json["perturb"] = c.perturb;

  auto wants = [&](std::string_view s) { return c.suite == "all" || c.suite == s; };
  std::vector<Check> checks;
  if (wants("involution")) suite_involution(im, c, checks);
  if (wants("q")) suite_q(im, model_json, c, checks);
  if (wants("identity")) suite_identity(im, model_json, c, checks);
  if (wants("invariance")) {
    add_reports(invariance_suite(im.triple, im.h, c.samples, derive_seed(c.seed, 70), c.level), checks);
  }
  if (wants("stationarity")) suite_stationarity(im, c, checks);
  if (wants("characterization")) suite_characterization(c, checks);
  return report_checks(c, header, checks, out);
}

int cmd_characterize(const RunConfig& c, std::ostream& out) {
  Characterization which{};
  try {
    which = parse_characterization(c.which);
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  std::vector<double> p = c.params;
  if (p.empty()) {
    p = which == Characterization::SeshadriWesolowski ? std::vector<double>{1, 1, 1}
                                                        : std::vector<double>{2, 3, 1};
  }
  if (p.size() != 3) throw UsageError("--params expects three values");
  if (c.samples < 1000) throw UsageError("--samples must be at least 1000");
  CharacterizationLaws laws{DistributionSpec::gamma(1, 1), DistributionSpec::gamma(1, 1),
                            DistributionSpec::gamma(1, 1), DistributionSpec::gamma(1, 1)};
  try {
    laws = characterization_laws(which, p[0], p[1], p[2]);
    if (c.rate_b) {
      if (which != Characterization::Lukacs) throw UsageError("--rate-b applies to lukacs only");
      laws.b = DistributionSpec::gamma(p[1], *c.rate_b);
    }
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  json cfg = {{"command", "characterize"}, {"which", c.which}, {"params", p}, {"seed", c.seed},
              {"samples", c.samples}, {"level", c.level}};
  if (c.rate_b) cfg["rate_b"] = *c.rate_b;
  std::vector<Check> checks;
  add_reports(characterization_check(which, laws, c.samples, c.seed, c.level), checks);
  return report_checks(c, artifact_header("characterize", c.seed, cfg), checks, out);
}

// ---------------------------------------------------------------------------

void add_model_options(CLI::App* app, RunConfig& c) {
  app->add_option("--model", c.model, "preset (log-gamma, strict-weak, beta, inverse-beta) or JSON file");
  app->add_option("--a", c.a, "h(y) = a + b y");
  app->add_option("--b", c.b);
  app->add_option("--mu", c.mu);
  app->add_option("--lambda", c.lambda);
  app->add_option("--beta", c.beta);
  app->add_flag("--reflected", c.reflected, "use the reflected beta model on D-");
}

void add_common_options(CLI::App* app, RunConfig& c) {
  app->add_option("--config", c.config_path, "JSON file of option values; flags override it");
  app->add_option("--seed", c.seed, "base seed (default 42)");
  app->add_option("--output", c.output, "write the artifact here instead of stdout");
  app->add_option("--format", c.format)->check(CLI::IsMember({"json", "csv", "table"}));
  app->add_option("--workers", c.workers, "threads for replicas (0 = all cores)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Simulation and verification of beta-gamma polymer models", "bgpolymer"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  auto* classify_cmd = app.add_subcommand("classify", "region of (a, b) and its stationary triple");
  add_common_options(classify_cmd, c);
  classify_cmd->add_option("--a", c.a)->required();
  classify_cmd->add_option("--b", c.b)->required();
  classify_cmd->add_option("--mu", c.mu);
  classify_cmd->add_option("--lambda", c.lambda);
  classify_cmd->add_option("--beta", c.beta);
  classify_cmd->add_flag("--reflected", c.reflected);

  auto* simulate_cmd = app.add_subcommand("simulate", "ratio fields and interior ratio samples");
  add_common_options(simulate_cmd, c);
  add_model_options(simulate_cmd, c);
  simulate_cmd->add_option("--m", c.m, "grid extent along i (default 50)");
  simulate_cmd->add_option("--n", c.n, "grid extent along j (default 50)");
  simulate_cmd->add_option("--replicas", c.replicas, "independent fields (default 1)");
  simulate_cmd->add_option("--site", c.site, "interior site i,j: emit (R1, R2) per replica")
      ->delimiter(',')
      ->expected(2)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  simulate_cmd->add_flag("--all-ones", c.all_ones, "every weight 1 (combinatorial debug mode)");

  auto* verify_cmd = app.add_subcommand("verify", "run verification suites; exit 1 on any failure");
  add_common_options(verify_cmd, c);
  add_model_options(verify_cmd, c);
  verify_cmd->add_option("--suite", c.suite,
                         "involution, q, identity, invariance, stationarity, characterization, all");
  verify_cmd->add_option("--perturb", c.perturb, "negative control, e.g. mu=+0.3 or y.shape1=0.5");
  verify_cmd->add_option("--points", c.points, "deterministic check points (default 10000)");
  verify_cmd->add_option("--samples", c.samples, "Monte Carlo sample size (default 100000)");
  verify_cmd->add_option("--replicas", c.lattice_replicas, "lattice replicas (default 10000)");
  verify_cmd->add_option("--level", c.level, "test level (default 0.001)");

  auto* char_cmd = app.add_subcommand("characterize", "characterization theorems by Monte Carlo");
  add_common_options(char_cmd, c);
  char_cmd->add_option("--which", c.which, "lukacs, lukacs-corollary, seshadri-wesolowski")->required();
  char_cmd->add_option("--params", c.params, "three positive parameters")->delimiter(',')->expected(3)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  char_cmd->add_option("--rate-b", c.rate_b, "lukacs only: rate of B (mismatch control)");
  char_cmd->add_option("--samples", c.samples, "sample size (default 100000)");
  char_cmd->add_option("--level", c.level, "test level (default 0.001)");

  try {
    std::vector<std::string> args(argv, argv + argc);
    if (args.empty()) args.emplace_back("bgpolymer");
    args = expand_config(std::move(args));
    std::vector<const char*> cargs;
    for (const auto& a : args) cargs.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kPass;
    } catch (const CLI::CallForVersion&) {
      out << kVersion << '\n';
      return kPass;
    } catch (const CLI::ParseError& e) {
      // Subcommand help is reported as a parse "error" with exit code 0.
      if (e.get_exit_code() == 0) {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return kPass;
      }
      err << "error: " << e.what() << '\n';
      return kUsageError;
    }
    auto* sub = app.get_subcommands().front();
    c.command = sub->get_name();
    if (sub == classify_cmd) return cmd_classify(c, out);
    if (sub == simulate_cmd) return cmd_simulate(c, out);
    if (sub == verify_cmd) return cmd_verify(c, out);
    return cmd_characterize(c, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "failed: " << e.what() << '\n';
    return kCheckFailed;
  }
}

}  // namespace bgpolymer::cli
