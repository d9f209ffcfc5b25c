#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "output.hpp"

namespace {

using namespace iwo;
using iwo::cli::Json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

const std::vector<std::pair<int, int>> kSweepSignatures = {{2, 1}, {3, 1}, {3, 2}, {2, 2}, {4, 2}, {4, 3}, {3, 3}, {5, 2}, {5, 3}, {4, 4}};

template <class T>
std::optional<T> parse_unsigned(std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) return std::nullopt;
  return value;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

double parse_real(const std::string& text) {
  if (text.find('/') != std::string::npos) return Rational::parse(text).to_double();
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) throw DomainError("not a number: '" + text + "'");
  return value;
}

struct Settings {
  bool pretty = false;
  std::optional<std::uint64_t> seed_flag;
  std::optional<std::size_t> samples_flag;

  /// flags > IWO_SEED / IWO_SAMPLES > defaults
  [[nodiscard]] SamplePlan plan() const {
    SamplePlan plan;
    if (seed_flag) {
      plan.seed = *seed_flag;
    } else if (const char* env = std::getenv("IWO_SEED")) {
      const auto v = parse_unsigned<std::uint64_t>(env);
      if (!v) throw UsageError(std::string("IWO_SEED is not a non-negative integer: '") + env + "'");
      plan.seed = *v;
    }
    if (samples_flag) {
      plan.per_stratum_count = *samples_flag;
    } else if (const char* env = std::getenv("IWO_SAMPLES")) {
      const auto v = parse_unsigned<std::size_t>(env);
      if (!v) throw UsageError(std::string("IWO_SAMPLES is not a non-negative integer: '") + env + "'");
      plan.per_stratum_count = *v;
    }
    return plan;
  }
};

class Timer {
 public:
  [[nodiscard]] double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void emit(const Settings& settings, const Json& env, const std::string& pretty_text) {
  if (settings.pretty) {
    std::cout << pretty_text;
  } else {
    std::cout << env.dump() << "\n";
  }
}

std::string pretty_header(const Json& env) {
  std::ostringstream os;
  os << env["command"].get<std::string>();
  if (!env["signature"].is_null()) os << " (" << env["signature"]["p"] << "," << env["signature"]["q"] << ")";
  os << "  [" << cli::fmt_csv(env["timingMs"].get<double>()) << " ms]\n";
  return os.str();
}

// --- decompose --------------------------------------------------------------

int cmd_decompose(const Settings& settings, int p, int q, bool with_bases) {
  Timer timer;
  const Signature sig(p, q);
  const IwasawaData data(sig);
  const auto cartan = cartan_decompose(sig);
  Json dims{{"so", data.so.size()}, {"k", cartan.k.size()}, {"p", cartan.p_cartan.size()},
            {"a", data.a.size()},   {"k0", data.k0.size()},  {"n", data.n.size()}};
  Json roots = Json::array();
  for (const auto& r : restricted_roots(sig)) {
    roots.push_back({{"label", r.label()}, {"coeffs", r.coeffs}, {"positive", r.positive}, {"multiplicity", r.multiplicity}});
  }
  Json payload{{"dims", dims}, {"roots", roots}};
  if (with_bases) {
    auto basis_json = [](const SubalgebraBasis& b) {
      Json out = Json::array();
      for (const auto& e : b.elements) out.push_back(cli::to_json(e.matrix()));
      return out;
    };
    payload["bases"] = {{"so", basis_json(data.so)}, {"k", basis_json(cartan.k)}, {"p", basis_json(cartan.p_cartan)},
                        {"a", basis_json(data.a)},   {"k0", basis_json(data.k0)}, {"n", basis_json(data.n)}};
  }
  const Json env = cli::envelope("decompose", sig, payload, timer.elapsed_ms());

  std::ostringstream os;
  os << pretty_header(env) << "  dimensions\n";
  for (const auto& [name, v] : dims.items()) os << "    " << cli::pad(name, 6) << v << "\n";
  os << "  restricted roots (positive first)\n";
  for (bool positive : {true, false})
    for (const auto& r : roots)
      if (r["positive"] == positive) os << "    " << cli::pad(r["label"].get<std::string>(), 10) << "mult " << r["multiplicity"] << "\n";
  emit(settings, env, os.str());
  return kExitOk;
}

// --- orbit ------------------------------------------------------------------

/// "trivial", "k0", or a comma list of rotation planes "i-j" with i < j <= p-q.
SubalgebraBasis parse_kprime(const IwasawaData& data, const std::string& spec) {
  if (spec == "trivial") return make_kprime(data.sig, {});
  if (spec == "k0") return data.k0;
  std::vector<LieElement> gens;
  for (const auto& plane : split(spec, ',')) {
    const auto ends = split(plane, '-');
    const auto i = ends.size() == 2 ? parse_unsigned<int>(ends[0]) : std::nullopt;
    const auto j = ends.size() == 2 ? parse_unsigned<int>(ends[1]) : std::nullopt;
    if (!i || !j) throw UsageError("--kprime expects trivial, k0, or planes like 1-2,1-3; got '" + spec + "'");
    if (*i < 1 || *j <= *i || *j > data.sig.p() - data.sig.q()) {
      throw UsageError("--kprime plane " + plane + " is not in k0: need 1 <= i < j <= p-q");
    }
    gens.push_back(detail::rotation(data.sig, *i, *j));
  }
  return make_kprime(data.sig, std::move(gens));
}

int cmd_orbit(const Settings& settings, int p, int q, const std::string& group_name, const std::string& point_text,
              const std::optional<std::string>& kprime_spec) {
  Timer timer;
  const Signature sig(p, q);
  const auto group = parse_group(group_name);
  if (!group) throw UsageError("unknown group '" + group_name + "' (N, A, K0, AN, K0AN, KprimeAN, SO)");
  const IwasawaData data(sig);
  const QVector x = parse_point(point_text, sig);
  if (x.is_zero()) throw UsageError("the orbit of the zero vector is a point; give a nonzero point");
  std::optional<SubalgebraBasis> kprime;
  if (*group == GroupSelector::KprimeAN) {
    kprime = parse_kprime(data, kprime_spec.value_or("k0"));
  } else if (kprime_spec) {
    throw UsageError("--kprime only applies to --group KprimeAN");
  }
  const auto report = orbit_report(data, *group, x, kprime);
  Json payload = cli::to_json(report);
  if (kprime) payload["kprime"] = {{"spec", kprime_spec.value_or("k0")}, {"dim", kprime->size()}};
  const Json env = cli::envelope("orbit", sig, payload, timer.elapsed_ms());

  std::ostringstream os;
  os << pretty_header(env);
  Json flat = payload;
  flat.erase("tangentBasis");
  cli::pretty_object(os, flat);
  emit(settings, env, os.str());
  return report.agrees ? kExitOk : kExitFailure;
}

// --- verify -----------------------------------------------------------------

int cmd_verify(const Settings& settings, std::optional<int> p, std::optional<int> q, const std::string& suite_name) {
  Timer timer;
  const auto suites = parse_suite(suite_name);
  const SamplePlan plan = settings.plan();
  std::vector<Signature> sigs;
  if (p.has_value() != q.has_value()) throw UsageError("verify takes both p and q, or neither for the full signature sweep");
  if (p) {
    sigs.emplace_back(*p, *q);
  } else {
    for (auto [pp, qq] : kSweepSignatures) sigs.emplace_back(pp, qq);
  }

  bool passed = true;
  Json runs = Json::array();
  std::ostringstream table;
  for (const auto& sig : sigs) {
    const auto results = run_suites(suites, sig, plan);
    const bool ok = all_passed(results);
    passed = passed && ok;
    Json list = Json::array();
    for (const auto& r : results) {
      list.push_back(cli::to_json(r));
      table << "  " << cli::pad(sig.str(), 8) << cli::pad(to_string(r.suite), 20) << cli::pad(to_string(r.status), 13)
            << cli::pad(std::to_string(r.checks_run) + " checks", 16) << r.failures.size() << " failures\n";
      for (const auto& f : r.failures) table << "      " << f.object << ": expected " << f.expected << ", got " << f.actual << "\n";
    }
    runs.push_back({{"signature", cli::to_json(sig)}, {"passed", ok}, {"suites", std::move(list)}});
  }
  Json payload{{"seed", plan.seed},
               {"samplesPerStratum", plan.per_stratum_count},
               {"suite", suite_name},
               {"passed", passed},
               {"runs", std::move(runs)}};
  std::optional<Signature> env_sig;
  if (sigs.size() == 1) env_sig = sigs.front();
  const Json env = cli::envelope("verify", env_sig, payload, timer.elapsed_ms());
  emit(settings, env, pretty_header(env) + table.str() + (passed ? "  PASSED\n" : "  FAILED\n"));
  return passed ? kExitOk : kExitFailure;
}

// --- flow -------------------------------------------------------------------

/// FAMILY:INDEX picks a basis element (0-based) of so, k, p, a, k0 or n;
/// FAMILY@c0,c1,... combines the family basis with rational coefficients;
/// a:c1,...,cq gives the a element with those parameters.
LieElement parse_generator(const Signature& sig, const std::string& spec) {
  const auto sep = spec.find_first_of(":@");
  if (sep == std::string::npos) throw UsageError("--gen expects FAMILY:INDEX or FAMILY@coefficients, got '" + spec + "'");
  const std::string family = spec.substr(0, sep);
  const std::string rest = spec.substr(sep + 1);
  const auto cartan = cartan_decompose(sig);
  const std::map<std::string, SubalgebraBasis> families{{"so", so_basis(sig)},   {"k", cartan.k},         {"p", cartan.p_cartan},
                                                        {"a", build_a(sig)},     {"k0", build_k0(sig)},   {"n", build_n(sig)}};
  const auto it = families.find(family);
  if (it == families.end()) throw UsageError("unknown generator family '" + family + "' (so, k, p, a, k0, n)");
  const auto& basis = it->second;
  const bool coefficients = spec[sep] == '@' || family == "a";
  if (!coefficients) {
    const auto index = parse_unsigned<std::size_t>(rest);
    if (!index) throw UsageError("--gen index must be a non-negative integer, got '" + rest + "'");
    if (*index >= basis.size()) {
      throw UsageError("--gen " + family + ":" + rest + " is out of range; " + family + " has " + std::to_string(basis.size()) + " basis elements");
    }
    return basis.elements[*index];
  }
  const auto parts = split(rest, ',');
  if (parts.size() != basis.size()) {
    throw UsageError("--gen " + family + " expects " + std::to_string(basis.size()) + " coefficients, got " + std::to_string(parts.size()));
  }
  QMatrix m(sig.dim(), sig.dim());
  for (std::size_t i = 0; i < parts.size(); ++i) m += Rational::parse(parts[i]) * basis.elements[i].matrix();
  return {sig, m};
}

std::vector<double> parse_t_range(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw UsageError("--t expects TMIN:TMAX:STEPS, got '" + text + "'");
  const auto steps = parse_unsigned<std::size_t>(parts[2]);
  if (!steps) throw UsageError("--t step count must be a positive integer, got '" + parts[2] + "'");
  return t_grid(parse_real(parts[0]), parse_real(parts[1]), *steps);
}

int cmd_flow(const Settings& settings, int p, int q, const std::string& gen_spec, const std::string& point_text, const std::string& t_spec,
             const std::string& format) {
  Timer timer;
  const Signature sig(p, q);
  const LieElement gen = parse_generator(sig, gen_spec);
  const auto coords = split(point_text, ',');
  if (coords.size() != sig.dim()) throw ShapeError("point has " + std::to_string(coords.size()) + " coordinates, expected " + std::to_string(sig.dim()));
  RVector x(sig.dim());
  for (std::size_t i = 0; i < coords.size(); ++i) x[i] = parse_real(coords[i]);
  const auto grid = parse_t_range(t_spec);
  const auto samples = flow_curve(gen, x, grid);

  if (format == "csv") {
    std::cout << cli::flow_csv(samples, sig.dim());
    return kExitOk;
  }
  double worst = 0.0;
  Json rows = Json::array();
  for (const auto& s : samples) {
    worst = std::max(worst, s.norm_residual);
    rows.push_back({{"t", s.t}, {"point", cli::to_json(s.point)}, {"residual", s.norm_residual}});
  }
  Json payload{{"generator", gen_spec}, {"generatorMatrix", cli::to_json(gen.matrix())}, {"point", cli::to_json(x)},
               {"samples", std::move(rows)}, {"maxResidual", worst}};
  const Json env = cli::envelope("flow", sig, payload, timer.elapsed_ms());

  std::ostringstream os;
  os << pretty_header(env) << "  generator " << gen_spec << ", max residual " << cli::fmt_csv(worst) << "\n";
  for (const auto& s : samples) {
    os << "  t=" << cli::pad(cli::fmt_csv(s.t), 8);
    for (std::size_t i = 0; i < sig.dim(); ++i) os << " " << cli::pad(cli::fmt_csv(s.point[i]), 24);
    os << "\n";
  }
  emit(settings, env, os.str());
  return kExitOk;
}

// --- sample -----------------------------------------------------------------

int cmd_sample(const Settings& settings, int p, int q) {
  Timer timer;
  const Signature sig(p, q);
  const SamplePlan plan = settings.plan();
  const auto set = sample_points(sig, plan);
  Json points = Json::array();
  std::map<std::string, std::size_t> counts;
  for (const auto& s : set.points) {
    points.push_back(cli::to_json(s));
    ++counts[to_string(s.stratum)];
  }
  Json payload{{"seed", plan.seed},
               {"samplesPerStratum", plan.per_stratum_count},
               {"coordinateRange", plan.coordinate_range},
               {"countsByStratum", counts},
               {"skipped", set.skipped},
               {"points", std::move(points)}};
  const Json env = cli::envelope("sample", sig, payload, timer.elapsed_ms());

  std::ostringstream os;
  os << pretty_header(env);
  for (const auto& [key, n] : counts) os << "  " << cli::pad(key, 8) << n << " points\n";
  for (const auto& note : set.skipped) os << "  skipped: " << note << "\n";
  for (const auto& s : set.points) {
    os << "  " << cli::pad(to_string(s.stratum), 8) << cli::pad(format_point(s.point), 40) << (s.deterministic ? s.note : "") << "\n";
  }
  emit(settings, env, os.str());
  return kExitOk;
}

/// CLI11 reads "-1:1:11" after an option as a new flag; glue such values to
/// their option with '=' so negative numbers pass through.
std::vector<std::string> glue_negative_values(int argc, char** argv) {
  static const std::vector<std::string> kValueOptions = {"--point", "--t", "--gen"};
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    const bool takes_value = std::find(kValueOptions.begin(), kValueOptions.end(), arg) != kValueOptions.end();
    if (takes_value && i + 1 < argc && argv[i + 1][0] == '-') {
      args.push_back(arg + "=" + argv[++i]);
    } else {
      args.push_back(arg);
    }
  }
  std::reverse(args.begin(), args.end());  // CLI11 consumes the vector from the back
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iwasawa decomposition of so(p,q) and orbit dimensions on R^{p,q}, checked by exact rank."};
  app.footer(
      "Points on exact commands are comma-separated rationals such as 1/2,-3,0.\n"
      "Configuration precedence: command-line flags > environment (IWO_SEED, IWO_SAMPLES) > defaults (seed 7, 50 samples per stratum).\n"
      "Exit codes: 0 success, 1 verification failure, 2 usage or parse error.");
  app.require_subcommand(1);
  app.fallthrough();

  Settings settings;
  app.add_flag("--pretty", settings.pretty, "Human-readable table instead of JSON");

  int p = 0;
  int q = 0;
  auto add_signature = [&](CLI::App* sub, bool required) {
    auto* po = sub->add_option("p", p, "Positive index of the form")->check(CLI::PositiveNumber);
    auto* qo = sub->add_option("q", q, "Negative index of the form")->check(CLI::PositiveNumber);
    if (required) {
      po->required();
      qo->required();
    }
    return std::pair{po, qo};
  };
  auto add_sampling = [&](CLI::App* sub) {
    sub->add_option("--seed", settings.seed_flag, "Sample seed (env IWO_SEED, default 7)");
    sub->add_option("--samples", settings.samples_flag, "Random points per stratum (env IWO_SAMPLES, default 50)");
  };

  auto* decompose = app.add_subcommand("decompose", "Dimensions and restricted roots of the Iwasawa decomposition");
  add_signature(decompose, true);
  bool with_bases = false;
  decompose->add_flag("--bases", with_bases, "Include basis matrices of so, k, p, a, k0 and n");

  auto* orbit = app.add_subcommand("orbit", "Orbit dimension, stratum and descriptor of one point");
  add_signature(orbit, true);
  std::string group = "N";
  std::string point;
  std::optional<std::string> kprime;
  orbit->add_option("--group", group, "N, A, K0, AN, K0AN, KprimeAN or SO")->capture_default_str();
  orbit->add_option("--point", point, "p+q rationals, comma-separated")->required();
  orbit->add_option("--kprime", kprime, "For KprimeAN: trivial, k0 (default), or planes like 1-2,1-3");

  auto* verify = app.add_subcommand("verify", "Run verification suites; without p q, sweep the standard signature list");
  auto [vp, vq] = add_signature(verify, false);
  std::string suite = "all";
  verify->add_option("--suite", suite, "Suite name or 'all'")->capture_default_str();
  add_sampling(verify);

  auto* flow = app.add_subcommand("flow", "Sample the curve t -> exp(tX) x");
  add_signature(flow, true);
  std::string gen_spec;
  std::string flow_point;
  std::string t_spec = "-3:3:61";
  std::string format = "json";
  flow->add_option("--gen", gen_spec, "FAMILY:INDEX, FAMILY@c0,c1,..., or a:c1,...,cq (families so, k, p, a, k0, n)")->required();
  flow->add_option("--point", flow_point, "p+q numbers, comma-separated")->required();
  flow->add_option("--t", t_spec, "TMIN:TMAX:STEPS")->capture_default_str();
  flow->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  auto* sample = app.add_subcommand("sample", "Dump the stratified sample plan");
  add_signature(sample, true);
  add_sampling(sample);

  try {
    auto args = glue_negative_values(argc, argv);
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*decompose) return cmd_decompose(settings, p, q, with_bases);
    if (*orbit) return cmd_orbit(settings, p, q, group, point, kprime);
    if (*verify) {
      const bool has_sig = vp->count() > 0;
      return cmd_verify(settings, has_sig ? std::optional<int>(p) : std::nullopt, vq->count() > 0 ? std::optional<int>(q) : std::nullopt, suite);
    }
    if (*flow) return cmd_flow(settings, p, q, gen_spec, flow_point, t_spec, format);
    if (*sample) return cmd_sample(settings, p, q);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
