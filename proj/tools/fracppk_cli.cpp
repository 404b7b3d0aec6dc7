// fracppk command-line front end: pmf tables, sampling, field generation and
// verification suites. Exit codes: 0 ok, 1 verification failure, 2 usage error,
// 3 numerical error.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fracppk/fracppk.hpp"

namespace {

using namespace fracppk;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  int k = 1;
  double lambda = 1.0;
  double t = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  double mu = 0.0;
  double nu = 0.0;
  std::uint64_t seed = 1;
  std::string format = "csv";
  std::string output = "-";
};

OrderParams order_of(const Common& c) {
  OrderParams p{c.k, c.lambda};
  p.validate();
  return p;
}

FracParams frac_of(const Common& c) {
  FracParams f{c.alpha, c.beta, c.mu, c.nu};
  f.validate();
  return f;
}

ParamList common_params(const Common& c, const std::string& variant) {
  return {{"variant", variant},          {"k", std::to_string(c.k)},         {"lambda", format_double(c.lambda)},
          {"t", format_double(c.t)},     {"alpha", format_double(c.alpha)},  {"beta", format_double(c.beta)},
          {"mu", format_double(c.mu)},   {"nu", format_double(c.nu)},        {"seed", std::to_string(c.seed)}};
}

void add_common(CLI::App* app, Common& c, bool with_seed) {
  app->add_option("-k,--order", c.k, "order k (jump sizes 1..k)")->check(CLI::PositiveNumber);
  app->add_option("--lambda", c.lambda, "base rate lambda > 0");
  app->add_option("-t,--time", c.t, "time t > 0 (area for --variant field)");
  app->add_option("--alpha", c.alpha, "space index alpha in (0,1]");
  app->add_option("--beta", c.beta, "time index beta in (0,1]");
  app->add_option("--mu", c.mu, "space tempering mu >= 0");
  app->add_option("--nu", c.nu, "time tempering nu >= 0");
  if (with_seed) app->add_option("--seed", c.seed, "random seed");
  app->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("-o,--output", c.output, "output path ('-' for stdout)");
}

// ---------------------------------------------------------------- pmf

struct PmfArgs {
  Common c;
  std::string variant = "ppok";
  int nmax = 20;
};

int run_pmf(const PmfArgs& a) {
  const auto p = order_of(a.c);
  PmfTable table;
  if (a.variant == "ppok") {
    table = ppok_pmf_table(p, a.c.t, a.nmax);
  } else if (a.variant == "tfppok") {
    table = tfppok_pmf_table(p, a.c.beta, a.c.t, a.nmax);
  } else if (a.variant == "sfppok") {
    table = sfppok_pmf_table(p, a.c.alpha, a.c.t, a.nmax);
  } else {
    table = field_pmf_table(p, a.c.t, a.nmax);
  }
  write_atomic(a.c.output, a.c.format == "json" ? to_json(table).dump(2) + "\n" : to_csv(table));
  return kExitOk;
}

// ---------------------------------------------------------------- sample

struct SampleArgs {
  Common c;
  std::string variant = "ppok";
  std::size_t n = 1000;
  bool path = false;
  std::size_t grid_points = 100;
};

Variant variant_of(const std::string& v) {
  if (v == "ppok") return Variant::PPoK;
  if (v == "tfppok") return Variant::TF;
  if (v == "sfppok") return Variant::SF;
  return Variant::TTSF;
}

// Clock values at times t_i = i t / points, from one shared clock path.
std::vector<double> clock_path(const FracParams& f, Variant v, double t, std::size_t points, RngStream& rng) {
  std::vector<double> times(points);
  for (std::size_t i = 0; i < points; ++i) times[i] = t * static_cast<double>(i + 1) / static_cast<double>(points);
  std::vector<double> inner = times;
  const bool time_clock = (v == Variant::TF || v == Variant::TTSF) && f.beta < 1.0;
  if (time_clock) {
    const auto spec = (v == Variant::TTSF && f.nu > 0.0) ? SubordinatorSpec::tempered_stable(f.beta, f.nu)
                                                         : SubordinatorSpec::stable(f.beta);
    inner = sample_inverse_at(spec, times, kInverseStepFraction * t, rng);
  }
  const bool space_clock = (v == Variant::SF || v == Variant::TTSF) && f.alpha < 1.0;
  if (!space_clock) return inner;
  std::vector<double> outer(points);
  double level = 0.0, prev = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double dt = inner[i] - prev;
    if (dt > 0.0) {
      level += (v == Variant::TTSF && f.mu > 0.0) ? detail::tempered_increment(f.alpha, f.mu, dt, rng)
                                                  : detail::stable_increment(f.alpha, dt, rng);
    }
    prev = inner[i];
    outer[i] = level;
  }
  return outer;
}

int run_sample(const SampleArgs& a) {
  const auto p = order_of(a.c);
  const auto f = frac_of(a.c);
  const Variant v = variant_of(a.variant);
  if (!(a.c.t > 0.0)) throw UsageError("-t must be > 0");
  if (a.n < 1) throw UsageError("-N must be >= 1");
  const auto params = [&] {
    auto ps = common_params(a.c, a.variant);
    ps.emplace_back("N", std::to_string(a.n));
    ps.emplace_back("path", a.path ? "true" : "false");
    if (a.path) ps.emplace_back("grid_points", std::to_string(a.grid_points));
    return ps;
  }();
  const bool as_json = a.c.format == "json";

  if (!a.path) {
    const auto draws = parallel_draws<std::int64_t>(a.n, a.c.seed, 0x53, [&](RngStream& rng, std::size_t) {
      return sample_fractional(p, f, v, a.c.t, rng);
    });
    if (as_json) {
      auto j = json_envelope("sample", params);
      j["counts"] = draws;
      write_atomic(a.c.output, j.dump(2) + "\n");
    } else {
      std::string out = csv_header("sample", params) + "run,count\n";
      for (std::size_t i = 0; i < draws.size(); ++i) out += std::to_string(i) + "," + std::to_string(draws[i]) + "\n";
      write_atomic(a.c.output, out);
    }
    return kExitOk;
  }

  if (v == Variant::PPoK) {
    const auto paths = parallel_draws<MarkedEventPath>(a.n, a.c.seed, 0x50, [&](RngStream& rng, std::size_t) {
      return sample_ppok_path(p, a.c.t, rng);
    });
    if (as_json) {
      auto j = json_envelope("sample", params);
      j["paths"] = json::array();
      for (const auto& path : paths) j["paths"].push_back(to_json(path));
      write_atomic(a.c.output, j.dump(2) + "\n");
    } else {
      std::string out = csv_header("sample", params) + "run,time,mark,count\n";
      for (std::size_t r = 0; r < paths.size(); ++r) out += marked_path_rows_csv(paths[r], r);
      write_atomic(a.c.output, out);
    }
    return kExitOk;
  }

  if (a.grid_points < 1) throw UsageError("--grid-points must be >= 1");
  struct CountPath {
    std::vector<double> times;
    std::vector<std::int64_t> counts;
  };
  // The PPoK has independent increments, so counts along the clock path are
  // cumulative sums of independent draws over the clock increments.
  const auto paths = parallel_draws<CountPath>(a.n, a.c.seed, 0x51, [&](RngStream& rng, std::size_t) {
    CountPath cp;
    const auto clock = clock_path(f, v, a.c.t, a.grid_points, rng);
    std::int64_t count = 0;
    double prev = 0.0;
    for (std::size_t i = 0; i < clock.size(); ++i) {
      count += sample_ppok_count(p, clock[i] - prev, rng);
      prev = clock[i];
      cp.times.push_back(a.c.t * static_cast<double>(i + 1) / static_cast<double>(a.grid_points));
      cp.counts.push_back(count);
    }
    return cp;
  });
  if (as_json) {
    auto j = json_envelope("sample", params);
    j["paths"] = json::array();
    for (const auto& cp : paths) j["paths"].push_back({{"times", cp.times}, {"counts", cp.counts}});
    write_atomic(a.c.output, j.dump(2) + "\n");
  } else {
    std::string out = csv_header("sample", params) + "run,time,count\n";
    for (std::size_t r = 0; r < paths.size(); ++r) {
      for (std::size_t i = 0; i < paths[r].times.size(); ++i) {
        out += std::to_string(r) + "," + format_double(paths[r].times[i]) + "," + std::to_string(paths[r].counts[i]) + "\n";
      }
    }
    write_atomic(a.c.output, out);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- field

struct FieldArgs {
  Common c;
  std::vector<double> lower{0.0, 0.0};
  std::vector<double> upper{1.0, 1.0};
  std::size_t runs = 1;
  std::vector<std::string> queries;
  std::string counts_output;
};

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw UsageError("bad number '" + item + "'");
    } catch (const std::logic_error&) {
      throw UsageError("bad number '" + item + "'");
    }
  }
  return out;
}

// "l1,l2,...:u1,u2,..."
BoxRegion parse_box(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw UsageError("query box must look like l1,l2:u1,u2");
  BoxRegion b{parse_list(s.substr(0, colon)), parse_list(s.substr(colon + 1))};
  try {
    b.validate();
  } catch (const DomainError& e) {
    throw UsageError(std::string("query box: ") + e.what());
  }
  return b;
}

int run_field(const FieldArgs& a) {
  const auto p = order_of(a.c);
  BoxRegion ambient{a.lower, a.upper};
  try {
    ambient.validate();
  } catch (const DomainError& e) {
    throw UsageError(std::string("ambient box: ") + e.what());
  }
  std::vector<BoxRegion> queries;
  for (const auto& q : a.queries) {
    auto b = parse_box(q);
    if (!ambient.contains(b)) throw UsageError("query box " + q + " lies outside the ambient box");
    queries.push_back(std::move(b));
  }
  if (!queries.empty() && a.c.format == "csv" && a.counts_output.empty()) {
    throw UsageError("--query with CSV output needs --counts-output");
  }
  if (a.runs < 1) throw UsageError("--runs must be >= 1");
  ParamList params = {{"k", std::to_string(a.c.k)},
                      {"lambda", format_double(a.c.lambda)},
                      {"seed", std::to_string(a.c.seed)},
                      {"runs", std::to_string(a.runs)}};
  std::string lo, hi;
  for (std::size_t i = 0; i < ambient.dim(); ++i) {
    lo += (i ? "," : "") + format_double(ambient.lower[i]);
    hi += (i ? "," : "") + format_double(ambient.upper[i]);
  }
  params.emplace_back("lower", lo);
  params.emplace_back("upper", hi);
  for (std::size_t i = 0; i < a.queries.size(); ++i) params.emplace_back("query" + std::to_string(i), a.queries[i]);

  const auto fields = parallel_draws<MarkedPointField>(a.runs, a.c.seed, 0x46, [&](RngStream& rng, std::size_t) {
    return sample_field(p, ambient, rng);
  });
  if (a.c.format == "json") {
    auto j = json_envelope("field", params);
    j["fields"] = json::array();
    for (std::size_t r = 0; r < fields.size(); ++r) {
      auto fj = to_json(fields[r]);
      if (!queries.empty()) {
        std::vector<std::int64_t> counts;
        for (const auto& q : queries) counts.push_back(count_in_region(fields[r], q));
        fj["query_counts"] = counts;
      }
      j["fields"].push_back(fj);
    }
    write_atomic(a.c.output, j.dump(2) + "\n");
    return kExitOk;
  }
  std::string out = csv_header("field", params) + field_csv_columns(ambient.dim());
  for (std::size_t r = 0; r < fields.size(); ++r) out += field_rows_csv(fields[r], r);
  if (!queries.empty()) {
    std::string counts = csv_header("field-counts", params) + "run,query,count\n";
    for (std::size_t r = 0; r < fields.size(); ++r) {
      for (std::size_t q = 0; q < queries.size(); ++q) {
        counts += std::to_string(r) + "," + std::to_string(q) + "," + std::to_string(count_in_region(fields[r], queries[q])) + "\n";
      }
    }
    write_atomic(a.counts_output, counts);
  }
  write_atomic(a.c.output, out);
  return kExitOk;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  Common c;
  std::string suite = "all";
  std::string spec = "all";
  std::size_t n = 100'000;
  bool negative_control = false;
};

SubordinatorSpec spec_named(const std::string& name, double alpha) {
  const double a = alpha < 1.0 ? alpha : 0.7;
  if (name == "stable") return SubordinatorSpec::stable(a);
  if (name == "mixed-stable") return SubordinatorSpec::mixed_stable({0.5, 0.5}, {0.5, 0.8});
  if (name == "tempered-stable") return SubordinatorSpec::tempered_stable(a, 1.0);
  if (name == "mixture-tempered-stable") return SubordinatorSpec::mixture_tempered_stable({0.3, 0.7}, {0.5, 0.8}, {1.0, 2.0});
  if (name == "gamma") return SubordinatorSpec::gamma_law(1.0, 1.0);
  return SubordinatorSpec::inverse_gaussian(1.0, 1.0);
}

bool suite_pmf_gof(const VerifyArgs& a, json& report) {
  OrderParams p{a.c.k == 1 ? 2 : a.c.k, a.c.lambda};
  const double index = 0.7;
  struct Case {
    const char* name;
    Variant v;
    FracParams f;
  };
  const Case cases[] = {{"ppok", Variant::PPoK, {}},
                        {"tfppok", Variant::TF, {1.0, index, 0.0, 0.0}},
                        {"sfppok", Variant::SF, {index, 1.0, 0.0, 0.0}}};
  bool ok = true;
  json arr = json::array();
  std::uint64_t stream = 10;
  for (const auto& cs : cases) {
    PmfTable table = cs.v == Variant::PPoK ? ppok_pmf_table(p, a.c.t, kNCap)
                     : cs.v == Variant::TF ? tfppok_pmf_table(p, index, a.c.t, kNCap)
                                           : sfppok_pmf_table(p, index, a.c.t, kNCap);
    const auto emp = estimate_pmf([&](RngStream& rng) { return sample_fractional(p, cs.f, cs.v, a.c.t, rng); }, kNCap,
                                  a.n, a.c.seed, stream++);
    const auto g = compare_pmf(emp, table);
    const bool pass = g.tv_distance < 0.01 && g.p_value > 0.001;
    ok = ok && pass;
    arr.push_back({{"process", cs.name}, {"tv_distance", g.tv_distance}, {"chi2", g.chi2_stat}, {"dof", g.dof},
                   {"p_value", g.p_value}, {"n_samples", g.n_samples}, {"pass", pass}});
  }
  report["pmf-gof"] = {{"cases", arr}, {"pass", ok}};
  return ok;
}

bool suite_governing(const VerifyArgs& a, json& report) {
  OrderParams p{a.c.k == 1 ? 2 : a.c.k, a.c.lambda};
  const double index = 0.7;
  bool ok = true;
  json tf = json::array();
  for (int n = 0; n <= 5; ++n) {
    const double coarse = governing_residual_tf(p, index, n, {1.0, 250, 0.1});
    const double fine = governing_residual_tf(p, index, n, {1.0, 500, 0.1});
    const bool pass = fine < 5e-2 && fine < coarse;
    ok = ok && pass;
    tf.push_back({{"n", n}, {"residual_250", coarse}, {"residual_500", fine}, {"pass", pass}});
  }
  const double sf_coarse = governing_residual_sf_pgf(p, 0.6, 0.5, {1.0, 500, 0.0});
  const double sf_fine = governing_residual_sf_pgf(p, 0.6, 0.5, {1.0, 1000, 0.0});
  const bool sf_pass = sf_fine < 1e-6 && sf_fine < sf_coarse;
  ok = ok && sf_pass;
  report["governing"] = {{"tf", tf},
                         {"sf_pgf", {{"residual_500", sf_coarse}, {"residual_1000", sf_fine}, {"pass", sf_pass}}},
                         {"pass", ok}};
  return ok;
}

bool suite_martingale(const VerifyArgs& a, json& report) {
  const std::vector<std::string> all = {"stable", "mixed-stable", "tempered-stable", "mixture-tempered-stable", "gamma",
                                        "inverse-gaussian"};
  std::vector<std::string> names = a.spec == "all" ? all : std::vector<std::string>{a.spec};
  const std::vector<double> grid = {0.25, 0.5, 0.75, 1.0};
  bool ok = true;
  json arr = json::array();
  std::uint64_t offset = 0;
  for (const auto& name : names) {
    MartingaleOptions opt;
    opt.samples = name == "stable" ? a.n : std::max<std::size_t>(10'000, a.n / 5);
    opt.seed = a.c.seed + offset++;
    opt.negative_control = a.negative_control;
    const auto r = martingale_check(spec_named(name, a.c.alpha), a.c.lambda, grid, opt);
    ok = ok && r.pass;
    arr.push_back({{"spec", name},
                   {"negative_control", a.negative_control},
                   {"n_samples", r.n_samples},
                   {"threshold", r.threshold},
                   {"mean_increment", r.mean_increment},
                   {"mean_increment_z", r.mean_increment_z},
                   {"increment_vs_level_corr", r.increment_vs_level_corr},
                   {"increment_vs_level_z", r.increment_vs_level_z},
                   {"increment_vs_clock_corr", r.increment_vs_clock_corr},
                   {"increment_vs_clock_z", r.increment_vs_clock_z},
                   {"pass", r.pass}});
  }
  report["martingale"] = {{"cases", arr}, {"pass", ok}};
  return ok;
}

int run_verify(const VerifyArgs& a) {
  if (a.n < 10'000) throw UsageError("-N must be >= 10000 for verification");
  ParamList params = common_params(a.c, "verify");
  params.emplace_back("suite", a.suite);
  params.emplace_back("spec", a.spec);
  params.emplace_back("N", std::to_string(a.n));
  params.emplace_back("negative_control", a.negative_control ? "true" : "false");
  auto report = json_envelope("verify", params);
  bool ok = true;
  if (a.suite == "pmf-gof" || a.suite == "all") ok = suite_pmf_gof(a, report) && ok;
  if (a.suite == "governing" || a.suite == "all") ok = suite_governing(a, report) && ok;
  if (a.suite == "martingale" || a.suite == "all") ok = suite_martingale(a, report) && ok;
  report["pass"] = ok;
  write_atomic(a.c.output, report.dump(2) + "\n");
  std::cerr << "verify " << a.suite << ": " << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fracppk: fractional Poisson processes and fields of order k"};
  app.set_version_flag("--version", std::string(fracppk::kVersion));
  app.require_subcommand(1);

  PmfArgs pmf;
  auto* pmf_cmd = app.add_subcommand("pmf", "write a pmf table for n = 0..nmax");
  add_common(pmf_cmd, pmf.c, false);
  pmf_cmd->add_option("--variant", pmf.variant, "ppok, tfppok, sfppok or field")
      ->check(CLI::IsMember({"ppok", "tfppok", "sfppok", "field"}));
  pmf_cmd->add_option("--nmax", pmf.nmax, "largest n (<= 60)")->check(CLI::Range(0, fracppk::kNCap));

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample", "draw counts or count paths");
  add_common(sample_cmd, sample.c, true);
  sample_cmd->add_option("--variant", sample.variant, "ppok, tfppok, sfppok or ttsfppok")
      ->check(CLI::IsMember({"ppok", "tfppok", "sfppok", "ttsfppok", "ttsf"}));
  sample_cmd->add_option("-N,--samples", sample.n, "number of draws or paths");
  sample_cmd->add_flag("--path", sample.path, "emit full count paths on [0, t]");
  sample_cmd->add_option("--grid-points", sample.grid_points, "path grid size for fractional variants");

  FieldArgs field;
  auto* field_cmd = app.add_subcommand("field", "sample marked Poisson fields of order k on a box");
  add_common(field_cmd, field.c, true);
  field_cmd->add_option("--lower", field.lower, "ambient box lower corner")->delimiter(',');
  field_cmd->add_option("--upper", field.upper, "ambient box upper corner")->delimiter(',');
  field_cmd->add_option("--runs", field.runs, "number of independent fields");
  field_cmd->add_option("--query", field.queries, "count box 'l1,l2:u1,u2' (repeatable)");
  field_cmd->add_option("--counts-output", field.counts_output, "CSV path for per-query counts");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "run verification suites; exit 0 iff all pass");
  add_common(verify_cmd, verify.c, true);
  verify.c.format = "json";
  verify_cmd->add_option("--suite", verify.suite, "pmf-gof, governing, martingale or all")
      ->check(CLI::IsMember({"pmf-gof", "governing", "martingale", "all"}));
  verify_cmd->add_option("--spec", verify.spec, "subordinator for the martingale suite")
      ->check(CLI::IsMember({"all", "stable", "mixed-stable", "tempered-stable", "mixture-tempered-stable", "gamma",
                             "inverse-gaussian"}));
  verify_cmd->add_option("-N,--samples", verify.n, "Monte Carlo sample count");
  verify_cmd->add_flag("--negative-control", verify.negative_control, "compensate with lambda t (must fail)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*pmf_cmd) return run_pmf(pmf);
    if (*sample_cmd) return run_sample(sample);
    if (*field_cmd) return run_field(field);
    if (*verify_cmd) return run_verify(verify);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fracppk::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fracppk::CapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fracppk::Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
