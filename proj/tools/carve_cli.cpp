// carve: command-line front end over the C interface.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "carve/carve.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct CliFailure : std::runtime_error {
  int code;
  CliFailure(int c, const std::string& what) : std::runtime_error(what), code(c) {}
};

void check(carve_status s) {
  if (s != CARVE_OK)
    throw CliFailure(static_cast<int>(s),
                     std::string(carve_status_name(s)) + ": " + carve_last_error());
}

// Owns a handle released by `Free`.
template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};
using Table = Handle<carve_table, carve_table_free>;
using Matrix = Handle<carve_matrix, carve_matrix_free>;
using Sntn = Handle<carve_sntn, carve_sntn_free>;

json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

// `out` naming a .csv or .json file is used as is; anything else is a
// directory that receives `default_name`.
fs::path resolve_out(const std::string& out, const std::string& default_name) {
  fs::path p(out);
  const auto ext = p.extension();
  if (ext == ".csv" || ext == ".json") return p;
  return p / default_name;
}

void write_table(const Table& t, const std::string& out, const std::string& default_name) {
  const fs::path path = resolve_out(out, default_name);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const carve_format f = path.extension() == ".json" ? CARVE_FORMAT_JSON : CARVE_FORMAT_CSV;
  check(carve_table_write(t.get(), f, path.c_str()));
  std::cerr << "wrote " << carve_table_rows(t.get()) << " rows to " << path.string() << "\n";
}

// Values from a JSON file replace whatever the command line gave. Keys are
// long option names without the leading dashes.
void apply_config(CLI::App* cmd, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliFailure(CARVE_ERR_IO, "cannot open config " + path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::exception& e) {
    throw CliFailure(CARVE_ERR_IO, "config " + path + ": " + e.what());
  }
  if (!cfg.is_object()) throw CliFailure(CARVE_ERR_CONFIG, "config must be a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (!opt || key == "config") throw CliFailure(CARVE_ERR_CONFIG, "unknown config key: " + key);
    std::vector<std::string> vals;
    const auto scalar = [](const json& v) {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
      return v.dump();
    };
    if (value.is_array()) {
      for (const auto& v : value) vals.push_back(scalar(v));
    } else {
      vals.push_back(scalar(value));
    }
    opt->clear();
    for (auto& v : vals) opt->add_result(v);
    opt->run_callback();
  }
}

CLI::App* with_config(CLI::App* cmd, std::string& config) {
  cmd->add_option("--config", config, "JSON file whose keys override flags")
      ->check(CLI::ExistingFile);
  return cmd;
}

// ---- bench ----

struct BenchBvnArgs {
  std::size_t grid_size = 1000;
  std::uint64_t seed = 1;
  std::uint64_t oracle_samples = 1000000;
  std::uint64_t mc_samples = 10000;
  std::string out = "results";
};

struct BenchRootArgs {
  std::size_t n = 1050;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  std::string out = "results";
};

// ---- dist ----

struct TnormArgs {
  double mu = 0.0, sigma2 = 1.0, a = -kInf, b = kInf, alpha = 0.1;
  std::vector<double> cdf;
  std::vector<double> ci;
};

struct SntnArgs {
  carve_sntn_inputs in{0.0, 1.0, 0.0, 1.0, -kInf, kInf, 1.0, 1.0};
  double alpha = 0.1;
  std::vector<double> cdf, ppf, ci;
};

json run_tnorm(const TnormArgs& a) {
  const carve_tnorm_params p{a.mu, a.sigma2, a.a, a.b};
  json records = json::array();
  for (double x : a.cdf) {
    double v = 0.0;
    check(carve_tnorm_cdf(&p, x, &v));
    records.push_back({{"op", "cdf"}, {"x", number(x)}, {"value", number(v)}});
  }
  for (double x : a.ci) {
    double lo = 0.0, hi = 0.0;
    check(carve_tnorm_ci(x, a.sigma2, a.a, a.b, a.alpha, &lo, &hi));
    records.push_back({{"op", "ci"},
                       {"x_obs", number(x)},
                       {"alpha", a.alpha},
                       {"ci_lo", number(lo)},
                       {"ci_hi", number(hi)}});
  }
  return records;
}

json run_sntn(const SntnArgs& a) {
  Sntn d;
  json records = json::array();
  if (!a.cdf.empty() || !a.ppf.empty()) check(carve_sntn_create(&a.in, d.out()));
  for (double z : a.cdf) {
    double v = 0.0;
    check(carve_sntn_cdf(d.get(), z, &v));
    records.push_back({{"op", "cdf"}, {"z", number(z)}, {"value", number(v)}});
  }
  for (double p : a.ppf) {
    double v = 0.0;
    check(carve_sntn_ppf(d.get(), p, 1e-8, &v));
    records.push_back({{"op", "ppf"}, {"p", p}, {"value", number(v)}});
  }
  for (double z : a.ci) {
    double lo = 0.0, hi = 0.0;
    check(carve_sntn_ci(&a.in, z, a.alpha, &lo, &hi));
    records.push_back({{"op", "ci"},
                       {"z_obs", number(z)},
                       {"alpha", a.alpha},
                       {"ci_lo", number(lo)},
                       {"ci_hi", number(hi)}});
  }
  return records;
}

// ---- analyze ----

struct AnalyzeArgs {
  std::string x, y, algo = "lasso", out = "results.csv";
  double lam_frac = 0.725, frac_b = 0.15, alpha = 0.1, sigma2 = 0.0;
  int k = 10;
  std::uint64_t seed = 1;
};

void run_analyze(const AnalyzeArgs& a) {
  if (a.x.empty() || a.y.empty()) throw CliFailure(CARVE_ERR_CONFIG, "analyze needs --x and --y");
  Matrix X, y;
  check(carve_matrix_read_csv(a.x.c_str(), X.out()));
  check(carve_matrix_read_csv(a.y.c_str(), y.out()));
  carve_analyze_options o;
  carve_analyze_options_default(&o);
  o.frac_b = a.frac_b;
  o.alpha = a.alpha;
  o.sigma2 = a.sigma2;
  o.seed = a.seed;
  if (a.algo == "screen") {
    o.k = a.k;
  } else if (a.algo == "lasso") {
    o.lam_frac = a.lam_frac;
    o.k = 0;
  } else {
    throw CliFailure(CARVE_ERR_CONFIG, "unknown --algo " + a.algo);
  }
  Table t;
  check(carve_analyze(X.get(), y.get(), &o, t.out()));
  write_table(t, a.out, "results.csv");
}

struct DiabetesArgs {
  std::string data, target = "target", out = "results";
  double lam = 0.25, alpha = 0.1;
  bool literal = false;
  std::vector<double> frac_b{0.15, 0.20, 0.25};
  std::uint64_t seed = 1;
};

void run_diabetes(const DiabetesArgs& a) {
  carve_diabetes_options o;
  carve_diabetes_options_default(&o);
  o.data = a.data.c_str();
  o.target = a.target.c_str();
  o.lam_value = a.lam;
  o.literal_lambda = a.literal ? 1 : 0;
  o.frac_b = a.frac_b.data();
  o.frac_count = a.frac_b.size();
  o.alpha = a.alpha;
  o.seed = a.seed;
  Table cis, sel;
  carve_diabetes_summary s{};
  check(carve_analyze_diabetes(&o, cis.out(), sel.out(), &s));
  std::cerr << "lambda " << s.lam << ", sigma^2 " << s.sigma2 << " (cv support " << s.cv_support
            << "), selected:";
  for (std::size_t i = 0; i < carve_table_rows(sel.get()); ++i) {
    const char* name = nullptr;
    check(carve_table_text(sel.get(), i, 1, &name));
    std::cerr << ' ' << name;
  }
  std::cerr << "\n";
  write_table(cis, a.out, "diabetes_cis.csv");
}

// ---- simulate ----

struct SampleMeanArgs {
  int n = 100;
  std::vector<int> n_a;
  std::vector<double> mu;
  double sigma2 = 4.0, alpha = 0.1, threshold = 1.0;
  std::string out = "results";
};

void run_sample_mean(const SampleMeanArgs& a) {
  carve_power_options o;
  carve_power_options_default(&o);
  o.n = a.n;
  if (!a.n_a.empty()) {
    o.n_a = a.n_a.data();
    o.n_a_count = a.n_a.size();
  }
  if (!a.mu.empty()) {
    o.mu = a.mu.data();
    o.mu_count = a.mu.size();
  }
  o.sigma2 = a.sigma2;
  o.alpha = a.alpha;
  o.threshold = a.threshold;
  Table t;
  check(carve_simulate_sample_mean(&o, t.out()));
  write_table(t, a.out, "fig1_power.csv");
}

struct HdrArgs {
  carve_hdr_options o;
  std::string algo = "lasso", out = "results";
  std::vector<double> snr, frac_b;
  bool full_scale = false;
  HdrArgs() { carve_hdr_options_default(&o); }
};

void run_hdr(HdrArgs& a) {
  a.o.algorithm = a.algo.c_str();
  if (!a.snr.empty()) {
    a.o.snr = a.snr.data();
    a.o.snr_count = a.snr.size();
  }
  if (!a.frac_b.empty()) {
    a.o.frac_b = a.frac_b.data();
    a.o.frac_count = a.frac_b.size();
  }
  a.o.full_scale = a.full_scale ? 1 : 0;
  Table t;
  check(carve_simulate_hdr(&a.o, t.out()));
  write_table(t, a.out, "hdr_metrics.csv");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selective inference by data carving"};
  app.set_version_flag("--version", std::string(carve_version()));
  app.require_subcommand(1);
  std::string config;

  // bench
  auto* bench = app.add_subcommand("bench", "Benchmarks")->require_subcommand(1);
  BenchBvnArgs bb;
  auto* bench_bvn = with_config(bench->add_subcommand("bvn", "Bivariate normal cdf methods"), config);
  bench_bvn->add_option("--grid-size", bb.grid_size, "Number of query points")->capture_default_str();
  bench_bvn->add_option("--seed", bb.seed)->capture_default_str();
  bench_bvn->add_option("--oracle-samples", bb.oracle_samples, "Draws behind the reference cdf")
      ->capture_default_str();
  bench_bvn->add_option("--mc-samples", bb.mc_samples, "Draws per Monte Carlo evaluation")
      ->capture_default_str();
  bench_bvn->add_option("--out", bb.out, "Output file or directory")->capture_default_str();

  BenchRootArgs br;
  auto* bench_root = with_config(bench->add_subcommand("rootfind", "Interval inversion solvers"), config);
  bench_root->add_option("--n", br.n, "Number of intervals")->capture_default_str();
  bench_root->add_option("--alpha", br.alpha)->capture_default_str();
  bench_root->add_option("--seed", br.seed)->capture_default_str();
  bench_root->add_option("--out", br.out, "Output file or directory")->capture_default_str();

  // dist
  auto* dist = app.add_subcommand("dist", "Distribution queries, JSON on stdout")->require_subcommand(1);
  TnormArgs tn;
  auto* dist_tn = with_config(dist->add_subcommand("tnorm", "Truncated normal"), config);
  dist_tn->add_option("--mu", tn.mu)->capture_default_str();
  dist_tn->add_option("--sigma2", tn.sigma2)->capture_default_str();
  dist_tn->add_option("--a", tn.a, "Lower truncation")->capture_default_str();
  dist_tn->add_option("--b", tn.b, "Upper truncation")->capture_default_str();
  dist_tn->add_option("--alpha", tn.alpha)->capture_default_str();
  dist_tn->add_option("--cdf", tn.cdf, "Points at which to evaluate the cdf");
  dist_tn->add_option("--ci", tn.ci, "Observations to invert into intervals for mu");

  SntnArgs sn;
  auto* dist_sn = with_config(dist->add_subcommand("sntn", "Sum of a normal and a truncated normal"), config);
  dist_sn->add_option("--mu1", sn.in.mu1)->capture_default_str();
  dist_sn->add_option("--tau1-2", sn.in.tau1_2, "Variance of the normal part")->capture_default_str();
  dist_sn->add_option("--mu2", sn.in.mu2)->capture_default_str();
  dist_sn->add_option("--tau2-2", sn.in.tau2_2, "Variance of the truncated part")->capture_default_str();
  dist_sn->add_option("--a", sn.in.a)->capture_default_str();
  dist_sn->add_option("--b", sn.in.b)->capture_default_str();
  dist_sn->add_option("--c1", sn.in.c1)->capture_default_str();
  dist_sn->add_option("--c2", sn.in.c2)->capture_default_str();
  dist_sn->add_option("--alpha", sn.alpha)->capture_default_str();
  dist_sn->add_option("--cdf", sn.cdf);
  dist_sn->add_option("--ppf", sn.ppf);
  dist_sn->add_option("--ci", sn.ci, "Observations; the interval is for mu1 = mu2");

  // analyze
  AnalyzeArgs an;
  auto* analyze = with_config(app.add_subcommand("analyze", "Carving inference on CSV data"), config);
  analyze->add_option("--x", an.x, "Design matrix CSV")->check(CLI::ExistingFile);
  analyze->add_option("--y", an.y, "Response CSV, one column")->check(CLI::ExistingFile);
  analyze->add_option("--algo", an.algo)->check(CLI::IsMember({"lasso", "screen"}))->capture_default_str();
  analyze->add_option("--lam-frac", an.lam_frac)->capture_default_str();
  analyze->add_option("--k", an.k, "Features kept by screening")->capture_default_str();
  analyze->add_option("--frac-b", an.frac_b)->capture_default_str();
  analyze->add_option("--alpha", an.alpha)->capture_default_str();
  analyze->add_option("--sigma2", an.sigma2, "Noise variance; 0 estimates it")->capture_default_str();
  analyze->add_option("--seed", an.seed)->capture_default_str();
  analyze->add_option("--out", an.out)->capture_default_str();

  DiabetesArgs db;
  auto* diabetes = with_config(analyze->add_subcommand("diabetes", "Diabetes data analysis"), config);
  diabetes->add_option("--data", db.data)->required()->check(CLI::ExistingFile);
  diabetes->add_option("--target", db.target)->capture_default_str();
  diabetes->add_option("--lam", db.lam, "Lambda value, see --literal-lambda")->capture_default_str();
  diabetes->add_flag("--literal-lambda", db.literal,
                     "Take --lam on unit-norm columns instead of as a fraction of lambda_max");
  diabetes->add_option("--frac-b", db.frac_b)->capture_default_str();
  diabetes->add_option("--alpha", db.alpha)->capture_default_str();
  diabetes->add_option("--seed", db.seed)->capture_default_str();
  diabetes->add_option("--out", db.out)->capture_default_str();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Simulation studies")->require_subcommand(1);
  SampleMeanArgs sm;
  auto* sim_mean = with_config(simulate->add_subcommand("sample-mean", "Analytic power curves"), config);
  sim_mean->add_option("--n", sm.n)->capture_default_str();
  sim_mean->add_option("--n-a", sm.n_a, "Selection block sizes; default 1..n-1");
  sim_mean->add_option("--mu", sm.mu, "Means; default 0, 0.05, ..., 1");
  sim_mean->add_option("--sigma2", sm.sigma2)->capture_default_str();
  sim_mean->add_option("--alpha", sm.alpha)->capture_default_str();
  sim_mean->add_option("--threshold", sm.threshold)->capture_default_str();
  sim_mean->add_option("--out", sm.out)->capture_default_str();

  HdrArgs hd;
  auto* sim_hdr = with_config(simulate->add_subcommand("hdr", "High-dimensional regression grid"), config);
  sim_hdr->add_option("--algo", hd.algo)->check(CLI::IsMember({"lasso", "screen"}))->capture_default_str();
  sim_hdr->add_option("--n", hd.o.n)->capture_default_str();
  sim_hdr->add_option("--p", hd.o.p)->capture_default_str();
  sim_hdr->add_option("--s", hd.o.s)->capture_default_str();
  sim_hdr->add_option("--sigma2", hd.o.sigma2)->capture_default_str();
  sim_hdr->add_option("--alpha", hd.o.alpha)->capture_default_str();
  sim_hdr->add_option("--snr", hd.snr, "log10 SNR grid");
  sim_hdr->add_option("--frac-b", hd.frac_b);
  sim_hdr->add_option("--n-sims", hd.o.n_sims)->capture_default_str();
  sim_hdr->add_option("--seed", hd.o.base_seed)->capture_default_str();
  sim_hdr->add_option("--lam-frac", hd.o.lam_frac)->capture_default_str();
  sim_hdr->add_option("--k", hd.o.k)->capture_default_str();
  sim_hdr->add_option("--threads", hd.o.threads, "0 uses every hardware thread")->capture_default_str();
  sim_hdr->add_flag("--full-scale", hd.full_scale, "Seven SNR points and 500 runs");
  sim_hdr->add_option("--out", hd.out)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    CLI::App* leaf = &app;
    while (!leaf->get_subcommands().empty()) leaf = leaf->get_subcommands().front();
    if (!config.empty()) apply_config(leaf, config);

    if (leaf == bench_bvn) {
      Table t;
      check(carve_bench_bvn(bb.grid_size, bb.seed, bb.oracle_samples, bb.mc_samples, t.out()));
      write_table(t, bb.out, "bench_bvn.csv");
    } else if (leaf == bench_root) {
      Table t;
      check(carve_bench_rootfind(br.n, br.alpha, br.seed, t.out()));
      write_table(t, br.out, "bench_rootfind.csv");
    } else if (leaf == dist_tn) {
      std::cout << run_tnorm(tn).dump(2) << "\n";
    } else if (leaf == dist_sn) {
      std::cout << run_sntn(sn).dump(2) << "\n";
    } else if (leaf == diabetes) {
      run_diabetes(db);
    } else if (leaf == analyze) {
      run_analyze(an);
    } else if (leaf == sim_mean) {
      run_sample_mean(sm);
    } else if (leaf == sim_hdr) {
      run_hdr(hd);
    }
  } catch (const CliFailure& e) {
    std::cerr << "carve: " << e.what() << "\n";
    return 2 + e.code;
  } catch (const std::exception& e) {
    std::cerr << "carve: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
