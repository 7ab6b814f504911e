#include "carve/carve.h"

#include <cmath>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "carve/bench.hpp"
#include "carve/bvn.hpp"
#include "carve/errors.hpp"
#include "carve/experiment.hpp"
#include "carve/normal.hpp"
#include "carve/report.hpp"
#include "carve/rng.hpp"
#include "carve/selection.hpp"
#include "carve/sntn.hpp"
#include "carve/truncnorm.hpp"

struct carve_sntn {
  carve::SntnCanonical canon;
};

struct carve_matrix {
  carve::Matrix m;
  std::vector<std::string> names;
};

struct carve_table {
  carve::Table table;
  std::string serialized;
};

namespace {

thread_local std::string g_last_error;

carve_status fail(carve_status s, const char* what) {
  g_last_error = what;
  return s;
}

// Runs `f`, translating exceptions into status codes.
template <class F>
carve_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return CARVE_OK;
  } catch (const carve::Error& e) {
    return fail(static_cast<carve_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CARVE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CARVE_ERR_INTERNAL, e.what());
  }
}

#define CARVE_REQUIRE(p)                                                   \
  do {                                                                     \
    if (!(p)) return fail(CARVE_ERR_NULL_ARGUMENT, "null argument: " #p); \
  } while (0)

carve::TruncNormParams tn(const carve_tnorm_params* p) {
  return {p->mu, p->sigma2, p->a, p->b};
}

carve::SntnInputs sntn_inputs(const carve_sntn_inputs* in) {
  return {in->mu1, in->tau1_2, in->mu2, in->tau2_2, in->a, in->b, in->c1, in->c2};
}

carve_table* new_table(carve::Table t) { return new carve_table{std::move(t), {}}; }

const carve::Cell* cell_at(const carve_table* t, size_t i, size_t j) {
  if (i >= t->table.rows.size() || j >= t->table.columns.size()) return nullptr;
  return &t->table.rows[i][j];
}

}  // namespace

extern "C" {

const char* carve_last_error(void) { return g_last_error.c_str(); }

const char* carve_status_name(carve_status s) {
  switch (s) {
    case CARVE_OK: return "ok";
    case CARVE_ERR_DOMAIN: return "domain error";
    case CARVE_ERR_CONFIG: return "config error";
    case CARVE_ERR_BRACKET: return "bracket error";
    case CARVE_ERR_CONVERGENCE: return "convergence error";
    case CARVE_ERR_TRUNCATION_MASS: return "truncation mass error";
    case CARVE_ERR_RANK: return "rank error";
    case CARVE_ERR_CONSISTENCY: return "consistency error";
    case CARVE_ERR_IO: return "I/O error";
    case CARVE_ERR_NULL_ARGUMENT: return "null argument";
    case CARVE_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* carve_version(void) { return "1.0.0"; }

// ---- Normal and bivariate normal ----

carve_status carve_norm_cdf(double x, double mu, double sigma2, double* out) {
  CARVE_REQUIRE(out);
  return guarded([&] { *out = carve::norm_cdf(x, {mu, sigma2}); });
}

carve_status carve_owens_t(double h, double a, double* out) {
  CARVE_REQUIRE(out);
  return guarded([&] { *out = carve::owens_t(h, a); });
}

carve_status carve_bvn_cdf(double x1, double x2, double rho, const char* method, double* out) {
  CARVE_REQUIRE(out);
  return guarded([&] {
    carve::BvnMethod m;
    if (method) m.tag = carve::parse_bvn_tag(method);
    *out = carve::bvn_cdf({x1, x2, rho}, m);
  });
}

// ---- Truncated normal ----

carve_status carve_tnorm_cdf(const carve_tnorm_params* p, double x, double* out) {
  CARVE_REQUIRE(p);
  CARVE_REQUIRE(out);
  return guarded([&] { *out = carve::tnorm_cdf(x, tn(p)); });
}

carve_status carve_tnorm_sf(const carve_tnorm_params* p, double x, double* out) {
  CARVE_REQUIRE(p);
  CARVE_REQUIRE(out);
  return guarded([&] { *out = carve::tnorm_sf(x, tn(p)); });
}

carve_status carve_tnorm_pdf(const carve_tnorm_params* p, double x, double* out) {
  CARVE_REQUIRE(p);
  CARVE_REQUIRE(out);
  return guarded([&] { *out = carve::tnorm_pdf(x, tn(p)); });
}

carve_status carve_tnorm_ppf(const carve_tnorm_params* p, double prob, double* out) {
  CARVE_REQUIRE(p);
  CARVE_REQUIRE(out);
  return guarded([&] { *out = carve::tnorm_ppf(prob, tn(p)); });
}

carve_status carve_tnorm_mean(const carve_tnorm_params* p, double* out) {
  CARVE_REQUIRE(p);
  CARVE_REQUIRE(out);
  return guarded([&] { *out = carve::tnorm_mean(tn(p)); });
}

carve_status carve_tnorm_ci(double x_obs, double sigma2, double a, double b, double alpha,
                            double* lo, double* hi) {
  CARVE_REQUIRE(lo);
  CARVE_REQUIRE(hi);
  return guarded([&] {
    const carve::Interval ci = carve::tnorm_ci(x_obs, sigma2, a, b, alpha);
    *lo = ci.lo;
    *hi = ci.hi;
  });
}

// ---- SNTN ----

carve_status carve_sntn_create(const carve_sntn_inputs* in, carve_sntn** out) {
  CARVE_REQUIRE(in);
  CARVE_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new carve_sntn{carve::canonicalize(sntn_inputs(in))}; });
}

void carve_sntn_free(carve_sntn* d) { delete d; }

carve_status carve_sntn_cdf(const carve_sntn* d, double z, double* out) {
  CARVE_REQUIRE(d);
  CARVE_REQUIRE(out);
  return guarded([&] { *out = carve::sntn_cdf(z, d->canon); });
}

carve_status carve_sntn_sf(const carve_sntn* d, double z, double* out) {
  CARVE_REQUIRE(d);
  CARVE_REQUIRE(out);
  return guarded([&] { *out = carve::sntn_sf(z, d->canon); });
}

carve_status carve_sntn_pdf(const carve_sntn* d, double z, double* out) {
  CARVE_REQUIRE(d);
  CARVE_REQUIRE(out);
  return guarded([&] { *out = carve::sntn_pdf(z, d->canon); });
}

carve_status carve_sntn_ppf(const carve_sntn* d, double p, double tol, double* out) {
  CARVE_REQUIRE(d);
  CARVE_REQUIRE(out);
  return guarded([&] { *out = carve::sntn_ppf(p, d->canon, tol > 0.0 ? tol : 1e-8); });
}

carve_status carve_sntn_mean(const carve_sntn* d, double* out) {
  CARVE_REQUIRE(d);
  CARVE_REQUIRE(out);
  return guarded([&] { *out = carve::sntn_mean(d->canon); });
}

carve_status carve_sntn_rho(const carve_sntn* d, double* out) {
  CARVE_REQUIRE(d);
  CARVE_REQUIRE(out);
  *out = d->canon.rho;
  return CARVE_OK;
}

carve_status carve_sntn_pvalue(const carve_sntn* d, double z, carve_tail tail, double* out) {
  CARVE_REQUIRE(d);
  CARVE_REQUIRE(out);
  return guarded([&] {
    carve::Tail t;
    switch (tail) {
      case CARVE_TAIL_LEFT: t = carve::Tail::left; break;
      case CARVE_TAIL_RIGHT: t = carve::Tail::right; break;
      case CARVE_TAIL_TWO_SIDED: t = carve::Tail::two_sided; break;
      default: throw carve::ConfigError("sntn_pvalue: unknown tail");
    }
    *out = carve::sntn_pvalue(z, d->canon, t);
  });
}

carve_status carve_sntn_ci(const carve_sntn_inputs* tmpl, double z_obs, double alpha,
                           double* lo, double* hi) {
  CARVE_REQUIRE(tmpl);
  CARVE_REQUIRE(lo);
  CARVE_REQUIRE(hi);
  return guarded([&] {
    const carve::Interval ci = carve::sntn_ci(z_obs, sntn_inputs(tmpl), alpha);
    *lo = ci.lo;
    *hi = ci.hi;
  });
}

// ---- Matrices ----

carve_status carve_matrix_read_csv(const char* path, carve_matrix** out) {
  CARVE_REQUIRE(path);
  CARVE_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto m = std::make_unique<carve_matrix>();
    m->m = carve::read_matrix_csv(path, &m->names);
    *out = m.release();
  });
}

carve_status carve_matrix_from_rows(const double* data, size_t rows, size_t cols,
                                    carve_matrix** out) {
  CARVE_REQUIRE(data);
  CARVE_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    if (rows == 0 || cols == 0) throw carve::ConfigError("matrix: empty shape");
    auto m = std::make_unique<carve_matrix>();
    m->m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (size_t i = 0; i < rows; ++i)
      for (size_t j = 0; j < cols; ++j) {
        const double v = data[i * cols + j];
        if (!std::isfinite(v)) throw carve::DomainError("matrix: non-finite entry");
        m->m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      }
    *out = m.release();
  });
}

size_t carve_matrix_rows(const carve_matrix* m) { return m ? static_cast<size_t>(m->m.rows()) : 0; }

size_t carve_matrix_cols(const carve_matrix* m) { return m ? static_cast<size_t>(m->m.cols()) : 0; }

carve_status carve_matrix_get(const carve_matrix* m, size_t i, size_t j, double* out) {
  CARVE_REQUIRE(m);
  CARVE_REQUIRE(out);
  if (i >= carve_matrix_rows(m) || j >= carve_matrix_cols(m))
    return fail(CARVE_ERR_DOMAIN, "matrix: index out of range");
  *out = m->m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return CARVE_OK;
}

void carve_matrix_free(carve_matrix* m) { delete m; }

// ---- Tables ----

size_t carve_table_rows(const carve_table* t) { return t ? t->table.rows.size() : 0; }

size_t carve_table_cols(const carve_table* t) { return t ? t->table.columns.size() : 0; }

const char* carve_table_column(const carve_table* t, size_t j) {
  if (!t || j >= t->table.columns.size()) return nullptr;
  return t->table.columns[j].c_str();
}

carve_status carve_table_number(const carve_table* t, size_t i, size_t j, double* out) {
  CARVE_REQUIRE(t);
  CARVE_REQUIRE(out);
  const carve::Cell* c = cell_at(t, i, j);
  if (!c) return fail(CARVE_ERR_DOMAIN, "table: index out of range");
  if (const auto* d = std::get_if<double>(c)) {
    *out = *d;
  } else if (const auto* k = std::get_if<std::int64_t>(c)) {
    *out = static_cast<double>(*k);
  } else {
    return fail(CARVE_ERR_CONFIG, "table: cell is text");
  }
  return CARVE_OK;
}

carve_status carve_table_text(const carve_table* t, size_t i, size_t j, const char** out) {
  CARVE_REQUIRE(t);
  CARVE_REQUIRE(out);
  const carve::Cell* c = cell_at(t, i, j);
  if (!c) return fail(CARVE_ERR_DOMAIN, "table: index out of range");
  const auto* s = std::get_if<std::string>(c);
  if (!s) return fail(CARVE_ERR_CONFIG, "table: cell is numeric");
  *out = s->c_str();
  return CARVE_OK;
}

carve_status carve_table_write(const carve_table* t, carve_format format, const char* path) {
  CARVE_REQUIRE(t);
  CARVE_REQUIRE(path);
  return guarded([&] {
    carve::emit_report(t->table,
                       format == CARVE_FORMAT_JSON ? carve::ReportFormat::json
                                                   : carve::ReportFormat::csv,
                       path);
  });
}

carve_status carve_table_serialize(carve_table* t, carve_format format, const char** out) {
  CARVE_REQUIRE(t);
  CARVE_REQUIRE(out);
  return guarded([&] {
    t->serialized =
        format == CARVE_FORMAT_JSON ? carve::to_json(t->table) : carve::to_csv(t->table);
    *out = t->serialized.c_str();
  });
}

void carve_table_free(carve_table* t) { delete t; }

// ---- Analyses ----

void carve_analyze_options_default(carve_analyze_options* o) {
  if (!o) return;
  o->frac_b = 0.15;
  o->alpha = 0.1;
  o->sigma2 = 0.0;
  o->lam_frac = 0.725;
  o->k = 0;
  o->seed = 1;
}

carve_status carve_analyze(const carve_matrix* X, const carve_matrix* y,
                           const carve_analyze_options* o, carve_table** out) {
  CARVE_REQUIRE(X);
  CARVE_REQUIRE(y);
  CARVE_REQUIRE(o);
  CARVE_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    if (y->m.cols() != 1) throw carve::ConfigError("analyze: y must have a single column");
    if (y->m.rows() != X->m.rows()) throw carve::ConfigError("analyze: X and y disagree in rows");
    const carve::Matrix Xs = carve::standardize_columns(X->m);
    const carve::Vector yv = y->m.col(0);
    carve::CarveConfig cfg;
    cfg.frac_b = o->frac_b;
    cfg.alpha = o->alpha;
    if (o->k > 0) {
      cfg.algorithm = carve::Algorithm::marginal_screen;
      cfg.k = o->k;
    } else {
      cfg.lam_frac = o->lam_frac;
    }
    carve::validate(cfg);
    cfg.sigma2 = o->sigma2 > 0.0
                     ? o->sigma2
                     : carve::estimate_sigma2(Xs, yv, carve::derive_seed(o->seed, 7)).sigma2;
    const carve::DataSplit split =
        carve::split_data(static_cast<int>(Xs.rows()), cfg.frac_b, o->seed);
    const carve::PosiRun posi = carve::posi_run(Xs, yv, cfg);
    const carve::CarveRun run = carve::carve_run(Xs, yv, split, cfg);
    std::vector<carve::CarveResult> all = posi.results;
    for (const auto* part : {&run.carve, &run.split_results, &run.naive})
      all.insert(all.end(), part->begin(), part->end());
    *out = new_table(carve::to_table(all, X->names));
  });
}

void carve_power_options_default(carve_power_options* o) {
  if (!o) return;
  o->n = 100;
  o->n_a = nullptr;
  o->n_a_count = 0;
  o->mu = nullptr;
  o->mu_count = 0;
  o->sigma2 = 4.0;
  o->alpha = 0.1;
  o->threshold = 1.0;
}

carve_status carve_simulate_sample_mean(const carve_power_options* o, carve_table** out) {
  CARVE_REQUIRE(o);
  CARVE_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    std::vector<int> n_a;
    if (o->n_a) {
      n_a.assign(o->n_a, o->n_a + o->n_a_count);
    } else {
      for (int k = 1; k < o->n; ++k) n_a.push_back(k);
    }
    std::vector<double> mu;
    if (o->mu) {
      mu.assign(o->mu, o->mu + o->mu_count);
    } else {
      for (int k = 0; k <= 20; ++k) mu.push_back(0.05 * k);
    }
    std::vector<carve::PowerRow> rows;
    for (int a : n_a) {
      auto part = carve::power_sample_mean(o->n, a, o->sigma2, o->alpha, mu, o->threshold);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    *out = new_table(carve::to_table(rows));
  });
}

void carve_hdr_options_default(carve_hdr_options* o) {
  if (!o) return;
  const carve::SimConfig c;
  o->n = c.n;
  o->p = c.p;
  o->s = c.s;
  o->sigma2 = c.sigma2;
  o->alpha = c.alpha;
  o->snr = nullptr;
  o->snr_count = 0;
  o->frac_b = nullptr;
  o->frac_count = 0;
  o->n_sims = c.n_sims;
  o->base_seed = c.base_seed;
  o->algorithm = "lasso";
  o->lam_frac = c.lam_frac;
  o->k = c.k;
  o->threads = c.threads;
  o->full_scale = 0;
}

carve_status carve_simulate_hdr(const carve_hdr_options* o, carve_table** out) {
  CARVE_REQUIRE(o);
  CARVE_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    carve::SimConfig c;
    c.n = o->n;
    c.p = o->p;
    c.s = o->s;
    c.sigma2 = o->sigma2;
    c.alpha = o->alpha;
    if (o->full_scale) c = carve::full_scale(c);
    if (o->snr) c.snr_grid.assign(o->snr, o->snr + o->snr_count);
    if (o->frac_b) c.frac_grid.assign(o->frac_b, o->frac_b + o->frac_count);
    if (!o->full_scale) c.n_sims = o->n_sims;
    c.base_seed = o->base_seed;
    c.algorithm = carve::parse_algorithm(o->algorithm ? o->algorithm : "lasso");
    c.lam_frac = o->lam_frac;
    c.k = o->k;
    c.threads = o->threads;
    *out = new_table(carve::to_table(carve::run_hdr_grid(c)));
  });
}

void carve_diabetes_options_default(carve_diabetes_options* o) {
  if (!o) return;
  const carve::DiabetesOptions d;
  o->data = nullptr;
  o->target = "target";
  o->lam_value = d.lam_value;
  o->literal_lambda = 0;
  o->frac_b = nullptr;
  o->frac_count = 0;
  o->alpha = d.alpha;
  o->seed = d.seed;
}

carve_status carve_analyze_diabetes(const carve_diabetes_options* o, carve_table** cis,
                                    carve_table** selection, carve_diabetes_summary* summary) {
  CARVE_REQUIRE(o);
  CARVE_REQUIRE(o->data);
  CARVE_REQUIRE(cis);
  *cis = nullptr;
  if (selection) *selection = nullptr;
  return guarded([&] {
    carve::DiabetesOptions d;
    d.data = o->data;
    if (o->target) d.target = o->target;
    d.lam_value = o->lam_value;
    d.reading = o->literal_lambda ? carve::LambdaReading::literal : carve::LambdaReading::fraction;
    if (o->frac_b) d.frac_grid.assign(o->frac_b, o->frac_b + o->frac_count);
    d.alpha = o->alpha;
    d.seed = o->seed;
    carve::DiabetesReport rep = carve::analyze_diabetes(d);
    if (summary) {
      summary->lam = rep.lam;
      summary->sigma2 = rep.sigma2;
      summary->cv_support = rep.cv_support;
    }
    if (selection) {
      carve::Table sel;
      sel.columns = {"index", "feature"};
      for (int j : rep.full_selection) sel.rows.push_back({std::int64_t{j}, rep.features[j]});
      *selection = new_table(std::move(sel));
    }
    *cis = new_table(std::move(rep.cis));
  });
}

// ---- Benchmarks ----

carve_status carve_bench_bvn(size_t grid_size, uint64_t seed, uint64_t oracle_samples,
                             uint64_t mc_samples, carve_table** out) {
  CARVE_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    std::vector<carve::BvnMethod> methods;
    for (auto tag : {carve::BvnTag::owen, carve::BvnTag::cox1, carve::BvnTag::cox2_mc,
                     carve::BvnTag::drezner1, carve::BvnTag::drezner2, carve::BvnTag::mc_genz}) {
      carve::BvnMethod m;
      m.tag = tag;
      if (mc_samples > 0) m.mc_samples = mc_samples;
      methods.push_back(m);
    }
    const auto grid = carve::make_bvn_grid(grid_size, seed);
    *out = new_table(carve::to_table(carve::bvn_benchmark(grid, methods, oracle_samples, seed)));
  });
}

carve_status carve_bench_rootfind(size_t n_intervals, double alpha, uint64_t seed,
                                  carve_table** out) {
  CARVE_REQUIRE(out);
  *out = nullptr;
  return guarded(
      [&] { *out = new_table(carve::to_table(carve::rootfind_benchmark(n_intervals, alpha, seed))); });
}

}  // extern "C"
