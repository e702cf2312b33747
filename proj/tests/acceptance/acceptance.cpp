// Acceptance suite: runs every release criterion end to end and prints one
// PASS/FAIL line per criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "photoscreen/cohort/aggregate.hpp"
#include "photoscreen/cohort/feature_matrix.hpp"
#include "photoscreen/cohort/synth.hpp"
#include "photoscreen/common/rng.hpp"
#include "photoscreen/forest/grid.hpp"
#include "photoscreen/forest/runs.hpp"
#include "photoscreen/imaging/cascade.hpp"
#include "photoscreen/imaging/codec.hpp"
#include "photoscreen/imaging/color.hpp"
#include "photoscreen/imaging/detect.hpp"
#include "photoscreen/imaging/features.hpp"
#include "photoscreen/inference/diagnostics.hpp"
#include "photoscreen/inference/hpd.hpp"
#include "photoscreen/inference/marginal.hpp"
#include "photoscreen/inference/metropolis.hpp"
#include "photoscreen/inference/mle.hpp"
#include "photoscreen/inference/ppc.hpp"
#include "photoscreen/stats/agreement.hpp"
#include "photoscreen/stats/chi2.hpp"

using namespace photoscreen;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = PHOTOSCREEN_FIXTURE_DIR;
const std::string kData = PHOTOSCREEN_DATA_DIR;
const std::string kCli = PHOTOSCREEN_CLI;

struct Harness {
  int failures = 0;

  void run(int number, const std::string& name, double limit_seconds,
           const std::function<std::string()>& body) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = true;
    try {
      detail = body();
    } catch (const std::exception& e) {
      pass = false;
      detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (pass && elapsed > limit_seconds) {
      pass = false;
      detail += " [exceeded " + std::to_string(limit_seconds) + "s limit]";
    }
    if (!pass && detail.rfind("exception", 0) != 0 && detail.find("FAIL") == std::string::npos) {
      // body signalled failure through detail text already
    }
    if (detail.rfind("FAIL:", 0) == 0) pass = false;
    std::printf("[%s] criterion %2d: %s (%.2fs) %s\n", pass ? "PASS" : "FAIL", number,
                name.c_str(), elapsed, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
};

std::string ok(const std::string& s = "") { return s; }
std::string fail(const std::string& s) { return "FAIL: " + s; }

// ---------------------------------------------------------------------------
// helpers
// ---------------------------------------------------------------------------

struct RefHsv {
  double h, s, v;
};

// independent hexcone reference in degrees (textbook max/min form)
RefHsv reference_hsv(double r, double g, double b) {
  const double rr = r / 255.0, gg = g / 255.0, bb = b / 255.0;
  const double cmax = std::fmax(rr, std::fmax(gg, bb));
  const double cmin = std::fmin(rr, std::fmin(gg, bb));
  const double d = cmax - cmin;
  double hdeg = 0.0;
  if (d != 0.0) {
    if (cmax == rr) hdeg = 60.0 * std::fmod((gg - bb) / d, 6.0);
    else if (cmax == gg) hdeg = 60.0 * ((bb - rr) / d + 2.0);
    else hdeg = 60.0 * ((rr - gg) / d + 4.0);
    if (hdeg < 0.0) hdeg += 360.0;
  }
  return {hdeg / 360.0, cmax == 0.0 ? 0.0 : d / cmax, cmax};
}

struct LogitSim {
  Mat x;
  std::vector<int> y;
  std::vector<std::string> names;
};

LogitSim simulate_logit(std::size_t n, const Vec& beta, std::uint64_t seed) {
  LogitSim d;
  d.x = Mat(n, beta.size());
  d.names.push_back("intercept");
  for (std::size_t j = 1; j < beta.size(); ++j) d.names.push_back("x" + std::to_string(j));
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    d.x(i, 0) = 1.0;
    double xb = beta[0];
    for (std::size_t j = 1; j < beta.size(); ++j) {
      d.x(i, j) = rng.normal();
      xb += d.x(i, j) * beta[j];
    }
    d.y.push_back(rng.bernoulli(inference::sigmoid(xb)) ? 1 : 0);
  }
  return d;
}

double batch_mcse(const Vec& draws) {
  const std::size_t n_batches = 20;
  const std::size_t batch = draws.size() / n_batches;
  Vec means(n_batches);
  for (std::size_t b = 0; b < n_batches; ++b) {
    double s = 0.0;
    for (std::size_t i = 0; i < batch; ++i) s += draws[b * batch + i];
    means[b] = s / batch;
  }
  double grand = 0.0;
  for (double m : means) grand += m;
  grand /= n_batches;
  double ss = 0.0;
  for (double m : means) ss += (m - grand) * (m - grand);
  return std::sqrt(ss / (n_batches - 1) / n_batches);
}

double vec_mean(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// planted-effect desk cohort to standardized design data
struct CohortDesign {
  cohort::FeatureMatrix matrix;
  inference::LogitData design;
};

CohortDesign cohort_design(const cohort::CohortSpec& spec, std::uint64_t seed) {
  const auto synth = cohort::generate_cohort(spec, seed);
  const auto days = cohort::aggregate_user_days(synth.posts, synth.participants).user_days;
  CohortDesign out;
  out.matrix = cohort::standardize(cohort::feature_matrix_from_user_days(days));
  out.design = inference::build_design(out.matrix);
  return out;
}

}  // namespace

int main() {
  Harness harness;

  // ------------------------------------------------------------------
  harness.run(1, "HSV conversion matches an independent hexcone oracle", 1.0, [] {
    Rng rng(10001);
    for (int i = 0; i < 10000; ++i) {
      const double r = static_cast<double>(rng.uniform_int(256));
      const double g = static_cast<double>(rng.uniform_int(256));
      const double b = static_cast<double>(rng.uniform_int(256));
      const imaging::HsvTriple got = imaging::rgb_to_hsv(r, g, b);
      const RefHsv want = reference_hsv(r, g, b);
      if (std::fabs(got.hue - want.h) > 1e-12 || std::fabs(got.saturation - want.s) > 1e-12 ||
          std::fabs(got.value - want.v) > 1e-12) {
        return fail("mismatch at rgb(" + std::to_string(r) + "," + std::to_string(g) + "," +
                    std::to_string(b) + ")");
      }
      const auto back = imaging::hsv_to_rgb(got);
      if (std::fabs(back[0] - r) > 1.0 || std::fabs(back[1] - g) > 1.0 ||
          std::fabs(back[2] - b) > 1.0) {
        return fail("round trip off by more than one step");
      }
    }
    return ok("10000 triples exact to 1e-12, round trip within 1 step");
  });

  // ------------------------------------------------------------------
  harness.run(2, "HPD equals exhaustive shortest-window search", 10.0, [] {
    Rng rng(10002);
    for (int trial = 0; trial < 500; ++trial) {
      const std::size_t n = 10 + rng.uniform_int(1991);
      Vec samples(n);
      for (auto& v : samples) {
        v = trial % 2 ? rng.normal() : std::exp(rng.normal());
      }
      const double level = rng.uniform(0.05, 0.99);

      Vec sorted = samples;
      std::sort(sorted.begin(), sorted.end());
      const std::size_t m = static_cast<std::size_t>(std::ceil(level * n));
      double best_width = std::numeric_limits<double>::infinity();
      std::pair<double, double> want{0, 0};
      for (std::size_t i = 0; i + m <= n; ++i) {
        const double w = sorted[i + m - 1] - sorted[i];
        if (w < best_width) {
          best_width = w;
          want = {sorted[i], sorted[i + m - 1]};
        }
      }
      const auto got = inference::hpd_interval(samples, level);
      if (got.first != want.first || got.second != want.second) {
        return fail("window mismatch on trial " + std::to_string(trial));
      }
    }
    return ok("500 random sample sets exact");
  });

  // ------------------------------------------------------------------
  harness.run(3, "Metropolis calibration on a known-coefficient cohort", 120.0, [] {
    const Vec truth = {0.25, 0.6, -0.4, 0.15};
    const LogitSim sim = simulate_logit(10000, truth, 10003);
    const inference::FreqFit mle = inference::fit_logit_mle(sim.x, sim.y, sim.names);
    const inference::LogitSpec spec = inference::LogitSpec::diffuse(sim.names);
    inference::McmcConfig config;
    config.chains = 2;
    config.iterations = 20000;
    config.burn_in = 4000;
    config.seed = 31;
    const auto chains = inference::run_metropolis(sim.x, sim.y, spec, config, 2);

    for (std::size_t j = 0; j < truth.size(); ++j) {
      const Vec pooled = inference::pooled_column(chains, j);
      const double mean = vec_mean(pooled);
      const double se = batch_mcse(pooled);
      if (std::fabs(mean - mle.coef[j]) > 2.0 * se) {
        return fail("posterior mean off MLE by " + std::to_string(mean - mle.coef[j]) +
                    " (2 MCSE = " + std::to_string(2 * se) + ") for " + sim.names[j]);
      }
      std::vector<Vec> per_chain;
      for (const auto& c : chains) per_chain.push_back(c.column(j));
      const double rhat = inference::gelman_rubin(per_chain);
      if (rhat >= 1.01) return fail("rhat " + std::to_string(rhat) + " for " + sim.names[j]);
      for (const auto& col : per_chain) {
        const auto g = inference::geweke(col);
        if (g.degenerate || std::fabs(g.z) >= 3.0) {
          return fail("geweke |z| " + std::to_string(g.z) + " for " + sim.names[j]);
        }
      }
    }
    return ok("means within 2 MCSE of MLE, rhat < 1.01, |geweke z| < 3");
  });

  // ------------------------------------------------------------------
  harness.run(4, "Bayesian and frequentist estimates agree across 10 cohorts", 120.0, [] {
    double worst = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
      const LogitSim sim = simulate_logit(5000, {0.2, 0.5, -0.35}, 20000 + rep);
      const inference::FreqFit mle = inference::fit_logit_mle(sim.x, sim.y, sim.names);
      inference::McmcConfig config;
      config.chains = 2;
      config.iterations = 10000;
      config.burn_in = 2000;
      config.seed = 40 + rep;
      const auto chains =
          inference::run_metropolis(sim.x, sim.y, inference::LogitSpec::diffuse(sim.names),
                                    config, 2);
      for (std::size_t j = 0; j < sim.names.size(); ++j) {
        const double diff =
            std::fabs(vec_mean(inference::pooled_column(chains, j)) - mle.coef[j]);
        worst = std::max(worst, diff);
      }
    }
    if (worst >= 0.05) return fail("max |posterior mean - MLE| = " + std::to_string(worst));
    return ok("max |posterior mean - MLE| = " + std::to_string(worst));
  });

  // ------------------------------------------------------------------
  harness.run(5, "Bayes factor bands and Laplace-vs-quadrature", 120.0, [] {
    // planted effect: decisive over the null
    const CohortDesign planted = cohort_design(cohort::CohortSpec::strong_effect_desk(), 50001);
    const inference::LogitSpec full_spec = inference::LogitSpec::diffuse(planted.design.names);
    const double m_full =
        inference::log_marginal_laplace(planted.design.x, planted.design.y, full_spec);
    const auto null_design = inference::intercept_only_design(planted.design.y);
    const double m_null = inference::log_marginal_laplace(
        null_design.x, null_design.y, inference::LogitSpec::diffuse(null_design.names));
    const auto bf = inference::bayes_factor(m_full, m_null);
    if (bf.label != "Decisive") return fail("planted cohort label '" + bf.label + "'");

    // null effect: K below the substantial band
    const CohortDesign null_cohort = cohort_design(cohort::CohortSpec::null_effect_desk(), 50002);
    const double nm_full = inference::log_marginal_laplace(
        null_cohort.design.x, null_cohort.design.y,
        inference::LogitSpec::diffuse(null_cohort.design.names));
    const auto n_design = inference::intercept_only_design(null_cohort.design.y);
    const double nm_null = inference::log_marginal_laplace(
        n_design.x, n_design.y, inference::LogitSpec::diffuse(n_design.names));
    const double log10_k = (nm_full - nm_null) / std::log(10.0);
    if (log10_k >= 0.5) return fail("null cohort log10 K = " + std::to_string(log10_k));

    // 1-parameter Laplace vs Simpson quadrature
    Mat x0(400, 1, 1.0);
    std::vector<int> y0;
    for (int i = 0; i < 400; ++i) y0.push_back(i < 230 ? 1 : 0);
    const inference::LogitSpec spec1 = inference::LogitSpec::diffuse({"intercept"});
    const double laplace = inference::log_marginal_laplace(x0, y0, spec1);
    const Vec mode = inference::posterior_mode(x0, y0, spec1);
    const double lp_mode = inference::log_posterior(mode, x0, y0, spec1);
    const double sigma = 1.0 / std::sqrt(inference::neg_hessian(mode, x0, spec1)(0, 0));
    const double a = mode[0] - 12 * sigma, b = mode[0] + 12 * sigma;
    const int steps = 4000;
    const double h = (b - a) / steps;
    double integral = 0.0;
    for (int i = 0; i <= steps; ++i) {
      const double beta = a + h * i;
      const double f = std::exp(inference::log_posterior({beta}, x0, y0, spec1) - lp_mode);
      integral += ((i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0)) * f;
    }
    const double quadrature = lp_mode + std::log(integral * h / 3.0);
    if (std::fabs(laplace - quadrature) >= 0.1) {
      return fail("Laplace off quadrature by " + std::to_string(laplace - quadrature));
    }
    return ok("planted Decisive, null log10 K = " + std::to_string(log10_k) +
              ", Laplace-quadrature gap " + std::to_string(std::fabs(laplace - quadrature)));
  });

  // ------------------------------------------------------------------
  harness.run(6, "Posterior predictive check calibration", 120.0, [] {
    int in_range = 0;
    for (int rep = 0; rep < 10; ++rep) {
      const LogitSim sim = simulate_logit(1500, {0.2, 0.5}, 60000 + rep);
      inference::McmcConfig config;
      config.chains = 2;
      config.iterations = 6000;
      config.burn_in = 1000;
      config.seed = 600 + rep;
      const auto chains = inference::run_metropolis(
          sim.x, sim.y, inference::LogitSpec::diffuse(sim.names), config, 2);
      const double p = inference::posterior_predictive_pvalue(chains, sim.x, sim.y, 400,
                                                              derive_seed(999, rep));
      if (p >= 0.05 && p <= 0.95) ++in_range;
    }
    if (in_range < 9) {
      return fail("only " + std::to_string(in_range) + "/10 runs inside [0.05, 0.95]");
    }

    // forced overprediction: p exactly 1
    Mat x(100, 1, 1.0);
    std::vector<int> y;
    for (int i = 0; i < 100; ++i) y.push_back(i < 50 ? 1 : 0);
    inference::McmcChain degenerate;
    degenerate.draws = Mat(50, 1, 50.0);  // pi = 1 for every observation
    const double p1 = inference::posterior_predictive_pvalue({degenerate}, x, y, 300, 5);
    if (p1 != 1.0) return fail("degenerate overprediction gave p = " + std::to_string(p1));
    return ok(std::to_string(in_range) + "/10 in the calibrated range, degenerate p = 1.0");
  });

  // ------------------------------------------------------------------
  harness.run(7, "Classifier recovers planted effects and stays at chance on null", 300.0, [] {
    // planted cohort, reduced grid, 5 runs
    cohort::CohortSpec spec = cohort::CohortSpec::strong_effect_desk();
    spec.posting_log_mean = 4.8;
    spec.posting_log_sd = 0.6;
    const auto synth = cohort::generate_cohort(spec, 70001);
    const auto days = cohort::aggregate_user_days(synth.posts, synth.participants).user_days;
    const auto matrix = cohort::feature_matrix_from_user_days(days);
    if (matrix.rows() < 3000 || matrix.rows() > 6000) {
      return fail("cohort produced " + std::to_string(matrix.rows()) +
                  " user-days, outside the desk-scale envelope");
    }

    const auto grid = forest::HyperGrid::reduced();
    const auto search = forest::grid_search(matrix.values, matrix.target, grid, 5, 70002, 4);
    const auto report =
        forest::repeated_runs(matrix.values, matrix.target, search.best, 5, 70003, 0.7, 4);
    if (!report.f1.mean || *report.f1.mean < 0.85) {
      return fail("planted-effect mean F1 = " +
                  (report.f1.mean ? std::to_string(*report.f1.mean) : std::string("undefined")));
    }
    if (!report.f1.sd || *report.f1.sd > 0.05) {
      return fail("planted-effect F1 sd = " + std::to_string(report.f1.sd.value_or(-1)));
    }

    // zero-effect cohort stays at chance
    const auto null_synth = cohort::generate_cohort(cohort::CohortSpec::null_effect_desk(), 70004);
    const auto null_days =
        cohort::aggregate_user_days(null_synth.posts, null_synth.participants).user_days;
    const auto null_matrix = cohort::feature_matrix_from_user_days(null_days);
    forest::ForestConfig fixed;
    fixed.n_estimators = 120;
    fixed.max_depth = 15;
    const auto null_report =
        forest::repeated_runs(null_matrix.values, null_matrix.target, fixed, 5, 70005, 0.7, 4);
    if (!null_report.accuracy.mean || std::fabs(*null_report.accuracy.mean - 0.5) > 0.05) {
      return fail("null-cohort accuracy = " +
                  std::to_string(null_report.accuracy.mean.value_or(-1)));
    }

    // metric identities on 10,000 random confusion tables
    Rng rng(70006);
    for (int t = 0; t < 10000; ++t) {
      const long tp = 1 + static_cast<long>(rng.uniform_int(400));
      const long fp = 1 + static_cast<long>(rng.uniform_int(400));
      const long fn = 1 + static_cast<long>(rng.uniform_int(400));
      const long tn = 1 + static_cast<long>(rng.uniform_int(400));
      const auto m = forest::ConfusionMetrics::from_counts(tp, fp, fn, tn);
      if (*m.recall != static_cast<double>(tp) / (tp + fn) ||
          *m.specificity != static_cast<double>(tn) / (tn + fp) ||
          *m.precision != static_cast<double>(tp) / (tp + fp) ||
          *m.npv != static_cast<double>(tn) / (tn + fn) ||
          *m.f1 != 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall)) {
        return fail("metric identity violated");
      }
    }

    // the published confusion counts
    const auto quoted = forest::ConfusionMetrics::from_counts(37, 23, 17, 23);
    if (std::fabs(*quoted.recall - 0.685) > 1e-3 || std::fabs(*quoted.specificity - 0.5) > 1e-12 ||
        std::fabs(*quoted.precision - 0.617) > 1e-3) {
      return fail("quoted confusion metrics mismatch");
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf), "mean F1 %.3f (sd %.3f) on %zu user-days, null acc %.3f",
                  *report.f1.mean, *report.f1.sd, matrix.rows(),
                  *null_report.accuracy.mean);
    return ok(buf);
  });

  // ------------------------------------------------------------------
  harness.run(8, "Gini splits equal exhaustive enumeration", 60.0, [] {
    Rng rng(80001);
    int checked = 0;
    for (int trial = 0; trial < 400; ++trial) {
      const std::size_t n = 4 + rng.uniform_int(9);
      const std::size_t k = 1 + rng.uniform_int(3);
      Mat x(n, k);
      std::vector<int> y;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) x(i, j) = static_cast<double>(rng.uniform_int(5));
        y.push_back(static_cast<int>(rng.uniform_int(2)));
      }
      bool has0 = false, has1 = false;
      for (int v : y) (v ? has1 : has0) = true;
      if (!has0 || !has1) continue;

      // exhaustive oracle over every (feature, midpoint) pair
      bool found = false;
      int want_feature = -1;
      double want_threshold = 0.0, want_score = 0.0;
      for (std::size_t f = 0; f < k; ++f) {
        Vec values;
        for (std::size_t i = 0; i < n; ++i) values.push_back(x(i, f));
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t v = 0; v + 1 < values.size(); ++v) {
          const double thr = values[v] + (values[v + 1] - values[v]) / 2.0;
          long l0 = 0, l1 = 0, r0 = 0, r1 = 0;
          for (std::size_t i = 0; i < n; ++i) {
            if (x(i, f) < thr) (y[i] ? l1 : l0) += 1;
            else (y[i] ? r1 : r0) += 1;
          }
          if (l0 + l1 < 1 || r0 + r1 < 1) continue;
          const double nl = static_cast<double>(l0 + l1), nr = static_cast<double>(r0 + r1);
          const double score =
              (nl - (static_cast<double>(l0) * l0 + static_cast<double>(l1) * l1) / nl) +
              (nr - (static_cast<double>(r0) * r0 + static_cast<double>(r1) * r1) / nr);
          if (!found || score < want_score) {
            found = true;
            want_feature = static_cast<int>(f);
            want_threshold = thr;
            want_score = score;
          }
        }
      }

      forest::ForestConfig config;
      config.max_features = forest::ForestConfig::MaxFeatures::all;
      Rng tree_rng(1);
      std::vector<std::size_t> rows(n);
      std::iota(rows.begin(), rows.end(), 0);
      const auto tree = forest::train_tree(x, y, config, rows, tree_rng);
      if (!found) {
        if (!tree.nodes[0].leaf) return fail("tree split where the oracle found none");
      } else {
        if (tree.nodes[0].leaf) return fail("tree failed to split");
        if (tree.nodes[0].feature != want_feature || tree.nodes[0].threshold != want_threshold) {
          return fail("split mismatch on trial " + std::to_string(trial));
        }
      }
      ++checked;
    }
    return ok(std::to_string(checked) + " fixtures exact");
  });

  // ------------------------------------------------------------------
  harness.run(9, "Chi-squared anchors and planted filter asymmetry", 120.0, [] {
    // proportional table
    stats::ContingencyTable prop;
    prop.row_labels = {"a", "b"};
    prop.col_labels = {"depressed", "healthy"};
    prop.observed = Mat(2, 2);
    prop.observed(0, 0) = 10;
    prop.observed(0, 1) = 20;
    prop.observed(1, 0) = 30;
    prop.observed(1, 1) = 60;
    const auto r = stats::chi2_independence(prop);
    if (std::fabs(r.chi2) > 1e-9 || std::fabs(r.p - 1.0) > 1e-9) {
      return fail("proportional table chi2 = " + std::to_string(r.chi2));
    }
    if (std::fabs(stats::chi2_upper_tail(3.841, 1) - 0.0500) > 1e-3) {
      return fail("critical value p = " + std::to_string(stats::chi2_upper_tail(3.841, 1)));
    }

    // planted Inkwell/Valencia direction across 20 seeded cohorts
    int correct = 0;
    for (int rep = 0; rep < 20; ++rep) {
      const auto synth = cohort::generate_cohort(cohort::CohortSpec::desk_scale(), 90000 + rep);
      std::map<std::string, cohort::Group> group_of;
      for (const auto& p : synth.participants) group_of[p.id] = p.group;
      std::map<std::string, std::array<double, 2>> counts;  // filter -> [dep, healthy]
      for (const auto& post : synth.posts) {
        counts[post.filter_name][group_of.at(post.participant_id) == cohort::Group::depressed
                                     ? 0
                                     : 1] += 1.0;
      }
      stats::ContingencyTable table;
      table.col_labels = {"depressed", "healthy"};
      table.observed = Mat(counts.size(), 2);
      std::size_t i = 0;
      std::size_t inkwell = SIZE_MAX, valencia = SIZE_MAX;
      for (const auto& [name, c] : counts) {
        table.row_labels.push_back(name);
        if (name == "Inkwell") inkwell = i;
        if (name == "Valencia") valencia = i;
        table.observed(i, 0) = c[0];
        table.observed(i, 1) = c[1];
        ++i;
      }
      if (inkwell == SIZE_MAX || valencia == SIZE_MAX) continue;
      const auto result = stats::chi2_independence(table);
      if (result.difference(inkwell, 0) > 0.0 && result.difference(valencia, 1) > 0.0) {
        ++correct;
      }
    }
    if (correct < 19) {
      return fail("direction recovered in only " + std::to_string(correct) + "/20 cohorts");
    }
    return ok("anchors exact, direction recovered in " + std::to_string(correct) +
              "/20 cohorts");
  });

  // ------------------------------------------------------------------
  harness.run(10, "Inter-rater procedure recovers the planted correlation", 60.0, [] {
    std::vector<cohort::Rating> correlated, independent;
    Rng rng(100001);
    const double loading = std::sqrt(0.4), noise = std::sqrt(0.6);
    for (int p = 0; p < 5000; ++p) {
      const double latent[4] = {rng.normal(), rng.normal(), rng.normal(), rng.normal()};
      for (int rater = 0; rater < 3; ++rater) {
        cohort::Rating c;
        c.post_id = "p" + std::to_string(p);
        c.rater_id = "r" + std::to_string(rater);
        c.happy = 2.5 + 0.5 * (loading * latent[0] + noise * rng.normal());
        c.sad = 2.5 + 0.5 * (loading * latent[1] + noise * rng.normal());
        c.likable = 2.5 + 0.5 * (loading * latent[2] + noise * rng.normal());
        c.interesting = 2.5 + 0.5 * (loading * latent[3] + noise * rng.normal());
        correlated.push_back(c);
        cohort::Rating u = c;
        u.happy = 2.5 + 0.5 * rng.normal();
        u.sad = 2.5 + 0.5 * rng.normal();
        u.likable = 2.5 + 0.5 * rng.normal();
        u.interesting = 2.5 + 0.5 * rng.normal();
        independent.push_back(u);
      }
    }
    const auto rep = stats::interrater_agreement(correlated, 5, 9);
    for (double v : {rep.happy, rep.sad, rep.likable, rep.interesting}) {
      if (v < 0.35 || v > 0.45) return fail("recovered r = " + std::to_string(v));
    }
    const auto null_rep = stats::interrater_agreement(independent, 5, 10);
    for (double v : {null_rep.happy, null_rep.sad, null_rep.likable, null_rep.interesting}) {
      if (std::fabs(v) >= 0.05) return fail("independent raters r = " + std::to_string(v));
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf), "r in [%.3f, %.3f], null max |r| %.3f",
                  std::min({rep.happy, rep.sad, rep.likable, rep.interesting}),
                  std::max({rep.happy, rep.sad, rep.likable, rep.interesting}),
                  std::max({std::fabs(null_rep.happy), std::fabs(null_rep.sad),
                            std::fabs(null_rep.likable), std::fabs(null_rep.interesting)}));
    return ok(buf);
  });

  // ------------------------------------------------------------------
  harness.run(11, "Face-detection harness on the annotated corpus", 120.0, [] {
    const auto cascade = imaging::load_cascade(kData + "/cascades/frontal_face.json");
    std::map<std::string, imaging::PhotoAnnotation> annotations;
    std::map<std::string, std::vector<imaging::Box>> truth_boxes;
    for_each_jsonl(kFixtures + "/faces/annotations.jsonl", [&](std::size_t, const Json& j) {
      imaging::PhotoAnnotation a;
      a.group = j.at("group").get<std::string>();
      a.has_face = j.at("has_face").get<bool>();
      a.face_count = j.at("face_count").get<int>();
      annotations[j.at("image").get<std::string>()] = a;
      for (const auto& b : j.at("boxes")) {
        truth_boxes[j.at("image").get<std::string>()].push_back(
            {b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>()});
      }
    });
    if (annotations.size() < 40) {
      return fail("corpus has only " + std::to_string(annotations.size()) + " images");
    }

    std::map<std::string, int> detected;
    bool merged_duplicates_checked = false;
    for (const auto& [name, ann] : annotations) {
      const auto img = imaging::decode_image_file(kFixtures + "/faces/" + name);
      const auto first = imaging::detect_faces(img, cascade);
      for (int run = 0; run < 2; ++run) {
        const auto again = imaging::detect_faces(img, cascade);
        if (again.size() != first.size() ||
            !std::equal(again.begin(), again.end(), first.begin())) {
          return fail("nondeterministic detection on " + name);
        }
      }
      detected[name] = static_cast<int>(first.size());

      // cross-pass duplicate merging on base-scale faces both passes can hit
      if (!truth_boxes[name].empty() && truth_boxes[name][0].w == 24 &&
          truth_boxes[name].size() == 1) {
        imaging::DetectionParams one_pass;
        one_pass.scale_factors = {1.05};
        imaging::DetectionParams other_pass;
        other_pass.scale_factors = {1.4};
        const auto a = imaging::detect_faces(img, cascade, one_pass);
        const auto b = imaging::detect_faces(img, cascade, other_pass);
        if (a.size() == 1 && b.size() == 1 && imaging::iou(a[0], b[0]) >= 0.3) {
          if (first.size() != 1) return fail("cross-pass duplicate not merged on " + name);
          merged_duplicates_checked = true;
        }
      }
    }
    if (!merged_duplicates_checked) {
      return fail("corpus exercised no cross-pass duplicate case");
    }

    const auto report = imaging::detector_accuracy_report(detected, annotations);
    if (report.cells.size() != 4) return fail("expected 4 accuracy cells");
    const std::string text = report.format_text();
    for (const char* needle :
         {"Depressed, No face detected:", "Healthy, No face detected:",
          "Depressed, 1+ faces detected:", "Healthy, 1+ faces detected:", "% accurate"}) {
      if (text.find(needle) == std::string::npos) {
        return fail(std::string("report text missing '") + needle + "'");
      }
    }
    // mean count difference must equal the direct computation exactly
    for (const auto& d : report.count_diffs) {
      double sum = 0.0;
      int n = 0;
      for (const auto& [name, ann] : annotations) {
        if (ann.group != d.group) continue;
        sum += detected[name] - ann.face_count;
        ++n;
      }
      if (n != d.n || std::fabs(d.mean_diff - sum / n) > 1e-12) {
        return fail("count-difference mismatch for group " + d.group);
      }
    }
    return ok(std::to_string(annotations.size()) +
              " images deterministic x3, duplicates merged, 4-cell report exact");
  });

  // ------------------------------------------------------------------
  harness.run(12, "End-to-end pipeline at published scale", 600.0, [] {
    const fs::path out = fs::temp_directory_path() / "photoscreen_acceptance_e2e";
    fs::remove_all(out);
    fs::create_directories(out);
    const std::string config = kData + "/configs/paper_scale.json";

    auto cli = [&](const std::string& args) {
      const std::string cmd =
          kCli + " --config " + config + " --out " + out.string() + " " + args + " > " +
          (out / "cli_log.txt").string() + " 2>&1";
      return std::system(cmd.c_str());
    };
    for (const std::string stage :
         {"synth", "aggregate", "fit --dataset all", "fit --dataset pre",
          "fit --dataset ratings", "classify --dataset all", "classify --dataset pre",
          "filters", "report"}) {
      const int code = cli(stage);
      if (code != 0) {
        return fail("stage '" + stage + "' exited with " + std::to_string(code) + ": " +
                    read_file_bytes(out / "cli_log.txt"));
      }
    }

    const auto report = Json::parse(read_file_bytes(out / "report.json"));
    const auto sections = report.at("sections_present").get<std::vector<std::string>>();
    for (const char* name : {"dataset_summary", "bayesian", "frequentist", "bayes_factors",
                             "classifier", "chi_squared", "correlations", "agreement"}) {
      if (std::count(sections.begin(), sections.end(), name) != 1) {
        return fail(std::string("section '") + name + "' missing from the bundle");
      }
    }
    if (report.at("config_hash").get<std::string>().size() != 64) {
      return fail("bundle lacks a config hash");
    }
    const auto summary = Json::parse(read_file_bytes(out / "summary_stats.json"));
    const long users = summary.at("total").at("users").get<long>();
    const long posts = summary.at("total").at("posts").get<long>();
    fs::remove_all(out);
    char buf[120];
    std::snprintf(buf, sizeof(buf), "%ld participants, %ld posts, 8/8 sections present", users,
                  posts);
    return ok(buf);
  });

  if (harness.failures == 0) {
    std::printf("acceptance: all 12 criteria passed\n");
  } else {
    std::printf("acceptance: %d criterion(s) FAILED\n", harness.failures);
  }
  return harness.failures == 0 ? 0 : 1;
}
