#include "gom/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "gom/errors.hpp"

namespace gom {

namespace {

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shapes " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + " differ");
  }
}

// cost[k][m] = Σ_i |truth_ik − est_im| / (rows·K)
std::vector<std::vector<double>> column_costs(const DenseMatrix& est, const DenseMatrix& truth) {
  const std::size_t k = truth.cols();
  const double scale = 1.0 / static_cast<double>(truth.rows() * k);
  std::vector<std::vector<double>> cost(k, std::vector<double>(k, 0.0));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < truth.rows(); ++i) s += std::abs(truth(i, a) - est(i, b));
      cost[a][b] = s * scale;
    }
  }
  return cost;
}

double correlation(const DenseMatrix& x, std::size_t a, const DenseMatrix& y, std::size_t b) {
  const std::size_t n = x.rows();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x(i, a);
    my += y(i, b);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x(i, a) - mx, dy = y(i, b) - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<std::size_t> greedy_by_correlation(const DenseMatrix& theta_hat,
                                               const DenseMatrix& theta_true) {
  const std::size_t k = theta_true.cols();
  std::vector<std::size_t> perm(k);
  std::vector<bool> used_true(k, false), used_est(k, false);
  for (std::size_t step = 0; step < k; ++step) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t bt = 0, be = 0;
    for (std::size_t a = 0; a < k; ++a) {
      if (used_true[a]) continue;
      for (std::size_t b = 0; b < k; ++b) {
        if (used_est[b]) continue;
        const double c = correlation(theta_true, a, theta_hat, b);
        if (c > best) {
          best = c;
          bt = a;
          be = b;
        }
      }
    }
    perm[bt] = be;
    used_true[bt] = used_est[be] = true;
  }
  return perm;
}

double quantile7(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

ReplicationRecord run_one(const SimConfig& cell, const FitConfig& fit_cfg, std::size_t index) {
  ReplicationRecord rec;
  rec.index = index;
  rec.seed = stream_seed(cell.seed, index);
  try {
    SimConfig cfg = cell;
    cfg.seed = rec.seed;
    const SimOutput sim = generate(cfg);
    FitConfig fc = fit_cfg;
    fc.k = cell.k;
    const double t0 = now_seconds();
    const FitResult fit_result = fit(sim.r, fc);
    rec.seconds = now_seconds() - t0;
    const AlignedComparison cmp =
        align(fit_result.pi_hat.matrix(), fit_result.theta_hat.matrix(), sim.pi_true.matrix(),
              sim.theta_true.matrix());
    rec.mae_pi = cmp.mae_pi;
    rec.mae_theta = cmp.mae_theta;
    rec.permutation = cmp.permutation;
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  return rec;
}

}  // namespace

double mean_abs_error(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "mean_abs_error");
  if (a.size() == 0) return 0.0;
  double s = 0.0;
  const auto x = a.data(), y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
  return s / static_cast<double>(x.size());
}

AlignedComparison align(const DenseMatrix& pi_hat, const DenseMatrix& theta_hat,
                        const DenseMatrix& pi_true, const DenseMatrix& theta_true) {
  require_same_shape(pi_hat, pi_true, "align (Pi)");
  require_same_shape(theta_hat, theta_true, "align (Theta)");
  if (pi_true.cols() != theta_true.cols()) throw DimensionError("align: Pi and Theta disagree on K");
  const std::size_t k = pi_true.cols();

  const auto cost_pi = column_costs(pi_hat, pi_true);
  const auto cost_theta = column_costs(theta_hat, theta_true);

  AlignedComparison out;
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  if (k <= kMaxExhaustiveK) {
    std::vector<std::size_t> best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
      double c = 0.0;
      for (std::size_t a = 0; a < k; ++a) c += cost_pi[a][perm[a]] + cost_theta[a][perm[a]];
      if (c < best_cost) {
        best_cost = c;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    perm = best;
  } else {
    perm = greedy_by_correlation(theta_hat, theta_true);
    out.warning = "K=" + std::to_string(k) +
                  " exceeds the exhaustive-search limit; columns matched greedily by Theta correlation";
  }
  for (std::size_t a = 0; a < k; ++a) {
    out.mae_pi += cost_pi[a][perm[a]];
    out.mae_theta += cost_theta[a][perm[a]];
  }
  out.permutation = std::move(perm);
  return out;
}

double reconstruction_error(const MembershipMatrix& pi_hat, const ItemParamMatrix& theta_hat,
                            const DenseMatrix& r) {
  const DenseMatrix fitted = reconstruct(pi_hat, theta_hat);
  require_same_shape(fitted, r, "reconstruction_error");
  return mean_abs_error(fitted, r);
}

SummaryStats summarize(std::vector<double> values) {
  SummaryStats s;
  if (values.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan, nan, nan};
  }
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / static_cast<double>(values.size());
  std::sort(values.begin(), values.end());
  s.median = quantile7(values, 0.5);
  s.q25 = quantile7(values, 0.25);
  s.q75 = quantile7(values, 0.75);
  return s;
}

std::vector<ReplicationSummary> run_replications(const std::vector<SimConfig>& grid,
                                                 const FitConfig& fit_cfg,
                                                 const ReplicationOptions& opts) {
  if (opts.reps < 1) throw ConfigError("reps must be at least 1");
  std::vector<ReplicationSummary> out;
  out.reserve(grid.size());
  for (const SimConfig& cell : grid) {
    cell.validate();
    FitConfig fc = fit_cfg;
    fc.k = cell.k;
    fc.validate();

    ReplicationSummary summary;
    summary.cell = cell;
    summary.records.resize(opts.reps);
    const auto reps = static_cast<long long>(opts.reps);
#pragma omp parallel for schedule(dynamic, 1) if (opts.parallel)
    for (long long r = 0; r < reps; ++r) {
      summary.records[static_cast<std::size_t>(r)] =
          run_one(cell, fc, static_cast<std::size_t>(r));
    }

    std::vector<double> pis, thetas, secs;
    for (const auto& rec : summary.records) {
      if (!rec.ok) {
        ++summary.failures;
        continue;
      }
      pis.push_back(rec.mae_pi);
      thetas.push_back(rec.mae_theta);
      secs.push_back(rec.seconds);
    }
    summary.mae_pi = summarize(std::move(pis));
    summary.mae_theta = summarize(std::move(thetas));
    summary.seconds = summarize(std::move(secs));
    out.push_back(std::move(summary));
  }
  return out;
}

std::vector<KSweepEntry> k_sweep(const DenseMatrix& r, const std::vector<std::size_t>& ks,
                                 const FitConfig& fit_cfg) {
  std::vector<KSweepEntry> out;
  for (std::size_t k : ks) {
    KSweepEntry e;
    e.k = k;
    try {
      FitConfig fc = fit_cfg;
      fc.k = k;
      const FitResult res = fit(r, fc);
      e.error = reconstruction_error(res.pi_hat, res.theta_hat, r);
      e.ok = true;
    } catch (const Error& err) {
      e.message = err.what();
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::optional<std::size_t> best_k(const std::vector<KSweepEntry>& sweep) {
  std::optional<std::size_t> best;
  double best_err = std::numeric_limits<double>::infinity();
  for (const auto& e : sweep) {
    if (!e.ok) continue;
    if (e.error < best_err || (e.error == best_err && best && e.k < *best)) {
      best_err = e.error;
      best = e.k;
    }
  }
  return best;
}

}  // namespace gom
