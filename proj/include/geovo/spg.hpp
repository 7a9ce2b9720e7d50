#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "geovo/errors.hpp"

namespace geovo {

struct SpgConfig {
  int max_iters = 100;
  double alpha_min = 1e-10;
  double alpha_max = 1e10;
  int memory_M = 10;       // nonmonotone window
  double gamma = 1e-4;     // sufficient decrease
  double sigma1 = 0.1;     // backtracking safeguards
  double sigma2 = 0.9;
  double tol = 1e-6;       // ||P(x - g) - x||_inf
  int max_backtracks = 60;
  bool record_history = false;

  void validate() const {
    if (max_iters < 0) throw InvalidParameter("spg: max_iters must be non-negative");
    if (!(alpha_min > 0.0 && alpha_min < alpha_max)) throw InvalidParameter("spg: need 0 < alpha_min < alpha_max");
    if (memory_M < 1) throw InvalidParameter("spg: memory_M must be >= 1");
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidParameter("spg: gamma must lie in (0, 1)");
    if (!(sigma1 > 0.0 && sigma1 < sigma2 && sigma2 < 1.0)) throw InvalidParameter("spg: need 0 < sigma1 < sigma2 < 1");
    if (!(tol > 0.0)) throw InvalidParameter("spg: tol must be positive");
  }
};

/// One accepted step, enough to re-check the nonmonotone Armijo test.
struct SpgStep {
  double f_new;
  double f_ref;   // max over the window
  double lambda;  // line-search fraction
  double delta;   // g . d
  double alpha;   // spectral step that produced d
};

struct SpgStats {
  int iterations = 0;
  int evaluations = 0;
  double stationarity = std::numeric_limits<double>::infinity();
  double value = std::numeric_limits<double>::infinity();
  bool converged = false;
  bool line_search_stalled = false;
  std::vector<SpgStep> history;
  std::vector<Eigen::VectorXd> iterates;  // only with record_history
};

struct SpgResult {
  Eigen::VectorXd x;
  SpgStats stats;
};

namespace detail {
inline std::vector<double> to_std(const Eigen::VectorXd& x) { return {x.data(), x.data() + x.size()}; }
} // namespace detail

/// Spectral projected gradient with Barzilai-Borwein steps and a nonmonotone
/// line search with safeguarded quadratic interpolation.
///
/// `objective(x, grad)` returns f(x) and writes the gradient. `project(x)`
/// returns the nearest feasible point and must be idempotent. Every trial point
/// is passed through `project`, so all iterates are feasible.
template <class Objective, class Projector>
SpgResult spg_minimize(Objective&& objective, Projector&& project, const Eigen::VectorXd& x_init,
                       const SpgConfig& cfg = {}) {
  cfg.validate();
  const auto n = x_init.size();

  SpgResult res;
  SpgStats& st = res.stats;

  Eigen::VectorXd x = project(x_init);
  Eigen::VectorXd g(n);
  double f = objective(x, g);
  ++st.evaluations;
  if (!std::isfinite(f) || !g.allFinite())
    throw NumericalFailure("spg: non-finite objective or gradient at initial point", detail::to_std(x));

  Eigen::VectorXd best = x;
  double f_best = f;
  std::deque<double> window{f};

  auto stationarity = [&](const Eigen::VectorXd& at, const Eigen::VectorXd& grad) {
    return n == 0 ? 0.0 : (project(Eigen::VectorXd(at - grad)) - at).cwiseAbs().maxCoeff();
  };
  double pg = stationarity(x, g);

  const double g_inf = n == 0 ? 0.0 : g.cwiseAbs().maxCoeff();
  double alpha = g_inf > 0.0 ? std::clamp(1.0 / g_inf, cfg.alpha_min, cfg.alpha_max) : cfg.alpha_max;

  if (cfg.record_history) st.iterates.push_back(x);

  Eigen::VectorXd d(n), xt(n), gt(n);
  while (st.iterations < cfg.max_iters) {
    if (pg <= cfg.tol) {
      st.converged = true;
      break;
    }
    d = project(Eigen::VectorXd(x - alpha * g)) - x;
    const double delta = g.dot(d);
    const double f_ref = *std::max_element(window.begin(), window.end());

    double lambda = 1.0;
    double ft = 0.0;
    bool accepted = false;
    for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
      xt = project(Eigen::VectorXd(x + lambda * d));
      ft = objective(xt, gt);
      ++st.evaluations;
      if (!std::isfinite(ft) || !gt.allFinite())
        throw NumericalFailure("spg: non-finite objective or gradient", detail::to_std(xt));
      if (ft <= f_ref + cfg.gamma * lambda * delta) {
        accepted = true;
        break;
      }
      const double trial = -0.5 * lambda * lambda * delta / (ft - f - lambda * delta);
      lambda = (trial >= cfg.sigma1 && trial <= cfg.sigma2 * lambda) ? trial : 0.5 * lambda;
    }
    if (!accepted) {
      st.line_search_stalled = true;
      break;
    }

    if (cfg.record_history) st.history.push_back({ft, f_ref, lambda, delta, alpha});

    const Eigen::VectorXd s = xt - x;
    const Eigen::VectorXd y = gt - g;
    x.swap(xt);
    g.swap(gt);
    f = ft;
    ++st.iterations;
    if (cfg.record_history) st.iterates.push_back(x);

    const double sty = s.dot(y);
    alpha = sty <= 0.0 ? cfg.alpha_max : std::clamp(s.squaredNorm() / sty, cfg.alpha_min, cfg.alpha_max);

    window.push_back(f);
    if (static_cast<int>(window.size()) > cfg.memory_M) window.pop_front();

    if (f < f_best) {
      f_best = f;
      best = x;
    }
    pg = stationarity(x, g);
  }

  // Report stationarity at the returned point.
  if (f_best < f) {
    Eigen::VectorXd gb(n);
    objective(best, gb);
    ++st.evaluations;
    pg = stationarity(best, gb);
  }
  st.stationarity = pg;
  st.value = f_best;
  res.x = std::move(best);
  return res;
}

} // namespace geovo
