#include "tsord/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace tsord {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double max_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (const double x : v) m = std::max(m, std::abs(x));
  return m;
}

struct Evaluation {
  double value = 0.0;
  double slope = 0.0;  // directional derivative g . d
};

}  // namespace

LbfgsResult lbfgs_minimize(const ObjectiveFn& f, std::vector<double> x0, const LbfgsOptions& opts) {
  const std::size_t n = x0.size();
  std::vector<double> x = std::move(x0);
  std::vector<double> grad(n), new_x(n), new_grad(n), direction(n);

  double fx = f(x, grad);
  if (!std::isfinite(fx)) throw std::runtime_error("lbfgs: non-finite objective at start");

  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;

  LbfgsResult result;
  result.gradient_norm = max_norm(grad);
  if (result.gradient_norm < opts.gradient_tolerance) {
    result.x = std::move(x);
    result.value = fx;
    result.converged = true;
    return result;
  }

  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    // Two-loop recursion.
    direction = grad;
    std::vector<double> alpha_hist(s_hist.size());
    for (std::size_t i = s_hist.size(); i-- > 0;) {
      alpha_hist[i] = rho_hist[i] * dot(s_hist[i], direction);
      for (std::size_t j = 0; j < n; ++j) direction[j] -= alpha_hist[i] * y_hist[i][j];
    }
    if (!s_hist.empty()) {
      const double gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
      for (double& d : direction) d *= gamma;
    }
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * dot(y_hist[i], direction);
      for (std::size_t j = 0; j < n; ++j) direction[j] += (alpha_hist[i] - beta) * s_hist[i][j];
    }
    for (double& d : direction) d = -d;

    double slope0 = dot(grad, direction);
    if (slope0 >= 0.0) {
      // Not a descent direction (stale curvature); fall back to steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t j = 0; j < n; ++j) direction[j] = -grad[j];
      slope0 = dot(grad, direction);
    }

    auto eval_at = [&](double step) -> Evaluation {
      for (std::size_t j = 0; j < n; ++j) new_x[j] = x[j] + step * direction[j];
      const double v = f(new_x, new_grad);
      if (!std::isfinite(v)) throw std::runtime_error("lbfgs: non-finite objective during line search");
      return {v, dot(new_grad, direction)};
    };

    // Strong Wolfe line search: bracketing phase then bisection zoom.
    const double c1 = opts.wolfe_c1, c2 = opts.wolfe_c2;
    double step = s_hist.empty() ? std::min(1.0, 1.0 / max_norm(grad)) : 1.0;
    double prev_step = 0.0;
    Evaluation prev_eval{fx, slope0};
    double accepted = -1.0;
    Evaluation accepted_eval;
    double zoom_lo = 0.0, zoom_hi = 0.0;
    Evaluation lo_eval;
    bool need_zoom = false;

    for (int ls = 0; ls < opts.max_line_search; ++ls) {
      Evaluation e = eval_at(step);
      if (e.value > fx + c1 * step * slope0 || (ls > 0 && e.value >= prev_eval.value)) {
        zoom_lo = prev_step;
        lo_eval = prev_eval;
        zoom_hi = step;
        need_zoom = true;
        break;
      }
      if (std::abs(e.slope) <= -c2 * slope0) {
        accepted = step;
        accepted_eval = e;
        break;
      }
      if (e.slope >= 0.0) {
        zoom_lo = step;
        lo_eval = e;
        zoom_hi = prev_step;
        need_zoom = true;
        break;
      }
      prev_step = step;
      prev_eval = e;
      step *= 2.0;
    }

    if (need_zoom) {
      for (int ls = 0; ls < opts.max_line_search; ++ls) {
        const double mid = 0.5 * (zoom_lo + zoom_hi);
        Evaluation e = eval_at(mid);
        if (e.value > fx + c1 * mid * slope0 || e.value >= lo_eval.value) {
          zoom_hi = mid;
        } else {
          if (std::abs(e.slope) <= -c2 * slope0) {
            accepted = mid;
            accepted_eval = e;
            break;
          }
          if (e.slope * (zoom_hi - zoom_lo) >= 0.0) zoom_hi = zoom_lo;
          zoom_lo = mid;
          lo_eval = e;
        }
        if (std::abs(zoom_hi - zoom_lo) < 1e-16 * std::max(1.0, std::abs(zoom_lo))) break;
      }
      if (accepted < 0.0 && lo_eval.value < fx && zoom_lo > 0.0) {
        // Wolfe curvature never satisfied inside the bracket; take the best
        // decrease found so the outer loop can continue.
        accepted = zoom_lo;
        accepted_eval = eval_at(zoom_lo);
      }
    }

    if (accepted < 0.0) break;  // no usable step: stop with the current iterate

    // s = x_new - x, y = g_new - g
    std::vector<double> s(n), yv(n);
    for (std::size_t j = 0; j < n; ++j) {
      s[j] = accepted * direction[j];
      yv[j] = new_grad[j] - grad[j];
    }
    const double ys = dot(yv, s);

    x.swap(new_x);
    grad.swap(new_grad);
    fx = accepted_eval.value;

    result.gradient_norm = max_norm(grad);
    if (result.gradient_norm < opts.gradient_tolerance) {
      ++iter;
      result.converged = true;
      break;
    }

    if (ys > 1e-10 * std::sqrt(dot(s, s)) * std::sqrt(dot(yv, yv))) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(yv));
      rho_hist.push_back(1.0 / ys);
      if (static_cast<int>(s_hist.size()) > opts.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
  }

  result.x = std::move(x);
  result.value = fx;
  result.iterations = iter;
  return result;
}

}  // namespace tsord
