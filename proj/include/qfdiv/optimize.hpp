#ifndef QFDIV_OPTIMIZE_HPP
#define QFDIV_OPTIMIZE_HPP

// Unconstrained quasi-Newton minimization (BFGS on the inverse Hessian,
// Armijo backtracking) with central finite-difference gradients.

#include <Eigen/Dense>

#include <cmath>
#include <deque>
#include <functional>

namespace qfdiv {

struct BfgsOptions {
  int max_iters = 500;
  double fd_step = 1e-5;
  /// Converged once the value improved by less than stall_tol over the last
  /// stall_window iterations.
  int stall_window = 20;
  double stall_tol = 1e-10;
  double grad_tol = 1e-11;
};

struct BfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

inline Eigen::VectorXd central_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                        const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

inline BfgsResult minimize_bfgs(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x,
                                const BfgsOptions& opts) {
  const Eigen::Index n = x.size();
  BfgsResult res;
  double fx = f(x);
  if (n == 0) {
    res.x = x;
    res.value = fx;
    res.converged = std::isfinite(fx);
    return res;
  }
  Eigen::VectorXd g = central_gradient(f, x, opts.fd_step);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  bool fresh = true;  // hinv is the (scaled) identity
  bool first_update = true;
  std::deque<double> history{fx};

  int it = 0;
  for (; it < opts.max_iters; ++it) {
    if (!std::isfinite(fx)) break;
    if (g.lpNorm<Eigen::Infinity>() < opts.grad_tol) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd p = -hinv * g;
    double slope = g.dot(p);
    if (!(slope < 0.0)) {
      hinv.setIdentity();
      fresh = true;
      p = -g;
      slope = g.dot(p);
    }

    double t = 1.0;
    bool accepted = false;
    Eigen::VectorXd xn;
    double fn = 0.0;
    for (int k = 0; k < 50; ++k) {
      xn = x + t * p;
      fn = f(xn);
      if (std::isfinite(fn) && fn <= fx + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (!fresh) {
        hinv.setIdentity();
        fresh = true;
        continue;
      }
      // Steepest descent cannot decrease the value: numerical floor reached.
      res.converged = true;
      break;
    }

    const Eigen::VectorXd gn = central_gradient(f, xn, opts.fd_step);
    const Eigen::VectorXd s = xn - x;
    const Eigen::VectorXd y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm() && sy > 0.0) {
      if (first_update) {
        hinv *= sy / y.squaredNorm();
        first_update = false;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(n, n);
      hinv = (ident - rho * s * y.transpose()) * hinv * (ident - rho * y * s.transpose()) +
             rho * s * s.transpose();
      fresh = false;
    }
    x = xn;
    fx = fn;
    g = gn;

    history.push_back(fx);
    if (static_cast<int>(history.size()) > opts.stall_window + 1) history.pop_front();
    if (static_cast<int>(history.size()) == opts.stall_window + 1 && history.front() - fx < opts.stall_tol) {
      res.converged = true;
      ++it;
      break;
    }
  }
  res.x = x;
  res.value = fx;
  res.iterations = it;
  res.converged = res.converged && std::isfinite(fx);
  return res;
}

}  // namespace qfdiv

#endif  // QFDIV_OPTIMIZE_HPP
