#include "newton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace scnp::detail {

namespace {

double condition_number(const Matrix& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s[s.size() - 1];
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s[0] / smin;
}

// Descent direction for a (possibly singular) PSD Hessian.
Vector regularized_direction(const Matrix& h, const Vector& g) {
  const auto n = g.size();
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  double mu = 0.0;
  for (int attempt = 0; attempt < 12; ++attempt) {
    Matrix reg = h;
    reg.diagonal().array() += mu;
    Eigen::LDLT<Matrix> ldlt(reg);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      Vector d = ldlt.solve(-g);
      if (d.allFinite() && d.dot(g) < 0.0) return d;
    }
    mu = mu == 0.0 ? 1e-12 * scale : mu * 100.0;
  }
  return -g / static_cast<double>(std::max<Eigen::Index>(n, 1));
}

Matrix central_difference(const std::function<Vector(const Vector&)>& residual, const Vector& x) {
  const Vector f0 = residual(x);
  Matrix jac(f0.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = 1e-7 * std::max(1.0, std::abs(x[j]));
    Vector xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    jac.col(j) = (residual(xp) - residual(xm)) / (2.0 * h);
  }
  return jac;
}

}  // namespace

NewtonResult newton_minimize(const SmoothObjective& f, Vector x0, const NewtonOptions& opts) {
  NewtonResult out;
  out.x = std::move(x0);
  double value = f.value(out.x);
  Vector grad = f.gradient(out.x);
  for (int it = 0; it <= opts.max_iters; ++it) {
    out.iterations = it;
    out.residual = grad.lpNorm<Eigen::Infinity>();
    if (out.residual <= opts.grad_tol) {
      out.converged = true;
      return out;
    }
    if (it == opts.max_iters) break;

    const Vector dir = regularized_direction(f.hessian(out.x), grad);
    const double slope = grad.dot(dir);
    double step = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < opts.max_backtracks; ++bt, step *= 0.5) {
      Vector trial = out.x + step * dir;
      const double tv = f.value(trial);
      if (!std::isfinite(tv)) continue;
      const bool armijo = tv <= value + opts.armijo_c * step * slope;
      // Near the optimum the objective is flat to machine precision; accept
      // steps that keep the value and shrink the gradient.
      bool flat = false;
      Vector tg;
      if (!armijo && tv <= value + 1e-14 * std::max(1.0, std::abs(value))) {
        tg = f.gradient(trial);
        flat = tg.lpNorm<Eigen::Infinity>() < out.residual;
      }
      if (armijo || flat) {
        out.x = std::move(trial);
        value = tv;
        grad = flat ? std::move(tg) : f.gradient(out.x);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  out.residual = grad.lpNorm<Eigen::Infinity>();
  out.converged = out.residual <= opts.grad_tol;
  return out;
}

NewtonResult newton_root(const std::function<Vector(const Vector&)>& residual,
                         const std::function<Matrix(const Vector&)>& jacobian, Vector x0,
                         const NewtonOptions& opts) {
  NewtonResult out;
  out.x = std::move(x0);
  Vector fx = residual(out.x);
  auto merit = [](const Vector& r) { return 0.5 * r.squaredNorm(); };
  double m = merit(fx);
  for (int it = 0; it <= opts.max_iters; ++it) {
    out.iterations = it;
    out.residual = fx.lpNorm<Eigen::Infinity>();
    if (out.residual <= opts.grad_tol) {
      out.converged = true;
      return out;
    }
    if (it == opts.max_iters) break;

    Matrix jac = jacobian(out.x);
    if (condition_number(jac) > opts.max_condition) {
      Matrix fd = central_difference(residual, out.x);
      if (condition_number(fd) < condition_number(jac)) jac = std::move(fd);
    }
    Vector dir = jac.colPivHouseholderQr().solve(-fx);
    Vector grad_m = jac.transpose() * fx;
    if (!dir.allFinite() || grad_m.dot(dir) >= 0.0) {
      Matrix normal = jac.transpose() * jac;
      normal.diagonal().array() += 1e-10 * std::max(1.0, normal.cwiseAbs().maxCoeff());
      dir = normal.ldlt().solve(-grad_m);
    }
    const double slope = grad_m.dot(dir);
    double step = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < opts.max_backtracks; ++bt, step *= 0.5) {
      Vector trial = out.x + step * dir;
      Vector ft = residual(trial);
      if (!ft.allFinite()) continue;
      const double mt = merit(ft);
      if (mt <= m + opts.armijo_c * step * slope || ft.lpNorm<Eigen::Infinity>() < 0.5 * out.residual) {
        out.x = std::move(trial);
        fx = std::move(ft);
        m = mt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  out.residual = fx.lpNorm<Eigen::Infinity>();
  out.converged = out.residual <= opts.grad_tol;
  return out;
}

}  // namespace scnp::detail
