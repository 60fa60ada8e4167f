#include "dwreg/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "dwreg/error.hpp"

namespace dwreg {

namespace {

constexpr double kInfeasible = std::numeric_limits<double>::infinity();
constexpr double kGradientTolerance = 1e-4;

class CountingObjective {
 public:
  explicit CountingObjective(const Objective& f) : f_(f) {}

  double operator()(const Eigen::VectorXd& x) {
    ++evaluations_;
    const double value = f_(x);
    return std::isfinite(value) ? value : kInfeasible;
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  const Objective& f_;
  std::size_t evaluations_ = 0;
};

struct SimplexResult {
  Eigen::VectorXd best;
  double value;
  std::size_t iterations;
};

SimplexResult nelder_mead(CountingObjective& f, const Eigen::VectorXd& start, double tolerance,
                          std::size_t max_iterations) {
  const auto dim = start.size();
  std::vector<Eigen::VectorXd> points(static_cast<std::size_t>(dim + 1), start);
  std::vector<double> values(points.size());
  for (Eigen::Index j = 0; j < dim; ++j) {
    points[static_cast<std::size_t>(j + 1)](j) += 0.2 * std::max(1.0, std::abs(start(j)));
  }
  for (std::size_t i = 0; i < points.size(); ++i) values[i] = f(points[i]);

  std::vector<std::size_t> order(points.size());
  std::size_t iteration = 0;
  for (; iteration < max_iterations; ++iteration) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[order.size() - 2];

    if (std::isfinite(values[worst]) &&
        values[worst] - values[best] <= tolerance * (1.0 + std::abs(values[best]))) {
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (i != worst) centroid += points[i];
    }
    centroid /= static_cast<double>(dim);

    const Eigen::VectorXd reflected = centroid + (centroid - points[worst]);
    const double reflected_value = f(reflected);
    if (reflected_value < values[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - points[worst]);
      const double expanded_value = f(expanded);
      if (expanded_value < reflected_value) {
        points[worst] = expanded;
        values[worst] = expanded_value;
      } else {
        points[worst] = reflected;
        values[worst] = reflected_value;
      }
      continue;
    }
    if (reflected_value < values[second_worst]) {
      points[worst] = reflected;
      values[worst] = reflected_value;
      continue;
    }
    const bool outside = reflected_value < values[worst];
    const Eigen::VectorXd contracted =
        outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                : Eigen::VectorXd(centroid + 0.5 * (points[worst] - centroid));
    const double contracted_value = f(contracted);
    if (contracted_value < std::min(reflected_value, values[worst])) {
      points[worst] = contracted;
      values[worst] = contracted_value;
      continue;
    }
    // shrink toward the best vertex
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (i == best) continue;
      points[i] = points[best] + 0.5 * (points[i] - points[best]);
      values[i] = f(points[i]);
    }
  }
  const auto best = static_cast<std::size_t>(
      std::distance(values.begin(), std::min_element(values.begin(), values.end())));
  return {points[best], values[best], iteration};
}

Eigen::VectorXd gradient_of(CountingObjective& f, const Eigen::VectorXd& at, double step) {
  Eigen::VectorXd g(at.size());
  Eigen::VectorXd probe = at;
  for (Eigen::Index j = 0; j < at.size(); ++j) {
    const double h = step * std::max(1.0, std::abs(at(j)));
    probe(j) = at(j) + h;
    const double up = f(probe);
    probe(j) = at(j) - h;
    const double down = f(probe);
    probe(j) = at(j);
    g(j) = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (!(loglik_tolerance > 0.0)) throw std::invalid_argument("loglik_tolerance must be positive");
  if (max_iterations == 0) throw std::invalid_argument("max_iterations must be positive");
  if (!(hessian_step > 0.0)) throw std::invalid_argument("hessian_step must be positive");
}

double scaled_gradient_norm(const Eigen::VectorXd& gradient, const Eigen::VectorXd& at) {
  double norm = 0.0;
  for (Eigen::Index j = 0; j < gradient.size(); ++j) {
    const double g = std::abs(gradient(j)) * std::max(1.0, std::abs(at(j)));
    norm = std::isfinite(g) ? std::max(norm, g) : std::numeric_limits<double>::infinity();
  }
  return norm;
}

Eigen::VectorXd numeric_gradient(const Objective& objective, const Eigen::VectorXd& at, double step) {
  CountingObjective f(objective);
  return gradient_of(f, at, step);
}

OptimizationResult minimize(const Objective& objective, const Eigen::VectorXd& start,
                            const OptimizerConfig& config) {
  config.validate();
  CountingObjective f(objective);
  constexpr double kGradientStep = 6.0554544523933395e-06;  // cbrt(machine epsilon)

  const double start_value = f(start);
  if (!std::isfinite(start_value)) {
    throw NumericalError("objective is not finite at the starting point");
  }

  const auto dim = static_cast<std::size_t>(start.size());
  const SimplexResult simplex =
      nelder_mead(f, start, std::sqrt(config.loglik_tolerance), std::min(config.max_iterations, 200 * (dim + 1)));

  Eigen::VectorXd x = simplex.best;
  double fx = simplex.value;
  Eigen::VectorXd g = gradient_of(f, x, kGradientStep);
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(start.size(), start.size());
  auto initial_inverse = [&](const Eigen::VectorXd& grad) {
    const double gmax = grad.cwiseAbs().maxCoeff();
    return Eigen::MatrixXd(identity * (gmax > 1.0 ? 1.0 / gmax : 1.0));
  };
  Eigen::MatrixXd inverse_hessian = initial_inverse(g);
  bool fresh = true;  // inverse_hessian is the initial scaled identity
  bool converged = false;

  std::size_t iteration = 0;
  for (; iteration < config.max_iterations; ++iteration) {
    if (!g.allFinite()) break;
    if (scaled_gradient_norm(g, x) < 1e-9) {
      converged = true;
      break;
    }
    Eigen::VectorXd direction = -inverse_hessian * g;
    double slope = g.dot(direction);
    if (!(slope < 0.0)) {
      inverse_hessian = initial_inverse(g);
      fresh = true;
      direction = -inverse_hessian * g;
      slope = g.dot(direction);
    }

    double alpha = 1.0;
    Eigen::VectorXd candidate;
    double candidate_value = kInfeasible;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      candidate = x + alpha * direction;
      candidate_value = f(candidate);
      if (candidate_value < fx && candidate_value <= fx + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (!fresh) {
        inverse_hessian = initial_inverse(g);
        fresh = true;
        continue;
      }
      // no descent possible along the gradient: finite-difference noise floor
      converged = scaled_gradient_norm(g, x) < kGradientTolerance;
      break;
    }

    const Eigen::VectorXd next_gradient = gradient_of(f, candidate, kGradientStep);
    const Eigen::VectorXd s = candidate - x;
    const Eigen::VectorXd y = next_gradient - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh) inverse_hessian = identity * (sy / y.squaredNorm());
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd left = identity - rho * s * y.transpose();
      inverse_hessian = left * inverse_hessian * left.transpose() + rho * s * s.transpose();
      fresh = false;
    }

    const double change = fx - candidate_value;
    x = candidate;
    fx = candidate_value;
    g = next_gradient;
    if (change < config.loglik_tolerance && scaled_gradient_norm(g, x) < kGradientTolerance) {
      converged = true;
      ++iteration;
      break;
    }
  }

  // Near the optimum the remaining decrease can sit below the objective's
  // rounding noise while the gradient is still measurable; Newton steps on
  // the finite-difference Hessian, accepted when they shrink the gradient,
  // finish the job.
  const double noise = 1e-9 * (1.0 + std::abs(fx));
  for (int polish = 0; polish < 8 && g.allFinite() && scaled_gradient_norm(g, x) >= kGradientTolerance; ++polish) {
    Eigen::MatrixXd hessian;
    try {
      hessian = numeric_hessian([&f](const Eigen::VectorXd& p) { return f(p); }, x, config.hessian_step);
    } catch (const NumericalError&) {
      break;
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(hessian);
    if (llt.info() != Eigen::Success) break;
    const Eigen::VectorXd candidate = x - llt.solve(g);
    const double candidate_value = f(candidate);
    if (!(candidate_value <= fx + noise)) break;
    const Eigen::VectorXd candidate_gradient = gradient_of(f, candidate, kGradientStep);
    if (!(scaled_gradient_norm(candidate_gradient, candidate) < scaled_gradient_norm(g, x))) break;
    x = candidate;
    fx = std::min(fx, candidate_value);
    g = candidate_gradient;
    ++iteration;
  }
  if (!converged && std::isfinite(fx) && scaled_gradient_norm(g, x) < kGradientTolerance) converged = true;

  OptimizationResult result;
  result.argmin = x;
  result.value = fx;
  result.iterations = simplex.iterations + iteration;
  result.evaluations = f.evaluations();
  result.converged = converged && std::isfinite(fx);
  result.scaled_gradient_norm = scaled_gradient_norm(g, x);
  return result;
}

Eigen::MatrixXd numeric_hessian(const Objective& objective, const Eigen::VectorXd& at, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("numeric_hessian: step must be positive");
  const auto dim = at.size();
  Eigen::VectorXd h(dim);
  for (Eigen::Index j = 0; j < dim; ++j) h(j) = std::max(step, step * std::abs(at(j)));

  auto eval = [&](const Eigen::VectorXd& x) {
    const double value = objective(x);
    if (!std::isfinite(value)) {
      throw NumericalError("numeric_hessian: objective is not finite near the evaluation point");
    }
    return value;
  };

  const double center = eval(at);
  Eigen::MatrixXd hessian(dim, dim);
  Eigen::VectorXd probe = at;
  for (Eigen::Index i = 0; i < dim; ++i) {
    probe(i) = at(i) + h(i);
    const double up = eval(probe);
    probe(i) = at(i) - h(i);
    const double down = eval(probe);
    probe(i) = at(i);
    hessian(i, i) = (up - 2.0 * center + down) / (h(i) * h(i));
    for (Eigen::Index j = 0; j < i; ++j) {
      probe(i) = at(i) + h(i);
      probe(j) = at(j) + h(j);
      const double pp = eval(probe);
      probe(j) = at(j) - h(j);
      const double pm = eval(probe);
      probe(i) = at(i) - h(i);
      const double mm = eval(probe);
      probe(j) = at(j) + h(j);
      const double mp = eval(probe);
      probe(i) = at(i);
      probe(j) = at(j);
      hessian(i, j) = (pp - pm - mp + mm) / (4.0 * h(i) * h(j));
      hessian(j, i) = hessian(i, j);
    }
  }
  return 0.5 * (hessian + hessian.transpose());
}

}  // namespace dwreg
