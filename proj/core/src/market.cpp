#include "wsens/market.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace wsens {

MarketModel::MarketModel(int d, int n, CoefficientProcess mu, CoefficientProcess sigma,
                         std::optional<CoefficientProcess> r, double x0)
    : assets(d),
      factors(n),
      drift(std::move(mu)),
      volatility(std::move(sigma)),
      rate(r ? std::move(*r) : CoefficientProcess::zero(1, 1)),
      initial_wealth(x0) {
  validate();
}

void MarketModel::validate() const {
  if (assets < 1 || factors < assets || factors > kMaxDim)
    throw ConfigError("market: need 1 <= d <= n <= " + std::to_string(kMaxDim));
  if (!(initial_wealth > 0.0) || !std::isfinite(initial_wealth))
    throw ConfigError("market: initial wealth must be positive");
  if (!(condition_cap > 1.0)) throw ConfigError("market: condition cap must exceed 1");
  drift.require_shape(assets, 1, factors, "market drift");
  volatility.require_shape(assets, factors, factors, "market volatility");
  rate.require_shape(1, 1, factors, "market rate");
}

bool MarketModel::deterministic() const noexcept {
  return drift.deterministic() && volatility.deterministic() && rate.deterministic();
}

std::optional<SmallVector> price_of_risk(const SmallMatrix& sigma, const SmallVector& mu, double r,
                                         double cap) {
  Eigen::JacobiSVD<SmallMatrix> svd(sigma, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (!(smin > 0.0) || (smax / smin) * (smax / smin) > cap) return std::nullopt;
  SmallVector excess = mu;
  excess.array() -= r;
  SmallVector coords = svd.matrixU().transpose() * excess;
  coords.array() /= s.array();
  return SmallVector(svd.matrixV() * coords);
}

namespace {

std::optional<SmallMatrix> gram_inverse(const SmallMatrix& sigma, double cap) {
  Eigen::JacobiSVD<SmallMatrix> svd(sigma);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (!(smin > 0.0) || (s(0) / smin) * (s(0) / smin) > cap) return std::nullopt;
  SmallMatrix gram = sigma * sigma.transpose();
  return SmallMatrix(gram.ldlt().solve(SmallMatrix::Identity(gram.rows(), gram.cols())));
}

}  // namespace

NodeMatrix evaluate_coefficient(const CoefficientProcess& proc, const Path& path, const TimeGrid& grid) {
  if (path.levels.rows() != grid.steps() + 1) throw ConfigError("evaluate: path does not match the grid");
  const int width = proc.rows() * proc.cols();
  NodeMatrix out(grid.steps() + 1, width);
  for (int k = 0; k <= grid.steps(); ++k) {
    const SmallMatrix& v = proc.evaluate(grid.time(k), path.levels.row(k).data());
    for (int i = 0; i < proc.rows(); ++i)
      for (int j = 0; j < proc.cols(); ++j) out(k, i * proc.cols() + j) = v(i, j);
  }
  return out;
}

VectorField market_price_of_risk(const MarketModel& model) {
  const double cap = model.condition_cap;
  return VectorField({model.drift, model.volatility, model.rate}, model.factors,
                     [cap](std::span<const SmallMatrix* const> v) {
                       return price_of_risk(*v[1], v[0]->col(0), (*v[2])(0, 0), cap);
                     },
                     "sigma sigma^T singular or above the condition cap");
}

NodeMatrix market_price_of_risk(const MarketModel& model, const Path& path, const TimeGrid& grid) {
  NodeMatrix out;
  market_price_of_risk(model).fill(grid, path.levels, out, path.index);
  return out;
}

VectorField perturbed_price_of_risk(const MarketModel& model, const CoefficientProcess& dmu,
                                    const CoefficientProcess& dsigma, const CoefficientProcess& dr,
                                    double tau) {
  dmu.require_shape(model.assets, 1, model.factors, "drift direction");
  dsigma.require_shape(model.assets, model.factors, model.factors, "volatility direction");
  dr.require_shape(1, 1, model.factors, "rate direction");
  if (tau == 0.0 || (dmu.is_zero() && dsigma.is_zero() && dr.is_zero())) return market_price_of_risk(model);
  const double cap = model.condition_cap;
  return VectorField(
      {model.drift, model.volatility, model.rate, dmu, dsigma, dr}, model.factors,
      [cap, tau](std::span<const SmallMatrix* const> v) {
        SmallMatrix sigma = *v[1] + tau * *v[4];
        SmallVector mu = v[0]->col(0) + tau * v[3]->col(0);
        return price_of_risk(sigma, mu, (*v[2])(0, 0) + tau * (*v[5])(0, 0), cap);
      },
      "perturbed sigma sigma^T singular or above the condition cap");
}

VectorField perturbed_rate(const MarketModel& model, const CoefficientProcess& dr, double tau) {
  dr.require_shape(1, 1, model.factors, "rate direction");
  return VectorField({model.rate, dr}, 1, [tau](std::span<const SmallMatrix* const> v) {
    SmallVector r(1);
    r(0) = (*v[0])(0, 0) + tau * (*v[1])(0, 0);
    return std::optional<SmallVector>(r);
  });
}

int numerical_rank(const SmallMatrix& m, double tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<SmallMatrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || !(s(0) > 0.0)) return 0;
  return static_cast<int>((s.array() > tol * s(0)).count());
}

namespace {

// [kernel equal, base full rank within the cap, ||(base base^T)^{-1}||_2]
SmallVector h1_entry(const SmallMatrix& base, const SmallMatrix& pert, double tol, double cap) {
  const long d = base.rows();
  const long n = base.cols();
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 2 * kMaxDim, kMaxDim> stacked(2 * d, n);
  stacked << base, pert;
  Eigen::JacobiSVD<decltype(stacked)> svd_stack(stacked);
  const auto& ss = svd_stack.singularValues();
  const int rank_stack = ss(0) > 0.0 ? static_cast<int>((ss.array() > tol * ss(0)).count()) : 0;
  const int rank_base = numerical_rank(base, tol);
  const int rank_pert = numerical_rank(pert, tol);
  SmallVector out(3);
  out(0) = (rank_stack == rank_base && rank_base == rank_pert) ? 1.0 : 0.0;
  // Both volatilities need a bounded right inverse.
  const auto inv_base = gram_inverse(base, cap);
  const auto inv_pert = gram_inverse(pert, cap);
  out(1) = (rank_base == d && rank_pert == d && inv_base && inv_pert) ? 1.0 : 0.0;
  auto norm = [](const auto& inv) {
    return inv ? Eigen::JacobiSVD<SmallMatrix>(*inv).singularValues()(0) : std::numeric_limits<double>::max();
  };
  out(2) = std::max(norm(inv_base), norm(inv_pert));
  return out;
}

}  // namespace

VectorField h1_field(const CoefficientProcess& sigma_base, const CoefficientProcess& dsigma, double tau,
                     double tol, double cap) {
  if (sigma_base.rows() != dsigma.rows() || sigma_base.cols() != dsigma.cols())
    throw ConfigError("h1 check: volatility shapes disagree");
  return VectorField({sigma_base, dsigma}, 3, [tau, tol, cap](std::span<const SmallMatrix* const> v) {
    return std::optional<SmallVector>(h1_entry(*v[0], *v[0] + tau * *v[1], tol, cap));
  });
}

namespace {

H1Report scan_h1(const VectorField& field, const PathEnsemble& ensemble) {
  const bool single = field.deterministic();
  const TimeGrid& grid = ensemble.grid();
  auto scan = [&](const Path& p, double* row) {
    row[0] = 1.0;
    row[1] = 1.0;
    row[2] = 0.0;
    row[3] = -1.0;
    for (int k = 0; k < grid.steps(); ++k) {
      const SmallVector& v = field.value(field.regime(grid.time(k), p.levels.row(k).data()));
      if ((v(0) == 0.0 || v(1) == 0.0) && row[3] < 0.0) row[3] = k;
      row[0] = std::min(row[0], v(0));
      row[1] = std::min(row[1], v(1));
      row[2] = std::max(row[2], v(2));
    }
  };
  Eigen::MatrixXd per_path;
  if (single) {
    per_path.resize(1, 4);
    Path p = ensemble.path(0);
    Eigen::Matrix<double, 1, 4> row;
    scan(p, row.data());
    per_path.row(0) = row;
  } else {
    per_path = ensemble.map(4, scan);
  }
  H1Report report;
  for (Eigen::Index i = 0; i < per_path.rows(); ++i) {
    report.inv_bound = std::max(report.inv_bound, per_path(i, 2));
    if (per_path(i, 3) >= 0.0 && report.worst_path == NumericalError::npos) {
      report.worst_path = static_cast<std::size_t>(i);
      report.worst_node = static_cast<std::size_t>(per_path(i, 3));
      report.worst_time = grid.time(static_cast<int>(per_path(i, 3)));
    }
    report.kernel_equal = report.kernel_equal && per_path(i, 0) != 0.0;
    report.full_rank = report.full_rank && per_path(i, 1) != 0.0;
  }
  return report;
}

}  // namespace

H1Report check_h1(const CoefficientProcess& sigma_base, const CoefficientProcess& sigma_pert,
                  const PathEnsemble& ensemble, double tol, double cap) {
  if (sigma_base.rows() != sigma_pert.rows() || sigma_base.cols() != sigma_pert.cols())
    throw ConfigError("h1 check: volatility shapes disagree");
  if (sigma_base.cols() != ensemble.dim()) throw ConfigError("h1 check: volatility does not match the ensemble");
  VectorField joint({sigma_base, sigma_pert}, 3, [tol, cap](std::span<const SmallMatrix* const> v) {
    return std::optional<SmallVector>(h1_entry(*v[0], *v[1], tol, cap));
  });
  return scan_h1(joint, ensemble);
}

H1Report check_h1(const CoefficientProcess& sigma_base, const CoefficientProcess& dsigma, double tau,
                  const PathEnsemble& ensemble, double tol, double cap) {
  if (sigma_base.cols() != ensemble.dim()) throw ConfigError("h1 check: volatility does not match the ensemble");
  return scan_h1(h1_field(sigma_base, dsigma, tau, tol, cap), ensemble);
}

namespace {

using MatrixFn = std::function<SmallMatrix(const SmallMatrix&, const SmallMatrix&)>;

// Builds one coefficient process whose value is fn(a, b) in every joint
// regime, when the pair's structure allows it.
std::optional<CoefficientProcess> merge(const CoefficientProcess& a, const CoefficientProcess& b,
                                        const MatrixFn& fn) {
  using Kind = CoefficientProcess::Kind;
  if (a.kind() == Kind::constant && b.kind() == Kind::constant)
    return CoefficientProcess::constant(fn(a.value(0), b.value(0)));
  if (a.kind() == Kind::indicator || b.kind() == Kind::indicator) {
    const CoefficientProcess& ind = a.kind() == Kind::indicator ? a : b;
    if (a.kind() == Kind::piecewise || b.kind() == Kind::piecewise) return std::nullopt;
    if (a.kind() == Kind::indicator && b.kind() == Kind::indicator &&
        (a.driver() != b.driver() || a.threshold() != b.threshold()))
      return std::nullopt;
    auto pick = [](const CoefficientProcess& p, int r) -> const SmallMatrix& {
      return p.value(p.kind() == Kind::indicator ? r : 0);
    };
    return CoefficientProcess::indicator(ind.driver(), ind.threshold(), fn(pick(a, 0), pick(b, 0)),
                                         fn(pick(a, 1), pick(b, 1)));
  }
  std::vector<double> cuts = a.breakpoints();
  cuts.insert(cuts.end(), b.breakpoints().begin(), b.breakpoints().end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<SmallMatrix> values{fn(a.value(0), b.value(0))};
  for (double c : cuts) values.push_back(fn(a.evaluate(c, nullptr), b.evaluate(c, nullptr)));
  return CoefficientProcess::piecewise(std::move(cuts), std::move(values));
}

}  // namespace

KernelPerturbation kernel_preserving_perturbation(const CoefficientProcess& sigma_base,
                                                  const CoefficientProcess& a, double tau) {
  const int d = sigma_base.rows();
  if (a.rows() != d || a.cols() != d) throw ConfigError("kernel perturbation: A must be d x d");
  double worst = 0.0;
  auto fn = [&](const SmallMatrix& sigma, const SmallMatrix& amat) {
    auto inv = gram_inverse(sigma, std::numeric_limits<double>::max());
    if (!inv) throw NumericalError("kernel perturbation: sigma sigma^T is singular");
    const SmallMatrix m = amat * *inv;
    Eigen::JacobiSVD<SmallMatrix> svd(m);
    worst = std::max(worst, svd.singularValues()(0));
    return SmallMatrix(sigma + tau * m * sigma);
  };
  auto merged = merge(sigma_base, a, fn);
  if (!merged)
    throw ConfigError("kernel perturbation: this combination of coefficient kinds is not representable");
  KernelPerturbation out;
  out.volatility = std::move(*merged);
  out.safe_bound = worst > 0.0 ? 1.0 / worst : std::numeric_limits<double>::infinity();
  out.warning = !(std::abs(tau) < out.safe_bound);
  return out;
}

VectorField dlambda_direction(const MarketModel& model, const CoefficientProcess& dmu,
                              const CoefficientProcess& dsigma, const std::optional<CoefficientProcess>& dr) {
  dmu.require_shape(model.assets, 1, model.factors, "drift direction");
  dsigma.require_shape(model.assets, model.factors, model.factors, "volatility direction");
  const CoefficientProcess rate_dir = dr ? *dr : CoefficientProcess::zero(1, 1);
  rate_dir.require_shape(1, 1, model.factors, "rate direction");
  const double cap = model.condition_cap;
  return VectorField(
      {model.drift, model.volatility, model.rate, dmu, dsigma, rate_dir}, model.factors,
      [cap](std::span<const SmallMatrix* const> v) -> std::optional<SmallVector> {
        const SmallMatrix& sigma = *v[1];
        auto inv = gram_inverse(sigma, cap);
        if (!inv) return std::nullopt;
        SmallVector excess = v[0]->col(0);
        excess.array() -= (*v[2])(0, 0);
        const SmallMatrix& ds = *v[4];
        SmallVector dmu_eff = v[3]->col(0);
        dmu_eff.array() -= (*v[5])(0, 0);
        const SmallVector a = *inv * excess;
        SmallVector out = sigma.transpose() * (*inv * dmu_eff) + ds.transpose() * a -
                          sigma.transpose() * (*inv * ((sigma * ds.transpose() + ds * sigma.transpose()) * a));
        return out;
      },
      "sigma sigma^T singular or above the condition cap");
}

NodeMatrix dlambda_direction(const MarketModel& model, const CoefficientProcess& dmu,
                             const CoefficientProcess& dsigma, const Path& path, const TimeGrid& grid) {
  NodeMatrix out;
  dlambda_direction(model, dmu, dsigma).fill(grid, path.levels, out, path.index);
  return out;
}

}  // namespace wsens
