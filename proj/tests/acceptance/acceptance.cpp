// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include <wsens/wsens.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "oracles.hpp"

using namespace wsens;

namespace {

// Pinned tolerances.
constexpr double kExample1StrongTol = 0.01;
constexpr double kExample1WeakTol = 0.015;
constexpr double kGapSigmas = 5.0;
constexpr double kMcSigmas = 3.0;
constexpr double kChainRuleRelTol = 1e-12;
constexpr double kMinSlope = 1.8;
constexpr double kHomogeneityRelTol = 1e-12;
constexpr double kHadamardTol = 1e-4;
constexpr std::uint64_t kSeed = 20240607;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

std::string f(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

MarketModel scalar_market(const std::string& mu, double x0 = 1.0) {
  return MarketModel(1, 1, CoefficientProcess::parse(mu, 1, 1), CoefficientProcess::constant(1.0), std::nullopt, x0);
}

void example1(Outcome& o) {
  const auto r = example1_report(1.0, 200000, 2000, kSeed);
  o.check(std::abs(r.strong.mean - 0.5) <= kExample1StrongTol, "strong estimate");
  o.detail << "E int lambda dt = " << f(r.strong.mean) << " (se " << f(r.strong.std_error) << ", target 0.5 +- "
           << kExample1StrongTol << ")";
}

void example1_weak(Outcome& o) {
  const auto r = example1_report(1.0, 200000, 2000, kSeed);
  o.check(std::abs(r.weak.mean - oracle::example1_weak(1.0)) <= kExample1WeakTol, "weak estimate");
  o.check(std::abs(r.gap.mean) > kGapSigmas * r.gap.std_error, "gap significance");
  const auto long_run = example1_report(4.0, 200000, 2000, kSeed);
  o.check(long_run.gap.mean < -kGapSigmas * long_run.gap.std_error, "T = 4 sign");
  o.detail << "weak = " << f(r.weak.mean) << " (target " << f(oracle::example1_weak(1.0)) << " +- " << kExample1WeakTol
           << "), gap " << f(r.gap.mean) << " = " << f(std::abs(r.gap.mean) / r.gap.std_error)
           << " se; T = 4: weak - strong = " << f(long_run.gap.mean) << " (se " << f(long_run.gap.std_error) << ")";
}

void coincidence(Outcome& o) {
  const MarketModel m(2, 2, CoefficientProcess::parse("const:[0.08,0.05]", 2, 1),
                      CoefficientProcess::parse("const:[0.2,0,0.05,0.25]", 2, 2), CoefficientProcess::constant(0.01),
                      1.0);
  PerturbationSpec p;
  p.drift = CoefficientProcess::parse("const:[0.1,-0.05]", 2, 1);
  p.volatility = CoefficientProcess::parse("const:[0.05,0.02,-0.01,0.05]", 2, 2);
  const PathEnsemble e(TimeGrid(1.0, 100), 2, 100000, kSeed);
  double worst = 0.0;
  for (const auto& r : value_surface(m, Utility::power(3.0), p, {0.0, 0.1, 0.2}, e)) {
    const double z = r.gap_std_error > 0 ? std::abs(r.weak.mean - r.strong.mean) / r.gap_std_error : 0.0;
    o.check(std::abs(r.weak.mean - r.strong.mean) <= kMcSigmas * r.gap_std_error + 1e-12, "tau " + f(r.tau));
    worst = std::max(worst, z);
    o.detail << "tau " << f(r.tau) << ": " << f(r.weak.mean) << " vs " << f(r.strong.mean) << "; ";
  }
  o.detail << "max |gap| = " << f(worst) << " se (limit " << kMcSigmas << ")";
}

void formula_vs_oracle(Outcome& o) {
  const PathEnsemble e(TimeGrid(1.0, 50), 1, 100000, kSeed);
  for (double p : {2.0, 3.0}) {
    const MarketModel m = scalar_market("const:[0.5]");
    const Utility u = Utility::power(p);
    const auto opt = optimal_terminal_wealth(m, u, e);
    const double closed = oracle::power_value(p, 1.0, 0.25, 1.0) * (u.q() - 1.0) * 0.5 * 0.3;
    const auto s = weak_sens_mu(m, u, CoefficientProcess::constant(0.3), e, opt);
    const auto l = weak_sens_lambda(VectorField::constant(SmallVector::Constant(1, 0.3)), e, opt);
    o.check(std::abs(s.mean - closed) <= kMcSigmas * s.std_error, "mu vs closed form p=" + f(p));
    o.check(std::abs(l.mean - closed) <= kMcSigmas * l.std_error, "lambda vs closed form p=" + f(p));
    PerturbationSpec dir;
    dir.drift = CoefficientProcess::constant(0.3);
    const auto rep = weak_report(m, u, dir, e, "mu");
    o.check(rep.pass, "finite difference p=" + f(p));
    o.detail << "p=" << f(p) << ": closed " << f(closed) << ", mu " << f(s.mean) << " (se " << f(s.std_error)
             << "), fd gap " << f(rep.gap) << " (tol " << f(rep.tolerance) << "); ";
  }
  // Chain rule on an adapted two-asset model.
  const MarketModel m(2, 2, CoefficientProcess::parse("ind:j=1;c=0;lo=[0.1,0.3];hi=[0.4,0.2]", 2, 1),
                      CoefficientProcess::parse("ind:j=2;c=0.2;lo=[1,0.2,0,0.8];hi=[1.5,0,0.3,1]", 2, 2),
                      CoefficientProcess::constant(0.02), 1.0);
  const PathEnsemble e2(TimeGrid(1.0, 50), 2, 20000, kSeed);
  const Utility u = Utility::power(3.0);
  const auto opt = optimal_terminal_wealth(m, u, e2);
  const auto dmu = CoefficientProcess::parse("const:[0.2,-0.1]", 2, 1);
  const auto dsig = CoefficientProcess::parse("ind:j=1;c=0;lo=[0.1,0,0,0.1];hi=[0,0.2,0.1,0]", 2, 2);
  const auto a = weak_sens_mu(m, u, dmu, e2, opt);
  const auto b = weak_sens_lambda(dlambda_direction(m, dmu, CoefficientProcess::zero(2, 2)), e2, opt);
  const auto c = weak_sens_sigma(m, u, dsig, e2, opt);
  const auto d = weak_sens_lambda(dlambda_direction(m, CoefficientProcess::zero(2, 1), dsig), e2, opt);
  const double scale = 1.0 + a.influence.cwiseAbs().maxCoeff() + c.influence.cwiseAbs().maxCoeff();
  const double diff = std::max((a.influence - b.influence).cwiseAbs().maxCoeff(),
                               (c.influence - d.influence).cwiseAbs().maxCoeff());
  o.check(diff <= kChainRuleRelTol * scale, "chain rule");
  o.detail << "chain rule max path difference " << f(diff);
}

void example2(Outcome& o) {
  const PathEnsemble e(TimeGrid(1.0, 500), 1, 100000, kSeed);
  const VectorField delta = VectorField::constant(SmallVector::Constant(1, -1.0));
  const auto det = example2_discrepancy(VectorField::constant(SmallVector::Ones(1)), delta, e);
  const auto ind = example2_discrepancy(
      VectorField::from_process(CoefficientProcess::indicator(0, 0.0, SmallMatrix::Zero(1, 1), SmallMatrix::Ones(1, 1))),
      delta, e);
  o.check(std::abs(det.mean) <= kMcSigmas * det.std_error, "deterministic");
  o.check(ind.mean > kMcSigmas * ind.std_error, "indicator");
  o.detail << "deterministic " << f(det.mean) << " (se " << f(det.std_error) << "), indicator " << f(ind.mean)
           << " (se " << f(ind.std_error) << ")";
}

void second_order(Outcome& o) {
  const PathEnsemble e(TimeGrid(1.0, 100), 1, 50000, kSeed);
  for (const char* mu : {"const:[0.5]", "ind:j=1;c=0;lo=[0];hi=[1]"}) {
    for (double p : {2.0, 3.0}) {
      const auto r = second_order_check(scalar_market(mu), Utility::power(p),
                                        VectorField::constant(SmallVector::Constant(1, -1.0)), kDefaultEpsSchedule, e,
                                        kMinSlope);
      o.check(r.pass, std::string(mu) + " p=" + f(p));
      o.detail << mu << " p=" << f(p) << ": ";
      if (r.fitted_points >= 2)
        o.detail << "slope " << f(r.slope) << " over " << r.fitted_points << " points; ";
      else
        o.detail << "residual non-negative on the grid (min " << f(*std::min_element(r.residual.begin(), r.residual.end()))
                 << "); ";
    }
  }
}

void solver(Outcome& o) {
  const PathEnsemble e(TimeGrid(1.0, 50), 1, 200000, kSeed);
  const auto opt = optimal_terminal_wealth(scalar_market("const:[1]"), Utility::sqrt(), e);
  const double target = 2.0 * std::exp(0.5);
  o.check(std::abs(opt.value.mean - target) <= kMcSigmas * opt.value.std_error, "value");
  o.check(std::abs(opt.budget.mean - 1.0) <= kMcSigmas * opt.budget.std_error + 1e-12, "budget");
  o.detail << "value " << f(opt.value.mean) << " (se " << f(opt.value.std_error) << ", target " << f(target)
           << "), budget " << f(opt.budget.mean);
}

void danskin(Outcome& o) {
  std::mt19937_64 rng(kSeed);
  int ties = 0, mismatches = 0, hadamard = 0;
  std::normal_distribution<double> n01;
  const std::vector<double> steps{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 1 + trial % 5;
    const Eigen::MatrixXd cloud = oracle::integer_cloud(rng, 1 + static_cast<int>(rng() % 20), dim);
    const Eigen::VectorXd d = oracle::integer_cloud(rng, 1, dim).row(0).transpose();
    const Eigen::VectorXd delta = oracle::integer_cloud(rng, 1, dim).row(0).transpose();
    const auto s = support_value(d, cloud);
    const auto ref = oracle::support(d, cloud, kDefaultTieTol);
    const double der = directional_derivative(d, delta, cloud);
    if (s.value != ref.value || s.argmax != ref.argmax ||
        der != oracle::danskin_derivative(d, delta, cloud, kDefaultTieTol))
      ++mismatches;
    ties += ref.argmax.size() > 1;
    double last[2];
    bool ok = true;
    for (int seq = 0; seq < 2; ++seq) {
      Eigen::VectorXd u(dim);
      for (auto& x : u) x = n01(rng);
      std::vector<Eigen::VectorXd> dirs;
      for (double t : steps) dirs.push_back(delta + (seq ? -1.0 : 1.0) * t * u);
      const auto r = hadamard_probe(d, delta, steps, dirs, cloud, kHadamardTol);
      ok = ok && r.converged;
      last[seq] = r.quotients.back();
    }
    hadamard += ok && std::abs(last[0] - last[1]) <= kHadamardTol;
  }
  o.check(mismatches == 0, "enumeration");
  o.check(ties > 0, "ties exercised");
  o.check(hadamard == 100, "Hadamard");
  o.detail << "100 clouds, " << mismatches << " mismatches, " << ties << " with ties, " << hadamard
           << "/100 approach-independent limits";
}

void modular(Outcome& o) {
  std::mt19937_64 rng(kSeed);
  std::lognormal_distribution<double> ln(0.0, 1.0);
  auto positive = [&](int m) {
    Eigen::VectorXd z(m);
    for (auto& v : z) v = ln(rng);
    return z;
  };
  int holder_ok = 0;
  double homogeneity = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double p = 1.2 + 0.03 * trial;
    std::vector<PathFunctional> dens;
    for (int k = 0; k <= trial % 3; ++k) {
      Eigen::VectorXd y = positive(200);
      dens.push_back(y / y.mean());
    }
    const Eigen::VectorXd y = positive(200), z = positive(200);
    holder_ok += holder_check(y, z, p, dens).holds;
    const double s = 0.1 + trial;
    const double q = p / (p - 1.0);
    homogeneity = std::max(homogeneity, std::abs(norm_i((s * y).eval(), q, dens) / (s * norm_i(y, q, dens)) - 1.0));
    homogeneity = std::max(homogeneity, std::abs(norm_j((s * z).eval(), p, dens) / (s * norm_j(z, p, dens)) - 1.0));
  }
  o.check(homogeneity <= kHomogeneityRelTol, "homogeneity");
  o.check(holder_ok == 100, "Hoelder");

  const MarketModel m(1, 2, CoefficientProcess::constant(0.5), CoefficientProcess::parse("const:[1,0]", 1, 2),
                      std::nullopt, 1.0);
  const PathEnsemble e(TimeGrid(1.0, 50), 2, 100000, kSeed);
  const Utility u = Utility::sqrt();
  const auto dens = kernel_densities(
      m, {CoefficientProcess::parse("const:[0,0.3]", 2, 1), CoefficientProcess::parse("const:[0,-0.3]", 2, 1)}, e);
  const auto opt = optimal_terminal_wealth(m, u, e);
  PathFunctional ux(opt.xstar.size());
  for (Eigen::Index i = 0; i < ux.size(); ++i) ux[i] = u.value(opt.xstar[i]);
  const auto j = j_functional(ux, u, dens);
  const double jm = j.mean;
  const double amemiya = amemiya_norm([jm](double s) { return s * s * jm; });
  o.check(std::abs(j.mean - 1.0) <= kMcSigmas * j.std_error, "J(U(X*)) = x0");
  o.check(amemiya <= 2.0 + kMcSigmas * j.std_error, "norm bound");
  o.detail << "homogeneity error " << f(homogeneity) << ", Hoelder " << holder_ok << "/100, J(U(X*)) " << f(j.mean)
           << " (se " << f(j.std_error) << "), ||U(X*)||_J " << f(amemiya) << " <= 1 + x0";
}

void infrastructure(Outcome& o) {
  const MarketModel m(1, 1, CoefficientProcess::parse("ind:j=1;c=0;lo=[0.3];hi=[0.6]", 1, 1),
                      CoefficientProcess::constant(1.0), CoefficientProcess::constant(0.02), 1.0);
  PerturbationSpec p;
  p.drift = CoefficientProcess::constant(0.5);
  p.tau = 0.1;
  const PathEnsemble base(TimeGrid(1.0, 100), 1, 20001, kSeed);
  const auto ref = weak_value(m, Utility::power(3.0), p, base.with_workers(1));
  bool identical = true;
  for (int w : {2, 3, 8}) {
    const auto other = weak_value(m, Utility::power(3.0), p, base.with_workers(w));
    identical = identical && other.value.mean == ref.value.mean &&
                (other.value.influence.array() == ref.value.influence.array()).all();
  }
  o.check(identical, "worker invariance");

  const auto sigma = CoefficientProcess::parse("ind:j=2;c=0;lo=[1,0];hi=[2,0]", 1, 2);
  const PathEnsemble e(TimeGrid(1.0, 100), 2, 2000, kSeed);
  bool family = true;
  for (double tau : {-0.5, 0.25, 1.0, 1.5})
    family = family &&
             check_h1(sigma, kernel_preserving_perturbation(sigma, CoefficientProcess::constant(0.5), tau).volatility, e)
                 .passed();
  const auto rotating = check_h1(sigma, CoefficientProcess::parse("const:[0,1]", 1, 2), 0.3, e);
  o.check(family, "kernel-preserving family");
  o.check(!rotating.passed(), "rotation rejected");
  o.detail << "weak value bit-identical for 1/2/3/8 workers: " << (identical ? "yes" : "no")
           << "; kernel-preserving family accepted: " << (family ? "yes" : "no")
           << "; rotation rejected at path " << rotating.worst_path << " node " << rotating.worst_node;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<void(Outcome&)>> criteria[] = {
      {"Example 1 strong sensitivity", example1},
      {"Example 1 weak sensitivity and gap", example1_weak},
      {"deterministic weak/strong coincidence", coincidence},
      {"weak formula vs closed form, FD and chain rule", formula_vs_oracle},
      {"Example 2 discrepancy", example2},
      {"second-order residual bound", second_order},
      {"static solver closed form", solver},
      {"support function and Danskin derivative", danskin},
      {"modular norms", modular},
      {"reproducibility and kernel stability", infrastructure},
  };
  int failed = 0;
  int n = 0;
  for (const auto& [name, fn] : criteria) {
    ++n;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d %s  %s: %s [%.1fs]\n", n, o.pass ? "PASS" : "FAIL", name, o.detail.str().c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%d criteria passed\n", n - failed, n);
  return failed == 0 ? 0 : 1;
}
