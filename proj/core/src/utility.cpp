#include "wsens/utility.hpp"

#include "wsens/coefficient.hpp"
#include "wsens/types.hpp"

#include <cmath>

// Boost 1.74's pchip calls isnan unqualified.
namespace boost::math::interpolators {
using std::isnan;
}

#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace wsens {

// Monotone cubic in (log x, log U) with power-law tails matching the
// elasticity at both ends.
struct Utility::Table {
  double log_x_min = 0.0, log_x_max = 0.0;
  double log_u_min = 0.0, log_u_max = 0.0;
  double slope_min = 0.0, slope_max = 0.0;
  std::unique_ptr<boost::math::interpolators::pchip<std::vector<double>>> spline;

  double log_value(double lx) const {
    if (lx < log_x_min) return log_u_min + slope_min * (lx - log_x_min);
    if (lx > log_x_max) return log_u_max + slope_max * (lx - log_x_max);
    return (*spline)(lx);
  }
  double elasticity(double lx) const {
    if (lx < log_x_min) return slope_min;
    if (lx > log_x_max) return slope_max;
    return spline->prime(lx);
  }
};

namespace {

double parse_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("utility: bad " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

std::map<std::string, std::string, std::less<>> parse_fields(std::string_view body) {
  std::map<std::string, std::string, std::less<>> out;
  std::size_t start = 0;
  while (start <= body.size()) {
    std::size_t semi = body.find(';', start);
    std::string_view item = body.substr(start, semi - start);
    if (!item.empty()) {
      std::size_t eq = item.find('=');
      if (eq == std::string_view::npos) throw ConfigError("utility: expected key=value");
      out[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
    }
    if (semi == std::string_view::npos) break;
    start = semi + 1;
  }
  return out;
}

std::string strip_spaces(std::string_view s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

template <class F>
double solve_increasing(F f, double target, double guess) {
  // f increasing on (0, inf); find x with f(x) = target.
  double lo = guess, hi = guess;
  int expand = 0;
  while (f(lo) > target) {
    lo *= 0.5;
    if (++expand > 2000) throw NumericalError("utility: root not bracketed");
  }
  while (f(hi) < target) {
    hi *= 2.0;
    if (++expand > 4000) throw NumericalError("utility: root not bracketed");
  }
  if (lo == hi) return lo;
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve([&](double x) { return f(x) - target; }, lo, hi,
                                             boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace

Utility Utility::power(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("utility: power exponent p must exceed 1");
  Utility u;
  u.kind_ = Kind::power;
  u.p_ = p;
  u.growth_ = GrowthBound{p, p};
  u.spec_ = p == 2.0 ? "sqrt" : "power:p=" + format_double(p);
  return u;
}

Utility Utility::log() {
  Utility u;
  u.kind_ = Kind::log;
  u.p_ = std::numeric_limits<double>::infinity();
  u.spec_ = "log";
  return u;
}

Utility Utility::from_table(std::vector<double> xs, std::vector<double> us, std::optional<GrowthBound> growth) {
  if (xs.size() != us.size() || xs.size() < 4) throw ConfigError("utility: table needs at least 4 rows");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(us[i] > 0.0) || !std::isfinite(xs[i]) || !std::isfinite(us[i]))
      throw ConfigError("utility: table entries must be positive and finite");
    if (i && (xs[i] <= xs[i - 1] || us[i] <= us[i - 1]))
      throw ConfigError("utility: table must be strictly increasing in both columns");
  }
  auto t = std::make_shared<Table>();
  std::vector<double> lx(xs.size()), lu(us.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    lx[i] = std::log(xs[i]);
    lu[i] = std::log(us[i]);
  }
  t->log_x_min = lx.front();
  t->log_x_max = lx.back();
  t->log_u_min = lu.front();
  t->log_u_max = lu.back();
  t->spline = std::make_unique<boost::math::interpolators::pchip<std::vector<double>>>(std::move(lx), std::move(lu));
  t->slope_min = t->spline->prime(t->log_x_min);
  t->slope_max = t->spline->prime(t->log_x_max);
  if (!(t->slope_min > 0.0) || !(t->slope_max > 0.0))
    throw ConfigError("utility: table must be strictly increasing at both ends");
  Utility u;
  u.kind_ = Kind::custom;
  u.growth_ = growth;
  u.p_ = growth ? growth->exponent : 2.0;
  u.table_ = std::move(t);
  u.spec_ = "custom";
  return u;
}

Utility Utility::parse(std::string_view text) {
  const std::string s = strip_spaces(text);
  if (s == "log") return log();
  if (s == "sqrt") return sqrt();
  const std::size_t colon = s.find(':');
  const std::string kind = s.substr(0, colon);
  auto fields = parse_fields(colon == std::string::npos ? std::string_view{} : std::string_view(s).substr(colon + 1));
  if (kind == "power") {
    auto it = fields.find("p");
    if (it == fields.end()) throw ConfigError("utility: power needs p=<value>");
    return power(parse_double(it->second, "exponent"));
  }
  if (kind == "custom") {
    auto file = fields.find("file");
    if (file == fields.end()) throw ConfigError("utility: custom needs file=<path>");
    std::ifstream in(file->second);
    if (!in) throw ConfigError("utility: cannot open table '" + file->second + "'");
    std::vector<double> xs, us;
    std::string line;
    while (std::getline(in, line)) {
      for (char& c : line)
        if (c == ',' || c == ';' || c == '\t') c = ' ';
      std::istringstream row(line);
      std::string a, b;
      if (!(row >> a)) continue;
      if (a.front() == '#') continue;
      if (!(row >> b)) throw ConfigError("utility: table rows need two columns");
      double x = 0.0, y = 0.0;
      auto ra = std::from_chars(a.data(), a.data() + a.size(), x);
      auto rb = std::from_chars(b.data(), b.data() + b.size(), y);
      if (ra.ec != std::errc() || rb.ec != std::errc()) {
        if (xs.empty()) continue;  // header line
        throw ConfigError("utility: bad table row '" + line + "'");
      }
      xs.push_back(x);
      us.push_back(y);
    }
    std::optional<GrowthBound> growth;
    auto c = fields.find("C");
    auto p = fields.find("p");
    if (c != fields.end() || p != fields.end()) {
      if (c == fields.end() || p == fields.end()) throw ConfigError("utility: growth bound needs both C and p");
      growth = GrowthBound{parse_double(c->second, "growth constant"), parse_double(p->second, "growth exponent")};
    }
    Utility u = from_table(std::move(xs), std::move(us), growth);
    u.spec_ = s;
    return u;
  }
  throw ConfigError("utility: unknown kind '" + kind + "'");
}

double Utility::value(double x) const {
  if (x < 0.0 || std::isnan(x)) throw DomainError("utility: negative wealth");
  switch (kind_) {
    case Kind::power:
      return p_ * std::pow(x, 1.0 / p_);
    case Kind::log:
      return std::log(x);
    case Kind::custom:
      return x == 0.0 ? 0.0 : std::exp(table_->log_value(std::log(x)));
  }
  return 0.0;
}

double Utility::derivative(double x) const {
  if (!(x > 0.0)) throw DomainError("utility: derivative needs positive wealth");
  switch (kind_) {
    case Kind::power:
      return std::pow(x, 1.0 / p_ - 1.0);
    case Kind::log:
      return 1.0 / x;
    case Kind::custom: {
      const double lx = std::log(x);
      return std::exp(table_->log_value(lx) - lx) * table_->elasticity(lx);
    }
  }
  return 0.0;
}

double Utility::inverse(double y) const {
  switch (kind_) {
    case Kind::power:
      if (y < 0.0) throw DomainError("utility: inverse of a negative level");
      return std::pow(y / p_, p_);
    case Kind::log:
      return std::exp(y);
    case Kind::custom:
      if (y < 0.0) throw DomainError("utility: inverse of a negative level");
      if (y == 0.0) return 0.0;
      return solve_increasing([this](double x) { return value(x); }, y, 1.0);
  }
  return 0.0;
}

double Utility::marginal_inverse(double v) const {
  if (!(v > 0.0)) throw DomainError("utility: marginal inverse needs a positive argument");
  switch (kind_) {
    case Kind::power:
      return std::pow(v, -q());
    case Kind::log:
      return 1.0 / v;
    case Kind::custom:
      return solve_increasing([this](double x) { return -derivative(x); }, -v, 1.0);
  }
  return 0.0;
}

double Utility::conjugate(double y) const {
  if (!(y > 0.0)) throw DomainError("utility: conjugate needs a positive argument");
  switch (kind_) {
    case Kind::power:
      return (p_ - 1.0) * std::pow(y, 1.0 - q());
    case Kind::log:
      return -std::log(y) - 1.0;
    case Kind::custom: {
      const double x = marginal_inverse(y);
      return value(x) - x * y;
    }
  }
  return 0.0;
}

HypothesisReport check_hypotheses(const Utility& u) {
  HypothesisReport r;
  std::vector<double> grid;
  for (int i = -80; i <= 80; ++i) grid.push_back(std::pow(10.0, i / 10.0));

  r.increasing = true;
  r.concave = true;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double a = grid[i], b = grid[i + 1];
    if (!(u.value(b) > u.value(a))) r.increasing = false;
    const double mid = u.value(0.5 * (a + b));
    if (!(mid > 0.5 * (u.value(a) + u.value(b)))) r.concave = false;
  }
  if (!r.increasing) r.notes.push_back("not strictly increasing on the probe grid");
  if (!r.concave) r.notes.push_back("not strictly concave on the probe grid");

  const double d_small = u.derivative(1e-8);
  const double d_large = u.derivative(1e8);
  r.inada = d_small > 1.0 && d_large < 1.0 && d_small >= 10.0 * d_large;
  if (!r.inada) r.notes.push_back("marginal utility limits fail at the probe points 1e-8 and 1e8");

  // U(0) = 0 and U decays like a positive power towards the origin.
  const double u0 = u.value(0.0);
  if (u0 == 0.0) {
    const double a = u.value(1e-16), b = u.value(1e-8);
    r.zero_at_origin = a > 0.0 && b > a && std::log(b / a) / std::log(1e8) > 1e-3;
  }
  if (!r.zero_at_origin) r.notes.push_back("U(0+) is not 0");

  if (!u.growth()) {
    r.growth = false;
    r.notes.push_back("no growth bound declared");
  } else {
    const auto [c, p] = *u.growth();
    r.growth = c > 0.0 && p > 1.0;
    for (double x : grid) {
      const double ux = u.value(x);
      if (!(ux >= 0.0) || ux > c * std::pow(x, 1.0 / p) * (1.0 + 1e-9)) r.growth = false;
    }
    if (!r.growth) r.notes.push_back("growth bound U(x) <= C x^(1/p) fails on the probe grid");
  }

  r.inverse_consistent = true;
  for (double x : grid) {
    const double back = u.inverse(u.value(x));
    if (!(std::abs(back - x) <= 1e-8 * x)) r.inverse_consistent = false;
  }
  if (!r.inverse_consistent) r.notes.push_back("U^{-1}(U(x)) differs from x");
  if (u.kind() == Utility::Kind::log) r.notes.push_back("log utility is unbounded below and outside the power-growth class");
  return r;
}

}  // namespace wsens
