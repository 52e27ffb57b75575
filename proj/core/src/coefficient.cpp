#include "wsens/coefficient.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <cctype>

namespace wsens {

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view s, std::string_view context) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError("coefficient: bad number '" + std::string(s) + "' in " + std::string(context));
  return v;
}

std::vector<double> parse_list(std::string_view s, std::string_view context) {
  s = trim(s);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw ConfigError("coefficient: unterminated list in " + std::string(context));
    s = s.substr(1, s.size() - 2);
  }
  std::vector<double> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = s.find(',', start);
    out.push_back(parse_number(s.substr(start, comma - start), context));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

SmallMatrix to_matrix(const std::vector<double>& v, std::size_t offset, int rows, int cols) {
  SmallMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = v[offset + static_cast<std::size_t>(i * cols + j)];
  return m;
}

std::string list_string(const SmallMatrix& m) {
  std::string out = "[";
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      if (i || j) out += ',';
      out += format_double(m(i, j));
    }
  return out + "]";
}

void check_dims(int rows, int cols) {
  if (rows < 1 || cols < 1 || rows > kMaxDim || cols > kMaxDim)
    throw ConfigError("coefficient: shape must lie within 1.." + std::to_string(kMaxDim));
}

// Splits "k1=v1;k2=v2" where values may contain brackets but never ';'.
std::map<std::string, std::string, std::less<>> parse_fields(std::string_view body,
                                                             std::string_view context) {
  std::map<std::string, std::string, std::less<>> out;
  std::size_t start = 0;
  while (start <= body.size()) {
    std::size_t semi = body.find(';', start);
    std::string_view item = trim(body.substr(start, semi - start));
    if (!item.empty()) {
      std::size_t eq = item.find('=');
      if (eq == std::string_view::npos)
        throw ConfigError("coefficient: expected key=value in " + std::string(context));
      out[std::string(trim(item.substr(0, eq)))] = std::string(trim(item.substr(eq + 1)));
    }
    if (semi == std::string_view::npos) break;
    start = semi + 1;
  }
  return out;
}

const std::string& field(const std::map<std::string, std::string, std::less<>>& f,
                         std::string_view key, std::string_view context) {
  auto it = f.find(key);
  if (it == f.end())
    throw ConfigError("coefficient: missing '" + std::string(key) + "' in " + std::string(context));
  return it->second;
}

}  // namespace

CoefficientProcess CoefficientProcess::constant(SmallMatrix value) {
  check_dims(static_cast<int>(value.rows()), static_cast<int>(value.cols()));
  if (!value.allFinite()) throw ConfigError("coefficient: non-finite value");
  CoefficientProcess p;
  p.kind_ = Kind::constant;
  p.values_.push_back(std::move(value));
  return p;
}

CoefficientProcess CoefficientProcess::constant(double value) {
  SmallMatrix m(1, 1);
  m(0, 0) = value;
  return constant(std::move(m));
}

CoefficientProcess CoefficientProcess::zero(int rows, int cols) {
  check_dims(rows, cols);
  return constant(SmallMatrix::Zero(rows, cols));
}

CoefficientProcess CoefficientProcess::piecewise(std::vector<double> breakpoints,
                                                 std::vector<SmallMatrix> values) {
  if (values.size() != breakpoints.size() + 1)
    throw ConfigError("coefficient: piecewise needs one more value than breakpoints");
  if (!std::is_sorted(breakpoints.begin(), breakpoints.end()) ||
      std::adjacent_find(breakpoints.begin(), breakpoints.end()) != breakpoints.end())
    throw ConfigError("coefficient: breakpoints must be strictly increasing");
  for (double b : breakpoints)
    if (!std::isfinite(b)) throw ConfigError("coefficient: non-finite breakpoint");
  for (const auto& v : values) {
    check_dims(static_cast<int>(v.rows()), static_cast<int>(v.cols()));
    if (v.rows() != values.front().rows() || v.cols() != values.front().cols())
      throw ConfigError("coefficient: piecewise values disagree in shape");
    if (!v.allFinite()) throw ConfigError("coefficient: non-finite value");
  }
  if (breakpoints.empty()) return constant(std::move(values.front()));
  CoefficientProcess p;
  p.kind_ = Kind::piecewise;
  p.breakpoints_ = std::move(breakpoints);
  p.values_ = std::move(values);
  return p;
}

CoefficientProcess CoefficientProcess::indicator(int driver, double threshold, SmallMatrix low,
                                                 SmallMatrix high) {
  check_dims(static_cast<int>(low.rows()), static_cast<int>(low.cols()));
  if (low.rows() != high.rows() || low.cols() != high.cols())
    throw ConfigError("coefficient: indicator values disagree in shape");
  if (driver < 0) throw ConfigError("coefficient: indicator driver index must be >= 1");
  if (!std::isfinite(threshold) || !low.allFinite() || !high.allFinite())
    throw ConfigError("coefficient: non-finite indicator data");
  CoefficientProcess p;
  p.kind_ = Kind::indicator;
  p.driver_ = driver;
  p.threshold_ = threshold;
  p.values_ = {std::move(low), std::move(high)};
  return p;
}

CoefficientProcess CoefficientProcess::parse(std::string_view text, int rows, int cols) {
  check_dims(rows, cols);
  const std::string context(text);
  text = trim(text);
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) throw ConfigError("coefficient: missing kind in '" + context + "'");
  const std::string_view kind = trim(text.substr(0, colon));
  const std::string_view body = trim(text.substr(colon + 1));
  const auto count = static_cast<std::size_t>(rows * cols);

  if (kind == "const") {
    auto v = parse_list(body, context);
    if (v.size() != count)
      throw ConfigError("coefficient: '" + context + "' needs " + std::to_string(count) + " entries");
    return constant(to_matrix(v, 0, rows, cols));
  }
  auto f = parse_fields(body, context);
  if (kind == "pw") {
    auto t = parse_list(field(f, "t", context), context);
    auto v = parse_list(field(f, "v", context), context);
    if (v.size() != count * (t.size() + 1))
      throw ConfigError("coefficient: '" + context + "' needs " + std::to_string(count * (t.size() + 1)) +
                        " values");
    std::vector<SmallMatrix> pieces;
    for (std::size_t i = 0; i <= t.size(); ++i) pieces.push_back(to_matrix(v, i * count, rows, cols));
    return piecewise(std::move(t), std::move(pieces));
  }
  if (kind == "ind") {
    const double j = parse_number(field(f, "j", context), context);
    if (j != std::floor(j) || j < 1) throw ConfigError("coefficient: driver j must be a positive integer");
    const double c = parse_number(field(f, "c", context), context);
    auto lo = parse_list(field(f, "lo", context), context);
    auto hi = parse_list(field(f, "hi", context), context);
    if (lo.size() != count || hi.size() != count)
      throw ConfigError("coefficient: '" + context + "' needs " + std::to_string(count) + " entries per level");
    return indicator(static_cast<int>(j) - 1, c, to_matrix(lo, 0, rows, cols), to_matrix(hi, 0, rows, cols));
  }
  throw ConfigError("coefficient: unknown kind '" + std::string(kind) + "'");
}

std::string CoefficientProcess::to_string() const {
  switch (kind_) {
    case Kind::constant:
      return "const:" + list_string(values_.front());
    case Kind::piecewise: {
      std::string t = "[";
      for (std::size_t i = 0; i < breakpoints_.size(); ++i)
        t += (i ? "," : "") + format_double(breakpoints_[i]);
      std::string v = "[";
      for (std::size_t i = 0; i < values_.size(); ++i) {
        auto s = list_string(values_[i]);
        v += (i ? "," : "") + s.substr(1, s.size() - 2);
      }
      return "pw:t=" + t + "];v=" + v + "]";
    }
    case Kind::indicator:
      return "ind:j=" + std::to_string(driver_ + 1) + ";c=" + format_double(threshold_) +
             ";lo=" + list_string(values_[0]) + ";hi=" + list_string(values_[1]);
  }
  return {};
}

bool CoefficientProcess::is_zero() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](const SmallMatrix& m) { return m.isZero(0.0); });
}

double CoefficientProcess::bound() const noexcept {
  double b = 0.0;
  for (const auto& v : values_) b = std::max(b, v.cwiseAbs().maxCoeff());
  return b;
}

int CoefficientProcess::regime(double t, const double* w) const noexcept {
  switch (kind_) {
    case Kind::constant:
      return 0;
    case Kind::piecewise:
      return static_cast<int>(std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t) -
                              breakpoints_.begin());
    case Kind::indicator:
      return w[driver_] < threshold_ ? 1 : 0;
  }
  return 0;
}

void CoefficientProcess::require_shape(int rows_expected, int cols_expected, int n,
                                       std::string_view name) const {
  if (rows() != rows_expected || cols() != cols_expected)
    throw ConfigError(std::string(name) + ": expected shape " + std::to_string(rows_expected) + "x" +
                      std::to_string(cols_expected) + ", got " + std::to_string(rows()) + "x" +
                      std::to_string(cols()));
  if (kind_ == Kind::indicator && driver_ >= n)
    throw ConfigError(std::string(name) + ": indicator driver " + std::to_string(driver_ + 1) +
                      " exceeds Brownian dimension " + std::to_string(n));
}

}  // namespace wsens
