#include "wsens/field.hpp"

#include <algorithm>

namespace wsens {

namespace {

std::vector<int> make_strides(const std::vector<CoefficientProcess>& sources) {
  std::vector<int> strides;
  long total = 1;
  for (const auto& s : sources) {
    strides.push_back(static_cast<int>(total));
    total *= s.regimes();
    if (total > VectorField::kMaxRegimes)
      throw ConfigError("coefficient combination has too many joint regimes to tabulate");
  }
  return strides;
}

}  // namespace

VectorField::VectorField(std::vector<CoefficientProcess> sources, int width, const Builder& build,
                         std::string failure)
    : sources_(std::move(sources)), width_(width), failure_(std::move(failure)) {
  if (width < 1 || width > kMaxDim) throw ConfigError("vector field: bad width");
  strides_ = make_strides(sources_);
  long total = 1;
  for (const auto& s : sources_) total *= s.regimes();
  table_.assign(static_cast<std::size_t>(total), SmallVector::Zero(width));
  valid_.assign(static_cast<std::size_t>(total), 0);
  std::vector<const SmallMatrix*> args(sources_.size());
  for (long r = 0; r < total; ++r) {
    for (std::size_t s = 0; s < sources_.size(); ++s)
      args[s] = &sources_[s].value(static_cast<int>((r / strides_[s]) % sources_[s].regimes()));
    auto v = build(args);
    if (v && v->size() == width && v->allFinite()) {
      table_[static_cast<std::size_t>(r)] = *v;
      valid_[static_cast<std::size_t>(r)] = 1;
    }
  }
}

VectorField VectorField::constant(const SmallVector& value) {
  return VectorField({}, static_cast<int>(value.size()),
                     [&](std::span<const SmallMatrix* const>) { return std::optional<SmallVector>(value); });
}

VectorField VectorField::from_process(const CoefficientProcess& p) {
  if (p.cols() != 1) throw ConfigError("vector field: process must be a column vector");
  return VectorField({p}, p.rows(), [](std::span<const SmallMatrix* const> v) {
    return std::optional<SmallVector>(SmallVector(v[0]->col(0)));
  });
}

VectorField VectorField::combine(const VectorField& a, const VectorField& b, int width,
                                 const Combiner& fn, std::string failure) {
  VectorField out;
  out.width_ = width;
  out.failure_ = std::move(failure);
  out.sources_ = a.sources_;
  out.sources_.insert(out.sources_.end(), b.sources_.begin(), b.sources_.end());
  out.strides_ = make_strides(out.sources_);
  const long na = a.regimes();
  const long nb = b.regimes();
  out.table_.assign(static_cast<std::size_t>(na * nb), SmallVector::Zero(width));
  out.valid_.assign(static_cast<std::size_t>(na * nb), 0);
  // Mixed radix with a's sources first, so the joint index is ia + na * ib.
  for (long ib = 0; ib < nb; ++ib)
    for (long ia = 0; ia < na; ++ia) {
      if (!a.valid(static_cast<int>(ia)) || !b.valid(static_cast<int>(ib))) continue;
      auto v = fn(a.value(static_cast<int>(ia)), b.value(static_cast<int>(ib)));
      if (v && v->size() == width && v->allFinite()) {
        const auto r = static_cast<std::size_t>(ia + na * ib);
        out.table_[r] = *v;
        out.valid_[r] = 1;
      }
    }
  return out;
}

VectorField VectorField::affine(const VectorField& a, double alpha, const VectorField& b, double beta) {
  if (a.width() != b.width()) throw ConfigError("vector field: width mismatch");
  return combine(a, b, a.width(), [alpha, beta](const SmallVector& x, const SmallVector& y) {
    return std::optional<SmallVector>(SmallVector(alpha * x + beta * y));
  });
}

bool VectorField::deterministic() const noexcept {
  return std::all_of(sources_.begin(), sources_.end(), [](const auto& s) { return s.deterministic(); });
}

bool VectorField::all_valid() const noexcept {
  return std::all_of(valid_.begin(), valid_.end(), [](char v) { return v != 0; });
}

bool VectorField::is_zero() const noexcept {
  for (std::size_t r = 0; r < table_.size(); ++r)
    if (valid_[r] && !table_[r].isZero(0.0)) return false;
  return true;
}

int VectorField::regime(double t, const double* w) const noexcept {
  int r = 0;
  for (std::size_t s = 0; s < sources_.size(); ++s) r += strides_[s] * sources_[s].regime(t, w);
  return r;
}

void VectorField::fill(const TimeGrid& grid, const NodeMatrix& levels, NodeMatrix& out,
                       std::size_t path) const {
  const int steps = grid.steps();
  out.resize(steps, width_);
  if (sources_.empty()) {
    if (!valid(0)) throw NumericalError("vector field: " + failure_, path, 0);
    out.rowwise() = table_[0].transpose();
    return;
  }
  for (int k = 0; k < steps; ++k) {
    const int r = regime(grid.time(k), levels.row(k).data());
    if (!valid_[static_cast<std::size_t>(r)])
      throw NumericalError("vector field: " + failure_ + " at path " + std::to_string(path) + ", node " +
                               std::to_string(k),
                           path, static_cast<std::size_t>(k));
    out.row(k) = table_[static_cast<std::size_t>(r)].transpose();
  }
}

double VectorField::integrate(double horizon, const std::function<double(const SmallVector&)>& f) const {
  if (!deterministic()) throw ConfigError("vector field: exact integral needs deterministic sources");
  std::vector<double> cuts{0.0, horizon};
  for (const auto& s : sources_)
    for (double b : s.breakpoints())
      if (b > 0.0 && b < horizon) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const int r = regime(cuts[i], nullptr);
    if (!valid(r)) throw NumericalError("vector field: " + failure_);
    total += f(value(r)) * (cuts[i + 1] - cuts[i]);
  }
  return total;
}

}  // namespace wsens
