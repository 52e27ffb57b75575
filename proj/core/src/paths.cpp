#include "wsens/paths.hpp"

#include "wsens/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <istream>
#include <mutex>
#include <ostream>

namespace wsens {

namespace {

constexpr std::uint64_t kMagic = 0x314e4553534e4557ULL;  // "WENSSNE1" little-endian
constexpr std::uint64_t kDumpVersion = 1;

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw ConfigError("ensemble dump: truncated header");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

int default_workers() {
  if (const char* env = std::getenv("WSENS_WORKERS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

PathEnsemble::PathEnsemble(TimeGrid grid, int dim, std::size_t count, std::uint64_t seed)
    : grid_(grid), dim_(dim), count_(count), seed_(seed), workers_(default_workers()) {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("ensemble: Brownian dimension out of range");
  if (count < 1) throw ConfigError("ensemble: need at least one path");
}

std::uint64_t PathEnsemble::stream_scheme() const noexcept { return kStreamScheme; }

void PathEnsemble::generate(std::size_t i, Path& out) const {
  const int steps = grid_.steps();
  out.index = i;
  out.increments.resize(steps, dim_);
  out.levels.resize(steps + 1, dim_);
  if (stored_) {
    const double* src = stored_->data() + i * static_cast<std::size_t>(steps * dim_);
    std::copy(src, src + steps * dim_, out.increments.data());
  } else {
    NormalStream stream(seed_, i);
    const double scale = std::sqrt(grid_.dt());
    double* dst = out.increments.data();
    for (int k = 0; k < steps * dim_; ++k) dst[k] = scale * stream.next();
  }
  out.levels.row(0).setZero();
  for (int k = 0; k < steps; ++k) out.levels.row(k + 1) = out.levels.row(k) + out.increments.row(k);
}

Path PathEnsemble::path(std::size_t i) const {
  if (i >= count_) throw ConfigError("ensemble: path index out of range");
  Path p;
  generate(i, p);
  return p;
}

PathEnsemble& PathEnsemble::materialize() {
  if (stored_) return *this;
  const auto per_path = static_cast<std::size_t>(grid_.steps() * dim_);
  if (count_ > (std::size_t{1} << 31) / per_path)
    throw NumericalError("ensemble: too large to materialize");
  auto data = std::make_shared<std::vector<double>>(count_ * per_path);
  map(0, [&](const Path& p, double*) {
    std::copy(p.increments.data(), p.increments.data() + per_path, data->data() + p.index * per_path);
  });
  stored_ = std::move(data);
  return *this;
}

PathEnsemble PathEnsemble::with_workers(int workers) const {
  if (workers < 1) throw ConfigError("ensemble: worker count must be positive");
  PathEnsemble copy = *this;
  copy.workers_ = workers;
  return copy;
}

Eigen::MatrixXd PathEnsemble::map(int width, const std::function<void(const Path&, double*)>& fn) const {
  // Row-major storage so each path owns a contiguous row.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out(
      static_cast<Eigen::Index>(count_), width);
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(workers_), count_);
  std::size_t failed_at = std::numeric_limits<std::size_t>::max();
  std::exception_ptr failure;
  std::mutex mutex;

  auto run = [&](std::size_t begin, std::size_t end) {
    Path path;
    for (std::size_t i = begin; i < end; ++i) {
      try {
        generate(i, path);
        fn(path, width ? out.row(static_cast<Eigen::Index>(i)).data() : nullptr);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
        return;
      }
    }
  };

  if (workers <= 1) {
    run(0, count_);
  } else {
    std::vector<std::thread> threads;
    const std::size_t chunk = (count_ + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(count_, begin + chunk);
      if (begin < end) threads.emplace_back(run, begin, end);
    }
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

Eigen::VectorXd PathEnsemble::map_scalar(const std::function<double(const Path&)>& fn) const {
  return map(1, [&](const Path& p, double* row) { row[0] = fn(p); }).col(0);
}

void PathEnsemble::write_binary(std::ostream& os) const {
  put_u64(os, kMagic);
  put_u64(os, kDumpVersion);
  put_u64(os, seed_);
  put_u64(os, count_);
  put_u64(os, static_cast<std::uint64_t>(grid_.steps()));
  put_u64(os, static_cast<std::uint64_t>(dim_));
  put_u64(os, std::bit_cast<std::uint64_t>(grid_.horizon()));
  Path p;
  for (std::size_t i = 0; i < count_; ++i) {
    generate(i, p);
    const double* d = p.increments.data();
    for (Eigen::Index k = 0; k < p.increments.size(); ++k) put_u64(os, std::bit_cast<std::uint64_t>(d[k]));
  }
}

PathEnsemble PathEnsemble::read_binary(std::istream& is) {
  if (get_u64(is) != kMagic) throw ConfigError("ensemble dump: bad magic");
  if (get_u64(is) != kDumpVersion) throw ConfigError("ensemble dump: unsupported version");
  const std::uint64_t seed = get_u64(is);
  const std::uint64_t count = get_u64(is);
  const std::uint64_t steps = get_u64(is);
  const std::uint64_t dim = get_u64(is);
  const double horizon = std::bit_cast<double>(get_u64(is));
  if (steps < 1 || steps > (1u << 30) || dim < 1 || dim > kMaxDim)
    throw ConfigError("ensemble dump: bad dimensions");
  PathEnsemble e(TimeGrid(horizon, static_cast<int>(steps)), static_cast<int>(dim),
                 static_cast<std::size_t>(count), seed);
  auto data = std::make_shared<std::vector<double>>(count * steps * dim);
  for (double& x : *data) x = std::bit_cast<double>(get_u64(is));
  e.stored_ = std::move(data);
  return e;
}

PathEnsemble simulate(const TimeGrid& grid, int dim, std::size_t count, std::uint64_t seed) {
  return PathEnsemble(grid, dim, count, seed);
}

double ito_integral(const NodeMatrix& integrand, const Path& path) {
  if (integrand.rows() != path.increments.rows() || integrand.cols() != path.increments.cols())
    throw ConfigError("ito integral: integrand shape does not match the path");
  double s = 0.0;
  const double* h = integrand.data();
  const double* dw = path.increments.data();
  for (Eigen::Index k = 0; k < integrand.size(); ++k) s += h[k] * dw[k];
  return s;
}

double time_integral(const NodeMatrix& integrand, double dt, bool squared) {
  if (squared) return integrand.squaredNorm() * dt;
  if (integrand.cols() != 1) throw ConfigError("time integral: expected a scalar integrand");
  return integrand.sum() * dt;
}

double log_stochastic_exponential(const NodeMatrix& gamma, const Path& path, double dt) {
  return ito_integral(gamma, path) - 0.5 * time_integral(gamma, dt, true);
}

NodeMatrix shifted_brownian(const Path& path, const NodeMatrix& drift, double dt) {
  if (drift.rows() != path.increments.rows() || drift.cols() != path.increments.cols())
    throw ConfigError("shifted brownian: drift shape does not match the path");
  NodeMatrix out(path.levels.rows(), path.levels.cols());
  out.row(0) = path.levels.row(0);
  for (Eigen::Index k = 0; k < drift.rows(); ++k)
    out.row(k + 1) = out.row(k) + path.increments.row(k) - dt * drift.row(k);
  return out;
}

PathFunctional ito_integral(const VectorField& integrand, const PathEnsemble& ensemble) {
  if (integrand.width() != ensemble.dim()) throw ConfigError("ito integral: dimension mismatch");
  return ensemble.map_scalar([&](const Path& p) {
    NodeMatrix h;
    integrand.fill(ensemble.grid(), p.levels, h, p.index);
    return ito_integral(h, p);
  });
}

PathFunctional time_integral(const VectorField& integrand, const PathEnsemble& ensemble) {
  if (integrand.width() != 1) throw ConfigError("time integral: expected a scalar integrand");
  const double dt = ensemble.grid().dt();
  return ensemble.map_scalar([&](const Path& p) {
    NodeMatrix h;
    integrand.fill(ensemble.grid(), p.levels, h, p.index);
    return time_integral(h, dt);
  });
}

PathFunctional stochastic_exponential(const VectorField& gamma, const PathEnsemble& ensemble) {
  if (gamma.width() != ensemble.dim()) throw ConfigError("stochastic exponential: dimension mismatch");
  const double dt = ensemble.grid().dt();
  return ensemble.map_scalar([&](const Path& p) {
    NodeMatrix g;
    gamma.fill(ensemble.grid(), p.levels, g, p.index);
    return std::exp(log_stochastic_exponential(g, p, dt));
  });
}

PathFunctional girsanov_weight(const VectorField& lambda_new, const VectorField& lambda_base,
                               const PathEnsemble& ensemble) {
  return stochastic_exponential(VectorField::affine(lambda_new, 1.0, lambda_base, -1.0), ensemble);
}

}  // namespace wsens
