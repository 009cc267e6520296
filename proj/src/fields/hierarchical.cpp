#include "lcgf/fields/hierarchical.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <vector>

#include "lcgf/errors.hpp"
#include "lcgf/rng.hpp"

namespace lcgf {

namespace {

constexpr double kLog2 = std::numbers::ln2;

std::int64_t mod(std::int64_t a, std::int64_t n) {
  const std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

std::vector<std::int64_t> relative(const HierarchyConfig& config, Point p) {
  if (config.d == 1) return {p.x - config.w.x};
  return {p.x - config.w.x, p.y - config.w.y};
}

void check_field_dim(const HierarchyConfig& config) {
  config.validate();
  if (config.d > 2) throw ParameterError("sampled hierarchical fields support d in {1, 2}");
}

// Replaces `values` by its cyclic moving sum of width b along axis `axis`:
// out(v) = sum_{k=0}^{b-1} in(v - k e_axis).
void cyclic_moving_sum(std::vector<double>& values, std::vector<double>& line_in, std::int64_t N, int d, int axis,
                       std::int64_t b) {
  const std::int64_t stride = axis == 0 ? 1 : N;
  const std::int64_t lines = static_cast<std::int64_t>(values.size()) / N;
  line_in.resize(static_cast<std::size_t>(N));
  for (std::int64_t line = 0; line < lines; ++line) {
    const std::int64_t base = d == 1 ? 0 : (axis == 0 ? line * N : line);
    double* row = values.data() + base;
    for (std::int64_t k = 0; k < N; ++k) line_in[static_cast<std::size_t>(k)] = row[k * stride];
    double s = line_in[0];
    for (std::int64_t k = 1; k < b; ++k) s += line_in[static_cast<std::size_t>(N - k)];
    row[0] = s;
    for (std::int64_t x = 1; x < N; ++x) {
      std::int64_t out = x - b;
      if (out < 0) out += N;
      s += line_in[static_cast<std::size_t>(x)] - line_in[static_cast<std::size_t>(out)];
      row[x * stride] = s;
    }
  }
}

FieldSample empty_field(const HierarchyConfig& config, FieldModel model, std::uint64_t stream,
                        std::uint64_t replicate) {
  FieldSample field;
  field.dim = config.d;
  field.corner = config.w;
  field.side = config.N;
  field.model = model;
  field.replicate_id = replicate;
  field.rng_stream = stream;
  field.values = Eigen::VectorXd::Zero(lattice_volume(config.N, config.d));
  return field;
}

}  // namespace

int HierarchyConfig::levels() const {
  if (N < 1 || (N & (N - 1)) != 0) throw ParameterError("hierarchical fields need N = 2^n");
  return static_cast<int>(std::countr_zero(static_cast<std::uint64_t>(N)));
}

void HierarchyConfig::validate() const {
  if (d < 1) throw ParameterError("dimension must be at least 1");
  levels();
}

double quotient_norm(std::span<const std::int64_t> x, std::int64_t N) {
  if (N < 1) throw ParameterError("quotient_norm: N must be positive");
  double s = 0.0;
  for (std::int64_t c : x) {
    std::int64_t r = mod(c, N);
    if (2 * r > N) r -= N;
    s += static_cast<double>(r) * static_cast<double>(r);
  }
  return std::sqrt(s);
}

double quotient_norm(Point x, std::int64_t N, int d) {
  const std::int64_t c[2] = {x.x, x.y};
  return quotient_norm(std::span<const std::int64_t>(c, d == 1 ? 1 : 2), N);
}

Point upscale_map(Point v, Point w, Point w_prime, std::int64_t N, std::int64_t N_prime) {
  if (N < 1 || N_prime < N) throw ParameterError("upscale_map: need 1 <= N <= N'");
  return w_prime + (N_prime / N) * (v - w);
}

double analytic_brw_covariance(std::int64_t N, std::span<const std::int64_t> u, std::span<const std::int64_t> v) {
  const int n = HierarchyConfig{N, 1, {}}.levels();
  if (u.size() != v.size()) throw ParameterError("coordinate dimensions differ");
  int shared = 0;
  for (int j = 0; j <= n; ++j) {
    bool same = true;
    for (std::size_t k = 0; k < u.size(); ++k) {
      if (u[k] < 0 || u[k] >= N || v[k] < 0 || v[k] >= N) throw ParameterError("vertex outside V_N");
      same = same && (u[k] >> j) == (v[k] >> j);
    }
    shared += same ? 1 : 0;
  }
  return shared * kLog2;
}

double analytic_brw_covariance(const HierarchyConfig& config, Point u, Point v) {
  config.validate();
  const auto a = relative(config, u);
  const auto b = relative(config, v);
  return analytic_brw_covariance(config.N, a, b);
}

std::int64_t wrapped_pair_count(std::int64_t N, std::int64_t b, std::int64_t delta) {
  const std::int64_t dd = mod(delta, N);
  return std::max<std::int64_t>(0, b - dd) + std::max<std::int64_t>(0, b - (N - dd));
}

double analytic_mbrw_covariance(std::int64_t N, std::span<const std::int64_t> u, std::span<const std::int64_t> v) {
  const int n = HierarchyConfig{N, 1, {}}.levels();
  if (u.size() != v.size()) throw ParameterError("coordinate dimensions differ");
  const auto d = static_cast<int>(u.size());
  double total = 0.0;
  for (int j = 0; j <= n; ++j) {
    const std::int64_t b = std::int64_t{1} << j;
    double count = 1.0;
    for (int k = 0; k < d; ++k) count *= static_cast<double>(wrapped_pair_count(N, b, v[k] - u[k]));
    total += count * std::ldexp(1.0, -j * d);
  }
  return total * kLog2;
}

double analytic_mbrw_covariance(const HierarchyConfig& config, Point u, Point v) {
  config.validate();
  const auto a = relative(config, u);
  const auto b = relative(config, v);
  return analytic_mbrw_covariance(config.N, a, b);
}

FieldSample sample_brw(const HierarchyConfig& config, std::uint64_t master_seed, std::uint64_t replicate) {
  check_field_dim(config);
  const std::uint64_t stream = stream_id(master_seed, replicate, StreamTag::brw);
  CounterStream rng(stream);
  FieldSample field = empty_field(config, FieldModel::brw, stream, replicate);
  const int n = config.levels();
  const double sd = std::sqrt(kLog2);
  std::vector<double> tiles;
  for (int j = 0; j <= n; ++j) {
    const std::int64_t per_axis = config.N >> j;
    tiles.resize(static_cast<std::size_t>(lattice_volume(per_axis, config.d)));
    for (double& t : tiles) t = sd * rng.normal();
    for (Eigen::Index i = 0; i < field.size(); ++i) {
      const std::int64_t x = (i % config.N) >> j;
      const std::int64_t y = config.d == 1 ? 0 : (i / config.N) >> j;
      field.values[i] += tiles[static_cast<std::size_t>(y * per_axis + x)];
    }
  }
  return field;
}

FieldSample sample_mbrw(const HierarchyConfig& config, std::uint64_t master_seed, std::uint64_t replicate,
                        const MbrwOptions& options) {
  FieldSample field = sample_mbrw_stream(config, stream_id(master_seed, replicate, StreamTag::mbrw), options);
  field.replicate_id = replicate;
  return field;
}

FieldSample sample_mbrw_stream(const HierarchyConfig& config, std::uint64_t stream, const MbrwOptions& options) {
  check_field_dim(config);
  const std::int64_t volume = lattice_volume(config.N, config.d);
  if (volume > options.max_level_boxes && !options.streaming)
    throw ParameterError("MBRW level array of " + std::to_string(volume) +
                         " boxes exceeds the memory budget; enable streaming generation");
  CounterStream rng(stream);
  FieldSample field = empty_field(config, FieldModel::mbrw, stream, 0);
  const int n = config.levels();
  std::vector<double> level(static_cast<std::size_t>(volume));
  std::vector<double> scratch;
  for (int j = 0; j <= n; ++j) {
    for (double& y : level) y = rng.normal();
    const std::int64_t b = std::int64_t{1} << j;
    for (int axis = 0; axis < config.d; ++axis) cyclic_moving_sum(level, scratch, config.N, config.d, axis, b);
    const double sd = std::sqrt(kLog2 * std::ldexp(1.0, -j * config.d));
    field.values += sd * Eigen::Map<const Eigen::VectorXd>(level.data(), volume);
  }
  return field;
}

FieldSample sample_mbrw_reference(const HierarchyConfig& config, std::uint64_t master_seed,
                                  std::uint64_t replicate) {
  check_field_dim(config);
  if (config.N > 32) throw ParameterError("reference MBRW sampler is limited to N <= 32");
  const std::uint64_t stream = stream_id(master_seed, replicate, StreamTag::mbrw);
  CounterStream rng(stream);
  FieldSample field = empty_field(config, FieldModel::mbrw, stream, replicate);
  const int n = config.levels();
  const std::int64_t N = config.N;
  const Eigen::Index volume = field.size();
  std::vector<double> boxes(static_cast<std::size_t>(volume));
  for (int j = 0; j <= n; ++j) {
    for (double& y : boxes) y = rng.normal();
    const std::int64_t b = std::int64_t{1} << j;
    const double sd = std::sqrt(kLog2 * std::ldexp(1.0, -j * config.d));
    for (Eigen::Index v = 0; v < volume; ++v) {
      const std::int64_t vx = v % N;
      const std::int64_t vy = config.d == 1 ? 0 : v / N;
      double s = 0.0;
      for (Eigen::Index c = 0; c < volume; ++c) {
        const std::int64_t cx = c % N;
        const std::int64_t cy = config.d == 1 ? 0 : c / N;
        if (mod(vx - cx, N) < b && mod(vy - cy, N) < b) s += boxes[static_cast<std::size_t>(c)];
      }
      field.values[v] += sd * s;
    }
  }
  return field;
}

}  // namespace lcgf
