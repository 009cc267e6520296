#include "lcgf/env/environment.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "lcgf/errors.hpp"
#include "lcgf/rng.hpp"

namespace lcgf {

std::string to_string(ConductanceLaw law) { return law == ConductanceLaw::constant ? "constant" : "uniform"; }

ConductanceLaw parse_conductance_law(const std::string& name) {
  if (name == "constant") return ConductanceLaw::constant;
  if (name == "uniform") return ConductanceLaw::uniform;
  throw ParameterError("unknown conductance law '" + name + "'");
}

void EnvironmentParams::validate() const {
  if (!(p > 0.5 && p <= 1.0)) throw ParameterError("open probability p must lie in (1/2, 1]");
  if (!(lambda_minus > 0.0 && lambda_minus <= lambda_plus))
    throw ParameterError("conductance bounds must satisfy 0 < lambda_minus <= lambda_plus");
  if (law == ConductanceLaw::constant && lambda_minus != lambda_plus)
    throw ParameterError("constant conductance law requires lambda_minus == lambda_plus");
  if (width < 1 || height < 1) throw ParameterError("window dimensions must be positive");
}

Environment::Environment(EnvironmentParams params, std::vector<double> h_edges, std::vector<double> v_edges)
    : params_(params), h_edges_(std::move(h_edges)), v_edges_(std::move(v_edges)) {
  if (params_.width < 1 || params_.height < 1) throw ParameterError("window dimensions must be positive");
  if (!(params_.lambda_minus > 0.0 && params_.lambda_minus <= params_.lambda_plus))
    throw ParameterError("conductance bounds must satisfy 0 < lambda_minus <= lambda_plus");
  const auto nh = static_cast<std::size_t>((params_.width - 1) * params_.height);
  const auto nv = static_cast<std::size_t>(params_.width * (params_.height - 1));
  if (h_edges_.size() != nh || v_edges_.size() != nv)
    throw ParameterError("edge arrays do not match the window dimensions");
  auto valid = [&](double a) { return a == 0.0 || (a >= params_.lambda_minus && a <= params_.lambda_plus); };
  if (!std::all_of(h_edges_.begin(), h_edges_.end(), valid) || !std::all_of(v_edges_.begin(), v_edges_.end(), valid))
    throw ParameterError("conductances must be 0 or lie in [lambda_minus, lambda_plus]");
}

std::optional<double> Environment::conductance(Point p, Point offset) const {
  const Rect w = window();
  const Point q = p + offset;
  if (!w.contains(p) || !w.contains(q)) return std::nullopt;
  const Point a = std::min(p, q, [](Point l, Point r) { return l.x + l.y < r.x + r.y; });
  const std::int64_t lx = a.x - w.lo.x;
  const std::int64_t ly = a.y - w.lo.y;
  if (offset.y == 0 && (offset.x == 1 || offset.x == -1))
    return h_edges_[static_cast<std::size_t>(ly * (w.width - 1) + lx)];
  if (offset.x == 0 && (offset.y == 1 || offset.y == -1))
    return v_edges_[static_cast<std::size_t>(ly * w.width + lx)];
  throw ParameterError("conductance: offset must be a unit lattice vector");
}

std::size_t Environment::open_edge_count() const {
  auto open = [](double a) { return a > 0.0; };
  return static_cast<std::size_t>(std::count_if(h_edges_.begin(), h_edges_.end(), open) +
                                  std::count_if(v_edges_.begin(), v_edges_.end(), open));
}

namespace {

// Two uniforms for the edge leaving global vertex (x, y) in direction `orient`
// (0 = +x, 1 = +y): the first decides openness, the second the conductance.
std::pair<double, double> edge_uniforms(std::uint64_t seed, std::int64_t x, std::int64_t y, std::uint32_t orient) {
  const std::uint64_t key64 = stream_id(seed, 0, StreamTag::environment);
  const auto ux = static_cast<std::uint64_t>(x);
  const auto uy = static_cast<std::uint64_t>(y);
  const auto out = philox4x32({static_cast<std::uint32_t>(ux), static_cast<std::uint32_t>(ux >> 32),
                               static_cast<std::uint32_t>(uy), static_cast<std::uint32_t>(uy >> 32) ^ (orient << 31)},
                              {static_cast<std::uint32_t>(key64), static_cast<std::uint32_t>(key64 >> 32)});
  const std::uint64_t a = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  const std::uint64_t b = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
  return {to_unit_interval(a), to_unit_interval(b)};
}

}  // namespace

Environment generate_environment(const EnvironmentParams& params) {
  params.validate();
  const Rect w = params.window();
  auto draw = [&](std::int64_t x, std::int64_t y, std::uint32_t orient) {
    const auto [u_open, u_law] = edge_uniforms(params.seed, x, y, orient);
    if (!(u_open < params.p)) return 0.0;
    if (params.law == ConductanceLaw::constant) return params.lambda_minus;
    return std::clamp(params.lambda_minus + (params.lambda_plus - params.lambda_minus) * u_law, params.lambda_minus,
                      params.lambda_plus);
  };
  std::vector<double> h(static_cast<std::size_t>((w.width - 1) * w.height));
  std::vector<double> v(static_cast<std::size_t>(w.width * (w.height - 1)));
  for (std::int64_t y = 0; y < w.height; ++y)
    for (std::int64_t x = 0; x + 1 < w.width; ++x)
      h[static_cast<std::size_t>(y * (w.width - 1) + x)] = draw(w.lo.x + x, w.lo.y + y, 0);
  for (std::int64_t y = 0; y + 1 < w.height; ++y)
    for (std::int64_t x = 0; x < w.width; ++x)
      v[static_cast<std::size_t>(y * w.width + x)] = draw(w.lo.x + x, w.lo.y + y, 1);
  return Environment(params, std::move(h), std::move(v));
}

Environment scale_conductances(const Environment& env, double c) {
  if (!(c > 0.0)) throw ParameterError("conductance scale must be positive");
  EnvironmentParams params = env.params();
  params.lambda_minus *= c;
  params.lambda_plus *= c;
  std::vector<double> h(env.h_edges().begin(), env.h_edges().end());
  std::vector<double> v(env.v_edges().begin(), env.v_edges().end());
  for (double& a : h) a *= c;
  for (double& a : v) a *= c;
  return Environment(params, std::move(h), std::move(v));
}

namespace {

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw ParameterError("environment file truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_environment(std::ostream& out, const Environment& env) {
  const EnvironmentParams& p = env.params();
  out.write("LCGF", 4);
  put<std::uint32_t>(out, kEnvironmentFormatVersion);
  put<std::int64_t>(out, p.origin.x);
  put<std::int64_t>(out, p.origin.y);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(p.width));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(p.height));
  put<double>(out, p.p);
  put<double>(out, p.lambda_minus);
  put<double>(out, p.lambda_plus);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(p.law));
  put<std::uint64_t>(out, p.seed);
  for (double a : env.h_edges()) put<double>(out, a);
  for (double a : env.v_edges()) put<double>(out, a);
}

Environment read_environment(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "LCGF", 4) != 0) throw ParameterError("not an LCGF environment file");
  const auto version = get<std::uint32_t>(in);
  if (version != kEnvironmentFormatVersion) throw ParameterError("unsupported environment format version");
  EnvironmentParams p;
  p.origin.x = get<std::int64_t>(in);
  p.origin.y = get<std::int64_t>(in);
  p.width = static_cast<std::int64_t>(get<std::uint64_t>(in));
  p.height = static_cast<std::int64_t>(get<std::uint64_t>(in));
  p.p = get<double>(in);
  p.lambda_minus = get<double>(in);
  p.lambda_plus = get<double>(in);
  const auto law = get<std::uint8_t>(in);
  if (law > 1) throw ParameterError("unknown conductance law tag");
  p.law = static_cast<ConductanceLaw>(law);
  p.seed = get<std::uint64_t>(in);
  if (p.width < 1 || p.height < 1 || p.width > (1 << 20) || p.height > (1 << 20))
    throw ParameterError("environment dimensions out of range");
  std::vector<double> h(static_cast<std::size_t>((p.width - 1) * p.height));
  std::vector<double> v(static_cast<std::size_t>(p.width * (p.height - 1)));
  for (double& a : h) a = get<double>(in);
  for (double& a : v) a = get<double>(in);
  return Environment(p, std::move(h), std::move(v));
}

void save_environment(const std::string& path, const Environment& env) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot open '" + path + "' for writing");
  write_environment(out, env);
}

Environment load_environment(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open '" + path + "'");
  return read_environment(in);
}

}  // namespace lcgf
