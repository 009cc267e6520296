#include "lcgf/fields/approx_field.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "lcgf/errors.hpp"
#include "lcgf/fields/gff.hpp"
#include "lcgf/fields/hierarchical.hpp"
#include "lcgf/laplace/operator.hpp"

namespace lcgf {

std::int64_t ApproxFieldConfig::I() const {
  std::int64_t i = 1;
  while (i < meso_side()) i *= 2;
  return i;
}

double ApproxFieldConfig::s() const {
  if (s_correction) return *s_correction;
  const std::int64_t i = I();
  if (i == 1) return 1.0;
  return std::log(static_cast<double>(meso_side())) / std::log(static_cast<double>(i));
}

void ApproxFieldConfig::validate() const {
  if (N < 1 || K < 1 || L < 1 || K_prime < 1 || L_prime < 1) throw ParameterError("approx field sides must be positive");
  if (J() * J_prime() > N) throw ParameterError("approx field needs J J' <= N");
  if (!f_eval || !g_eval) throw ParameterError("approx field needs f and g tables");
  if (!std::isfinite(gamma) || !std::isfinite(gamma_prime)) throw ParameterError("Γ and Γ' must be finite");
  if (!(delta >= 0.0 && delta < 0.5)) throw ParameterError("delta must lie in [0, 1/2)");
  const double sv = s();
  if (!(sv > 0.0 && sv <= 1.0)) throw ParameterError("s correction must lie in (0, 1]");
}

ApproxFieldModel::ApproxFieldModel(ApproxFieldConfig config, BoxSampler macro, BoxSampler micro)
    : config_(std::move(config)), macro_(std::move(macro)), micro_(std::move(micro)) {
  config_.validate();
  const std::int64_t jp = config_.J_prime();
  const std::int64_t j = config_.J();

  b_mic_.resize(jp * jp);
  for (std::int64_t i = 0; i < jp * jp; ++i) {
    const Point u{i % jp, i / jp};
    const Vec2<double> x((u.x + 1.0) / (jp + 1.0), (u.y + 1.0) / (jp + 1.0));
    const double sq = config_.gamma - config_.f_eval(x);
    if (sq < 0.0)
      throw ParameterError("negative (b^mic)^2 = " + std::to_string(sq) + " at micro vertex (" + std::to_string(u.x) +
                           "," + std::to_string(u.y) + "): Γ is below f");
    b_mic_[i] = std::sqrt(sq);
  }

  b_mac_.resize(j * j);
  for (std::int64_t i = 0; i < j * j; ++i) {
    const Point w{i % j, i / j};
    const double r1 = config_.r1_eval ? config_.r1_eval(w) : 0.0;
    if (r1 > config_.R) {
      b_mac_[i] = 0.0;
      continue;
    }
    const double sq = config_.gamma_prime - config_.g_eval(w, w);
    if (sq < 0.0)
      throw ParameterError("negative (b^mac)^2 = " + std::to_string(sq) + " at macro vertex (" + std::to_string(w.x) +
                           "," + std::to_string(w.y) + "): Γ' is below g");
    b_mac_[i] = std::sqrt(sq);
  }
}

FieldSample ApproxFieldModel::sample(std::uint64_t master_seed, std::uint64_t replicate,
                                     ApproxComponents* components) const {
  const ApproxFieldConfig& c = config_;
  const std::int64_t N = c.N;
  const std::int64_t J = c.J();
  const std::int64_t Jp = c.J_prime();
  const std::int64_t M = c.macro_side();
  const std::int64_t m = c.meso_side();
  const double s = c.s();
  const HierarchyConfig meso{c.I(), 2, {}};

  const std::uint64_t stream = stream_id(master_seed, replicate, StreamTag::approx);
  CounterStream macro_rng(child_stream(stream, 0));
  CounterStream x_mac_rng(child_stream(stream, 1));
  CounterStream x_mic_rng(child_stream(stream, 2));
  const std::uint64_t meso_root = child_stream(stream, 3);
  const std::uint64_t micro_root = child_stream(stream, 4);

  ApproxComponents parts;
  for (auto* v : {&parts.mac, &parts.mac_correction, &parts.mes, &parts.mic, &parts.mic_correction})
    *v = Eigen::VectorXd::Zero(N * N);

  const Eigen::VectorXd phi_macro = macro_(Point{0, 0}, J, macro_rng);
  if (phi_macro.size() != J * J) throw ParameterError("macro sampler returned the wrong number of values");

  for (std::int64_t a = 0; a < J * J; ++a) {
    const Point preimage{a % J, a / J};
    const Point w1 = M * preimage;
    const double x_mac = x_mac_rng.normal();
    const FieldSample theta = sample_mbrw_stream(meso, child_stream(meso_root, static_cast<std::uint64_t>(a)));
    for (std::int64_t b = 0; b < m * m; ++b) {
      const Point cell{b % m, b / m};
      const Point w2 = w1 + Jp * cell;
      const double x_mic = x_mic_rng.normal();
      const double mes = s * theta.value(cell);
      const std::uint64_t micro_index = static_cast<std::uint64_t>(a * m * m + b);
      CounterStream micro_rng(child_stream(micro_root, micro_index));
      const Eigen::VectorXd phi_micro = micro_(w2, Jp, micro_rng);
      if (phi_micro.size() != Jp * Jp) throw ParameterError("micro sampler returned the wrong number of values");
      for (std::int64_t k = 0; k < Jp * Jp; ++k) {
        const Point v = w2 + Point{k % Jp, k / Jp};
        const Eigen::Index i = v.y * N + v.x;
        parts.mac[i] = phi_macro[a];
        parts.mac_correction[i] = b_mac_[a] * x_mac;
        parts.mes[i] = mes;
        parts.mic[i] = phi_micro[k];
        parts.mic_correction[i] = b_mic_[k] * x_mic;
      }
    }
  }

  FieldSample field;
  field.dim = 2;
  field.side = N;
  field.model = FieldModel::approx;
  field.replicate_id = replicate;
  field.rng_stream = stream;
  field.values = parts.mac + parts.mac_correction + parts.mes + parts.mic + parts.mic_correction;
  if (components) *components = std::move(parts);
  return field;
}

FieldSample sample_approx_field(const ApproxFieldConfig& config, const BoxSampler& macro, const BoxSampler& micro,
                                std::uint64_t master_seed, std::uint64_t replicate, ApproxComponents* components) {
  return ApproxFieldModel(config, macro, micro).sample(master_seed, replicate, components);
}

BoxSampler make_gff_box_sampler(const Environment& env, const ClusterMap& clusters, double scaling) {
  struct Cache {
    std::mutex mutex;
    std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, std::shared_ptr<const GreenOperator>> ops;
  };
  auto cache = std::make_shared<Cache>();
  return [&env, &clusters, scaling, cache](Point corner, std::int64_t side, CounterStream& rng) {
    std::shared_ptr<const GreenOperator> op;
    {
      std::lock_guard lock(cache->mutex);
      auto& slot = cache->ops[{corner.x, corner.y, side}];
      if (!slot) slot = std::make_shared<const GreenOperator>(env, clusters, Box{corner, side}.rect());
      op = slot;
    }
    return to_box_field(*op, clusters, draw_gff(*op, rng), {true, scaling}).values;
  };
}

double max_f_on_grid(int grid, double delta) {
  if (grid < 1) throw ParameterError("grid must be positive");
  double best = -std::numeric_limits<double>::infinity();
  const double span = 1.0 - 2.0 * delta;
  for (int i = 0; i < grid; ++i)
    for (int k = 0; k < grid; ++k) {
      const Vec2<double> x(delta + span * (i + 0.5) / grid, delta + span * (k + 0.5) / grid);
      best = std::max(best, boundary_correction_f<double>(x));
    }
  return best;
}

double default_gamma() { return max_f_on_grid(256, 0.0) + 1e-3; }

}  // namespace lcgf
