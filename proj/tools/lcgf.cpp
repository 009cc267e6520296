#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "lcgf/audit/audit.hpp"
#include "lcgf/env/clusters.hpp"
#include "lcgf/env/environment.hpp"
#include "lcgf/errors.hpp"
#include "lcgf/extremes/extremes.hpp"
#include "lcgf/fields/approx_field.hpp"
#include "lcgf/fields/gff.hpp"
#include "lcgf/fields/hierarchical.hpp"
#include "lcgf/io/config.hpp"
#include "lcgf/io/report.hpp"
#include "lcgf/laplace/continuum.hpp"
#include "lcgf/laplace/diffusivity.hpp"
#include "lcgf/laplace/operator.hpp"
#include "lcgf/parallel.hpp"

using namespace lcgf;

namespace {

struct Globals {
  unsigned threads = 0;
  bool force = false;
};

Point parse_point(const std::string& text) {
  std::int64_t x = 0, y = 0;
  char comma = 0;
  std::istringstream in(text);
  if (!(in >> x >> comma >> y) || comma != ',') throw ParameterError("expected x,y but got '" + text + "'");
  return {x, y};
}

// Resolved options of a subcommand, flags and config-file values included. The
// thread count is not part of it since outputs do not depend on it.
ExperimentConfig resolved_config(const CLI::App& sub, const std::string& section) {
  ExperimentConfig config;
  config.set("", "command", section);
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty() || opt->get_lnames()[0] == "help") continue;
    std::string value;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) value += (value.empty() ? "" : " ") + r;
      if (opt->get_type_size() == 0 && value.empty()) value = "true";
    } else {
      value = opt->get_default_str();
    }
    config.set(section, opt->get_lnames()[0], value);
  }
  return config;
}

void check_output(const std::string& path, const Globals& g) {
  if (path.empty()) throw ParameterError("an output path is required");
  if (std::filesystem::exists(path) && !g.force) throw ParameterError("output " + path + " exists (use --force)");
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot write " + path);
  return out;
}

void emit_csv(const std::string& path, const Table& table, const ExperimentConfig& config) {
  auto out = open_output(path);
  write_csv(out, table, config.to_json());
}

void emit_json(const std::string& path, nlohmann::ordered_json j, const ExperimentConfig& config) {
  j["config_echo"] = config.to_json();
  auto out = open_output(path);
  write_json(out, j);
}

struct EnvArgs {
  std::string path;
  double p = 1.0;
  std::int64_t n = 64;
  std::string origin = "0,0";
  double lambda_minus = 1.0;
  double lambda_plus = 1.0;
  std::string law = "constant";
  std::uint64_t seed = 1;

  void add(CLI::App* app, bool with_path) {
    if (with_path) app->add_option("--env", path, "environment file (otherwise generated from the flags below)");
    app->add_option("--p", p, "open-edge probability")->capture_default_str();
    app->add_option("--n", n, "window side")->capture_default_str();
    app->add_option("--origin", origin, "window origin x,y")->capture_default_str();
    app->add_option("--lambda-minus", lambda_minus)->capture_default_str();
    app->add_option("--lambda-plus", lambda_plus)->capture_default_str();
    app->add_option("--law", law, "constant | uniform")->capture_default_str();
    app->add_option("--seed", seed)->capture_default_str();
  }

  EnvironmentParams params() const {
    EnvironmentParams e;
    e.origin = parse_point(origin);
    e.width = e.height = n;
    e.p = p;
    e.lambda_minus = lambda_minus;
    e.lambda_plus = lambda_plus;
    e.law = parse_conductance_law(law);
    e.seed = seed;
    return e;
  }

  Environment load() const { return path.empty() ? generate_environment(params()) : load_environment(path); }
};

Box box_from(const std::string& corner, std::int64_t side, const Environment& env) {
  if (side > 0) return Box{parse_point(corner), side};
  const Rect w = env.window();
  if (w.width != w.height) throw ParameterError("--box-n is required for non-square windows");
  if (w.width < 3) throw ParameterError("window too small for a box");
  return Box{w.lo + Point{1, 1}, w.width - 2};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-conductance GFF experiments"};
  app.set_config("--config", "", "key=value config file with [command] sections");
  app.require_subcommand(1);
  Globals g;
  app.add_option("--threads", g.threads, "worker threads (default: LCGF_THREADS or all cores)");
  app.add_flag("--force", g.force, "overwrite existing outputs");

  // envgen
  auto* envgen = app.add_subcommand("envgen", "generate and save an environment");
  EnvArgs envgen_args;
  std::string envgen_out = "env.bin";
  envgen_args.add(envgen, false);
  envgen->add_option("--out", envgen_out)->capture_default_str();

  // green
  auto* green = app.add_subcommand("green", "Green column at a source");
  EnvArgs green_env;
  std::string green_source, green_corner = "0,0", green_domain = "dirichlet", green_out;
  std::int64_t green_box_n = 0, green_radius = 32;
  double green_factor = 4.0;
  green_env.add(green, true);
  green->add_option("--source", green_source, "source vertex x,y")->required();
  green->add_option("--box-corner", green_corner)->capture_default_str();
  green->add_option("--box-n", green_box_n, "box side (0: whole window)")->capture_default_str();
  green->add_option("--domain", green_domain, "dirichlet | fullplane")->capture_default_str();
  green->add_option("--radius", green_radius, "analysis radius for fullplane")->capture_default_str();
  green->add_option("--factor", green_factor, "fullplane window factor")->capture_default_str();
  green->add_option("--out", green_out, "CSV (x, y, value)");

  // diffusivity
  auto* diff = app.add_subcommand("diffusivity", "log-law fit of the Green function");
  EnvArgs diff_env;
  std::string diff_source, diff_out;
  double diff_r_min = 0.0, diff_r_max = 0.0, diff_factor = 4.0;
  diff_env.add(diff, true);
  diff->add_option("--source", diff_source)->required();
  diff->add_option("--r-min", diff_r_min, "default N/32")->capture_default_str();
  diff->add_option("--r-max", diff_r_max, "default N/8")->capture_default_str();
  diff->add_option("--factor", diff_factor)->capture_default_str();
  diff->add_option("--out", diff_out, "JSON");

  // sample
  auto* sample = app.add_subcommand("sample", "draw field replicates");
  EnvArgs sample_env;
  std::string sample_model = "mbrw", sample_out, sample_corner = "0,0";
  std::int64_t sample_n = 64, replicates = 1, first_rep = 0;
  int sample_d = 2;
  std::uint64_t sample_seed = 1;
  bool streaming = false;
  double scaling = 1.0, abar = 1.0;
  std::int64_t K = 1, L = 1, Kp = 1, Lp = 1;
  double approx_R = 0.0, approx_delta = 0.0, gamma = 0.0, gamma_prime = 0.0;
  sample_env.add(sample, true);
  sample->add_option("--model", sample_model, "gff | gff_extended | brw | mbrw | approx")->capture_default_str();
  sample->add_option("--box-n,--N", sample_n, "field box side")->capture_default_str();
  sample->add_option("--box-corner", sample_corner)->capture_default_str();
  sample->add_option("--d", sample_d)->capture_default_str();
  sample->add_option("--replicates", replicates)->capture_default_str();
  sample->add_option("--first-replicate", first_rep)->capture_default_str();
  sample->add_option("--sample-seed", sample_seed, "master seed of the field streams")->capture_default_str();
  sample->add_flag("--streaming", streaming, "lift the MBRW memory guard");
  sample->add_option("--scaling", scaling, "GFF multiplier (0: sqrt(2 pi abar))")->capture_default_str();
  sample->add_option("--abar", abar)->capture_default_str();
  sample->add_option("--K", K)->capture_default_str();
  sample->add_option("--L", L)->capture_default_str();
  sample->add_option("--K-prime", Kp)->capture_default_str();
  sample->add_option("--L-prime", Lp)->capture_default_str();
  sample->add_option("--R", approx_R)->capture_default_str();
  sample->add_option("--delta", approx_delta)->capture_default_str();
  sample->add_option("--gamma", gamma, "0: default")->capture_default_str();
  sample->add_option("--gamma-prime", gamma_prime, "0: max g on V_J + 1e-3")->capture_default_str();
  sample->add_option("--out", sample_out, "fields CSV (replicate, x, y, value)")->required();

  // extremes
  auto* ext = app.add_subcommand("extremes", "centered maxima and tail statistics of field replicates");
  std::string ext_in, ext_out, ext_tail, ext_report;
  int ext_d = 2;
  double ext_scale = 1.0, ext_delta = 0.0, z_lo = -4.0, z_hi = 8.0, z_step = 0.1, fit_lo = 1.0, fit_hi = 3.5;
  std::int64_t near_L = 0;
  ext->add_option("--in", ext_in, "fields CSV")->required();
  ext->add_option("--d", ext_d)->capture_default_str();
  ext->add_option("--scale", ext_scale, "centering scale")->capture_default_str();
  ext->add_option("--delta", ext_delta, "near-boundary margin")->capture_default_str();
  ext->add_option("--z-lo", z_lo)->capture_default_str();
  ext->add_option("--z-hi", z_hi)->capture_default_str();
  ext->add_option("--z-step", z_step)->capture_default_str();
  ext->add_option("--fit-lo", fit_lo)->capture_default_str();
  ext->add_option("--fit-hi", fit_hi)->capture_default_str();
  ext->add_option("--near-max-L", near_L, "0: skip near-max pairs")->capture_default_str();
  ext->add_option("--out", ext_out, "summaries CSV")->required();
  ext->add_option("--tail", ext_tail, "tail curve CSV");
  ext->add_option("--report", ext_report, "JSON with tail, Gumbel and near-max statistics");

  // audit
  auto* audit = app.add_subcommand("audit", "assumption audits");
  audit->require_subcommand(1);
  struct AuditArgs {
    EnvArgs env;
    std::string corner = "0,0", out, residuals;
    std::int64_t box_n = 0;
    double abar = 1.0, delta = 0.125;
    std::int64_t pairs = 1000, L = 4;
    std::uint64_t audit_seed = 1;
    std::vector<std::int64_t> R_list{64};
    std::vector<double> T_grid;
    std::int64_t environments = 200, tiles = 1, samples = 4;
    double fit_r_max = 32, factor = 4;
    std::string source;
    std::int64_t max_k = 0;
  };
  std::map<std::string, AuditArgs> audit_args;
  for (const std::string name : {"a1", "a2", "a3", "a4", "b1", "b2", "levelset"}) {
    auto* sub = audit->add_subcommand(name);
    auto& a = audit_args[name];
    a.env.add(sub, name == "a2" || name == "a3" || name == "a4" || name == "levelset");
    sub->add_option("--abar", a.abar)->capture_default_str();
    sub->add_option("--out", a.out, "report JSON")->required();
    if (name == "a1" || name == "b1") {
      sub->add_option("--R", a.R_list)->capture_default_str();
      sub->add_option("--T", a.T_grid, "T grid (default 0..6 step 0.25)");
      sub->add_option("--environments", a.environments)->capture_default_str();
      sub->add_option("--tiles", a.tiles)->capture_default_str();
    } else if (name == "b2") {
      sub->add_option("--box-n", a.box_n, "N")->capture_default_str();
      sub->add_option("--L", a.L)->capture_default_str();
      a.R_list = {1, 2, 4, 8, 16, 32};
      a.environments = 4;
      sub->add_option("--R", a.R_list)->capture_default_str();
      sub->add_option("--environments", a.environments)->capture_default_str();
      sub->add_option("--samples", a.samples)->capture_default_str();
      sub->add_option("--fit-r-max", a.fit_r_max)->capture_default_str();
      sub->add_option("--factor", a.factor)->capture_default_str();
    } else {
      sub->add_option("--box-corner", a.corner)->capture_default_str();
      sub->add_option("--box-n", a.box_n, "box side (0: whole window)")->capture_default_str();
      if (name == "levelset") {
        sub->add_option("--source", a.source)->required();
        sub->add_option("--max-k", a.max_k)->capture_default_str();
      } else {
        sub->add_option("--delta", a.delta)->capture_default_str();
        sub->add_option("--pairs", a.pairs)->capture_default_str();
        sub->add_option("--audit-seed", a.audit_seed)->capture_default_str();
        sub->add_option("--residuals", a.residuals, "residual CSV");
        if (name != "a2") sub->add_option("--L", a.L)->capture_default_str();
      }
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  try {
    const unsigned threads = resolve_threads(g.threads);
    if (envgen->parsed()) {
      const auto config = resolved_config(*envgen, "envgen");
      std::cout << config.to_text();
      check_output(envgen_out, g);
      const Environment env = generate_environment(envgen_args.params());
      save_environment(envgen_out, env);
      std::ofstream(envgen_out + ".ini") << config.to_text();
    } else if (green->parsed()) {
      const auto config = resolved_config(*green, "green");
      std::cout << config.to_text();
      if (!green_out.empty()) check_output(green_out, g);
      const Environment env = green_env.load();
      const ClusterMap clusters = label_clusters(env);
      const Point source = clusters.projection(parse_point(green_source));
      GreenColumn column;
      if (green_domain == "dirichlet") {
        const GreenOperator op(env, clusters, box_from(green_corner, green_box_n, env).rect());
        column = op.column(source);
        const Point other = clusters.projection(source + Point{3, 1});
        if (op.index().contains(other)) {
          const double asym = std::abs(column.value(other) - op.column(other).value(source));
          std::cout << "# symmetry |G(s,t) - G(t,s)| = " << asym << " at t = " << other.x << "," << other.y << "\n";
        }
      } else if (green_domain == "fullplane") {
        column = green_fullplane_approx(env, clusters, source, green_radius, green_factor);
      } else {
        throw ParameterError("unknown domain " + green_domain);
      }
      std::cout << "# G(source,source) = " << format_double(column.value(source)) << "\n";
      if (!green_out.empty()) emit_csv(green_out, green_column_table(column), config);
    } else if (diff->parsed()) {
      const auto config = resolved_config(*diff, "diffusivity");
      std::cout << config.to_text();
      if (!diff_out.empty()) check_output(diff_out, g);
      const Environment env = diff_env.load();
      const ClusterMap clusters = label_clusters(env);
      const double n = static_cast<double>(std::min(env.window().width, env.window().height));
      const double r_min = diff_r_min > 0 ? diff_r_min : n / 32.0;
      const double r_max = diff_r_max > 0 ? diff_r_max : n / 8.0;
      const Point source = parse_point(diff_source);
      DiffusivityFit fit = fit_at_vertex(env, clusters, source, r_min, r_max, diff_factor);
      flag_outside_bounds(fit, env.params());
      std::cout << to_json(fit).dump(2) << "\n";
      if (!diff_out.empty()) emit_json(diff_out, to_json(fit), config);
    } else if (sample->parsed()) {
      const auto config = resolved_config(*sample, "sample");
      std::cout << config.to_text();
      check_output(sample_out, g);
      const FieldModel model = parse_field_model(sample_model);
      if (replicates < 1) throw ParameterError("--replicates must be positive");
      std::vector<FieldSample> fields(static_cast<std::size_t>(replicates));
      auto rep = [&](std::size_t i) { return static_cast<std::uint64_t>(first_rep) + i; };
      const double gff_scale = scaling > 0 ? scaling : std::sqrt(2.0 * std::numbers::pi * abar);
      if (model == FieldModel::brw || model == FieldModel::mbrw) {
        const HierarchyConfig hc{sample_n, sample_d, {0, 0}};
        MbrwOptions mo;
        mo.streaming = streaming;
        parallel_for(fields.size(), threads, [&](std::size_t i) {
          fields[i] = model == FieldModel::brw ? sample_brw(hc, sample_seed, rep(i))
                                               : sample_mbrw(hc, sample_seed, rep(i), mo);
        });
      } else if (model == FieldModel::gff || model == FieldModel::gff_extended) {
        const Environment env = sample_env.load();
        const ClusterMap clusters = label_clusters(env);
        const GreenOperator op(env, clusters, Box{parse_point(sample_corner), sample_n}.rect(), SolveMode::direct);
        const GffOptions opts{model == FieldModel::gff_extended, gff_scale};
        parallel_for(fields.size(), threads, [&](std::size_t i) {
          fields[i] = sample_gff_replicate(op, clusters, sample_seed, rep(i), opts);
        });
      } else {
        const Environment env = sample_env.load();
        const ClusterMap clusters = label_clusters(env);
        ApproxFieldConfig ac;
        ac.N = sample_n;
        ac.K = K, ac.L = L, ac.K_prime = Kp, ac.L_prime = Lp;
        ac.R = approx_R;
        ac.delta = approx_delta;
        ac.gamma = gamma > 0 ? gamma : default_gamma();
        ac.f_eval = [](const Vec2<double>& x) { return boundary_correction_f<double>(x); };
        auto gfp = std::make_shared<FullPlaneG>(env, clusters, abar);
        ac.g_eval = [gfp](Point u, Point v) { return (*gfp)(u, v); };
        if (gamma_prime > 0) {
          ac.gamma_prime = gamma_prime;
        } else {
          double gmax = -std::numeric_limits<double>::infinity();
          for (std::int64_t a = 0; a < ac.J() * ac.J(); ++a) {
            const Point w{a % ac.J(), a / ac.J()};
            gmax = std::max(gmax, ac.g_eval(w, w));
          }
          ac.gamma_prime = gmax + 1e-3;
        }
        const BoxSampler box_sampler = make_gff_box_sampler(env, clusters, gff_scale);
        const ApproxFieldModel approx(ac, box_sampler, box_sampler);
        parallel_for(fields.size(), threads,
                     [&](std::size_t i) { fields[i] = approx.sample(sample_seed, rep(i)); });
      }
      emit_csv(sample_out, field_table(fields), config);
      auto sidecar = field_sidecar(fields.front(), sample_seed);
      sidecar["replicates"] = replicates;
      emit_json(sample_out + ".json", sidecar, config);
    } else if (ext->parsed()) {
      const auto config = resolved_config(*ext, "extremes");
      std::cout << config.to_text();
      check_output(ext_out, g);
      if (!ext_tail.empty()) check_output(ext_tail, g);
      if (!ext_report.empty()) check_output(ext_report, g);
      std::ifstream in(ext_in);
      if (!in) throw ParameterError("cannot open " + ext_in);
      const auto fields = fields_from_csv(read_csv(in), ext_d);
      if ((!ext_tail.empty() || !ext_report.empty()) && fields.size() < 100)
        throw ParameterError("tail statistics need at least 100 replicates");
      std::vector<ExtremeSummary> summaries(fields.size());
      CenteringOptions co;
      co.centering_scale = ext_scale;
      co.delta = ext_delta;
      parallel_for(fields.size(), threads, [&](std::size_t i) { summaries[i] = centered_max(fields[i], co); });
      emit_csv(ext_out, summary_table(summaries), config);
      std::vector<double> centered;
      for (const auto& s : summaries) centered.push_back(s.centered);
      nlohmann::ordered_json report;
      report["replicates"] = summaries.size();
      if (!ext_tail.empty() || !ext_report.empty()) {
        std::vector<double> grid;
        for (double z = z_lo; z <= z_hi + 1e-12; z += z_step) grid.push_back(z);
        const TailCurve curve = tail_curve(centered, grid);
        if (!ext_tail.empty()) emit_csv(ext_tail, tail_curve_table(curve), config);
        const TailFit tf = fit_tail(curve, fit_lo, fit_hi);
        report["tail_fit"] = {{"slope", tf.slope}, {"intercept", tf.intercept}, {"n_points", tf.n_points},
                              {"status", tf.status}};
      }
      if (!ext_report.empty()) {
        if (centered.size() >= 500) {
          const GumbelFit gf = gumbel_fit(centered);
          report["gumbel"] = {{"location", gf.location}, {"scale", gf.scale}, {"ks_distance", gf.ks_distance}};
          const auto cg = gumbel_fit_by_z_quartile(summaries);
          auto& q = report["gumbel_by_z_quartile"] = nlohmann::ordered_json::array();
          for (std::size_t i = 0; i < cg.fits.size(); ++i)
            q.push_back({{"z_upper", cg.z_upper[i]}, {"size", cg.sizes[i]}, {"location", cg.fits[i].location},
                         {"scale", cg.fits[i].scale}});
        }
        if (near_L > 0) {
          std::int64_t with_mid = 0;
          for (const auto& f : fields) with_mid += near_max_pairs(f, near_L, 1.0, ext_scale).count_mid > 0;
          report["near_max_mid_fraction"] = static_cast<double>(with_mid) / static_cast<double>(fields.size());
        }
        emit_json(ext_report, report, config);
      }
    } else {
      auto* sub = audit->get_subcommands().front();
      const std::string name = sub->get_name();
      auto& a = audit_args.at(name);
      const auto config = resolved_config(*sub, "audit." + name);
      std::cout << config.to_text();
      check_output(a.out, g);
      if (!a.residuals.empty()) check_output(a.residuals, g);
      nlohmann::ordered_json out;
      std::optional<AssumptionReport> report;
      if (name == "a1" || name == "b1") {
        VarianceTailOptions vo;
        vo.R_list = a.R_list;
        vo.T_grid = a.T_grid;
        vo.environments = a.environments;
        vo.tiles_per_axis = a.tiles;
        vo.threads = threads;
        report = audit_variance_tail(a.env.params(), a.abar, vo);
        report->assumption = name == "a1" ? "A1" : "B1";
      } else if (name == "b2") {
        SparsityOptions so;
        so.N = a.box_n > 0 ? a.box_n : 128;
        so.L = a.L;
        so.R_grid = a.R_list;
        so.environments = a.environments;
        so.samples_per_subbox = a.samples;
        so.fit_r_max = a.fit_r_max;
        so.window_factor = a.factor;
        so.threads = threads;
        report = audit_sparsity_r1(a.env.params(), so);
      } else {
        const Environment env = a.env.load();
        const ClusterMap clusters = label_clusters(env);
        const Box box = box_from(a.corner, a.box_n, env);
        if (name == "levelset") {
          const GreenOperator op(env, clusters, box.rect());
          const Point u = clusters.projection(parse_point(a.source));
          const auto profile = level_set_profile(op.column(u), clusters, u, a.max_k);
          out = to_json(profile);
        } else if (name == "a2") {
          report = audit_covariance_law(env, clusters, box, a.abar, {a.delta, a.pairs, a.audit_seed});
        } else if (name == "a3") {
          FullPlaneG gfp(env, clusters, a.abar);
          report = audit_micro(
              env, clusters, box, a.abar, [](const Vec2<double>& x) { return boundary_correction_f<double>(x); },
              [&](Point u, Point v) { return gfp(u, v); }, {a.delta, a.L, a.pairs, a.audit_seed});
        } else {
          report = audit_macro(env, clusters, box, a.abar, {a.delta, a.L, a.pairs, a.audit_seed});
        }
      }
      if (report) {
        out = to_json(*report);
        if (!a.residuals.empty()) emit_csv(a.residuals, residual_table(*report), config);
      }
      emit_json(a.out, out, config);
    }
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure (" << e.invariant() << "): " << e.what() << "\n";
    return 3;
  }
  return 0;
}
