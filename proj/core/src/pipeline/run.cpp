#include "caloric/pipeline/run.hpp"

#include <fftw3.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "caloric/diagnostics/norms.hpp"
#include "caloric/format.hpp"
#include "caloric/gauge/gauge.hpp"
#include "caloric/parallel.hpp"
#include "caloric/slflow/slflow.hpp"
#include "caloric/spectral/field_io.hpp"
#include "caloric/spectral/spectral.hpp"

namespace caloric::pipeline {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

class Recorder {
 public:
  Recorder(RunManifest& manifest, fs::path root) : manifest_(manifest), root_(std::move(root)) {}

  void scalar(const std::string& name, double value) { manifest_.summary.emplace_back(name, value); }
  void file(const fs::path& path) { written_.push_back(path); }
  const fs::path& root() const { return root_; }

  // Runs one stage; a module error becomes a recorded failure.
  bool stage(const std::string& name, const std::function<void()>& body) {
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    try {
      body();
    } catch (const Error& e) {
      manifest_.failures.push_back(name + ": " + e.what());
      ok = false;
    }
    manifest_.timing[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return ok;
  }

  void finish() {
    for (const auto& path : written_) {
      std::ifstream in(path, std::ios::binary);
      std::ostringstream bytes;
      bytes << in.rdbuf();
      const std::string data = bytes.str();
      manifest_.files.push_back({fs::relative(path, root_).generic_string(), fnv1a_hex(data), data.size()});
    }
    std::sort(manifest_.files.begin(), manifest_.files.end(),
              [](const FileEntry& a, const FileEntry& b) { return a.path < b.path; });
  }

 private:
  RunManifest& manifest_;
  fs::path root_;
  std::vector<fs::path> written_;
};

void write_atomically(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("pipeline", "cannot write " + tmp.string());
    out << text;
    if (!out) throw Error("pipeline", "write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

double sup_abs(const spectral::VecField& f) {
  double m = 0.0;
  for (double v : f.data()) m = std::max(m, std::abs(v));
  return m;
}

spectral::VecField gradient_stack(const heatflow::MapField& u) {
  const auto& values = u.values();
  const int n = values.components();
  spectral::VecField out(u.grid(), 2 * n);
  for (int axis = 0; axis < 2; ++axis) {
    const spectral::VecField d = spectral::partial(values, axis);
    for (int c = 0; c < n; ++c) {
      std::copy(d.component(c).begin(), d.component(c).end(), out.component(axis * n + c).begin());
    }
  }
  return out;
}

ordered_json config_echo(const RunConfig& c) {
  ordered_json j;
  j["target"] = std::string(target::to_string(c.target));
  j["flow"] = std::string(to_string(c.flow));
  j["threads"] = c.threads;
  j["grid"] = {{"n", c.grid.n}, {"L", c.grid.side_length}};
  const auto& i = c.initial;
  j["initial"] = {{"family", i.family},       {"amplitude", i.amplitude},     {"grad_norm", i.grad_norm},
                  {"width", i.width},         {"center", {i.center[0], i.center[1]}},
                  {"scales", i.scales},       {"shell", i.shell},             {"helix_theta", i.helix_theta},
                  {"helix_k", i.helix_k},     {"seed", i.seed},               {"smoothing", i.smoothing}};
  const auto& h = c.heat.options;
  j["heat"] = {{"s_max", h.s_max},
               {"tol_q", h.tol_q},
               {"level_ratio", h.level_ratio},
               {"ramp_step", h.ramp_step},
               {"min_substeps", h.min_substeps},
               {"max_substep", h.max_substep},
               {"energy_threshold", h.energy_threshold},
               {"enforce_smallness", h.enforce_smallness},
               {"dump_levels", c.heat.dump_levels}};
  j["sl"] = {{"T", c.sl.T}, {"dt", c.sl.dt}, {"record_every", c.sl.record_every}, {"dump_every", c.sl.dump_every}};
  j["gauge"] = {{"separation", c.gauge.separation}, {"tail_ratio", c.gauge.tail_ratio}, {"dump", c.gauge.dump}};
  const auto& d = c.diagnostics;
  j["diagnostics"] = {{"envelopes", d.envelopes},   {"sigma", d.sigma},
                      {"delta", d.delta},           {"iterates", d.iterates},
                      {"decay_fits", d.decay_fits}, {"fit_shells", d.fit_shells},
                      {"fit_weight", d.fit_weight}, {"residuals", d.residuals},
                      {"residual_sample", d.residual_sample}};
  return j;
}

ordered_json vector_json(const target::Vec& v) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

void write_envelopes(Recorder& rec, const spectral::VecField& field, const DiagnosticsConfig& d, const fs::path& path,
                     const std::string& prefix) {
  std::vector<diagnostics::EnvelopeFamily> selected;
  for (int j = 0; j <= d.iterates; ++j) {
    const auto family = diagnostics::field_iterate(field, d.delta, j);
    diagnostics::EnvelopeFamily keep;
    keep.iterate = j;
    for (double sigma : d.sigma) {
      const int m = diagnostics::sigma_index(sigma);
      if (m <= family.max_index()) keep.members.push_back(family.at_index(m));
    }
    selected.push_back(std::move(keep));
  }
  diagnostics::write_envelope_csv(selected, path);
  rec.file(path);
  for (const auto& e : selected.front().members) {
    rec.scalar(prefix + ".l2.sigma_" + format_double(e.sigma), e.ell2_norm());
  }
}

}  // namespace

bool RunManifest::has(const std::string& name) const {
  return std::any_of(summary.begin(), summary.end(), [&](const auto& kv) { return kv.first == name; });
}

double RunManifest::scalar(const std::string& name) const {
  for (const auto& [key, value] : summary) {
    if (key == name) return value;
  }
  throw Error("pipeline", "summary has no scalar '" + name + "'");
}

RunManifest run(const RunConfig& config) {
  const fs::path root(config.output);
  fs::create_directories(root);
  set_thread_count(config.threads);
  RunManifest manifest;
  Recorder rec(manifest, root);
  const auto& diag = config.diagnostics;
  const bool want_heat = config.flow != Flow::SL;
  const bool want_gauge = config.flow == Flow::Gauge || config.flow == Flow::Full;
  const bool want_sl = config.flow == Flow::SL || config.flow == Flow::Full;

  const spectral::Grid2 grid(config.grid.n, config.grid.side_length);
  const auto target = target::make_target(config.target);
  std::optional<heatflow::MapField> u0;
  std::optional<heatflow::HeatTrajectory> traj;

  rec.stage("initial", [&] {
    InitialData data = initial_data(config.initial, grid, target);
    rec.scalar("initial.amplitude", data.amplitude);
    rec.scalar("initial.grad_norm", data.grad_norm);
    rec.scalar("initial.energy", heatflow::energy(data.u));
    rec.scalar("initial.sup_distance", data.u.sup_distance_to_base());
    spectral::write_field_dump(root / "initial.cslf", data.u.values());
    rec.file(root / "initial.cslf");
    u0 = std::move(data.u);
  });

  if (u0 && diag.envelopes) {
    rec.stage("envelopes", [&] { write_envelopes(rec, u0->values(), diag, root / "envelopes.csv", "envelope"); });
  }

  if (u0 && want_heat) {
    rec.stage("heat", [&] {
      heatflow::HeatTrajectory t = heatflow::heat_solve(*u0, config.heat.options);
      for (const auto& path : heatflow::write_trajectory(t, root / "heat", config.heat.dump_levels)) rec.file(path);
      double worst_increase = 0.0;
      for (std::size_t k = 1; k < t.size(); ++k) {
        worst_increase = std::max(worst_increase, t.energies[k] - t.energies[k - 1]);
      }
      rec.scalar("heat.levels", static_cast<double>(t.size()));
      rec.scalar("heat.s_max", t.s_levels.back());
      rec.scalar("heat.energy_initial", t.energies.front());
      rec.scalar("heat.energy_final", t.energies.back());
      rec.scalar("heat.energy_max_increase", worst_increase);
      rec.scalar("heat.energy_monotone", worst_increase <= 1e-8 * t.energies.front() ? 1.0 : 0.0);
      rec.scalar("heat.converged", t.converged_to_q ? 1.0 : 0.0);
      rec.scalar("heat.sup_distance", t.sup_distance);
      traj = std::move(t);
    });
  }

  if (traj) {
    rec.stage("heat_decay", [&] {
      for (int j = 0; j <= 2; ++j) {
        const std::string key = "heat.decay_slope.j" + std::to_string(j);
        try {
          const auto rate = heatflow::decay_rate(*traj, j);
          rec.scalar(key, rate.slope);
        } catch (const InvariantViolation&) {
          throw;
        } catch (const Error&) {
          rec.scalar(key, std::nan(""));
        }
      }
    });
  }

  if (traj && diag.decay_fits) {
    rec.stage("decay_fits", [&] {
      std::ofstream out(root / "profiles.csv");
      if (!out) throw Error("pipeline", "cannot write profiles.csv");
      out << "k,s,value\n";
      for (int k : diag.fit_shells) {
        const auto profile = heatflow::frequency_decay_profile(*traj, k, diag.fit_weight);
        for (std::size_t i = 0; i < profile.s.size(); ++i) {
          out << k << ',' << format_double(profile.s[i]) << ',' << format_double(profile.values[i]) << '\n';
        }
        const std::string key = "fit.k" + std::to_string(k);
        rec.scalar(key + ".weighted_sup", profile.weighted_sup);
        try {
          const auto fit = diagnostics::decay_fit(profile.s, profile.values, k);
          rec.scalar(key + ".exponent", fit.defined ? fit.exponent : std::nan(""));
          rec.scalar(key + ".residual", fit.defined ? fit.residual : std::nan(""));
        } catch (const InvariantViolation&) {
          throw;
        } catch (const Error&) {
          rec.scalar(key + ".exponent", std::nan(""));
          rec.scalar(key + ".residual", std::nan(""));
        }
      }
      rec.file(root / "profiles.csv");
    });
  }

  if (traj && want_gauge) {
    rec.stage("gauge", [&] {
      gauge::GaugeOptions options;
      options.tail_ratio = config.gauge.tail_ratio;
      options.converged_tolerance = config.heat.options.tol_q;
      double a_integral_sup = 0.0;
      struct Dump {
        std::string name;
        spectral::VecField field;
        double residual;
      };
      std::vector<Dump> dumps;
      options.observer = [&](const gauge::GaugeLevel& level) {
        if (level.a_integral) {
          for (const auto& a : *level.a_integral) a_integral_sup = std::max(a_integral_sup, sup_abs(a));
        }
        if (level.level != 0 || !config.gauge.dump) return;
        const double torsion = gauge::torsion_residual(*level.psi, *level.a_direct).max_abs;
        const double commutator = gauge::commutator_residual(*level.v, *level.frame, *level.a_direct).max_abs;
        const double tension = gauge::heat_tension_residual(*level.psi_s, *level.psi, *level.a_direct).max_abs;
        dumps.push_back({"frame", *level.frame, 0.0});
        dumps.push_back({"psi_1", (*level.psi)[0], torsion});
        dumps.push_back({"psi_2", (*level.psi)[1], torsion});
        dumps.push_back({"psi_s", *level.psi_s, tension});
        dumps.push_back({"a_direct_1", (*level.a_direct)[0], commutator});
        dumps.push_back({"a_direct_2", (*level.a_direct)[1], commutator});
        if (level.a_integral) {
          for (int i = 0; i < 2; ++i) {
            double gap = 0.0;
            const auto& a = (*level.a_direct)[i];
            const auto& b = (*level.a_integral)[i];
            for (std::size_t n = 0; n < a.data().size(); ++n) gap = std::max(gap, std::abs(a.data()[n] - b.data()[n]));
            dumps.push_back({"a_integral_" + std::to_string(i + 1), b, gap});
          }
        }
      };
      const auto report = gauge::verify_gauge(*traj, config.gauge.separation, options);
      rec.scalar("gauge.torsion", report.torsion.max_abs);
      rec.scalar("gauge.commutator", report.commutator.max_abs);
      rec.scalar("gauge.heat_tension", report.heat_tension.max_abs);
      rec.scalar("gauge.connection_gap", report.connection_gap);
      rec.scalar("gauge.connection_scale", report.connection_scale);
      rec.scalar("gauge.a_integral_sup", a_integral_sup);
      rec.scalar("gauge.antisymmetry", report.antisymmetry);
      rec.scalar("gauge.tail_connection", report.tail_connection);
      rec.scalar("gauge.frame_orthonormality", report.summary.frame.orthonormality);
      rec.scalar("gauge.frame_j_compatibility", report.summary.frame.j_compatibility);
      rec.scalar("gauge.integrand_peak", report.summary.integrand_peak);
      rec.scalar("gauge.tail_bound", report.summary.tail_bound);
      if (report.separation) {
        rec.scalar("separation.remainder_sup", report.separation->remainder_sup);
        rec.scalar("separation.limit_variation", report.separation->limit_variation);
        rec.scalar("separation.remainder_integral_sup", report.separation->remainder_integral_sup);
      }
      if (!dumps.empty()) {
        const fs::path dir = root / "gauge";
        fs::create_directories(dir);
        std::ofstream index(dir / "manifest.csv");
        if (!index) throw Error("pipeline", "cannot write gauge manifest");
        index << "quantity,s_level,file,residual_summary\n";
        for (const auto& d : dumps) {
          const std::string name = d.name + "_s0.cslf";
          spectral::write_field_dump(dir / name, d.field);
          rec.file(dir / name);
          index << d.name << ",0," << name << ',' << format_double(d.residual) << '\n';
        }
        index.close();
        rec.file(dir / "manifest.csv");
      }
    });
  }

  if (u0 && want_sl) {
    rec.stage("sl", [&] {
      // Default step: the largest T / n within the stability bound with n a
      // multiple of the record stride, so samples are uniform in t.
      const int stride = config.sl.record_every;
      const double dt =
          config.sl.dt > 0.0
              ? config.sl.dt
              : config.sl.T / (stride * std::ceil(config.sl.T / (stride * slflow::sl_stability_bound(grid))));
      const long steps = std::lround(config.sl.T / dt);
      if (steps % stride != 0) {
        throw Error("pipeline", "sl.T / sl.dt = " + std::to_string(steps) + " is not a multiple of sl.record_every");
      }
      slflow::SLSeries series = slflow::sl_solve(*u0, config.sl.T, dt, config.sl.record_every);
      rec.scalar("sl.dt", series.dt);
      rec.scalar("sl.samples", static_cast<double>(series.size()));
      rec.scalar("sl.t_final", series.t.back());
      rec.scalar("sl.energy_initial", series.energy.front());
      rec.scalar("sl.energy_drift", series.energy_drift());
      rec.scalar("sl.mass_final", series.mass.back());
      rec.scalar("sl.supdist_final", series.supdist.back());

      if (series.size() >= 2) {
        std::vector<spectral::VecField> g;
        for (const auto& s : series.states) g.push_back(gradient_stack(s));
        const auto blocks = diagnostics::norm_blocks(g, series.t);
        rec.scalar("sl.du.linf_t_l2_x", blocks.linf_t_l2_x);
        rec.scalar("sl.du.l4_tx", blocks.l4_tx);
        rec.scalar("sl.du.l4_x_linf_t", blocks.l4_x_linf_t);
      }

      if (config.flow == Flow::Full && diag.residuals) {
        const std::size_t index =
            diag.residual_sample > 0 ? static_cast<std::size_t>(diag.residual_sample) : series.size() / 2;
        if (index == 0 || index + 1 >= series.size()) {
          throw Error("pipeline", "residual sample " + std::to_string(index) + " is not interior to the series");
        }
        gauge::GaugeOptions options;
        options.tail_ratio = config.gauge.tail_ratio;
        options.converged_tolerance = config.heat.options.tol_q;
        const auto r = slflow::gauged_residual(series, index, config.heat.options, options);
        series.residual[index] = r.equation;
        rec.scalar("sl.residual.sample", static_cast<double>(index));
        rec.scalar("sl.residual.equation", r.equation);
        rec.scalar("sl.residual.phi_t", r.phi_t);
        rec.scalar("sl.residual.torsion_t", r.torsion_t);
        rec.scalar("sl.residual.scale", r.scale);
      }

      fs::create_directories(root / "sl");
      slflow::write_series_csv(series, root / "sl" / "series.csv");
      rec.file(root / "sl" / "series.csv");
      if (config.sl.dump_every > 0) {
        for (std::size_t i = 0; i < series.size(); i += static_cast<std::size_t>(config.sl.dump_every)) {
          char name[40];
          std::snprintf(name, sizeof name, "state_%06zu.cslf", i);
          spectral::write_field_dump(root / "sl" / name, series.states[i].values());
          rec.file(root / "sl" / name);
        }
      }
      if (diag.envelopes) {
        write_envelopes(rec, series.states.back().values(), diag, root / "sl" / "envelopes_final.csv", "sl.envelope");
      }
    });
  }

  rec.finish();
  write_atomically(root / "manifest.json", manifest_json(config, manifest));
  ordered_json timing = ordered_json::object();
  for (const auto& [stage, seconds] : manifest.timing) timing[stage] = seconds;
  write_atomically(root / "timing.json", timing.dump(2) + "\n");
  return manifest;
}

std::string manifest_json(const RunConfig& config, const RunManifest& manifest) {
  const auto target = target::make_target(config.target);
  ordered_json j;
  j["config"] = config_echo(config);
  j["versions"] = {{"caloric", CALORIC_VERSION},
                   {"fftw", std::string(fftw_version)},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)}};
  j["base_point"] = vector_json(target->base_point());
  ordered_json frame = ordered_json::array();
  for (const auto& e : target->reference_frame()) frame.push_back(vector_json(e));
  j["reference_frame"] = frame;
  ordered_json files = ordered_json::array();
  for (const auto& f : manifest.files) files.push_back({{"path", f.path}, {"fnv1a64", f.checksum}, {"bytes", f.bytes}});
  j["files"] = files;
  ordered_json summary = ordered_json::object();
  for (const auto& [key, value] : manifest.summary) summary[key] = value;
  j["summary"] = summary;
  j["status"] = manifest.ok() ? "ok" : "failed";
  j["failures"] = manifest.failures;
  return j.dump(2) + "\n";
}

}  // namespace caloric::pipeline
