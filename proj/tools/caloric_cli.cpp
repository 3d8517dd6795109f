// caloric: batch driver.
//   caloric run --config FILE [--out DIR] [--threads N]
//   caloric check --target T --grid N
//   caloric envelope --dump FILE [--sigma S ...] [--delta D] [--iterates J] [--out CSV]
// Exit status: 0 ok, 1 assertion or run failure, 2 usage or config error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "caloric/diagnostics/envelope.hpp"
#include "caloric/format.hpp"
#include "caloric/parallel.hpp"
#include "caloric/pipeline/check.hpp"
#include "caloric/pipeline/run.hpp"
#include "caloric/spectral/field_io.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

int do_run(const std::string& path, const std::string& out, int threads) {
  caloric::pipeline::RunConfig config;
  try {
    config = caloric::pipeline::load_config(path);
  } catch (const caloric::Error& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  }
  if (!out.empty()) config.output = out;
  if (threads > 0) config.threads = threads;
  const auto manifest = caloric::pipeline::run(config);
  for (const auto& failure : manifest.failures) std::cerr << failure << '\n';
  std::cout << (manifest.ok() ? "ok" : "failed") << ": " << config.output << "/manifest.json\n";
  return manifest.ok() ? kOk : kFailed;
}

int do_check(const std::string& name, int n) {
  caloric::target::TargetKind kind;
  try {
    kind = caloric::target::parse_target_kind(name);
    caloric::spectral::Grid2 probe(n, 1.0);
  } catch (const caloric::Error& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  }
  const auto results = caloric::pipeline::check_invariants(kind, n);
  bool all = true;
  for (const auto& r : results) {
    std::printf("%s %-28s %-24s tol %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                caloric::format_double(r.value).c_str(), caloric::format_double(r.tolerance).c_str());
    all = all && r.pass;
  }
  return all ? kOk : kFailed;
}

int do_envelope(const std::string& dump, std::vector<double> sigmas, double delta, int iterates,
                const std::string& out) {
  namespace d = caloric::diagnostics;
  try {
    for (double s : sigmas) d::sigma_index(s);
  } catch (const caloric::Error& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  }
  const auto field = caloric::spectral::read_field_dump(dump);
  if (sigmas.empty()) {
    for (int m = 0; m <= d::kSigmaLatticeMax; ++m) sigmas.push_back(d::lattice_sigma(m));
  }
  std::vector<d::EnvelopeFamily> families;
  for (int j = 0; j <= iterates; ++j) {
    const auto family = d::field_iterate(field, delta, j);
    d::EnvelopeFamily keep;
    keep.iterate = j;
    for (double s : sigmas) {
      const int m = d::sigma_index(s);
      if (m <= family.max_index()) keep.members.push_back(family.at_index(m));
    }
    families.push_back(std::move(keep));
  }
  d::write_envelope_csv(families, out);
  for (const auto& e : families.front().members) {
    std::cout << "sigma " << caloric::format_double(e.sigma) << "  l2 " << caloric::format_double(e.ell2_norm())
              << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schrodinger map and caloric gauge simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = 0;
  auto* run = app.add_subcommand("run", "run a configured pipeline");
  run->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory (overrides the config)");
  run->add_option("--threads", threads, "worker threads (overrides the config)")->check(CLI::Range(1, 256));

  std::string target_name;
  int grid_n = 64;
  auto* check = app.add_subcommand("check", "invariant suite for one target");
  check->add_option("--target", target_name, "sphere2 | flat_torus2 | sphere_product")->required();
  check->add_option("--grid", grid_n, "points per side")->required();

  std::string dump_path, csv_path = "envelopes.csv";
  std::vector<double> sigmas;
  double delta = caloric::diagnostics::kDefaultDelta;
  int iterates = 0;
  auto* envelope = app.add_subcommand("envelope", "frequency envelopes of a field dump");
  envelope->add_option("--dump", dump_path, "field dump")->required()->check(CLI::ExistingFile);
  envelope->add_option("--sigma", sigmas, "sigma values on the 1/8 lattice");
  envelope->add_option("--delta", delta, "envelope order")->check(CLI::PositiveNumber);
  envelope->add_option("--iterates", iterates, "highest iterate j")->check(CLI::Range(0, 4));
  envelope->add_option("--out", csv_path, "output CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return do_run(config_path, out_dir, threads);
    if (*check) return do_check(target_name, grid_n);
    if (*envelope) return do_envelope(dump_path, sigmas, delta, iterates, csv_path);
  } catch (const caloric::Error& e) {
    std::cerr << e.what() << '\n';
    return kFailed;
  }
  return kUsage;
}
