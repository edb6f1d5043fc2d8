// Command-line front end: density computation, the universal embedding build
// with verification and rendering, the forcing-family experiment, constraint
// suite checks, pushforward rigidity verdicts and heatmap rendering.
//
// Exit codes: 0 success, 1 negative verdict, 2 input error, 3 numeric
// failure, 4 construction failure.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "graphonlab/io.hpp"

using namespace graphonlab;

namespace {

struct CommonFlags {
  RunConfig cfg;

  void attach(CLI::App* app, bool with_resolution = false) {
    app->add_option("--seed", cfg.seed, "random seed");
    app->add_option("--samples", cfg.samples, "Monte Carlo samples per estimate");
    app->add_option("--tuples", cfg.tuples, "root tuples per constraint");
    app->add_option("--tol", cfg.tol, "additive tolerance");
    app->add_option("--depth", cfg.depth, "dyadic depth for transfer checks");
    app->add_option("--workers", cfg.workers, "worker threads (default: GRAPHONLAB_WORKERS)");
    if (with_resolution)
      app->add_option("--resolution", cfg.resolution, "heatmap resolution (pixels)");
  }
};

int run_density(const std::string& kernel_ref, const std::string& graph_spec, bool hom,
                bool tc4, const RunConfig& cfg, const std::string& out_path) {
  KernelPtr w = load_kernel(kernel_ref);
  McConfig mc;
  mc.seed = cfg.seed;
  mc.samples = cfg.samples;
  mc.workers = cfg.workers;
  std::ostringstream rows;
  rows << "# graphonlab " << kVersion << " config " << cfg.to_json().dump() << "\n";
  rows << density_csv_header() << "\n";
  if (tc4) {
    DensityReport rep = t_c4(*w, mc);
    rows << density_csv_row("C4(hom)", rep) << "\n";
  } else {
    SmallGraph h = SmallGraph::parse(graph_spec);
    DensityReport rep = hom ? hom_density(h, *w, mc) : induced_density(h, *w, mc);
    rows << density_csv_row(h.str(), rep) << "\n";
  }
  if (out_path.empty())
    std::cout << rows.str();
  else
    write_file(out_path, rows.str());
  return 0;
}

int run_build(const std::string& wf_ref, const std::string& eps_text,
              const std::string& out_dir, const std::vector<std::string>& suites,
              const RunConfig& cfg, int grid_n) {
  StepPtr wf = load_step(wf_ref, grid_n);
  auto norm = normalize_input(wf, Rational::from_string(eps_text));
  auto reordered = monotone_reorder(norm.wf, 4 * (1 << norm.r));
  auto table = build_part_table(norm.r, reordered.q_measures);
  UniversalGraphon u = build_w0(reordered, table, mock_ckm(reordered.wf));

  std::filesystem::create_directories(out_dir);
  write_file(out_dir + "/manifest.json",
             with_provenance(manifest_to_json(u), cfg).dump(2) + "\n");
  write_file(out_dir + "/w0.pgm", render_pgm(*u.pg.kernel, cfg.resolution, cfg));

  VerifyConfig vc;
  vc.seed = cfg.seed;
  vc.transfer_depth = cfg.depth;
  vc.workers = cfg.workers;
  vc.suite_cfg.tuples = cfg.tuples;
  vc.suite_cfg.samples = cfg.samples;
  vc.suite_cfg.tol_base = cfg.tol;
  vc.suite_cfg.workers = cfg.workers;
  vc.suites = suites;
  W0Report report = verify_w0(u, vc);
  write_file(out_dir + "/report.json",
             with_provenance(report_to_json(report), cfg).dump(2) + "\n");

  std::cout << "parts: " << u.table().size() << "\n";
  for (const auto& item : report.items)
    std::cout << (item.passed ? "PASS " : "FAIL ") << item.name << " (observed " << item.observed
              << ", tolerance " << item.tolerance << ")\n";
  for (const auto& s : report.suites)
    std::cout << (s.all_passed() ? "PASS " : "FAIL ") << "suite " << s.suite << " ("
              << s.passed << " passed, " << s.failed << " failed, " << s.vacuous
              << " vacuous)\n";
  return report.all_passed() ? 0 : 1;
}

int run_forcing(int n, double z, const RunConfig& cfg, const std::string& out_path) {
  if (n < 3 || n > 4) {
    std::cerr << "error: supported orders are 3 and 4\n";
    return 2;
  }
  ForcingCertificate cert = forcing_experiment(n, cfg.seed, z);
  Json j = with_provenance(certificate_to_json(cert), cfg);
  std::string text = j.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    write_file(out_path, text);
  std::cerr << "verdict: " << cert.gap.verdict << " (omega gap " << cert.gap.gap.str()
            << ", max density gap " << cert.max_density_gap << ")\n";
  if (cert.z < cert.z_requested)
    std::cerr << "note: z capped at " << cert.z << " (requested " << cert.z_requested
              << "); the admissible stretch ball is instance dependent\n";
  if (cert.degenerate_z) {
    std::cerr << "warning: z equals 1/(m+2); the stretch is the identity\n";
    return 1;
  }
  return cert.gap.gap.sign() > 0 ? 0 : 1;
}

int run_check(const std::string& manifest_path, const std::string& suite,
              const std::string& mutation, const RunConfig& cfg, const std::string& out_path) {
  Json manifest = Json::parse(read_file(manifest_path));
  UniversalGraphon u = universal_from_manifest(manifest);
  auto constraints = build_suite(suite, u, default_ckm_params(*u.wf));

  PartitionedGraphon target = u.pg;
  if (mutation == "e_tile_half")
    target.kernel = mutate_e_tile(u, rat(1, 2));
  else if (mutation == "zero_g2")
    target.kernel = mutate_zero_g2(u);
  else if (!mutation.empty() && mutation != "none") {
    std::cerr << "error: unknown mutation '" << mutation << "'\n";
    return 2;
  }

  CheckConfig cc;
  cc.tuples = cfg.tuples;
  cc.samples = cfg.samples;
  cc.tol_base = cfg.tol;
  cc.seed = cfg.seed;
  cc.workers = cfg.workers;
  SuiteReport rep = run_suite(suite, constraints, target, cc);
  for (const auto& c : rep.constraints)
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name
              << (c.vacuous ? " (vacuous)" : "")
              << " dev=" << c.max_abs_deviation << " se=" << c.pooled_se << "\n";
  std::cout << rep.passed << " passed, " << rep.failed << " failed, " << rep.vacuous
            << " vacuous\n";
  if (!out_path.empty()) {
    W0Report wrapper;
    wrapper.suites.push_back(rep);
    write_file(out_path, with_provenance(report_to_json(wrapper), cfg).dump(2) + "\n");
  }
  return rep.failed == 0 ? 0 : 1;
}

int run_rigidity(const std::string& w1_ref, const std::string& w2_ref, const std::string& map,
                 const RunConfig& cfg, const std::string& out_path) {
  StepPtr w1 = load_step(w1_ref);
  StepPtr w2 = load_step(w2_ref);
  IntervalMap phi = IntervalMap::parse(map);
  auto pre = pushforward_check(*w1, *w2, phi, cfg.depth);
  auto verdict = rigidity_verdict(*w1, *w2, phi, pre, cfg.seed);
  Json j = with_provenance(verdict_to_json(verdict), cfg);
  std::string text = j.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    write_file(out_path, text);
  return verdict.verdict == "pullback-equal" ? 0 : 1;
}

int run_render(const std::string& kernel_ref, const RunConfig& cfg,
               const std::string& out_path) {
  KernelPtr w = load_kernel(kernel_ref);
  write_file(out_path, render_pgm(*w, cfg.resolution, cfg));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graphonlab: graph-limit kernels, densities and certificates"};
  app.require_subcommand(1);

  std::string kernel_ref, graph_spec, out_path, eps_text = "1/5", manifest_path, suite;
  std::string mutation = "none", map_text, w2_ref;
  bool hom = false, tc4 = false;
  int order = 3, grid_n = 256;
  double z = 0.0;
  std::vector<std::string> suites{"checker",          "exp_checker", "dyadic_ref",
                                  "density_transfer", "balancing",   "distinguishing"};

  CommonFlags density_flags, build_flags, forcing_flags, check_flags, rigidity_flags,
      render_flags;

  auto* density = app.add_subcommand("density", "subgraph density of a kernel");
  density->add_option("graphon", kernel_ref, "kernel: JSON file, const:<q>, half, checker:<r>")
      ->required();
  density->add_option("graph", graph_spec, "graph spec like 4:0-1,1-2,2-3,3-0");
  density->add_flag("--hom", hom, "homomorphism density instead of induced");
  density->add_flag("--tc4", tc4, "the C4 homomorphism moment");
  density->add_option("--out", out_path, "CSV output path (default stdout)");
  density_flags.attach(density);

  auto* build = app.add_subcommand("build-universal", "build and verify the embedding kernel");
  build->add_option("wf", kernel_ref, "input step graphon (JSON file or const:<q>)")->required();
  build->add_option("--epsilon", eps_text, "requested epsilon (rational, default 1/5)");
  build->add_option("--out", out_path, "output directory")->required();
  build->add_option("--suites", suites, "constraint suites to run")->delimiter(',');
  build->add_option("--grid", grid_n, "grid size for non-step inputs (default 256)");
  build_flags.attach(build, /*with_resolution=*/true);

  auto* forcing = app.add_subcommand("forcing-experiment",
                                     "density-matched pair distinguished by omega");
  forcing->add_option("--n", order, "graph order bound (3 or 4)");
  forcing->add_option("--z", z, "pinned stretch of the all-one block (default 1/(m+2)+1e-3)");
  forcing->add_option("--out", out_path, "certificate path (default stdout)");
  forcing_flags.attach(forcing);

  auto* check = app.add_subcommand("check-constraints", "run one constraint suite");
  check->add_option("manifest", manifest_path, "manifest.json from build-universal")->required();
  check->add_option("suite", suite, "suite name")->required();
  check->add_option("--mutate", mutation, "none | e_tile_half | zero_g2");
  check->add_option("--out", out_path, "report path");
  check_flags.attach(check);

  auto* rigidity = app.add_subcommand("rigidity", "pushforward check and rigidity verdict");
  rigidity->add_option("w1", kernel_ref, "first step graphon")->required();
  rigidity->add_option("w2", w2_ref, "second step graphon")->required();
  rigidity->add_option("--map", map_text, "interval map, e.g. 0,1/2->0,1;1/2,1->0,1")
      ->required();
  rigidity->add_option("--out", out_path, "verdict path (default stdout)");
  rigidity_flags.attach(rigidity);

  auto* render = app.add_subcommand("render", "grayscale heatmap of a kernel");
  render->add_option("graphon", kernel_ref, "kernel reference")->required();
  render->add_option("--out", out_path, "PGM output path")->required();
  render_flags.attach(render, /*with_resolution=*/true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (density->parsed()) {
      if (!tc4 && graph_spec.empty()) {
        std::cerr << "error: a graph spec is required unless --tc4 is given\n";
        return 2;
      }
      return run_density(kernel_ref, graph_spec, hom, tc4, density_flags.cfg, out_path);
    }
    if (build->parsed())
      return run_build(kernel_ref, eps_text, out_path, suites, build_flags.cfg, grid_n);
    if (forcing->parsed()) return run_forcing(order, z, forcing_flags.cfg, out_path);
    if (check->parsed())
      return run_check(manifest_path, suite, mutation, check_flags.cfg, out_path);
    if (rigidity->parsed())
      return run_rigidity(kernel_ref, w2_ref, map_text, rigidity_flags.cfg, out_path);
    if (render->parsed()) return run_render(kernel_ref, render_flags.cfg, out_path);
  } catch (const BalanceRangeError& e) {
    std::cerr << "construction error: " << e.what() << "\n";
    return 4;
  } catch (const GraphParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const ConstraintParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const UnknownSuite& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NewtonDivergence& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const rational_overflow& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const Json::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
