#include <CLI11.hpp>
#include <cinttypes>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>

#include "tubal/denoise.hpp"
#include "tubal/image.hpp"
#include "tubal/run_config.hpp"
#include "tubal/synth.hpp"
#include "tubal/volume_io.hpp"

namespace {

struct GlobalOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool deterministic = false;
};

tubal::RunConfig resolve_config(const GlobalOpts& g) {
  tubal::RunConfig rc;
  if (!g.config_path.empty()) rc = tubal::load_run_config(g.config_path);
  if (g.seed) rc.solver.seed = *g.seed;
  return rc;
}

std::string print_snr(double snr) {
  char buf[64];
  if (std::isinf(snr))
    std::snprintf(buf, sizeof buf, "SNR = inf dB");
  else
    std::snprintf(buf, sizeof buf, "SNR = %.4f dB", snr);
  return buf;
}

void write_report_text(std::ostream& os, const tubal::Volume& in, const tubal::RunConfig& rc,
                       double beta, const tubal::DenoiseReport& rep) {
  os << "volume = " << in.shape_str() << "\n";
  os << "patch = " << rc.patch1 << "x" << rc.patch2 << "x" << rc.patch3 << "\n";
  os << "stride = " << rc.stride1 << "x" << rc.stride2 << "x" << rc.stride3 << "\n";
  os << "atoms = " << rc.solver.atoms << "\n";
  os << "beta = " << std::hexfloat << beta << std::defaultfloat << " (" << beta << ")\n";
  os << "seed = " << rc.solver.seed << "\n";
  os << "outer_iterations = " << rep.outer_iterations << "\n";
  os << "inner_iterations_total = " << rep.inner_iterations_total << "\n";
  os << "atoms_reseeded = " << rep.atoms_reseeded << "\n";
  os << "dict_steps_rejected = " << rep.dict_steps_rejected << "\n";
  os << "dict_degraded = " << (rep.dict_degraded ? 1 : 0) << "\n";
  os.precision(17);
  os << "objective_initial = " << rep.objective_initial << "\n";
  for (std::size_t i = 0; i < rep.objective_dict.size(); ++i) {
    os << "objective_coding[" << i << "] = " << rep.objective_coding[i] << "\n";
    os << "objective_dict[" << i << "] = " << rep.objective_dict[i] << "\n";
  }
  for (std::size_t j = 0; j < rep.atom_usage.size(); ++j)
    os << "atom_usage[" << j << "] = " << rep.atom_usage[j] << "\n";
  if (rep.snr_db) os << "snr_db = " << *rep.snr_db << "\n";
  os << "timing_ms.extract = " << rep.ms_extract << "\n";
  os << "timing_ms.coding = " << rep.ms_coding << "\n";
  os << "timing_ms.dict = " << rep.ms_dict << "\n";
  os << "timing_ms.reconstruct = " << rep.ms_reconstruct << "\n";
  os << "timing_ms.total = " << rep.ms_total << "\n";
}

int run_synth(const GlobalOpts& g, const std::string& out_clean, const std::string& out_noisy) {
  const tubal::RunConfig rc = resolve_config(g);
  auto [clean, noisy] = tubal::make_benchmark(rc.solver.seed, rc.target_snr_db);
  tubal::save_volume(out_clean, clean);
  tubal::save_volume(out_noisy, noisy);
  std::printf("wrote %s and %s\ninput %s\n", out_clean.c_str(), out_noisy.c_str(),
              print_snr(tubal::snr_db(clean, noisy)).c_str());
  return 0;
}

int run_denoise(const GlobalOpts& g, const std::string& in, const std::string& out,
                const std::string& report, std::string dict_path) {
  const tubal::RunConfig rc = resolve_config(g);
  const tubal::Volume noisy = tubal::load_volume(in);
  tubal::SolverConfig cfg = rc.solver;
  if (!rc.beta_set) cfg.beta = tubal::default_beta(noisy);
  const tubal::PatchGrid grid =
      tubal::PatchGrid::cover(noisy.n1, noisy.n2, noisy.n3, rc.patch1, rc.patch2, rc.patch3,
                              rc.stride1, rc.stride2, rc.stride3);
  tubal::DenoiseResult res = tubal::denoise(noisy, cfg, grid);
  tubal::save_volume(out, res.volume);
  if (dict_path.empty()) dict_path = out + ".dict.tvol";
  tubal::save_tensor(dict_path, res.dictionary);
  tubal::write_file_atomic(report, [&](std::ostream& os) {
    write_report_text(os, noisy, rc, cfg.beta, res.report);
  });
  std::printf("wrote %s, %s, %s\nfinal objective = %.6g after %d outer iterations\n",
              out.c_str(), dict_path.c_str(), report.c_str(),
              res.report.objective_dict.empty() ? res.report.objective_initial
                                                : res.report.objective_dict.back(),
              res.report.outer_iterations);
  return 0;
}

int run_eval(const std::string& ref, const std::string& test) {
  const tubal::Volume a = tubal::load_volume(ref);
  const tubal::Volume b = tubal::load_volume(test);
  std::printf("%s\n", print_snr(tubal::snr_db(a, b)).c_str());
  return 0;
}

int run_slice(const std::string& in, int axis, std::int64_t index, const std::string& out) {
  const tubal::Volume v = tubal::load_volume(in);
  tubal::save_pgm(out, tubal::render_slice(v, axis, tubal::Index(index)));
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tubal: tensor dictionary denoising for 3D volumes"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "run configuration file (key = value lines)");
  std::int64_t seed_opt = -1;
  app.add_option("--seed", seed_opt, "override the RNG seed")->check(CLI::NonNegativeNumber);
  app.add_option("--threads", g.threads, "worker threads (the pipeline is sequential; reserved)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--deterministic", g.deterministic,
               "force the sequential execution mode (already the default)");

  auto* synth = app.add_subcommand("synth", "generate the synthetic benchmark volumes");
  std::string out_clean, out_noisy;
  synth->add_option("clean", out_clean, "output path for the clean volume")->required();
  synth->add_option("noisy", out_noisy, "output path for the noisy volume")->required();

  auto* den = app.add_subcommand("denoise", "train a dictionary and denoise a volume");
  std::string den_in, den_out, den_report, den_dict;
  den->add_option("input", den_in, "noisy input volume")->required();
  den->add_option("output", den_out, "denoised output volume")->required();
  den->add_option("report", den_report, "plain-text run report")->required();
  den->add_option("--dict", den_dict, "learned dictionary output (default: OUTPUT.dict.tvol)");

  auto* ev = app.add_subcommand("eval", "print the SNR of a volume against a reference");
  std::string ev_ref, ev_test;
  ev->add_option("reference", ev_ref, "clean reference volume")->required();
  ev->add_option("test", ev_test, "volume under test")->required();

  auto* sl = app.add_subcommand("slice", "export a 2D slice as an 8-bit PGM image");
  std::string sl_in, sl_out;
  int sl_axis = 0;
  std::int64_t sl_index = 0;
  sl->add_option("input", sl_in, "input volume")->required();
  sl->add_option("axis", sl_axis, "slice axis: 1, 2 or 3")->required();
  sl->add_option("index", sl_index, "slice index along the axis")->required();
  sl->add_option("image", sl_out, "output PGM path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  if (seed_opt >= 0) g.seed = std::uint64_t(seed_opt);

  try {
    if (synth->parsed()) return run_synth(g, out_clean, out_noisy);
    if (den->parsed()) return run_denoise(g, den_in, den_out, den_report, den_dict);
    if (ev->parsed()) return run_eval(ev_ref, ev_test);
    return run_slice(sl_in, sl_axis, sl_index, sl_out);
  } catch (const tubal::config_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const tubal::shape_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const tubal::format_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const tubal::io_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const tubal::numeric_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  }
}
