#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "tdwsmir/app.hpp"
#include "tdwsmir/directivity.hpp"
#include "tdwsmir/error.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitIo = 4;

struct Common {
  std::string config;
  bool anechoic = false;
  std::string out_dir;
  std::string format;
  int threads = -1;
};

tdw::RunConfig load(const Common& o) {
  tdw::RunConfig c = tdw::load_run_config(o.config);
  if (!o.out_dir.empty()) c.output.directory = std::filesystem::absolute(o.out_dir).lexically_normal();
  if (!o.format.empty()) c.output.format = tdw::parse_output_format(o.format);
  if (o.threads >= 0) c.simulation.threads = static_cast<unsigned>(o.threads);
  return c;
}

void add_common(CLI::App* cmd, Common& o) {
  cmd->add_option("--config", o.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_flag("--anechoic", o.anechoic, "Direct path only (image count forced to 1)");
  cmd->add_option("--out-dir", o.out_dir, "Override output.directory");
  cmd->add_option("--format", o.format, "Override output.format")->check(CLI::IsMember({"wav", "csv", "both"}));
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
}

int run(int argc, char** argv) {
  CLI::App app{"Time-domain wideband image-source RIR simulator for open spherical microphone arrays"};
  app.require_subcommand(0, 1);
  bool print_defaults = false;
  app.add_flag("--print-defaults", print_defaults, "Print the default configuration and exit");

  Common sim_opts, cmp_opts;
  auto* sim = app.add_subcommand("simulate", "Simulate mic signals and write them with a side-car config");
  add_common(sim, sim_opts);
  auto* cmp = app.add_subcommand("compare", "Compare the simulated spectrum against the frequency-domain oracle");
  add_common(cmp, cmp_opts);
  std::string against;
  cmp->add_option("--against", against, "Compare against a mic-signal CSV instead of the oracle")
      ->check(CLI::ExistingFile);

  auto* pat = app.add_subcommand("pattern", "Tabulate a first-order directivity pattern over theta");
  std::string kind = "cardioid", pat_out;
  int order = 1;
  std::size_t points = 181;
  double phi = 0.0;
  pat->add_option("--kind", kind, "omnidirectional, cardioid, hypercardioid, subcardioid, bidirectional");
  pat->add_option("--order", order, "SH order of the representation")->check(CLI::Range(0, tdw::kMaxDegree));
  pat->add_option("--points", points, "Number of polar angles in [0, pi]")->check(CLI::Range(2, 100000));
  pat->add_option("--phi", phi, "Azimuth in radians");
  pat->add_option("--out", pat_out, "CSV path (default: stdout)");

  auto* standin = app.add_subcommand("standin-bundle", "Write a synthetic loudspeaker directivity bundle");
  std::string bundle_out, bundle_data = "wav";
  double bundle_fs = 44100.0, bundle_radius = 1.0;
  std::size_t bundle_points = 400;
  int bundle_order = 5;
  standin->add_option("--out", bundle_out, "Manifest path (JSON)")->required();
  standin->add_option("--fs", bundle_fs, "Sample rate in Hz")->check(CLI::PositiveNumber);
  standin->add_option("--points", bundle_points, "Fibonacci grid size")->check(CLI::Range(1, 100000));
  standin->add_option("--order", bundle_order, "Directivity order")->check(CLI::Range(0, tdw::kMaxDegree));
  standin->add_option("--radius", bundle_radius, "Measurement radius in meters")->check(CLI::PositiveNumber);
  standin->add_option("--data", bundle_data, "Response storage")->check(CLI::IsMember({"wav", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (print_defaults) {
    std::cout << tdw::to_json(tdw::default_run_config()).dump(2) << "\n";
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kExitConfig;
  }

  if (*sim) {
    const tdw::RunConfig c = load(sim_opts);
    const auto report = tdw::run_simulate(c, sim_opts.anechoic);
    std::cout << "wrote " << report.channels << " channels x " << report.samples << " samples\n";
    for (const auto& f : report.files) std::cout << "  " << f.string() << "\n";
  } else if (*cmp) {
    tdw::RunConfig c = load(cmp_opts);
    if (!against.empty()) c.compare.against = std::filesystem::absolute(against);
    const auto report = tdw::run_compare(c, cmp_opts.anechoic);
    tdw::print_compare_summary(std::cout, report);
    for (const auto& f : report.files) std::cout << "  " << f.string() << "\n";
  } else if (*pat) {
    const auto rows = tdw::run_pattern(kind, order, points, phi);
    std::ofstream file;
    if (!pat_out.empty()) {
      file.open(pat_out);
      if (!file) throw tdw::IoError(pat_out, "cannot open for writing");
    }
    std::ostream& os = pat_out.empty() ? std::cout : file;
    os << "theta_rad,value\n";
    char buf[64];
    for (const auto& [t, v] : rows) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t, v);
      os << buf;
    }
    if (!os) throw tdw::IoError(pat_out.empty() ? "<stdout>" : pat_out, "write failed");
  } else if (*standin) {
    const auto meas = tdw::synthetic_loudspeaker_bundle(bundle_fs, tdw::fibonacci_grid(bundle_points), bundle_order,
                                                        bundle_radius);
    const std::filesystem::path manifest(bundle_out);
    tdw::save_directivity_bundle(manifest, meas, manifest.stem().string() + "." + bundle_data);
    std::cout << "wrote " << meas.directions.size() << " directions x " << meas.length() << " samples to "
              << manifest.string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const tdw::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const tdw::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const tdw::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
