#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>

#include "dob/commands.hpp"
#include "dob/error.hpp"
#include "dob/scenario.hpp"

namespace {

// Output file or stdout.
struct Sink {
  std::unique_ptr<std::ofstream> file;
  std::ostream& stream() { return file ? *file : std::cout; }
  // Reports go to stdout when data goes to a file, otherwise to stderr.
  std::ostream& report() { return file ? std::cout : std::cerr; }
};

Sink open_sink(const std::string& path) {
  Sink s;
  if (!path.empty()) {
    s.file = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*s.file) throw dob::Error(dob::ErrorCode::Config, "cannot write '" + path + "'");
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = dob::cli;
  CLI::App app{"Disturbance-observer loop analysis and simulation"};
  app.require_subcommand(1);

  std::string scenario, out;
  cli::FreqOptions freq_opt;
  cli::ConstraintOptions con_opt;
  cli::RootLocusOptions rl_opt;

  auto add_scenario = [&](CLI::App* sub) { sub->add_option("scenario", scenario, "Scenario file")->required(); };

  auto* freq = app.add_subcommand("freq", "Frequency response of S, T and the noise path (CSV)");
  add_scenario(freq);
  freq->add_option("--points", freq_opt.points, "Number of log-spaced frequencies")->capture_default_str();
  freq->add_option("--out", out, "Output CSV (default stdout)");

  auto* con = app.add_subcommand("constraints", "Check peak-gain constraints and bandwidth limits");
  add_scenario(con);
  con->add_option("--gamma-s", con_opt.gamma_s, "|S| <= 1/gamma_s, gamma_s in (0,1)")->capture_default_str();
  con->add_option("--gamma-t", con_opt.gamma_t, "|T| <= 1/gamma_t, gamma_t in (0,1)")->capture_default_str();

  auto* bode = app.add_subcommand("bode", "Bode sensitivity integral, numeric vs closed form");
  add_scenario(bode);

  auto* rl = app.add_subcommand("rootlocus", "Position-loop closed-loop roots over an alpha sweep (CSV)");
  add_scenario(rl);
  rl->add_option("--alpha-from", rl_opt.alpha_from)->capture_default_str();
  rl->add_option("--alpha-to", rl_opt.alpha_to)->capture_default_str();
  rl->add_option("--steps", rl_opt.steps, "Geometrically spaced alphas")->capture_default_str();
  const std::map<std::string, dob::PositionIntegrator> integrators{
      {"be", dob::PositionIntegrator::BackwardEuler}, {"zoh", dob::PositionIntegrator::ZeroOrderHold}};
  rl->add_option("--integrator", rl_opt.integrator, "be | zoh")
      ->transform(CLI::CheckedTransformer(integrators, CLI::ignore_case));
  rl->add_option("--out", out, "Output CSV (default stdout)");

  auto* sim = app.add_subcommand("sim", "Time-domain simulation (CSV + summary line)");
  add_scenario(sim);
  sim->add_option("--out", out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::ConfigError;
  }

  return cli::run_guarded(
      [&]() -> int {
        const dob::SimConfig cfg = dob::load_scenario(scenario);
        Sink sink = open_sink(out);
        if (*freq) return cli::freq(cfg, freq_opt, sink.stream());
        if (*con) return cli::constraints(cfg, con_opt, std::cout);
        if (*bode) return cli::bode(cfg, std::cout);
        if (*rl) return cli::rootlocus(cfg, rl_opt, sink.stream());
        return cli::sim(cfg, sink.stream(), sink.report());
      },
      std::cerr);
}
