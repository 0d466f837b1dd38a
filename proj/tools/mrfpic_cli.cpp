// mrfpic: simulate Markov random field samples, estimate basic neighborhoods by PIC,
// diagnose empirical specifications, and run seeded consistency sweeps.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "mrfpic/mrfpic.hpp"

namespace {

using namespace mrfpic;

struct ModelFlags {
  std::string family = "ising";
  double beta = 0.0;
  int m = 0;
  int range = 1;
  std::string interaction = "nn";
  std::string field;
  std::string couplings;
  std::string config;

  void attach(CLI::App* cmd) {
    cmd->add_option("--model", family, "Model family: ising, potts or custom")
        ->check(CLI::IsMember({"ising", "potts", "custom"}));
    cmd->add_option("--beta", beta, "Coupling strength for ising/potts");
    cmd->add_option("--m", m, "Alphabet size (ising: 2, potts default 3)");
    cmd->add_option("--range", range, "Interaction range R0");
    cmd->add_option("--interaction", interaction, "Offsets coupled: nn (axis steps up to range) or ball")
        ->check(CLI::IsMember({"nn", "ball"}));
    cmd->add_option("--field", field, "Per-symbol field weights, comma separated");
    cmd->add_option("--couplings", couplings, "Custom couplings '(dx,dy)=value;...'");
    cmd->add_option("--model-config", config, "Model as JSON (overrides the other model flags)");
  }

  Potential build(int d) const {
    if (!config.empty()) {
      Json j = read_json_file(config);
      if (!j.contains("d")) j["d"] = d;
      Potential p = potential_from_json(j);
      if (p.dim() != d) throw ValidationError("model dimension differs from the sample dimension");
      return p;
    }
    Json j;
    j["family"] = family;
    j["d"] = d;
    j["beta"] = beta;
    j["range"] = range;
    j["interaction"] = interaction;
    if (m > 0) j["m"] = m;
    if (!field.empty()) {
      std::vector<double> f;
      std::stringstream ss(field);
      std::string tok;
      while (std::getline(ss, tok, ',')) f.push_back(std::stod(tok));
      j["field"] = f;
    }
    if (family == "custom") {
      Json cs = Json::array();
      std::stringstream ss(couplings);
      std::string item;
      while (std::getline(ss, item, ';')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ValidationError("coupling '" + item + "' lacks '=value'");
        const ParsedNeighborhood off = parse_neighborhood(item.substr(0, eq), d);
        const Site v = off.gamma.half().front();
        cs.push_back({{"offset", v.coords()}, {"value", std::stod(item.substr(eq + 1))}});
      }
      j["couplings"] = cs;
      j.erase("range");
    }
    return potential_from_json(j);
  }
};

void emit(const std::string& path, const Json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json_file(path, j);
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Basic-neighborhood estimation for Markov random fields by the pseudo-Bayesian information criterion"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Draw a sample by heat-bath Gibbs sweeps on a torus");
  ModelFlags sim_model;
  sim_model.attach(sim);
  std::string sim_dims;
  int sim_sweeps = 100;
  std::optional<int> sim_burn;
  std::uint64_t sim_seed = 1;
  std::string sim_out;
  sim->add_option("--dims", sim_dims, "Axis lengths, e.g. 64x64")->required();
  sim->add_option("--sweeps", sim_sweeps, "Sweeps after burn-in");
  sim->add_option("--burn-in", sim_burn, "Burn-in sweeps (default 10x sweeps)");
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_option("--out", sim_out, "Output .mrfs file")->required();

  // estimate
  auto* est = app.add_subcommand("estimate", "Select the PIC-minimizing neighborhood");
  std::string est_sample, est_report;
  int est_radius = 1;
  double est_c = 1.0;
  bool est_force = false;
  bool est_slow = false;
  bool est_verbatim = false;
  est->add_option("sample", est_sample, "Sample file (.mrfs)")->required();
  est->add_option("--radius", est_radius, "Largest candidate radius");
  est->add_option("--c", est_c, "Penalty multiplier (> 0)");
  est->add_flag("--force-radius", est_force, "Allow a radius above the window width");
  est->add_flag("--verbatim-window", est_verbatim,
                "With --force-radius, keep the window and drop sites whose candidate translate leaves the sample");
  est->add_flag("--direct", est_slow, "Count every candidate directly instead of projecting the ball table");
  est->add_option("--report", est_report, "Report path (default stdout)");

  // diagnose
  auto* dia = app.add_subcommand("diagnose", "Empirical specification and typicality check on a neighborhood");
  ModelFlags dia_model;
  dia_model.attach(dia);
  std::string dia_sample, dia_gamma, dia_kappa = "auto", dia_report;
  std::optional<double> dia_alpha;
  dia->add_option("sample", dia_sample, "Sample file (.mrfs)")->required();
  dia->add_option("--gamma", dia_gamma, "Neighborhood '(dx,dy);(dx,dy);...'")->required();
  dia->add_option("--kappa", dia_kappa, "Typicality constant or 'auto'");
  dia->add_option("--alpha", dia_alpha, "alpha in (0,1] (default: just below the model's overestimation bound)");
  dia->add_option("--report", dia_report, "Report path (default stdout)");

  // sweep
  auto* swp = app.add_subcommand("sweep", "Seeded recovery study across sample sizes");
  std::string swp_config, swp_csv, swp_summary;
  bool swp_no_timing = false;
  swp->add_option("--config", swp_config, "Experiment JSON")->required();
  swp->add_option("--csv", swp_csv, "Per-replicate CSV path (overrides config)");
  swp->add_option("--summary", swp_summary, "Summary JSON path (overrides config)");
  swp->add_flag("--no-timing", swp_no_timing, "Write 0 in the wall-time column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (sim->parsed()) {
    const std::vector<int> dims = parse_dims(sim_dims);
    const Potential p = sim_model.build(static_cast<int>(dims.size()));
    const int burn = sim_burn ? *sim_burn : 10 * sim_sweeps;
    const Sample s = gibbs_sample(p, dims, sim_sweeps, burn, sim_seed);
    write_sample_file(sim_out, s);
    std::cout << "wrote " << sim_out << ": model=" << p.id() << " dims=" << format_dims(dims)
              << " m=" << p.alphabet() << " seed=" << sim_seed << " sweeps=" << sim_sweeps << " burn_in=" << burn
              << '\n';
    return 0;
  }

  if (est->parsed()) {
    const Sample s = read_sample_file(est_sample);
    EstimateOptions opts;
    opts.force_radius = est_force;
    opts.fast_path = !est_slow;
    opts.verbatim_window = est_verbatim;
    PicReport rep;
    try {
      rep = estimate(s, est_radius, est_c, opts);
    } catch (const ValidationError& e) {
      if (est_radius > window_width(s.region) && !est_force) {
        throw ValidationError(std::string(e.what()) +
                              " (candidate neighborhoods wider than the window are not covered by the consistency "
                              "guarantee; use --force-radius to proceed anyway)");
      }
      throw;
    }
    emit(est_report, estimate_report_json(s, rep));
    if (!est_report.empty()) std::cout << "selected " << rep.selected().to_string() << '\n';
    return 0;
  }

  if (dia->parsed()) {
    const Sample s = read_sample_file(dia_sample);
    const ParsedNeighborhood parsed = parse_neighborhood(dia_gamma, s.dim());
    if (parsed.symmetrized) {
      std::cerr << "warning: neighborhood was not central-symmetric; using " << parsed.gamma.to_string() << '\n';
    }
    const Potential p = dia_model.build(s.dim());
    if (p.alphabet() != s.alphabet) throw ValidationError("model alphabet differs from the sample alphabet");
    const Specification truth = spec_from_potential(p);
    const double alpha = dia_alpha ? *dia_alpha : std::min(1.0, 0.99 * alpha_bound(truth.q_min(), s.dim(), s.alphabet));
    std::optional<double> kappa;
    if (dia_kappa != "auto") kappa = std::stod(dia_kappa);

    Json j;
    j["report"] = "mrfpic-diagnose";
    j["version"] = 1;
    j["gamma"] = parsed.gamma.to_string();
    j["symmetrized"] = parsed.symmetrized;
    j["model"] = potential_to_json(p);
    j["q_min"] = truth.q_min();
    j["empirical_specification"] = specification_json(empirical_specification(s, parsed.gamma));
    if (truth.gamma().is_subset_of(parsed.gamma)) {
      j["typicality"] = typicality_json(typicality_check(s, parsed.gamma, truth, alpha, kappa), s.alphabet);
    } else {
      j["typicality"] = nullptr;
      j["note"] = "gamma does not contain the model's interaction neighborhood " + truth.gamma().to_string() +
                  "; typicality bounds apply only to Markov neighborhoods";
    }
    emit(dia_report, j);
    return 0;
  }

  if (swp->parsed()) {
    ExperimentConfig cfg = experiment_from_json(read_json_file(swp_config));
    if (!swp_csv.empty()) cfg.csv_path = swp_csv;
    if (!swp_summary.empty()) cfg.summary_path = swp_summary;
    const SweepResult res = run_sweep(cfg);
    if (!cfg.csv_path.empty()) {
      std::ofstream out(cfg.csv_path, std::ios::binary);
      if (!out) throw IoError("cannot open '" + cfg.csv_path + "' for writing");
      write_sweep_csv(out, res, !swp_no_timing);
    }
    const Json summary = sweep_summary_json(res);
    if (!cfg.summary_path.empty()) write_json_file(cfg.summary_path, summary);
    std::cout << summary.dump(2) << '\n';
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
