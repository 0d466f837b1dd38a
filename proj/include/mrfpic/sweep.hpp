#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <exception>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "estimator.hpp"
#include "io.hpp"
#include "model.hpp"
#include "sampler.hpp"

namespace mrfpic {

/// Worker count: MRF_THREADS if set and positive, else hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("MRF_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs task(i) for i in [0, n) on up to `workers` threads.
inline void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& task) {
  workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1U, workers), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex err_mu;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

enum class RadiusSchedule { Fixed, Typicality };

struct ExperimentConfig {
  Potential model;
  std::vector<std::vector<int>> sizes;
  int replicates = 1;
  std::uint64_t seed = 1;
  int sweeps = 100;
  int burn_in = 1000;
  int radius = 1;
  double c = 1.0;
  RadiusSchedule schedule = RadiusSchedule::Fixed;
  bool force_radius = false;
  std::string csv_path;
  std::string summary_path;

  void validate() const {
    if (replicates < 1) throw ValidationError("replicate count must be at least 1");
    if (sizes.empty()) throw ValidationError("at least one size is required");
    for (const auto& dims : sizes) {
      if (static_cast<int>(dims.size()) != model.dim()) throw ValidationError("size dimension differs from the model");
      for (int l : dims) {
        if (l <= 2 * model.range()) throw ValidationError("axis too small for the model range in " + format_dims(dims));
      }
    }
    if (sweeps < 1 || burn_in < 0) throw ValidationError("invalid sampler settings");
    if (radius < 0) throw ValidationError("radius must be nonnegative");
    if (!(c > 0.0)) throw ValidationError("penalty multiplier must be positive");
  }
};

/// Seed of replicate `rep` at size index `size_index`.
inline std::uint64_t cell_seed(std::uint64_t master, std::size_t size_index, int rep) {
  return derive_seed(master, (static_cast<std::uint64_t>(size_index) << 32) | static_cast<std::uint32_t>(rep));
}

inline ExperimentConfig experiment_from_json(const Json& j) {
  ExperimentConfig cfg;
  cfg.model = potential_from_json(j.at("model"));
  for (const auto& s : j.at("sizes")) {
    cfg.sizes.push_back(s.is_string() ? parse_dims(s.get<std::string>()) : s.get<std::vector<int>>());
  }
  cfg.replicates = j.value("replicates", 1);
  cfg.seed = j.value("seed", std::uint64_t{1});
  if (j.contains("sampler")) {
    cfg.sweeps = j["sampler"].value("sweeps", cfg.sweeps);
    cfg.burn_in = j["sampler"].value("burn_in", 10 * cfg.sweeps);
  }
  if (j.contains("estimator")) {
    const auto& e = j["estimator"];
    cfg.radius = e.value("radius", cfg.radius);
    cfg.c = e.value("c", cfg.c);
    cfg.force_radius = e.value("force_radius", false);
    const std::string sched = e.value("schedule", std::string("fixed"));
    if (sched == "typicality") cfg.schedule = RadiusSchedule::Typicality;
    else if (sched != "fixed") throw ValidationError("schedule must be 'fixed' or 'typicality'");
  }
  if (j.contains("output")) {
    cfg.csv_path = j["output"].value("csv", std::string());
    cfg.summary_path = j["output"].value("summary", std::string());
  }
  cfg.validate();
  return cfg;
}

struct SweepRow {
  std::vector<int> dims;
  int replicate = 0;
  std::uint64_t seed = 0;
  int radius = 0;
  Neighborhood selected;
  Selection classification = Selection::Exact;
  double pic_margin = 0.0;
  double spec_deviation = 0.0;  // max |empirical - true| at the true neighborhood
  double wall_ms = 0.0;

  bool correct() const { return classification == Selection::Exact; }
};

struct SizeSummary {
  std::vector<int> dims;
  int replicates = 0;
  double recovery_rate = 0.0;
  double over_rate = 0.0;
  double under_rate = 0.0;
  double mixed_rate = 0.0;
  double mean_spec_deviation = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ordered by (size, replicate)
  Neighborhood truth;

  std::vector<SizeSummary> summary() const {
    std::vector<SizeSummary> out;
    for (const SweepRow& r : rows) {
      if (out.empty() || out.back().dims != r.dims) out.push_back({r.dims});
      SizeSummary& s = out.back();
      ++s.replicates;
      s.recovery_rate += r.classification == Selection::Exact;
      s.over_rate += r.classification == Selection::Over;
      s.under_rate += r.classification == Selection::Under;
      s.mixed_rate += r.classification == Selection::Mixed;
      s.mean_spec_deviation += r.spec_deviation;
    }
    for (SizeSummary& s : out) {
      const double n = s.replicates;
      s.recovery_rate /= n;
      s.over_rate /= n;
      s.under_rate /= n;
      s.mixed_rate /= n;
      s.mean_spec_deviation /= n;
    }
    return out;
  }
};

/// Samples every (size, replicate) cell, estimates, and classifies against the model's Gamma0.
inline SweepResult run_sweep(const ExperimentConfig& cfg, unsigned workers = worker_count()) {
  cfg.validate();
  const Specification truth_spec = spec_from_potential(cfg.model);
  SweepResult res;
  res.truth = cfg.model.interaction_neighborhood();
  const std::size_t reps = static_cast<std::size_t>(cfg.replicates);
  res.rows.resize(cfg.sizes.size() * reps);
  parallel_for(res.rows.size(), workers, [&](std::size_t cell) {
    const std::size_t si = cell / reps;
    const int rep = static_cast<int>(cell % reps);
    const auto t0 = std::chrono::steady_clock::now();
    SweepRow& row = res.rows[cell];
    row.dims = cfg.sizes[si];
    row.replicate = rep;
    row.seed = cell_seed(cfg.seed, si, rep);
    const Sample s = gibbs_sample(cfg.model, row.dims, cfg.sweeps, cfg.burn_in, row.seed);
    row.radius = cfg.schedule == RadiusSchedule::Typicality ? schedule_radius(s, truth_spec.q_min()) : cfg.radius;
    EstimateOptions opts;
    opts.force_radius = cfg.force_radius;
    const PicReport rep_ = estimate(s, row.radius, cfg.c, opts);
    row.selected = rep_.selected();
    row.classification = classify(row.selected, res.truth);
    row.pic_margin = rep_.candidates.size() > 1 ? rep_.runner_up_margin() : 0.0;
    row.spec_deviation = max_deviation(empirical_specification(s, res.truth), truth_spec);
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  });
  return res;
}

inline constexpr const char* kSweepCsvHeader =
    "size,replicate,seed,radius,selected,correct,classification,pic_margin,spec_deviation,wall_time_ms";

/// Per-cell CSV; with_timing=false writes 0 for wall time so the file is reproducible.
inline void write_sweep_csv(std::ostream& out, const SweepResult& res, bool with_timing = true) {
  out << kSweepCsvHeader << '\n';
  out << std::setprecision(17);
  for (const SweepRow& r : res.rows) {
    out << format_dims(r.dims) << ',' << r.replicate << ',' << r.seed << ',' << r.radius << ",\""
        << r.selected.to_string() << "\"," << (r.correct() ? 1 : 0) << ',' << to_string(r.classification) << ','
        << r.pic_margin << ',' << r.spec_deviation << ',' << (with_timing ? r.wall_ms : 0.0) << '\n';
  }
}

inline Json sweep_summary_json(const SweepResult& res) {
  Json sizes = Json::array();
  for (const SizeSummary& s : res.summary()) {
    sizes.push_back({{"size", format_dims(s.dims)},
                     {"replicates", s.replicates},
                     {"recovery_rate", s.recovery_rate},
                     {"over_rate", s.over_rate},
                     {"under_rate", s.under_rate},
                     {"mixed_rate", s.mixed_rate},
                     {"mean_spec_deviation", s.mean_spec_deviation}});
  }
  return {{"report", "mrfpic-sweep-summary"}, {"version", 1}, {"truth", res.truth.to_string()}, {"sizes", sizes}};
}

}  // namespace mrfpic
