#include "thzbeam/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace thzbeam {

const char* sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Snr: return "snr";
    case SweepAxis::TxAntennas: return "n_t";
    case SweepAxis::RfChains: return "n_rf";
    case SweepAxis::Users: return "users";
    case SweepAxis::IciS: return "ici_s";
    case SweepAxis::Distance: return "distance";
  }
  return "unknown";
}

SweepAxis sweep_axis_from_name(const std::string& name) {
  if (name == "snr") return SweepAxis::Snr;
  if (name == "n_t") return SweepAxis::TxAntennas;
  if (name == "n_rf") return SweepAxis::RfChains;
  if (name == "users") return SweepAxis::Users;
  if (name == "ici_s") return SweepAxis::IciS;
  if (name == "distance") return SweepAxis::Distance;
  throw std::invalid_argument("unknown sweep axis: " + name);
}

namespace {

struct Scenario {
  ChannelConfig channel;
  PipelineSettings pipeline;
  double ici_value;
};

Scenario scenario_for(const ExperimentConfig& cfg, double sweep_value) {
  Scenario s{cfg.channel, cfg.pipeline, cfg.ici_value};
  switch (cfg.axis) {
    case SweepAxis::Snr:
      break;
    case SweepAxis::TxAntennas:
      s.channel.tx_antennas = static_cast<int>(std::lround(sweep_value));
      break;
    case SweepAxis::RfChains:
      s.pipeline.rf_chains = static_cast<int>(std::lround(sweep_value));
      break;
    case SweepAxis::Users:
      s.channel.num_users = static_cast<int>(std::lround(sweep_value));
      break;
    case SweepAxis::IciS:
      s.ici_value = sweep_value;
      break;
    case SweepAxis::Distance:
      s.channel.link_distance_m = sweep_value;
      break;
  }
  return s;
}

IciProfile build_profile(IciMode mode, int num_subcarriers, double value) {
  switch (mode) {
    case IciMode::None: return IciProfile::none(num_subcarriers);
    case IciMode::Cfo: return IciProfile::cfo(num_subcarriers, value);
    case IciMode::Scalar: return IciProfile::scalar(num_subcarriers, value);
  }
  throw std::logic_error("unknown ici mode");
}

std::string format_sig12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

constexpr std::uint64_t kPipelineStreamSalt = 0x5DEECE66DULL << 16;
constexpr std::uint64_t kRetryStride = 1ULL << 32;

struct RealizationResult {
  double se = 0.0;
  double millis = 0.0;
};

// one realization end to end; retries fresh channel draws on degenerate
// linear algebra, then gives up with context
RealizationResult run_realization(const ExperimentConfig& cfg,
                                  const Scenario& scenario,
                                  const IciProfile& eval_profile, double psi,
                                  Method method, int realization_index,
                                  const std::string& trace_path) {
  PipelineSettings settings = scenario.pipeline;
  settings.method = method;
  for (int attempt = 0;; ++attempt) {
    const std::uint64_t id = realization_index + attempt * kRetryStride;
    try {
      const ChannelRealization h =
          generate_channel(scenario.channel, derive_stream(cfg.seed, id));
      const RngStream init_stream =
          derive_stream(cfg.seed ^ kPipelineStreamSalt, id);
      const auto t0 = std::chrono::steady_clock::now();
      auto [precoder, trace] =
          run_pipeline(h, eval_profile, psi, settings, init_stream);
      const double ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
      const double se = sum_rate(h, precoder.analog, precoder.digital,
                                 eval_profile, psi);
      if (!trace_path.empty()) trace.write_csv(trace_path);
      return {se, ms};
    } catch (const RankDeficientError& e) {
      if (attempt >= 9)
        throw std::runtime_error(
            std::string("degenerate channel draws exhausted (realization ") +
            std::to_string(realization_index) + "): " + e.what());
    }
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  channel.validate();
  if (snr_db.empty() && axis != SweepAxis::Snr)
    throw std::invalid_argument("snr list must be non-empty");
  if (sweep_values.empty())
    throw std::invalid_argument("sweep value list must be non-empty");
  if (methods.empty()) throw std::invalid_argument("method list must be non-empty");
  if (realizations < 1)
    throw std::invalid_argument("realizations must be >= 1");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (ici_mode == IciMode::Cfo && (ici_value < 0.0 || ici_value >= 1.0))
    throw std::invalid_argument("cfo ratio must lie in [0, 1)");
  for (double v : sweep_values) {
    const Scenario s = scenario_for(*this, v);
    s.channel.validate();
    if (s.channel.num_users > s.pipeline.rf_chains ||
        s.pipeline.rf_chains > s.channel.tx_antennas)
      throw std::invalid_argument("config violates U <= N_RF <= N_t");
  }
}

ResultTable run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ResultTable table;
  for (double sweep_value : cfg.sweep_values) {
    const Scenario scenario = scenario_for(cfg, sweep_value);
    const IciProfile eval_profile = build_profile(
        cfg.ici_mode, scenario.channel.num_subcarriers, scenario.ici_value);
    const std::vector<double> snrs =
        cfg.axis == SweepAxis::Snr ? std::vector<double>{sweep_value}
                                   : cfg.snr_db;
    for (double snr : snrs) {
      const double psi = NoiseModel::from_snr_db(snr).psi;
      for (Method method : cfg.methods) {
        std::vector<RealizationResult> results(cfg.realizations);
        std::atomic<int> next{0};
        std::atomic<bool> failed{false};
        std::string failure;
        std::mutex failure_mutex;
        auto worker = [&] {
          for (;;) {
            const int r = next.fetch_add(1);
            if (r >= cfg.realizations || failed.load()) break;
            try {
              std::string trace_path;
              if (cfg.trace) {
                std::ostringstream name;
                name << cfg.output << ".trace-" << method_name(method) << '-'
                     << sweep_axis_name(cfg.axis) << format_sig12(sweep_value)
                     << "-snr" << format_sig12(snr) << "-r" << r << ".csv";
                trace_path = name.str();
              }
              results[r] = run_realization(cfg, scenario, eval_profile, psi,
                                           method, r, trace_path);
            } catch (const std::exception& e) {
              std::scoped_lock lock(failure_mutex);
              failed.store(true);
              if (failure.empty()) failure = e.what();
              break;
            }
          }
        };
        const int nthreads = std::min(cfg.threads, cfg.realizations);
        if (nthreads <= 1) {
          worker();
        } else {
          std::vector<std::thread> pool;
          for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
          for (std::thread& t : pool) t.join();
        }
        if (failed.load()) throw std::runtime_error(failure);

        // ordered reduction keeps results bit-stable across thread counts
        double mean = 0.0, time_mean = 0.0;
        for (const RealizationResult& r : results) {
          mean += r.se;
          time_mean += r.millis;
        }
        mean /= cfg.realizations;
        time_mean /= cfg.realizations;
        double var = 0.0;
        for (const RealizationResult& r : results)
          var += (r.se - mean) * (r.se - mean);
        const double stddev =
            cfg.realizations > 1 ? std::sqrt(var / (cfg.realizations - 1)) : 0.0;

        table.push_back({sweep_axis_name(cfg.axis), sweep_value, snr,
                         method_name(method), mean, stddev, cfg.realizations,
                         cfg.measure_timing ? time_mean : 0.0, cfg.seed});
      }
    }
  }
  return table;
}

ResultTable timing_comparison(ExperimentConfig cfg) {
  if (cfg.methods.size() < 2)
    throw std::invalid_argument("timing comparison needs at least two methods");
  cfg.measure_timing = true;
  return run_experiment(cfg);
}

void write_csv(const ResultTable& table, const std::string& path) {
  ResultTable sorted = table;
  std::sort(sorted.begin(), sorted.end(), [](const ResultRow& a,
                                             const ResultRow& b) {
    return std::tie(a.sweep_param, a.sweep_value, a.snr_db, a.method) <
           std::tie(b.sweep_param, b.sweep_value, b.snr_db, b.method);
  });
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output path: " + path);
  out << "sweep_param,sweep_value,snr_db,method,se_mean_bps_hz,se_std,"
         "realizations,time_ms_mean,seed\n";
  for (const ResultRow& r : sorted)
    out << r.sweep_param << ',' << format_sig12(r.sweep_value) << ','
        << format_sig12(r.snr_db) << ',' << r.method << ','
        << format_sig12(r.se_mean_bps_hz) << ',' << format_sig12(r.se_std)
        << ',' << r.realizations << ',' << format_sig12(r.time_ms_mean) << ','
        << r.seed << '\n';
  if (!out) throw std::runtime_error("failed writing results: " + path);
}

namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok)
      throw std::invalid_argument("unknown config key '" + it.key() + "' in " +
                                  where);
  }
}

ChannelConfig channel_from_json(const json& j) {
  reject_unknown(j,
                 {"carrier_frequency_hz", "link_distance_m",
                  "absorption_coeff_per_m", "num_clusters", "rays_per_cluster",
                  "tx_antennas", "spacing_over_wavelength", "tx_gain_dbi",
                  "rx_gain_dbi", "num_users", "num_subcarriers", "gmm",
                  "per_subcarrier_frequency", "subcarrier_spacing_hz"},
                 "channel");
  ChannelConfig c;
  c.carrier_frequency_hz = j.value("carrier_frequency_hz", c.carrier_frequency_hz);
  c.link_distance_m = j.value("link_distance_m", c.link_distance_m);
  c.absorption_coeff_per_m =
      j.value("absorption_coeff_per_m", c.absorption_coeff_per_m);
  c.num_clusters = j.value("num_clusters", c.num_clusters);
  c.rays_per_cluster = j.value("rays_per_cluster", c.rays_per_cluster);
  c.tx_antennas = j.value("tx_antennas", c.tx_antennas);
  c.spacing_over_wavelength =
      j.value("spacing_over_wavelength", c.spacing_over_wavelength);
  c.tx_gain_dbi = j.value("tx_gain_dbi", c.tx_gain_dbi);
  c.rx_gain_dbi = j.value("rx_gain_dbi", c.rx_gain_dbi);
  c.num_users = j.value("num_users", c.num_users);
  c.num_subcarriers = j.value("num_subcarriers", c.num_subcarriers);
  if (j.contains("gmm")) {
    const json& g = j.at("gmm");
    reject_unknown(g, {"a1", "a2", "sigma1", "sigma2"}, "channel.gmm");
    c.gmm.a1 = g.value("a1", c.gmm.a1);
    c.gmm.a2 = g.value("a2", c.gmm.a2);
    c.gmm.sigma1 = g.value("sigma1", c.gmm.sigma1);
    c.gmm.sigma2 = g.value("sigma2", c.gmm.sigma2);
  }
  c.per_subcarrier_frequency =
      j.value("per_subcarrier_frequency", c.per_subcarrier_frequency);
  c.subcarrier_spacing_hz =
      j.value("subcarrier_spacing_hz", c.subcarrier_spacing_hz);
  return c;
}

PipelineSettings pipeline_from_json(const json& j) {
  reject_unknown(j,
                 {"rf_chains", "outer_tolerance", "max_outer_iters", "cg",
                  "fd_step", "reduced_alternating"},
                 "pipeline");
  PipelineSettings p;
  p.rf_chains = j.value("rf_chains", p.rf_chains);
  p.outer_tolerance = j.value("outer_tolerance", p.outer_tolerance);
  p.max_outer_iters = j.value("max_outer_iters", p.max_outer_iters);
  p.fd_step = j.value("fd_step", p.fd_step);
  p.reduced_alternating = j.value("reduced_alternating", p.reduced_alternating);
  if (j.contains("cg")) {
    const json& c = j.at("cg");
    reject_unknown(c, {"step_scale", "tolerance", "max_iter", "backtracking"},
                   "pipeline.cg");
    p.cg.step_scale = c.value("step_scale", p.cg.step_scale);
    p.cg.tolerance = c.value("tolerance", p.cg.tolerance);
    p.cg.max_iter = c.value("max_iter", p.cg.max_iter);
    p.cg.backtracking = c.value("backtracking", p.cg.backtracking);
  }
  return p;
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
  reject_unknown(j,
                 {"channel", "snr_db", "ici", "methods", "sweep",
                  "realizations", "seed", "pipeline", "threads", "output",
                  "trace", "timing"},
                 "config root");
  ExperimentConfig cfg;
  if (j.contains("channel")) cfg.channel = channel_from_json(j.at("channel"));
  if (j.contains("snr_db"))
    cfg.snr_db = j.at("snr_db").get<std::vector<double>>();
  if (j.contains("ici")) {
    const json& i = j.at("ici");
    reject_unknown(i, {"mode", "value"}, "ici");
    const std::string mode = i.value("mode", "scalar");
    if (mode == "none")
      cfg.ici_mode = IciMode::None;
    else if (mode == "cfo")
      cfg.ici_mode = IciMode::Cfo;
    else if (mode == "scalar")
      cfg.ici_mode = IciMode::Scalar;
    else
      throw std::invalid_argument("unknown ici mode: " + mode);
    cfg.ici_value = i.value("value", cfg.ici_value);
  }
  if (j.contains("methods")) {
    cfg.methods.clear();
    for (const auto& m : j.at("methods"))
      cfg.methods.push_back(method_from_name(m.get<std::string>()));
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    reject_unknown(s, {"axis", "values"}, "sweep");
    cfg.axis = sweep_axis_from_name(s.at("axis").get<std::string>());
    cfg.sweep_values = s.at("values").get<std::vector<double>>();
  }
  cfg.realizations = j.value("realizations", cfg.realizations);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("pipeline")) cfg.pipeline = pipeline_from_json(j.at("pipeline"));
  cfg.threads = j.value("threads", cfg.threads);
  cfg.output = j.value("output", cfg.output);
  cfg.trace = j.value("trace", cfg.trace);
  cfg.measure_timing = j.value("timing", cfg.measure_timing);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  return config_from_json(j);
}

namespace {

ExperimentConfig desk_base() {
  ExperimentConfig cfg;
  cfg.channel.num_subcarriers = 16;
  cfg.channel.tx_antennas = 64;
  cfg.channel.num_users = 2;
  cfg.pipeline.rf_chains = 4;
  cfg.pipeline.cg.max_iter = 60;
  cfg.realizations = 20;
  cfg.snr_db = {0, 5, 10, 15, 20, 25};
  return cfg;
}

ExperimentConfig paper_base() {
  ExperimentConfig cfg;
  cfg.channel.num_subcarriers = 64;
  cfg.channel.tx_antennas = 64;
  cfg.channel.num_users = 9;
  cfg.pipeline.rf_chains = 10;
  cfg.realizations = 50;
  cfg.snr_db = {0, 5, 10, 15, 20, 25};
  return cfg;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"timing-desk",      "timing-paper",      "performance-desk",
          "performance-paper", "ici-cases-desk",   "ici-cases-paper",
          "ici-sweep-desk",   "ici-sweep-paper",   "antennas-desk",
          "antennas-paper",   "rf-chains-desk",    "rf-chains-paper",
          "users-desk",       "users-paper",       "distance-desk",
          "distance-paper"};
}

ExperimentConfig preset(const std::string& name) {
  const bool paper = name.ends_with("-paper");
  const bool desk = name.ends_with("-desk");
  if (!paper && !desk)
    throw std::invalid_argument("unknown preset: " + name);
  const std::string fig = name.substr(0, name.size() - (paper ? 6 : 5));
  ExperimentConfig cfg = paper ? paper_base() : desk_base();

  if (fig == "timing") {
    cfg.methods = {Method::ConventionalRate, Method::ReducedInterference};
    cfg.axis = SweepAxis::Snr;
    cfg.sweep_values = {10.0};
    cfg.measure_timing = true;
    cfg.realizations = paper ? 5 : 5;
  } else if (fig == "performance") {
    cfg.methods = {Method::ConventionalRate, Method::ReducedInterference};
    cfg.axis = SweepAxis::Snr;
    cfg.sweep_values = cfg.snr_db;
  } else if (fig == "ici-cases") {
    // mismatched-design study: the no-ici precoder is still evaluated under
    // the configured leaky profile
    cfg.methods = {Method::ReducedInterference, Method::NoIciBaseline};
    cfg.axis = SweepAxis::Snr;
    cfg.sweep_values = cfg.snr_db;
    if (paper) {
      cfg.channel.tx_antennas = 169;
      cfg.pipeline.rf_chains = 9;
    }
  } else if (fig == "ici-sweep") {
    cfg.axis = SweepAxis::IciS;
    cfg.sweep_values = {0.1, 0.2, 0.3};
    cfg.snr_db = {25.0};
    if (paper) {
      cfg.channel.tx_antennas = 169;
      cfg.pipeline.rf_chains = 9;
    }
  } else if (fig == "antennas") {
    cfg.axis = SweepAxis::TxAntennas;
    cfg.sweep_values = paper ? std::vector<double>{81, 121, 225}
                             : std::vector<double>{16, 36, 64};
    cfg.snr_db = {20.0};
  } else if (fig == "rf-chains") {
    cfg.axis = SweepAxis::RfChains;
    cfg.sweep_values = paper ? std::vector<double>{9, 11, 13, 15}
                             : std::vector<double>{2, 3, 4};
    cfg.snr_db = {20.0};
  } else if (fig == "users") {
    cfg.axis = SweepAxis::Users;
    cfg.sweep_values = paper ? std::vector<double>{1, 4, 9}
                             : std::vector<double>{1, 2, 4};
    cfg.snr_db = {20.0};
  } else if (fig == "distance") {
    cfg.axis = SweepAxis::Distance;
    cfg.sweep_values = {1, 3, 5, 10};
    cfg.snr_db = {15.0};
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  return cfg;
}

}  // namespace thzbeam
