#pragma once

// Replication-time experiments: parameter sweeps over the number of B and E
// copies, a sequential baseline, summary statistics and output files.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "engine.hpp"

namespace parcell {

struct SweepConfig {
  std::vector<int> n_values{1, 2, 3, 4, 5, 6};
  int trials = 10;
  std::uint64_t base_seed = 1;
  std::optional<double> t_max;
  double t_max_factor = 100.0;
  // Horizon used while no median is known yet.
  double initial_t_max = 1.0e6;
  std::uint64_t max_events = 2'000'000'000ULL;
  WorldConfig world;
  GenomeConfig genome;
  RateConfig rates;

  void validate() const {
    if (trials < 1) throw std::invalid_argument("trials must be positive");
    if (n_values.empty()) throw std::invalid_argument("no n values to sweep");
    for (int n : n_values) {
      if (n < 1) throw std::invalid_argument("n values must be at least 1");
    }
    if (t_max && !(*t_max >= 0.0)) throw std::invalid_argument("t_max must be non-negative");
    genome.validate();
    rates.validate();
  }
};

inline std::uint64_t trial_seed(const SweepConfig& c, int n, int trial) {
  return c.base_seed + static_cast<std::uint64_t>(trial) + 1000ULL * static_cast<std::uint64_t>(n);
}

struct Row {
  int n = 0;  // 0 marks the sequential baseline
  int trial = 0;
  std::uint64_t seed = 0;
  double replication_time = 0.0;
  std::uint64_t replication_ops = 0;
  long genome_mass = 0;
  long pile_mass = 0;
  bool censored = false;
  int race_events = 0;
};

struct TrialStats {
  int n = 0;
  int trials = 0;
  int censored = 0;
  bool empty = true;  // every trial censored
  double mean_time = 0.0;
  double sigma_time = 0.0;
  double mean_ops = 0.0;
  double mean_mass = 0.0;
  double sigma_mass = 0.0;
  double mean_pile_mass = 0.0;
};

// Runs one cell from birth to its first fission or the horizon.
inline Row run_trial(const SweepConfig& c, int n, int trial, double t_max, std::uint64_t seed) {
  GenomeConfig g = c.genome;
  g.n_B = std::max(1, n);
  g.n_E = std::max(1, n);
  World w(c.world, g, c.rates, seed);
  const int cx = c.world.width / 2;
  const int cy = c.world.height / 2;
  const int p = n == 0 ? w.build_sequential_cell(cx, cy) : w.init_mother(cx, cy);
  Engine e(w);
  e.run_until([&](const World& ww) { return !ww.records.empty(); }, t_max, c.max_events);
  Row r;
  r.n = n;
  r.trial = trial;
  r.seed = seed;
  r.genome_mass = w.cell(p).genome_mass;
  if (w.records.empty()) {
    r.censored = true;
    r.replication_time = w.t;
    r.replication_ops = w.cell(p).ops;
    r.pile_mass = w.sub.pile_mass(p);
  } else {
    const GenerationRecord& rec = w.records.front();
    r.replication_time = rec.replication_time;
    r.replication_ops = rec.replication_ops;
    r.pile_mass = rec.cell_mass;
    r.race_events = rec.race_events;
  }
  return r;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

using Progress = std::function<void(const Row&)>;

// Runs every n in the sweep.  Without an explicit horizon the n = 1 trials run
// first and later trials are cut at a multiple of their median.
inline std::vector<Row> run_sweep(const SweepConfig& c, const Progress& progress = {}) {
  c.validate();
  std::vector<int> order = c.n_values;
  std::stable_sort(order.begin(), order.end(), [](int a, int b) { return (a == 1) > (b == 1); });
  double horizon = c.t_max.value_or(c.initial_t_max);
  std::vector<Row> rows;
  for (int n : order) {
    for (int k = 0; k < c.trials; ++k) {
      rows.push_back(run_trial(c, n, k, horizon, trial_seed(c, n, k)));
      if (progress) progress(rows.back());
    }
    if (n == 1 && !c.t_max) {
      std::vector<double> times;
      for (const Row& r : rows) {
        if (!r.censored) times.push_back(r.replication_time);
      }
      if (!times.empty()) horizon = c.t_max_factor * median(times);
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.n != b.n ? a.n < b.n : a.trial < b.trial;
  });
  return rows;
}

inline std::vector<Row> run_baseline(const SweepConfig& c, int trials, double t_max, const Progress& progress = {}) {
  std::vector<Row> rows;
  for (int k = 0; k < trials; ++k) {
    rows.push_back(run_trial(c, 0, k, t_max, trial_seed(c, 0, k)));
    if (progress) progress(rows.back());
  }
  return rows;
}

inline double sample_sigma(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double m = 0.0;
  for (double x : v) m += x;
  return m / static_cast<double>(v.size());
}

// Statistics per n; censored trials are excluded from the time statistics.
inline std::vector<TrialStats> summarize(const std::vector<Row>& rows) {
  std::vector<int> ns;
  for (const Row& r : rows) {
    if (std::find(ns.begin(), ns.end(), r.n) == ns.end()) ns.push_back(r.n);
  }
  std::sort(ns.begin(), ns.end());
  std::vector<TrialStats> out;
  for (int n : ns) {
    TrialStats s;
    s.n = n;
    std::vector<double> times, ops, mass, pile;
    for (const Row& r : rows) {
      if (r.n != n) continue;
      ++s.trials;
      mass.push_back(static_cast<double>(r.genome_mass));
      pile.push_back(static_cast<double>(r.pile_mass));
      if (r.censored) {
        ++s.censored;
        continue;
      }
      times.push_back(r.replication_time);
      ops.push_back(static_cast<double>(r.replication_ops));
    }
    s.empty = times.empty();
    s.mean_time = s.empty ? std::numeric_limits<double>::quiet_NaN() : mean_of(times);
    s.sigma_time = sample_sigma(times);
    s.mean_ops = s.empty ? std::numeric_limits<double>::quiet_NaN() : mean_of(ops);
    s.mean_mass = mean_of(mass);
    s.sigma_mass = sample_sigma(mass);
    s.mean_pile_mass = mean_of(pile);
    out.push_back(s);
  }
  return out;
}

inline std::string rows_csv(const std::vector<Row>& rows) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "n,trial,seed,replication_time,replication_ops,genome_mass,pile_mass,censored,race_events\n";
  for (const Row& r : rows) {
    os << r.n << ',' << r.trial << ',' << r.seed << ',' << r.replication_time << ',' << r.replication_ops << ','
       << r.genome_mass << ',' << r.pile_mass << ',' << (r.censored ? 1 : 0) << ',' << r.race_events << '\n';
  }
  return os.str();
}

inline std::string stats_csv(const std::vector<TrialStats>& stats) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "n,trials,censored,mean_time,sigma_time,mean_ops,mean_mass,sigma_mass,mean_pile_mass\n";
  for (const TrialStats& s : stats) {
    os << s.n << ',' << s.trials << ',' << s.censored << ',';
    if (s.empty) {
      os << ",,";
    } else {
      os << s.mean_time << ',' << s.sigma_time << ',';
    }
    if (s.empty) {
      os << ',';
    } else {
      os << s.mean_ops << ',';
    }
    os << s.mean_mass << ',' << s.sigma_mass << ',' << s.mean_pile_mass << '\n';
  }
  return os.str();
}

// Mean replication time (left axis, with one-sigma bars) and genome mass
// (right axis) against n, plus the sequential baseline as a dashed line.
inline std::string figure_svg(const std::vector<TrialStats>& stats, std::optional<double> baseline) {
  constexpr double W = 800, H = 600, L = 90, R = 90, T = 50, B = 70;
  std::vector<const TrialStats*> pts;
  for (const auto& s : stats) {
    if (s.n > 0) pts.push_back(&s);
  }
  double nmin = 1, nmax = 2, tmax = 1, mmax = 1;
  if (!pts.empty()) {
    nmin = pts.front()->n;
    nmax = std::max(nmin + 1, static_cast<double>(pts.back()->n));
  }
  for (auto* s : pts) {
    if (!s->empty) tmax = std::max(tmax, s->mean_time + s->sigma_time);
    mmax = std::max(mmax, s->mean_mass);
  }
  if (baseline) tmax = std::max(tmax, *baseline);
  tmax *= 1.1;
  mmax *= 1.1;
  auto X = [&](double n) { return L + (n - nmin) / (nmax - nmin) * (W - L - R); };
  auto YT = [&](double t) { return H - B - t / tmax * (H - T - B); };
  auto YM = [&](double m) { return H - B - m / mmax * (H - T - B); };

  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
  os << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << W - R << "\" y1=\"" << T << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double tv = tmax * i / 5.0, mv = mmax * i / 5.0;
    os << "<text x=\"" << L - 8 << "\" y=\"" << YT(tv) + 4 << "\" font-size=\"11\" text-anchor=\"end\">"
       << std::setprecision(0) << tv << std::setprecision(2) << "</text>\n";
    os << "<text x=\"" << W - R + 8 << "\" y=\"" << YM(mv) + 4 << "\" font-size=\"11\" fill=\"#b03030\">"
       << std::setprecision(0) << mv << std::setprecision(2) << "</text>\n";
  }
  for (auto* s : pts) {
    os << "<text x=\"" << X(s->n) << "\" y=\"" << H - B + 20 << "\" font-size=\"12\" text-anchor=\"middle\">" << s->n
       << "</text>\n";
  }
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 20 << "\" font-size=\"14\" text-anchor=\"middle\">"
     << "copies of B and E (n)</text>\n";
  os << "<text x=\"20\" y=\"" << H / 2 << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
     << H / 2 << ")\">mean replication time</text>\n";
  os << "<text x=\"" << W - 20 << "\" y=\"" << H / 2 << "\" font-size=\"14\" fill=\"#b03030\" text-anchor=\"middle\" "
     << "transform=\"rotate(90 " << W - 20 << ' ' << H / 2 << ")\">genome mass</text>\n";
  if (baseline) {
    os << "<line x1=\"" << L << "\" y1=\"" << YT(*baseline) << "\" x2=\"" << W - R << "\" y2=\"" << YT(*baseline)
       << "\" stroke=\"#2060c0\" stroke-dasharray=\"8 5\"/>\n";
    os << "<text x=\"" << L + 6 << "\" y=\"" << YT(*baseline) - 6 << "\" font-size=\"12\" fill=\"#2060c0\">"
       << "sequential baseline</text>\n";
  }
  std::string time_path, mass_path;
  for (auto* s : pts) {
    std::ostringstream seg;
    seg << std::fixed << std::setprecision(2);
    seg << (mass_path.empty() ? "M" : " L") << X(s->n) << ' ' << YM(s->mean_mass);
    mass_path += seg.str();
    if (s->empty) continue;
    std::ostringstream tseg;
    tseg << std::fixed << std::setprecision(2);
    tseg << (time_path.empty() ? "M" : " L") << X(s->n) << ' ' << YT(s->mean_time);
    time_path += tseg.str();
    const double x = X(s->n);
    const double lo = YT(std::max(0.0, s->mean_time - s->sigma_time)), hi = YT(s->mean_time + s->sigma_time);
    os << "<line x1=\"" << x << "\" y1=\"" << lo << "\" x2=\"" << x << "\" y2=\"" << hi << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << x - 5 << "\" y1=\"" << lo << "\" x2=\"" << x + 5 << "\" y2=\"" << lo
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << x - 5 << "\" y1=\"" << hi << "\" x2=\"" << x + 5 << "\" y2=\"" << hi
       << "\" stroke=\"black\"/>\n";
    os << "<circle cx=\"" << x << "\" cy=\"" << YT(s->mean_time) << "\" r=\"4\" fill=\"black\"/>\n";
  }
  if (!time_path.empty()) os << "<path d=\"" << time_path << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (!mass_path.empty()) {
    os << "<path d=\"" << mass_path << "\" fill=\"none\" stroke=\"#b03030\" stroke-dasharray=\"3 3\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

inline void emit_outputs(const std::vector<TrialStats>& stats, const std::vector<Row>& rows,
                         const std::filesystem::path& dir, std::optional<double> baseline = std::nullopt) {
  std::filesystem::create_directories(dir);
  write_file(dir / "rows.csv", rows_csv(rows));
  write_file(dir / "stats.csv", stats_csv(stats));
  write_file(dir / "figure.svg", figure_svg(stats, baseline));
}

// ---- configuration files -----------------------------------------------

inline void apply_config(const nlohmann::json& j, SweepConfig& c) {
  auto get = [](const nlohmann::json& o, const char* key, auto& field) {
    if (o.contains(key)) field = o.at(key).get<std::decay_t<decltype(field)>>();
  };
  if (j.contains("rates")) {
    const auto& r = j.at("rates");
    get(r, "D0", c.rates.D0);
    get(r, "beta", c.rates.beta);
    get(r, "kappa", c.rates.kappa);
    get(r, "processor_rate", c.rates.processor_rate);
  }
  if (j.contains("genome")) {
    const auto& g = j.at("genome");
    get(g, "n_B", c.genome.n_B);
    get(g, "n_E", c.genome.n_E);
    get(g, "tag_alphabet", c.genome.tag_alphabet);
    get(g, "cytosol_target", c.genome.cytosol_target);
  }
  if (j.contains("world")) {
    const auto& w = j.at("world");
    get(w, "width", c.world.width);
    get(w, "height", c.world.height);
    get(w, "site_capacity", c.world.site_capacity);
    get(w, "reservoir_per_tag", c.world.reservoir_per_tag);
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    get(s, "n_values", c.n_values);
    get(s, "trials", c.trials);
    get(s, "base_seed", c.base_seed);
    get(s, "t_max_factor", c.t_max_factor);
    get(s, "initial_t_max", c.initial_t_max);
    if (s.contains("t_max") && !s.at("t_max").is_null()) c.t_max = s.at("t_max").get<double>();
  }
}

inline SweepConfig load_config(const std::filesystem::path& p) {
  std::ifstream f(p);
  if (!f) throw std::runtime_error("cannot read config " + p.string());
  SweepConfig c;
  apply_config(nlohmann::json::parse(f), c);
  return c;
}

}  // namespace parcell
