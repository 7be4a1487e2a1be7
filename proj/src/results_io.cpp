#include "idbandit/results_io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "idbandit/errors.hpp"

namespace idbandit {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

std::vector<std::vector<std::string>> read_csv(const std::string& path, const std::string& header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != header) throw IoError("unexpected header in " + path);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

double parse_double(const std::string& s) { return std::strtod(s.c_str(), nullptr); }
std::size_t parse_size(const std::string& s) { return static_cast<std::size_t>(std::strtoull(s.c_str(), nullptr, 10)); }

constexpr const char* kStepHeader = "run_id,step,reward,avg_cum_reward,inst_regret,cum_regret";
constexpr const char* kAggregateHeader = "step,mean_avg_cum_reward,se_avg_cum_reward,mean_cum_regret,se_cum_regret";

void mean_se(const std::vector<double>& v, double& mean, double& se) {
  double sum = 0.0;
  for (double x : v) sum += x;
  mean = sum / static_cast<double>(v.size());
  if (v.size() < 2) {
    se = 0.0;
    return;
  }
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  se = std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
}

}  // namespace

std::vector<StepRow> step_rows(const std::vector<RunResult>& results) {
  std::vector<StepRow> rows;
  for (const auto& r : results) {
    const auto avg = average_cumulative_reward(r.rewards);
    const auto cum = cumulative_regret(r);
    for (std::size_t t = 0; t < r.rewards.size(); ++t)
      rows.push_back({r.run, t + 1, r.rewards[t], avg[t], r.regrets[t], cum[t]});
  }
  return rows;
}

std::vector<AggregateRow> aggregate_rows(const std::vector<RunResult>& results) {
  if (results.empty()) throw ConfigError("no results to aggregate");
  const std::size_t n = results.front().rewards.size();
  std::vector<std::vector<double>> avg;
  std::vector<std::vector<double>> cum;
  for (const auto& r : results) {
    if (r.rewards.size() != n) throw ConfigError("runs have different horizons");
    avg.push_back(average_cumulative_reward(r.rewards));
    cum.push_back(cumulative_regret(r));
  }
  std::vector<AggregateRow> rows(n);
  std::vector<double> a(results.size());
  std::vector<double> c(results.size());
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t k = 0; k < results.size(); ++k) {
      a[k] = avg[k][t];
      c[k] = cum[k][t];
    }
    rows[t].step = t + 1;
    mean_se(a, rows[t].mean_avg_cum_reward, rows[t].se_avg_cum_reward);
    mean_se(c, rows[t].mean_cum_regret, rows[t].se_cum_regret);
  }
  return rows;
}

void write_step_csv(const std::string& path, const std::vector<StepRow>& rows) {
  auto out = open_out(path);
  out << kStepHeader << '\n';
  for (const auto& r : rows)
    out << r.run_id << ',' << r.step << ',' << num(r.reward) << ',' << num(r.avg_cum_reward) << ','
        << num(r.inst_regret) << ',' << num(r.cum_regret) << '\n';
  finish(out, path);
}

void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& rows) {
  auto out = open_out(path);
  out << kAggregateHeader << '\n';
  for (const auto& r : rows)
    out << r.step << ',' << num(r.mean_avg_cum_reward) << ',' << num(r.se_avg_cum_reward) << ','
        << num(r.mean_cum_regret) << ',' << num(r.se_cum_regret) << '\n';
  finish(out, path);
}

std::vector<StepRow> read_step_csv(const std::string& path) {
  std::vector<StepRow> rows;
  for (const auto& c : read_csv(path, kStepHeader)) {
    if (c.size() != 6) throw IoError("malformed row in " + path);
    rows.push_back({parse_size(c[0]), parse_size(c[1]), parse_double(c[2]), parse_double(c[3]), parse_double(c[4]),
                    parse_double(c[5])});
  }
  return rows;
}

std::vector<AggregateRow> read_aggregate_csv(const std::string& path) {
  std::vector<AggregateRow> rows;
  for (const auto& c : read_csv(path, kAggregateHeader)) {
    if (c.size() != 5) throw IoError("malformed row in " + path);
    rows.push_back({parse_size(c[0]), parse_double(c[1]), parse_double(c[2]), parse_double(c[3]), parse_double(c[4])});
  }
  return rows;
}

namespace {

struct Panel {
  double x0, y0, w, h;
};

void draw_series(std::ostream& svg, const Panel& p, const std::vector<AggregateRow>& rows, bool reward,
                 const std::string& label) {
  double lo = 0.0;
  double hi = 0.0;
  for (const auto& r : rows) {
    const double m = reward ? r.mean_avg_cum_reward : r.mean_cum_regret;
    const double s = reward ? r.se_avg_cum_reward : r.se_cum_regret;
    hi = std::max(hi, m + s);
    lo = std::min(lo, m - s);
  }
  if (hi - lo < 1e-12) hi = lo + 1.0;
  const double n = static_cast<double>(rows.size());
  // At most ~600 points per path.
  const std::size_t stride = std::max<std::size_t>(1, rows.size() / 600);
  auto px = [&](std::size_t step) { return p.x0 + p.w * (n <= 1 ? 0.0 : (static_cast<double>(step) - 1.0) / (n - 1.0)); };
  auto py = [&](double v) { return p.y0 + p.h - p.h * (v - lo) / (hi - lo); };

  svg << "<rect x=\"" << p.x0 << "\" y=\"" << p.y0 << "\" width=\"" << p.w << "\" height=\"" << p.h
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
  std::ostringstream upper, lower, mean;
  std::vector<std::size_t> picks;
  for (std::size_t i = 0; i < rows.size(); i += stride) picks.push_back(i);
  if (picks.back() != rows.size() - 1) picks.push_back(rows.size() - 1);
  for (std::size_t k = 0; k < picks.size(); ++k) {
    const auto& r = rows[picks[k]];
    const double m = reward ? r.mean_avg_cum_reward : r.mean_cum_regret;
    const double s = reward ? r.se_avg_cum_reward : r.se_cum_regret;
    mean << (k == 0 ? "M" : "L") << num(px(r.step)) << ' ' << num(py(m)) << ' ';
    upper << (k == 0 ? "M" : "L") << num(px(r.step)) << ' ' << num(py(m + s)) << ' ';
  }
  for (std::size_t k = picks.size(); k-- > 0;) {
    const auto& r = rows[picks[k]];
    const double m = reward ? r.mean_avg_cum_reward : r.mean_cum_regret;
    const double s = reward ? r.se_avg_cum_reward : r.se_cum_regret;
    lower << "L" << num(px(r.step)) << ' ' << num(py(m - s)) << ' ';
  }
  svg << "<path d=\"" << upper.str() << lower.str() << "Z\" fill=\"#9ecae1\" stroke=\"none\" opacity=\"0.6\"/>\n";
  svg << "<path d=\"" << mean.str() << "\" fill=\"none\" stroke=\"#08519c\" stroke-width=\"1.5\"/>\n";
  svg << "<text x=\"" << p.x0 << "\" y=\"" << p.y0 - 6 << "\" font-size=\"12\">" << label << "</text>\n";
  svg << "<text x=\"" << p.x0 - 4 << "\" y=\"" << p.y0 + 10 << "\" font-size=\"10\" text-anchor=\"end\">" << num(hi)
      << "</text>\n";
  svg << "<text x=\"" << p.x0 - 4 << "\" y=\"" << p.y0 + p.h << "\" font-size=\"10\" text-anchor=\"end\">" << num(lo)
      << "</text>\n";
  svg << "<text x=\"" << p.x0 + p.w << "\" y=\"" << p.y0 + p.h + 14 << "\" font-size=\"10\" text-anchor=\"end\">step "
      << rows.size() << "</text>\n";
}

}  // namespace

void write_plot_svg(const std::string& path, const std::vector<AggregateRow>& rows, const std::string& title) {
  if (rows.empty()) throw ConfigError("nothing to plot");
  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" height=\"360\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"900\" height=\"360\" fill=\"white\"/>\n";
  out << "<text x=\"450\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">" << title << "</text>\n";
  draw_series(out, {80, 50, 340, 270}, rows, true, "average cumulative reward");
  draw_series(out, {530, 50, 340, 270}, rows, false, "cumulative regret");
  out << "</svg>\n";
  finish(out, path);
}

nlohmann::json summary(const ExperimentConfig& config, const BanditInstance& instance,
                       const std::vector<RunResult>& results) {
  std::vector<double> finals;
  std::vector<double> regrets;
  std::vector<double> seconds;
  for (const auto& r : results) {
    finals.push_back(average_cumulative_reward(r.rewards).back());
    regrets.push_back(cumulative_regret(r).back());
    seconds.push_back(r.seconds);
  }
  double fm, fs, rm, rs, sm, ss;
  mean_se(finals, fm, fs);
  mean_se(regrets, rm, rs);
  mean_se(seconds, sm, ss);
  return {{"config", experiment_to_json(config)},
          {"optimal_value", instance.optimal_value},
          {"optimal_action", instance.optimal_action},
          {"final_avg_cum_reward", {{"mean", fm}, {"se", fs}}},
          {"final_cum_regret", {{"mean", rm}, {"se", rs}}},
          {"policy_seconds", {{"mean", sm}, {"se", ss}, {"per_run", seconds}}}};
}

void emit_results(const std::string& dir, const ExperimentConfig& config, const BanditInstance& instance,
                  const std::vector<RunResult>& results) {
  if (results.empty()) throw ConfigError("no results to write");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
  const auto agg = aggregate_rows(results);
  write_step_csv(dir + "/steps.csv", step_rows(results));
  write_aggregate_csv(dir + "/aggregate.csv", agg);
  {
    auto out = open_out(dir + "/summary.json");
    out << summary(config, instance, results).dump(2) << '\n';
    finish(out, dir + "/summary.json");
  }
  if (config.plot)
    write_plot_svg(dir + "/plot.svg", agg, config.environment + " / " + to_string(config.policy.kind));
  if (config.snapshots) {
    nlohmann::json snaps = nlohmann::json::array();
    for (const auto& r : results) snaps.push_back({{"run", r.run}, {"posterior", r.snapshot}});
    auto out = open_out(dir + "/snapshots.json");
    out << snaps.dump(2) << '\n';
    finish(out, dir + "/snapshots.json");
  }
}

}  // namespace idbandit
