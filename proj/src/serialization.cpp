#include "hetnet/serialization.hpp"

#include <cctype>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hetnet/errors.hpp"

namespace hetnet {

namespace {

Json vec2_json(const Eigen::Vector2d& p) { return Json::array({p.x(), p.y()}); }

Eigen::Vector2d vec2_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw InputError("json: expected [x, y] position");
  return {j[0].get<double>(), j[1].get<double>()};
}

template <typename T>
Json vector_json(const T& v) {
  Json out = Json::array();
  for (Index i = 0; i < static_cast<Index>(v.size()); ++i) out.push_back(v[i]);
  return out;
}

void fnv_mix(std::uint64_t& h, const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
}

void fnv_mix_double(std::uint64_t& h, double v) { fnv_mix(h, &v, sizeof v); }

std::string sanitize_label(const std::string& label) {
  std::string out;
  for (const char c : label)
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' ? c : '_');
  return out;
}

std::string csv_safe(const std::string& text) {
  std::string out;
  for (const char c : text) out.push_back(c == ',' || c == '\n' ? ';' : c);
  return out;
}

}  // namespace

Json to_json(const ScenarioConfig& c) {
  Json j;
  j["num_macros"] = c.num_macros;
  j["picos_per_macro"] = c.picos_per_macro;
  j["num_users"] = c.num_users;
  j["bandwidth_hz"] = c.bandwidth_hz;
  j["macro_power_dbm"] = c.macro_power_dbm;
  j["pico_power_dbm"] = c.pico_power_dbm;
  j["macro_antenna_gain_db"] = c.macro_antenna_gain_db;
  j["pico_antenna_gain_db"] = c.pico_antenna_gain_db;
  j["penetration_loss_db"] = c.penetration_loss_db;
  j["macro_shadow_std_db"] = c.macro_shadow_std_db;
  j["pico_shadow_std_db"] = c.pico_shadow_std_db;
  j["macro_shadow_corr"] = c.macro_shadow_corr;
  j["pico_shadow_corr"] = c.pico_shadow_corr;
  j["noise_psd_dbm_hz"] = c.noise_psd_dbm_hz;
  j["noise_figure_db"] = c.noise_figure_db;
  j["min_macro_user_m"] = c.min_macro_user_m;
  j["min_pico_user_m"] = c.min_pico_user_m;
  j["min_macro_pico_m"] = c.min_macro_pico_m;
  j["min_pico_pico_m"] = c.min_pico_pico_m;
  j["inter_site_distance_m"] = c.inter_site_distance_m;
  j["drop_radius_m"] = c.drop_radius_m;
  j["user_weight"] = c.user_weight;
  if (!c.macro_positions.empty()) {
    Json positions = Json::array();
    for (const auto& p : c.macro_positions) positions.push_back(vec2_json(p));
    j["macro_positions"] = positions;
  }
  return j;
}

ScenarioConfig config_from_json(const Json& j) {
  ScenarioConfig c;
  auto opt = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  opt("num_macros", c.num_macros);
  opt("picos_per_macro", c.picos_per_macro);
  opt("num_users", c.num_users);
  opt("bandwidth_hz", c.bandwidth_hz);
  opt("macro_power_dbm", c.macro_power_dbm);
  opt("pico_power_dbm", c.pico_power_dbm);
  opt("macro_antenna_gain_db", c.macro_antenna_gain_db);
  opt("pico_antenna_gain_db", c.pico_antenna_gain_db);
  opt("penetration_loss_db", c.penetration_loss_db);
  opt("macro_shadow_std_db", c.macro_shadow_std_db);
  opt("pico_shadow_std_db", c.pico_shadow_std_db);
  opt("macro_shadow_corr", c.macro_shadow_corr);
  opt("pico_shadow_corr", c.pico_shadow_corr);
  opt("noise_psd_dbm_hz", c.noise_psd_dbm_hz);
  opt("noise_figure_db", c.noise_figure_db);
  opt("min_macro_user_m", c.min_macro_user_m);
  opt("min_pico_user_m", c.min_pico_user_m);
  opt("min_macro_pico_m", c.min_macro_pico_m);
  opt("min_pico_pico_m", c.min_pico_pico_m);
  opt("inter_site_distance_m", c.inter_site_distance_m);
  opt("drop_radius_m", c.drop_radius_m);
  opt("user_weight", c.user_weight);
  if (j.contains("macro_positions"))
    for (const Json& p : j.at("macro_positions")) c.macro_positions.push_back(vec2_from(p));
  c.validate();
  return c;
}

Json to_json(const Scenario& s) {
  Json j;
  j["bandwidth_hz"] = s.bandwidth_hz;
  j["noise_psd_dbm_hz"] = watt_to_dbm(s.noise_psd);
  j["seed"] = s.seed;
  Json cells = Json::array();
  for (const Cell& c : s.cells) {
    Json cj;
    cj["kind"] = c.kind == CellKind::Macro ? "macro" : "pico";
    cj["position_m"] = vec2_json(c.position);
    cj["tx_power_dbm"] = watt_to_dbm(c.tx_psd * s.bandwidth_hz);
    cj["parent"] = c.parent;
    cells.push_back(cj);
  }
  j["cells"] = cells;
  Json users = Json::array();
  for (const User& u : s.users) {
    Json uj;
    uj["position_m"] = vec2_json(u.position);
    uj["weight"] = u.weight;
    users.push_back(uj);
  }
  j["users"] = users;
  Json gain = Json::array();
  for (Index k = 0; k < s.num_users(); ++k) {
    Json row = Json::array();
    for (Index b = 0; b < s.num_cells(); ++b) row.push_back(linear_to_db(s.gain(k, b)));
    gain.push_back(row);
  }
  j["gain_db"] = gain;
  return j;
}

Scenario scenario_from_json(const Json& j) {
  Scenario s;
  s.bandwidth_hz = j.at("bandwidth_hz").get<double>();
  s.noise_psd = dbm_to_watt(j.at("noise_psd_dbm_hz").get<double>());
  s.seed = j.value("seed", std::uint64_t{0});
  for (const Json& cj : j.at("cells")) {
    Cell c;
    const std::string kind = cj.at("kind").get<std::string>();
    if (kind != "macro" && kind != "pico") throw InputError("scenario json: bad cell kind");
    c.kind = kind == "macro" ? CellKind::Macro : CellKind::Pico;
    c.position = vec2_from(cj.at("position_m"));
    c.tx_psd = dbm_to_watt(cj.at("tx_power_dbm").get<double>()) / s.bandwidth_hz;
    c.parent = cj.value("parent", Index{-1});
    s.cells.push_back(c);
  }
  for (const Json& uj : j.at("users")) {
    User u;
    u.position = vec2_from(uj.at("position_m"));
    u.weight = uj.value("weight", 1.0);
    s.users.push_back(u);
  }
  const Json& gain = j.at("gain_db");
  if (static_cast<Index>(gain.size()) != s.num_users())
    throw InputError("scenario json: gain row count != user count");
  s.gain.resize(s.num_users(), s.num_cells());
  for (Index k = 0; k < s.num_users(); ++k) {
    const Json& row = gain[static_cast<std::size_t>(k)];
    if (static_cast<Index>(row.size()) != s.num_cells())
      throw InputError("scenario json: gain column count != cell count");
    for (Index b = 0; b < s.num_cells(); ++b)
      s.gain(k, b) = db_to_linear(row[static_cast<std::size_t>(b)].get<double>());
  }
  if (s.num_users() < 1 || s.num_cells() < 1) throw InputError("scenario json: empty scenario");
  return s;
}

Json to_json(const PatternSet& patterns) {
  Json j;
  j["num_cells"] = patterns.num_cells;
  Json list = Json::array();
  for (const Pattern& p : patterns.patterns) {
    std::string bits(static_cast<std::size_t>(patterns.num_cells), '0');
    for (Index b = 0; b < patterns.num_cells; ++b)
      if (p.active[b]) bits[static_cast<std::size_t>(b)] = '1';
    list.push_back(bits);
  }
  j["patterns"] = list;
  return j;
}

PatternSet patterns_from_json(const Json& j) {
  PatternSet set;
  set.num_cells = j.at("num_cells").get<Index>();
  Index id = 0;
  for (const Json& bj : j.at("patterns")) {
    const std::string bits = bj.get<std::string>();
    if (static_cast<Index>(bits.size()) != set.num_cells)
      throw InputError("pattern json: bitstring length != num_cells");
    Pattern p;
    p.id = id++;
    p.active = BoolVec::Constant(set.num_cells, false);
    for (Index b = 0; b < set.num_cells; ++b) {
      const char c = bits[static_cast<std::size_t>(b)];
      if (c != '0' && c != '1') throw InputError("pattern json: bitstrings must be 0/1");
      p.active[b] = c == '1';
    }
    set.patterns.push_back(std::move(p));
  }
  set.validate();
  return set;
}

PatternSet patterns_from_file(const std::string& path) {
  return patterns_from_json(load_json(path));
}

Json to_json(const Allocation& alloc) {
  Json j;
  j["num_users"] = alloc.num_users;
  j["num_cells"] = alloc.num_cells;
  j["num_patterns"] = alloc.num_patterns();
  j["pattern_share"] = vector_json(alloc.pattern_share);
  Json triplets = Json::array();
  for (Index i = 0; i < alloc.num_patterns(); ++i)
    for (Index b = 0; b < alloc.num_cells; ++b)
      for (Index k = 0; k < alloc.num_users; ++k) {
        const double v = alloc.at(k, b, i);
        if (v != 0.0) triplets.push_back(Json::array({k, b, i, v}));
      }
  j["user_share"] = triplets;
  return j;
}

Allocation allocation_from_json(const Json& j) {
  const Index users = j.at("num_users").get<Index>();
  const Index cells = j.at("num_cells").get<Index>();
  const Index patterns = j.at("num_patterns").get<Index>();
  Allocation a = Allocation::zeros(users, cells, patterns);
  const Json& share = j.at("pattern_share");
  if (static_cast<Index>(share.size()) != patterns)
    throw InputError("allocation json: pattern_share length mismatch");
  for (Index i = 0; i < patterns; ++i) a.pattern_share[i] = share[static_cast<std::size_t>(i)];
  for (const Json& t : j.at("user_share")) {
    if (!t.is_array() || t.size() != 4)
      throw InputError("allocation json: user_share entries are [user, cell, pattern, share]");
    const Index k = t[0].get<Index>();
    const Index b = t[1].get<Index>();
    const Index i = t[2].get<Index>();
    if (k < 0 || k >= users || b < 0 || b >= cells || i < 0 || i >= patterns)
      throw InputError("allocation json: triplet index out of range");
    a.at(k, b, i) = t[3].get<double>();
  }
  return a;
}

Json to_json(const Association& assoc) {
  Json j;
  j["num_users"] = assoc.num_users();
  j["num_cells"] = assoc.num_cells();
  Json rows = Json::array();
  for (Index k = 0; k < assoc.num_users(); ++k) {
    Json cells = Json::array();
    for (Index b = 0; b < assoc.num_cells(); ++b)
      if (assoc.active(k, b)) cells.push_back(b);
    rows.push_back(cells);
  }
  j["user_cells"] = rows;
  return j;
}

Association association_from_json(const Json& j) {
  const Index users = j.at("num_users").get<Index>();
  const Index cells = j.at("num_cells").get<Index>();
  Association a{BoolGrid::Constant(users, cells, false)};
  const Json& rows = j.at("user_cells");
  if (static_cast<Index>(rows.size()) != users)
    throw InputError("association json: row count mismatch");
  for (Index k = 0; k < users; ++k)
    for (const Json& bj : rows[static_cast<std::size_t>(k)]) {
      const Index b = bj.get<Index>();
      if (b < 0 || b >= cells) throw InputError("association json: cell index out of range");
      a.active(k, b) = true;
    }
  return a;
}

Json to_json(const SolverResult& result) {
  Json j;
  j["utility"] = result.utility;
  j["gap"] = result.gap;
  j["iterations"] = result.iterations;
  j["certified"] = result.certified;
  j["active_patterns"] = result.active;
  j["user_rates"] = vector_json(result.user_rates);
  j["allocation"] = to_json(result.allocation);
  if (!result.note.empty()) j["note"] = result.note;
  return j;
}

Json to_json(const JointResult& result) {
  Json j;
  j["utility"] = result.utility;
  j["relaxed_bound"] = result.relaxed_bound;
  j["bound_gap"] = result.bound_gap;
  j["outer_iterations"] = result.outer_iterations;
  j["utility_trace"] = result.utility_trace;
  j["certified"] = result.certified;
  j["association"] = to_json(result.association);
  j["user_rates"] = vector_json(result.user_rates);
  j["allocation"] = to_json(result.allocation);
  if (!result.note.empty()) j["note"] = result.note;
  return j;
}

Json to_json(const MetricsReport& report) {
  Json j;
  j["geometric_mean"] = report.geometric_mean;
  j["arithmetic_mean"] = report.arithmetic_mean;
  j["sum_rate"] = report.sum_rate;
  j["p05"] = report.p05;
  j["p50"] = report.p50;
  j["p95"] = report.p95;
  j["utility"] = report.utility;
  j["rates"] = vector_json(report.rates);
  return j;
}

Json to_json(const ComparisonReport& report) {
  Json j;
  j["config"] = to_json(report.config);
  j["seed"] = report.seed;
  j["drops"] = report.drops;
  j["alg"] = to_string(report.alg);
  j["epsilon"] = report.opts.epsilon;
  Json runs = Json::array();
  for (const RunRecord& rec : report.runs) {
    Json rj;
    rj["strategy"] = rec.strategy;
    rj["drop"] = rec.drop;
    rj["ok"] = rec.ok;
    if (rec.ok) {
      rj["metrics"] = to_json(rec.metrics);
      rj["relaxed_bound"] = rec.relaxed_bound;
      rj["bound_gap"] = rec.bound_gap;
      rj["outer_iterations"] = rec.outer_iterations;
      rj["certified"] = rec.certified;
    } else {
      rj["error"] = rec.error;
    }
    rj["solve_seconds"] = rec.solve_seconds;
    runs.push_back(rj);
  }
  j["runs"] = runs;
  Json aggs = Json::array();
  for (const StrategyAggregate& agg : report.aggregates) {
    Json aj;
    aj["strategy"] = agg.strategy;
    aj["completed_drops"] = agg.completed_drops;
    aj["all_certified"] = agg.all_certified;
    aj["geometric_mean"] = agg.geometric_mean;
    aj["sum_rate"] = agg.sum_rate;
    aj["p05"] = agg.p05;
    aj["p50"] = agg.p50;
    aj["p95"] = agg.p95;
    aj["utility"] = agg.utility;
    aggs.push_back(aj);
  }
  j["aggregates"] = aggs;
  return j;
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  Json j;
  in >> j;
  return j;
}

void save_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << '\n';
}

void write_trace_csv(const std::string& path, const std::vector<TracePoint>& trace) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "iteration,utility,gap,step,active_count,working_set\n";
  out << std::setprecision(17);
  for (std::size_t t = 0; t < trace.size(); ++t)
    out << t << ',' << trace[t].utility << ',' << trace[t].gap << ',' << trace[t].step << ','
        << trace[t].active << ',' << trace[t].working_set << '\n';
}

void write_metrics_csv(const std::string& path, const ComparisonReport& report) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "strategy,drop,ok,geometric_mean,sum_rate,p05,p50,p95,utility,relaxed_bound,bound_gap,"
         "certified,solve_seconds,error\n";
  out << std::setprecision(17);
  for (const RunRecord& rec : report.runs) {
    out << rec.strategy << ',' << rec.drop << ',' << (rec.ok ? 1 : 0) << ',';
    if (rec.ok)
      out << rec.metrics.geometric_mean << ',' << rec.metrics.sum_rate << ',' << rec.metrics.p05
          << ',' << rec.metrics.p50 << ',' << rec.metrics.p95 << ',' << rec.metrics.utility << ','
          << rec.relaxed_bound << ',' << rec.bound_gap << ',' << (rec.certified ? 1 : 0);
    else
      out << ",,,,,,,,";
    out << ',' << rec.solve_seconds << ',' << csv_safe(rec.error) << '\n';
  }
  for (const StrategyAggregate& agg : report.aggregates) {
    out << agg.strategy << ",mean," << (agg.completed_drops > 0 ? 1 : 0) << ','
        << agg.geometric_mean << ',' << agg.sum_rate << ',' << agg.p05 << ',' << agg.p50 << ','
        << agg.p95 << ',' << agg.utility << ",,," << (agg.all_certified ? 1 : 0) << ",,\n";
  }
}

void write_cdf_csv(const std::string& path, const StrategyAggregate& agg) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "rate_bps,cdf\n";
  out << std::setprecision(17);
  const Index n = agg.pooled_cdf.size();
  for (Index i = 0; i < n; ++i)
    out << agg.pooled_cdf[i] << ',' << static_cast<double>(i + 1) / static_cast<double>(n)
        << '\n';
}

void write_cdf_svg(const std::string& path, const ComparisonReport& report) {
  static const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                   "#bcbd22", "#17becf"};
  const double width = 860, height = 560;
  const double left = 70, right = 40, top = 40, bottom = 60;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double max_rate = 0;
  for (const StrategyAggregate& agg : report.aggregates)
    if (agg.pooled_cdf.size() > 0) max_rate = std::max(max_rate, agg.pooled_cdf.maxCoeff());
  if (max_rate <= 0) max_rate = 1;
  const double mbps = 1e6;
  const double max_x = max_rate / mbps;

  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << std::setprecision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\""
      << " font-size=\"16\">User rate CDF</text>\n";

  auto xpix = [&](double rate) { return left + plot_w * (rate / mbps) / max_x; };
  auto ypix = [&](double f) { return top + plot_h * (1.0 - f); };

  out << "<g stroke=\"#cccccc\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (int g = 0; g <= 10; ++g) {
    const double f = g / 10.0;
    out << "<line x1=\"" << left << "\" y1=\"" << ypix(f) << "\" x2=\"" << left + plot_w
        << "\" y2=\"" << ypix(f) << "\"/>\n";
    out << "<text x=\"" << left - 8 << "\" y=\"" << ypix(f) + 4
        << "\" text-anchor=\"end\" stroke=\"none\" fill=\"black\">" << f << "</text>\n";
  }
  for (int g = 0; g <= 8; ++g) {
    const double x = left + plot_w * g / 8.0;
    out << "<line x1=\"" << x << "\" y1=\"" << top << "\" x2=\"" << x << "\" y2=\"" << top + plot_h
        << "\"/>\n";
    out << "<text x=\"" << x << "\" y=\"" << top + plot_h + 18
        << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"black\">" << max_x * g / 8.0
        << "</text>\n";
  }
  out << "</g>\n";
  out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << "rate (Mbit/s)</text>\n";

  int color = 0;
  double legend_y = top + 10;
  for (const StrategyAggregate& agg : report.aggregates) {
    if (agg.pooled_cdf.size() == 0) continue;
    const char* stroke = kPalette[color % 10];
    out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.8\" points=\"";
    const Index n = agg.pooled_cdf.size();
    for (Index i = 0; i < n; ++i)
      out << xpix(agg.pooled_cdf[i]) << ',' << ypix(static_cast<double>(i + 1) / n) << ' ';
    out << "\"/>\n";
    out << "<line x1=\"" << left + plot_w - 170 << "\" y1=\"" << legend_y << "\" x2=\""
        << left + plot_w - 144 << "\" y2=\"" << legend_y << "\" stroke=\"" << stroke
        << "\" stroke-width=\"3\"/>\n";
    out << "<text x=\"" << left + plot_w - 138 << "\" y=\"" << legend_y + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << agg.strategy << "</text>\n";
    legend_y += 18;
    ++color;
  }
  out << "</svg>\n";
}

void write_report_files(const std::string& dir, const ComparisonReport& report, bool svg) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  save_json((base / "report.json").string(), to_json(report));
  write_metrics_csv((base / "metrics.csv").string(), report);
  for (const StrategyAggregate& agg : report.aggregates)
    write_cdf_csv((base / ("cdf_" + sanitize_label(agg.strategy) + ".csv")).string(), agg);
  if (svg) write_cdf_svg((base / "cdf.svg").string(), report);
}

void save_rate_cache(const std::string& path, const RateTensor& rates) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  const char magic[8] = {'H', 'N', 'R', 'A', 'T', 'E', 'S', '1'};
  out.write(magic, sizeof magic);
  const std::int64_t dims[3] = {rates.num_users, rates.num_cells, rates.num_patterns};
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  for (Index r = 0; r < rates.values.rows(); ++r)
    for (Index c = 0; c < rates.values.cols(); ++c) {
      const double v = rates.values(r, c);
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  for (Index r = 0; r < rates.activity.rows(); ++r)
    for (Index c = 0; c < rates.activity.cols(); ++c) {
      const double v = rates.activity(r, c);
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
}

bool load_rate_cache(const std::string& path, RateTensor& rates) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, "HNRATES1", 8) != 0) return false;
  std::int64_t dims[3];
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  if (!in || dims[0] < 1 || dims[1] < 1 || dims[2] < 1) return false;
  RateTensor r;
  r.num_users = dims[0];
  r.num_cells = dims[1];
  r.num_patterns = dims[2];
  r.values.resize(r.num_users * r.num_cells, r.num_patterns);
  r.activity.resize(r.num_cells, r.num_patterns);
  for (Index row = 0; row < r.values.rows(); ++row)
    for (Index col = 0; col < r.values.cols(); ++col) {
      double v;
      in.read(reinterpret_cast<char*>(&v), sizeof v);
      if (!in) return false;
      r.values(row, col) = v;
    }
  for (Index row = 0; row < r.activity.rows(); ++row)
    for (Index col = 0; col < r.activity.cols(); ++col) {
      double v;
      in.read(reinterpret_cast<char*>(&v), sizeof v);
      if (!in) return false;
      r.activity(row, col) = v;
    }
  rates = std::move(r);
  return true;
}

std::uint64_t rate_cache_key(const Scenario& s, const PatternSet& patterns,
                             const FadingOptions& fading) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a offset basis
  fnv_mix(h, &s.seed, sizeof s.seed);
  fnv_mix_double(h, s.bandwidth_hz);
  fnv_mix_double(h, s.noise_psd);
  const std::int64_t counts[2] = {s.num_users(), s.num_cells()};
  fnv_mix(h, counts, sizeof counts);
  for (const Cell& c : s.cells) {
    const std::int64_t kind = c.kind == CellKind::Macro ? 0 : 1;
    fnv_mix(h, &kind, sizeof kind);
    fnv_mix_double(h, c.position.x());
    fnv_mix_double(h, c.position.y());
    fnv_mix_double(h, c.tx_psd);
  }
  for (Index k = 0; k < s.num_users(); ++k)
    for (Index b = 0; b < s.num_cells(); ++b) fnv_mix_double(h, s.gain(k, b));
  const std::int64_t np = patterns.size();
  fnv_mix(h, &np, sizeof np);
  for (const Pattern& p : patterns.patterns)
    for (Index b = 0; b < patterns.num_cells; ++b) {
      const char bit = p.active[b] ? '1' : '0';
      fnv_mix(h, &bit, 1);
    }
  const std::int64_t model = fading.model == FadingOptions::Model::Deterministic ? 0 : 1;
  fnv_mix(h, &model, sizeof model);
  if (fading.model == FadingOptions::Model::RayleighMc) {
    fnv_mix(h, &fading.mc_samples, sizeof fading.mc_samples);
    fnv_mix(h, &fading.seed, sizeof fading.seed);
  }
  return h;
}

std::string rate_cache_path(const std::string& dir, std::uint64_t key) {
  std::ostringstream name;
  name << "rates_" << std::hex << std::setw(16) << std::setfill('0') << key << ".bin";
  return (std::filesystem::path(dir) / name.str()).string();
}

}  // namespace hetnet
