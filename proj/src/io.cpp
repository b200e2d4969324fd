#include "anhkit/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace anh::io {

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

std::optional<double> parse_number(const std::string& cell) {
  const std::string t = trim(cell);
  if (t.empty()) return std::nullopt;
  std::size_t used = 0;
  try {
    const double v = std::stod(t, &used);
    if (used != t.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// Numeric rows of a CSV, skipping one optional header line.
std::vector<std::vector<double>> read_numeric(const fs::path& path, std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    std::vector<double> row;
    bool numeric = true;
    for (const auto& c : cells) {
      const auto v = parse_number(c);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }
    if (!numeric) {
      if (rows.empty() && header.empty()) {
        for (const auto& c : cells) header.push_back(trim(c));
        continue;
      }
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": non-numeric row");
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path.string() + ": no data rows");
  return rows;
}

}  // namespace

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

Signal read_signal_csv(const fs::path& path, std::optional<double> fs_hz) {
  std::vector<std::string> header;
  const auto rows = read_numeric(path, header);
  const std::size_t width = rows.front().size();
  std::size_t value_col = 0;
  std::optional<std::size_t> time_col;
  if (width == 2) {
    time_col = 0;
    value_col = 1;
  } else if (width != 1) {
    const auto it = std::find(header.begin(), header.end(), "value");
    if (it == header.end()) throw std::runtime_error(path.string() + ": expected `t,value` or one column");
    value_col = static_cast<std::size_t>(it - header.begin());
    const auto tt = std::find(header.begin(), header.end(), "t");
    if (tt != header.end()) time_col = static_cast<std::size_t>(tt - header.begin());
  }
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& r : rows) v.push_back(r[value_col]);
  double t0 = 0.0;
  if (time_col) {
    t0 = rows.front()[*time_col];
    if (!fs_hz && rows.size() >= 2) {
      const double dt = rows[1][*time_col] - rows[0][*time_col];
      if (!(dt > 0.0)) throw std::runtime_error(path.string() + ": time column is not increasing");
      fs_hz = 1.0 / dt;
    }
  }
  if (!fs_hz) throw std::runtime_error(path.string() + ": sampling rate unknown, pass --fs");
  return Signal(std::move(v), *fs_hz, t0);
}

void write_signal_csv(const fs::path& path, const Signal& x) {
  auto out = open_out(path);
  out << "t,value\n";
  for (std::size_t n = 0; n < x.size(); ++n) {
    out << format_double(x.time(n)) << ',' << format_double(x[n]) << '\n';
  }
}

void write_series_csv(const fs::path& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw std::invalid_argument("write_series_csv: header/columns");
  auto out = open_out(path);
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  const std::size_t n = columns.empty() ? 0 : columns.front().size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << format_double(columns[c].at(i));
    out << '\n';
  }
}

std::vector<double> read_period_csv(const fs::path& path) {
  std::vector<std::string> header;
  const auto rows = read_numeric(path, header);
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r.back());
  return out;
}

Json to_json(const WaveShape& ws) { return Json{{"alpha", ws.alpha}, {"beta", ws.beta}}; }

WaveShape wave_shape_from_json(const Json& j) {
  WaveShape ws;
  ws.alpha = j.at("alpha").get<std::vector<double>>();
  ws.beta = j.at("beta").get<std::vector<double>>();
  ws.validate();
  return ws;
}

WaveShape read_wave_shape_json(const fs::path& path) { return wave_shape_from_json(read_json(path)); }

Json to_json(const CoefficientVector& c) {
  return Json{{"r", c.order()},
              {"alpha", std::vector<double>(c.alpha().begin(), c.alpha().end())},
              {"beta", std::vector<double>(c.beta().begin(), c.beta().end())},
              {"rank_deficient", c.rank_deficient}};
}

void write_ridge_csv(const fs::path& path, const Ridge& ridge) {
  auto out = open_out(path);
  out << "frame,bin,freq_hz\n";
  for (std::size_t n = 0; n < ridge.size(); ++n) {
    out << n << ',' << ridge.bins[n] << ',' << format_double(ridge.freq_hz[n]) << '\n';
  }
}

void write_curve_csv(const fs::path& path, const CriterionCurve& curve) {
  auto out = open_out(path);
  out << "r,value,nuisance\n";
  for (std::size_t i = 0; i < curve.values.size(); ++i) {
    out << i + 1 << ',' << format_double(curve.values[i]) << ',';
    if (i < curve.nuisance.size()) out << format_double(curve.nuisance[i]);
    out << '\n';
  }
}

void write_surface_csv(const fs::path& path, const CriterionSurface& s) {
  auto out = open_out(path);
  out << "r1,r2,value\n";
  for (std::size_t r1 = 1; r1 <= s.r1_max; ++r1) {
    for (std::size_t r2 = 1; r2 <= s.r2_max; ++r2) {
      out << r1 << ',' << r2 << ',' << format_double(s.value(r1, r2)) << '\n';
    }
  }
}

void write_spectrogram(const fs::path& csv_path, const TFR& tfr) {
  {
    auto out = open_out(csv_path);
    for (std::size_t n = 0; n < tfr.n_frames; ++n) {
      const auto row = tfr.frame(n);
      for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << format_double(std::abs(row[j]));
      out << '\n';
    }
  }
  fs::path axis = csv_path;
  axis.replace_extension(".json");
  write_json(axis, Json{{"rows", tfr.n_frames},
                        {"columns", tfr.n_bins},
                        {"fs", tfr.fs},
                        {"time_step_s", 1.0 / tfr.fs},
                        {"first_bin", tfr.first_bin},
                        {"bin_hz", tfr.bin_hz()},
                        {"freq_hz_first", tfr.freq_hz(0)},
                        {"freq_hz_last", tfr.freq_hz(tfr.n_bins - 1)},
                        {"window_sigma", tfr.window.sigma},
                        {"window_half_length", tfr.window.half_length},
                        {"values", "magnitude"}});
}

void write_bench_csv(const fs::path& path, const BenchReport& report) {
  auto out = open_out(path);
  out << "condition,criterion,seed,r_star,snr_out\n";
  for (const auto& r : report.rows) {
    out << r.condition << ',' << r.method << ',' << r.seed << ',' << r.r_star << ','
        << format_double(r.snr_out) << '\n';
  }
}

Json bench_summary(const BenchReport& report) {
  std::map<std::pair<std::string, std::string>, std::vector<double>> snr;
  std::map<std::pair<std::string, std::string>, std::map<std::string, std::size_t>> orders;
  for (const auto& r : report.rows) {
    snr[{r.condition, r.method}].push_back(r.snr_out);
    if (!r.r_star.empty()) ++orders[{r.condition, r.method}][r.r_star];
  }
  Json cells = Json::array();
  for (auto& [key, v] : snr) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    const double median = v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
    Json cell{{"condition", key.first}, {"method", key.second}, {"count", v.size()},
              {"median_snr_out", median}};
    if (auto it = orders.find(key); it != orders.end()) cell["r_star_counts"] = it->second;
    cells.push_back(std::move(cell));
  }
  return Json{{"name", report.name},
              {"seed", report.seed},
              {"parameters", report.parameters},
              {"failures", report.failures},
              {"rows", report.rows.size()},
              {"cells", std::move(cells)}};
}

Json to_json(const PipelineConfig& cfg) {
  std::string codes;
  for (Criterion c : cfg.criteria) {
    if (!codes.empty()) codes += ',';
    codes += criterion_code(c);
  }
  Json j{{"sigma", cfg.sigma},
         {"trunc_eps", cfg.trunc_eps},
         {"renyi_sigma_grid", cfg.renyi_sigma_grid},
         {"renyi_alpha", cfg.renyi_alpha},
         {"renyi_frame_stride", cfg.renyi_frame_stride},
         {"use_deshape", cfg.use_deshape},
         {"gamma", cfg.gamma},
         {"lambda", cfg.ridge.lambda},
         {"mu", cfg.ridge.mu},
         {"max_jump", cfg.ridge.max_jump},
         {"delta_bins", cfg.delta_bins},
         {"harmonic_guard", cfg.harmonic_guard},
         {"adaptive_band", cfg.adaptive_band},
         {"criteria", codes},
         {"c_set", cfg.c_set},
         {"fixed_orders", cfg.fixed_orders},
         {"seed", cfg.seed}};
  j["f_range"] = cfg.f_range ? Json{cfg.f_range->lo, cfg.f_range->hi} : Json(nullptr);
  j["fixed_h"] = cfg.fixed_h ? Json(*cfg.fixed_h) : Json(nullptr);
  j["r_max"] = cfg.r_max_override ? Json(*cfg.r_max_override) : Json(nullptr);
  return j;
}

void apply_json(const Json& j, PipelineConfig& cfg) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "sigma") cfg.sigma = v.get<double>();
      else if (key == "trunc_eps") cfg.trunc_eps = v.get<double>();
      else if (key == "renyi_sigma_grid") cfg.renyi_sigma_grid = v.get<std::vector<double>>();
      else if (key == "renyi_alpha") cfg.renyi_alpha = v.get<double>();
      else if (key == "renyi_frame_stride") cfg.renyi_frame_stride = v.get<std::size_t>();
      else if (key == "use_deshape") cfg.use_deshape = v.get<bool>();
      else if (key == "gamma") cfg.gamma = v.get<double>();
      else if (key == "lambda") cfg.ridge.lambda = v.get<double>();
      else if (key == "mu") cfg.ridge.mu = v.get<double>();
      else if (key == "max_jump") cfg.ridge.max_jump = v.get<std::size_t>();
      else if (key == "delta_bins") cfg.delta_bins = v.get<std::size_t>();
      else if (key == "harmonic_guard") cfg.harmonic_guard = v.get<bool>();
      else if (key == "adaptive_band") cfg.adaptive_band = v.get<bool>();
      else if (key == "criteria") {
        std::string list;
        if (v.is_string()) {
          list = v.get<std::string>();
        } else {
          for (const auto& c : v.get<std::vector<std::string>>()) list += (list.empty() ? "" : ",") + c;
        }
        cfg.criteria = list.empty() ? std::vector<Criterion>{} : parse_criteria(list);
      } else if (key == "c_set") cfg.c_set = v.get<std::vector<double>>();
      else if (key == "fixed_orders") cfg.fixed_orders = v.get<std::vector<std::size_t>>();
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "f_range") {
        if (v.is_null()) {
          cfg.f_range.reset();
        } else {
          const auto r = v.get<std::vector<double>>();
          if (r.size() != 2) throw std::invalid_argument("config: f_range needs [lo, hi]");
          cfg.f_range = FrequencyRange{r[0], r[1]};
        }
      } else if (key == "fixed_h") {
        cfg.fixed_h = v.is_null() ? std::nullopt : std::optional<std::size_t>(v.get<std::size_t>());
      } else if (key == "r_max") {
        cfg.r_max_override = v.is_null() ? std::nullopt : std::optional<std::size_t>(v.get<std::size_t>());
      } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
      }
    }
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
}

void write_json(const fs::path& path, const Json& j) {
  auto out = open_out(path);
  out << std::setw(2) << j << '\n';
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace anh::io
