/*
 * Copyright 2026 The CAPCE Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "capce/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "capce/error.h"
#include "capce/scm_bench.h"

namespace capce {
namespace {

using nlohmann::json;

std::vector<std::string> AllLabels(const BenchmarkResults& results) {
  std::vector<std::string> labels;
  for (const auto& c : results.cells) {
    for (const auto& l : c.coefficient_labels) {
      if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
    }
  }
  return labels;
}

std::vector<std::string> CellFields(const CellSummary& c,
                                    const std::vector<std::string>& labels, int decimals) {
  const bool any = c.succeeded > 0;
  std::vector<std::string> f = {
      c.setting, std::to_string(c.n), c.estimator, std::to_string(c.succeeded),
      std::to_string(c.failed),
      any ? FormatFixed(c.mean_mse, decimals) : "",
      any ? FormatFixed(c.sd_mse, decimals) : "",
      any ? FormatFixed(c.median_mse, decimals) : ""};
  for (const auto& l : labels) {
    auto it = std::find(c.coefficient_labels.begin(), c.coefficient_labels.end(), l);
    if (it == c.coefficient_labels.end() || !any) {
      f.push_back("");
      f.push_back("");
      continue;
    }
    const auto k = static_cast<Eigen::Index>(it - c.coefficient_labels.begin());
    f.push_back(FormatFixed(c.coefficient_mean(k), decimals));
    f.push_back(FormatFixed(c.coefficient_sd(k), decimals));
  }
  return f;
}

std::vector<std::string> CellHeader(const std::vector<std::string>& labels) {
  std::vector<std::string> h = {"setting", "n", "estimator", "succeeded", "failed",
                                "mean_mse", "sd_mse", "median_mse"};
  for (const auto& l : labels) {
    h.push_back("coef_" + l + "_mean");
    h.push_back("coef_" + l + "_sd");
  }
  return h;
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string CsvRow(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += CsvField(fields[i]);
  }
  return out + "\n";
}

std::string MdRow(const std::vector<std::string>& fields) {
  std::string out = "|";
  for (const auto& f : fields) out += " " + f + " |";
  return out + "\n";
}

std::string MdRule(size_t n) {
  std::string out = "|";
  for (size_t i = 0; i < n; ++i) out += "---|";
  return out + "\n";
}

json NumberOrNull(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json VectorJson(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(NumberOrNull(v(i)));
  return a;
}

json MatrixJson(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(VectorJson(m.row(i).transpose()));
  return a;
}

std::string WTag(double w) {
  std::string s = FormatFixed(w, 2);
  for (auto& c : s) {
    if (c == '.') c = 'p';
    if (c == '-') c = 'm';
  }
  return s;
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) Fail(ErrorCode::kIoError, "cannot create directory '" + dir + "': " + ec.message());
}

}  // namespace

std::string FormatFixed(double value, int decimals) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  std::string s(buf);
  if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string BenchmarkCsv(const BenchmarkResults& results, int decimals) {
  const auto labels = AllLabels(results);
  std::string out = CsvRow(CellHeader(labels));
  for (const auto& c : results.cells) out += CsvRow(CellFields(c, labels, decimals));
  return out;
}

std::string BenchmarkMarkdown(const BenchmarkResults& results, int decimals) {
  const auto labels = AllLabels(results);
  const auto header = CellHeader(labels);
  std::string out = "## Benchmark cells\n\n" + MdRow(header) + MdRule(header.size());
  for (const auto& c : results.cells) out += MdRow(CellFields(c, labels, decimals));

  std::vector<std::string> estimators;
  for (const auto& c : results.cells) {
    if (std::find(estimators.begin(), estimators.end(), c.estimator) == estimators.end()) {
      estimators.push_back(c.estimator);
    }
  }
  std::vector<std::string> pivot_header = {"setting", "n"};
  pivot_header.insert(pivot_header.end(), estimators.begin(), estimators.end());
  out += "\n## Mean grid MSE\n\n" + MdRow(pivot_header) + MdRule(pivot_header.size());
  std::vector<std::pair<std::string, Eigen::Index>> keys;
  for (const auto& c : results.cells) {
    std::pair<std::string, Eigen::Index> k{c.setting, c.n};
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  }
  for (const auto& [setting, n] : keys) {
    std::vector<std::string> row = {setting, std::to_string(n)};
    for (const auto& e : estimators) {
      std::string v;
      for (const auto& c : results.cells) {
        if (c.setting == setting && c.n == n && c.estimator == e && c.succeeded > 0) {
          v = FormatFixed(c.mean_mse, decimals);
        }
      }
      row.push_back(v);
    }
    out += MdRow(row);
  }
  return out;
}

std::string ReplicationsCsv(const BenchmarkResults& results, int decimals) {
  std::string out = CsvRow({"setting", "n", "replication", "seed", "estimator", "ok",
                            "mse", "zeta", "error"});
  for (const auto& r : results.records) {
    out += CsvRow({r.setting, std::to_string(r.n), std::to_string(r.replication),
                   std::to_string(r.seed), r.estimator, r.ok ? "1" : "0",
                   r.ok ? FormatFixed(r.mse, decimals) : "",
                   r.ok ? FormatFixed(r.zeta, decimals) : "", r.error});
  }
  return out;
}

std::string CurveSvg(const std::string& title, const std::vector<double>& x,
                     const std::vector<CurveSeries>& series,
                     const std::optional<std::vector<double>>& oracle) {
  const double width = 640, height = 420, left = 60, right = 170, top = 40, bottom = 50;
  double ylo = std::numeric_limits<double>::infinity();
  double yhi = -ylo;
  auto extend = [&](const std::vector<double>& v) {
    for (double y : v) {
      if (std::isfinite(y)) {
        ylo = std::min(ylo, y);
        yhi = std::max(yhi, y);
      }
    }
  };
  for (const auto& s : series) {
    extend(s.y);
    extend(s.lo);
    extend(s.hi);
  }
  if (oracle) extend(*oracle);
  if (!std::isfinite(ylo)) {
    ylo = 0;
    yhi = 1;
  }
  if (yhi - ylo < 1e-12) {
    ylo -= 1;
    yhi += 1;
  }
  const double xlo = x.empty() ? 0 : x.front();
  const double xhi = x.empty() ? 1 : (x.back() > x.front() ? x.back() : x.front() + 1);
  auto px = [&](double v) { return left + (v - xlo) / (xhi - xlo) * (width - left - right); };
  auto py = [&](double v) { return top + (yhi - v) / (yhi - ylo) * (height - top - bottom); };
  auto fmt = [](double v) { return FormatFixed(v, 2); };
  auto polyline = [&](const std::vector<double>& y) {
    std::string pts;
    for (size_t i = 0; i < x.size() && i < y.size(); ++i) {
      if (!std::isfinite(y[i])) continue;
      pts += fmt(px(x[i])) + "," + fmt(py(y[i])) + " ";
    }
    return pts;
  };
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
    << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << left << "\" y=\"22\" font-size=\"14\">" << title << "</text>\n";
  s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width - left - right
    << "\" height=\"" << height - top - bottom
    << "\" fill=\"none\" stroke=\"#888\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double yv = ylo + (yhi - ylo) * t / 4.0;
    const double xv = xlo + (xhi - xlo) * t / 4.0;
    s << "<text x=\"" << left - 6 << "\" y=\"" << fmt(py(yv) + 4)
      << "\" text-anchor=\"end\">" << FormatFixed(yv, 1) << "</text>\n";
    s << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << height - bottom + 16
      << "\" text-anchor=\"middle\">" << FormatFixed(xv, 1) << "</text>\n";
  }
  s << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 12
    << "\" text-anchor=\"middle\">x</text>\n";
  double legend_y = top + 10;
  for (size_t k = 0; k < series.size(); ++k) {
    const char* color = kColors[k % 8];
    const auto& ser = series[k];
    if (!ser.lo.empty() && ser.lo.size() == ser.hi.size()) {
      std::string pts = polyline(ser.hi);
      std::vector<double> rev(ser.lo.rbegin(), ser.lo.rend());
      std::vector<double> xs(x.rbegin(), x.rend());
      for (size_t i = 0; i < xs.size() && i < rev.size(); ++i) {
        if (std::isfinite(rev[i])) pts += fmt(px(xs[i])) + "," + fmt(py(rev[i])) + " ";
      }
      s << "<polygon points=\"" << pts << "\" fill=\"" << color
        << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
    }
    s << "<polyline points=\"" << polyline(ser.y) << "\" fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>\n";
    s << "<line x1=\"" << width - right + 10 << "\" y1=\"" << legend_y << "\" x2=\""
      << width - right + 30 << "\" y2=\"" << legend_y << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << width - right + 35 << "\" y=\"" << legend_y + 4 << "\">" << ser.name
      << "</text>\n";
    legend_y += 18;
  }
  if (oracle) {
    s << "<polyline class=\"oracle\" points=\"" << polyline(*oracle)
      << "\" fill=\"none\" stroke=\"black\" stroke-dasharray=\"6,4\" stroke-width=\"1.5\"/>\n";
    s << "<line x1=\"" << width - right + 10 << "\" y1=\"" << legend_y << "\" x2=\""
      << width - right + 30 << "\" y2=\"" << legend_y
      << "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
    s << "<text x=\"" << width - right + 35 << "\" y=\"" << legend_y + 4
      << "\">true CAPCE</text>\n";
    legend_y += 18;
  }
  if (std::any_of(series.begin(), series.end(), [](const auto& c) { return !c.lo.empty(); })) {
    s << "<text x=\"" << width - right + 10 << "\" y=\"" << legend_y + 4
      << "\" font-size=\"10\">bands: replication 5-95%</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string BootstrapCoefficientsCsv(const BootstrapReport& report, int decimals) {
  std::string out = CsvRow({"term", "min", "q1", "median", "q3", "max", "mean", "sd"});
  for (const auto& c : report.coefficients) {
    out += CsvRow({c.label, FormatFixed(c.min, decimals), FormatFixed(c.q1, decimals),
                   FormatFixed(c.median, decimals), FormatFixed(c.q3, decimals),
                   FormatFixed(c.max, decimals), FormatFixed(c.mean, decimals),
                   FormatFixed(c.sd, decimals)});
  }
  return out;
}

std::string BootstrapTableCsv(const BootstrapReport& report, int decimals) {
  std::vector<std::string> header = {"x"};
  for (double w : report.table_w) header.push_back("w=" + FormatFixed(w, decimals));
  std::string out = CsvRow(header);
  for (size_t i = 0; i < report.table_x.size(); ++i) {
    std::vector<std::string> row = {FormatFixed(report.table_x[i], decimals)};
    for (size_t j = 0; j < report.table_w.size(); ++j) {
      row.push_back(FormatFixed(report.predicted_mean(static_cast<Eigen::Index>(i),
                                                      static_cast<Eigen::Index>(j)),
                                decimals));
    }
    out += CsvRow(row);
  }
  return out;
}

std::string BootstrapMarkdown(const BootstrapReport& report, int coef_decimals,
                              int table_decimals) {
  std::ostringstream s;
  s << "## Bootstrap: " << report.estimator << "\n\n";
  s << "Resamples: " << report.succeeded << " of " << report.requested << " succeeded ("
    << (report.joint_resampling ? "joint" : "independent") << " row resampling), zeta = "
    << FormatFixed(report.hyper.zeta, 6) << "\n\n";
  std::vector<std::string> header = {"statistic"};
  for (const auto& c : report.coefficients) header.push_back(c.label);
  if (!report.coefficients.empty()) {
    s << MdRow(header) << MdRule(header.size());
    const char* names[] = {"Min.", "1st Qu.", "Median", "3rd Qu.", "Max.", "Mean", "SD"};
    for (int k = 0; k < 7; ++k) {
      std::vector<std::string> row = {names[k]};
      for (const auto& c : report.coefficients) {
        const double v[] = {c.min, c.q1, c.median, c.q3, c.max, c.mean, c.sd};
        row.push_back(FormatFixed(v[k], coef_decimals));
      }
      s << MdRow(row);
    }
  }
  s << "\n## Predicted CAPCE (resample mean)\n\n";
  std::vector<std::string> th = {"x \\ w"};
  for (double w : report.table_w) th.push_back(FormatFixed(w, table_decimals));
  s << MdRow(th) << MdRule(th.size());
  for (size_t i = 0; i < report.table_x.size(); ++i) {
    std::vector<std::string> row = {FormatFixed(report.table_x[i], table_decimals)};
    for (size_t j = 0; j < report.table_w.size(); ++j) {
      row.push_back(FormatFixed(report.predicted_mean(static_cast<Eigen::Index>(i),
                                                      static_cast<Eigen::Index>(j)),
                                table_decimals));
    }
    s << MdRow(row);
  }
  return s.str();
}

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIoError, "cannot write '" + path + "'");
  out << text;
  if (!out) Fail(ErrorCode::kIoError, "write to '" + path + "' failed");
}

void EmitBenchmarkReport(const BenchmarkResults& results, const std::string& out_dir) {
  EnsureDir(out_dir);
  const std::filesystem::path dir(out_dir);
  WriteTextFile((dir / "results.csv").string(), BenchmarkCsv(results));
  WriteTextFile((dir / "results.md").string(), BenchmarkMarkdown(results));
  WriteTextFile((dir / "replications.csv").string(), ReplicationsCsv(results));

  std::vector<std::pair<std::string, Eigen::Index>> keys;
  for (const auto& c : results.cells) {
    std::pair<std::string, Eigen::Index> k{c.setting, c.n};
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  }
  for (const auto& [setting, n] : keys) {
    const ScmSetting scm = ScmSetting::FromName(setting);
    for (size_t k = 0; k < results.curve_w.size(); ++k) {
      const double w = results.curve_w[k];
      std::vector<CurveSeries> series;
      for (const auto& c : results.cells) {
        if (c.setting != setting || c.n != n || c.succeeded == 0) continue;
        const auto row = static_cast<Eigen::Index>(k);
        auto to_vec = [&](const Eigen::MatrixXd& m) {
          std::vector<double> v(static_cast<size_t>(m.cols()));
          for (Eigen::Index j = 0; j < m.cols(); ++j) v[static_cast<size_t>(j)] = m(row, j);
          return v;
        };
        series.push_back({c.estimator, to_vec(c.curve_mean), to_vec(c.curve_lo),
                          to_vec(c.curve_hi)});
      }
      std::vector<double> truth;
      for (double x : results.curve_x) truth.push_back(TrueCapce(scm, x, w));
      const std::string title = "setting " + setting + ", N = " + std::to_string(n) +
                                ", w = " + FormatFixed(w, 2);
      WriteTextFile((dir / ("curves_" + setting + "_" + std::to_string(n) + "_w" + WTag(w) +
                            ".svg")).string(),
                    CurveSvg(title, results.curve_x, series, truth));
    }
  }

  json j;
  j["curve_w"] = results.curve_w;
  j["cells"] = json::array();
  for (const auto& c : results.cells) {
    json cell = {{"setting", c.setting},     {"n", c.n},
                 {"estimator", c.estimator}, {"succeeded", c.succeeded},
                 {"failed", c.failed},       {"mean_mse", NumberOrNull(c.mean_mse)},
                 {"sd_mse", NumberOrNull(c.sd_mse)},
                 {"median_mse", NumberOrNull(c.median_mse)},
                 {"coefficient_labels", c.coefficient_labels},
                 {"coefficient_mean", VectorJson(c.coefficient_mean)},
                 {"coefficient_sd", VectorJson(c.coefficient_sd)}};
    j["cells"].push_back(cell);
  }
  j["failures"] = json::array();
  for (const auto& r : results.records) {
    if (!r.ok) {
      j["failures"].push_back({{"setting", r.setting}, {"n", r.n},
                               {"replication", r.replication}, {"estimator", r.estimator},
                               {"error", r.error}});
    }
  }
  WriteTextFile((dir / "report.json").string(), j.dump(2) + "\n");
}

void EmitBootstrapReport(const BootstrapReport& report, const std::string& out_dir) {
  EnsureDir(out_dir);
  const std::filesystem::path dir(out_dir);
  WriteTextFile((dir / "bootstrap_coefficients.csv").string(),
                BootstrapCoefficientsCsv(report));
  WriteTextFile((dir / "bootstrap_table.csv").string(), BootstrapTableCsv(report));
  WriteTextFile((dir / "results.md").string(), BootstrapMarkdown(report));
  json j;
  j["estimator"] = report.estimator;
  j["requested"] = report.requested;
  j["succeeded"] = report.succeeded;
  j["failed"] = report.failed;
  j["failure_samples"] = report.failure_samples;
  j["joint_resampling"] = report.joint_resampling;
  j["zeta"] = report.hyper.zeta;
  j["coefficients"] = json::array();
  for (const auto& c : report.coefficients) {
    j["coefficients"].push_back({{"term", c.label}, {"min", c.min}, {"q1", c.q1},
                                 {"median", c.median}, {"q3", c.q3}, {"max", c.max},
                                 {"mean", c.mean}, {"sd", c.sd}});
  }
  j["table_x"] = report.table_x;
  j["table_w"] = report.table_w;
  j["predicted_mean"] = MatrixJson(report.predicted_mean);
  j["predicted_sd"] = MatrixJson(report.predicted_sd);
  WriteTextFile((dir / "report.json").string(), j.dump(2) + "\n");
}

}  // namespace capce
