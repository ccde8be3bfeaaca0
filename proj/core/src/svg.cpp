#include "genreforge/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace genreforge::svg {
namespace {

// Ten distinguishable colours, one per genre.
constexpr std::array<const char*, kGenreCount> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void open(std::ostringstream& os, int w, int h, std::string_view title) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" viewBox=\"0 0 " << w << ' ' << h << "\" font-family=\"sans-serif\">\n"
     << "<title>" << escape(title) << "</title>\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << escape(title)
     << "</text>\n";
}

void config_comment(std::ostringstream& os, std::string_view config_json) {
  if (!config_json.empty()) os << "<!-- config\n" << comment_safe(config_json) << "\n-->\n";
}

}  // namespace

std::string comment_safe(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '-' && !out.empty() && out.back() == '-') out += ' ';
    out += c;
  }
  if (!out.empty() && out.back() == '-') out += ' ';
  return out;
}

std::string confusion_heatmap(const eval::ConfusionMatrix& m, std::string_view title,
                              std::string_view config_json) {
  constexpr int cell = 40;
  constexpr int left = 90;
  constexpr int top = 90;
  const int size = cell * static_cast<int>(kGenreCount);
  std::ostringstream os;
  open(os, left + size + 30, top + size + 40, title);
  config_comment(os, config_json);

  os << "<!-- data: rows = true genre, columns = predicted genre\ntrue";
  for (auto name : kGenreNames) os << ',' << name;
  os << '\n';
  for (std::size_t t = 0; t < kGenreCount; ++t) {
    os << kGenreNames[t];
    for (std::size_t p = 0; p < kGenreCount; ++p) os << ',' << m.counts[t][p];
    os << '\n';
  }
  os << "-->\n";

  for (std::size_t t = 0; t < kGenreCount; ++t) {
    const double support = static_cast<double>(m.row_sum(t));
    for (std::size_t p = 0; p < kGenreCount; ++p) {
      const double share = support > 0 ? static_cast<double>(m.counts[t][p]) / support : 0.0;
      const int shade = static_cast<int>(std::lround(255.0 * (1.0 - share)));
      const int x = left + cell * static_cast<int>(p);
      const int y = top + cell * static_cast<int>(t);
      os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
         << "\" fill=\"rgb(" << shade << ',' << shade << ",255)\" stroke=\"#ccc\"/>\n";
      os << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4
         << "\" text-anchor=\"middle\" font-size=\"11\" fill=\"" << (share > 0.5 ? "white" : "black") << "\">"
         << m.counts[t][p] << "</text>\n";
    }
    os << "<text x=\"" << left - 6 << "\" y=\"" << top + cell * static_cast<int>(t) + cell / 2 + 4
       << "\" text-anchor=\"end\" font-size=\"11\">" << kGenreNames[t] << "</text>\n";
    const int cx = left + cell * static_cast<int>(t) + cell / 2;
    os << "<text x=\"" << cx << "\" y=\"" << top - 6 << "\" font-size=\"11\" transform=\"rotate(-45 " << cx
       << ' ' << top - 6 << ")\">" << kGenreNames[t] << "</text>\n";
  }
  os << "<text x=\"" << left + size / 2 << "\" y=\"" << top + size + 25
     << "\" text-anchor=\"middle\" font-size=\"12\">predicted</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string pca_scatter(const dataset::FeatureTable& table, const eval::PcaModel& pca,
                        std::string_view title, std::string_view config_json) {
  constexpr int w = 720;
  constexpr int h = 560;
  constexpr int left = 60;
  constexpr int top = 50;
  constexpr int plot_w = 500;
  constexpr int plot_h = 450;

  std::vector<std::array<double, 2>> points;
  points.reserve(table.size());
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto p = pca.project(table[i].values);
    points.push_back({p[0], p.size() > 1 ? p[1] : 0.0});
    if (i == 0) {
      xmin = xmax = points.back()[0];
      ymin = ymax = points.back()[1];
    }
    xmin = std::min(xmin, points.back()[0]);
    xmax = std::max(xmax, points.back()[0]);
    ymin = std::min(ymin, points.back()[1]);
    ymax = std::max(ymax, points.back()[1]);
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * plot_w; };
  auto sy = [&](double y) { return top + plot_h - (y - ymin) / (ymax - ymin) * plot_h; };

  std::ostringstream os;
  open(os, w, h, title);
  config_comment(os, config_json);
  os << "<!-- explained_variance";
  for (double v : pca.explained_variance) os << ',' << num(v);
  os << "\ntotal_variance," << num(pca.total_variance) << "\n-->\n";
  os << "<!-- data\nsource_id,genre,pc1,pc2\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    os << comment_safe(table[i].source_id) << ',' << genre_name(table[i].label) << ',' << num(points[i][0])
       << ',' << num(points[i][1]) << '\n';
  }
  os << "-->\n";

  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<g class=\"points\">\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    os << "<circle cx=\"" << num(sx(points[i][0])) << "\" cy=\"" << num(sy(points[i][1]))
       << "\" r=\"3\" fill=\"" << kPalette[static_cast<std::size_t>(table[i].label)]
       << "\" fill-opacity=\"0.7\"/>\n";
  }
  os << "</g>\n<g class=\"legend\">\n";
  for (std::size_t g = 0; g < kGenreCount; ++g) {
    const int y = top + 10 + 20 * static_cast<int>(g);
    os << "<g class=\"legend-entry\"><circle cx=\"" << left + plot_w + 25 << "\" cy=\"" << y
       << "\" r=\"5\" fill=\"" << kPalette[g] << "\"/><text x=\"" << left + plot_w + 35 << "\" y=\"" << y + 4
       << "\" font-size=\"12\">" << kGenreNames[g] << "</text></g>\n";
  }
  os << "</g>\n";
  os << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << top + plot_h + 35
     << "\" text-anchor=\"middle\" font-size=\"12\">PC1</text>\n";
  os << "<text x=\"20\" y=\"" << top + plot_h / 2 << "\" font-size=\"12\" transform=\"rotate(-90 20 "
     << top + plot_h / 2 << ")\" text-anchor=\"middle\">PC2</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string accuracy_vs_snr(const eval::ExperimentReport& report, std::string_view title) {
  constexpr int w = 720;
  constexpr int h = 480;
  constexpr int left = 60;
  constexpr int top = 50;
  constexpr int plot_w = 480;
  constexpr int plot_h = 360;

  // series key "<model> <noise>" -> snr -> accuracy
  std::map<std::string, std::map<double, double>> series;
  std::map<std::string, double> clean;
  std::vector<std::string> model_order;
  double smin = 0, smax = 0;
  bool any = false;
  for (const auto& c : report.cells) {
    if (std::find(model_order.begin(), model_order.end(), c.model) == model_order.end()) {
      model_order.push_back(c.model);
    }
    if (!c.noise) {
      clean[c.model] = c.accuracy;
      continue;
    }
    series[c.model + " " + std::string(noise::to_string(c.noise->kind))][c.noise->snr_db] = c.accuracy;
    if (!any) smin = smax = c.noise->snr_db;
    smin = std::min(smin, c.noise->snr_db);
    smax = std::max(smax, c.noise->snr_db);
    any = true;
  }
  if (smax == smin) {
    smin -= 1.0;
    smax += 1.0;
  }
  auto sx = [&](double s) { return left + (s - smin) / (smax - smin) * plot_w; };
  auto sy = [&](double a) { return top + plot_h - a * plot_h; };

  std::ostringstream os;
  open(os, w, h, title);
  config_comment(os, report.config_json);
  os << "<!-- data\nmodel,condition,accuracy,macro_f1\n";
  for (const auto& c : report.cells) {
    os << c.model << ',' << c.condition << ',' << num(c.accuracy) << ',' << num(c.macro_f1) << '\n';
  }
  os << "-->\n";

  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double a = 0.25 * i;
    os << "<text x=\"" << left - 6 << "\" y=\"" << num(sy(a) + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
       << num(a) << "</text>\n";
  }
  os << "<text x=\"" << left << "\" y=\"" << top + plot_h + 16 << "\" font-size=\"11\">" << num(smin)
     << "</text>\n<text x=\"" << left + plot_w << "\" y=\"" << top + plot_h + 16
     << "\" text-anchor=\"end\" font-size=\"11\">" << num(smax) << "</text>\n";
  os << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << top + plot_h + 35
     << "\" text-anchor=\"middle\" font-size=\"12\">SNR (dB)</text>\n";

  std::size_t idx = 0;
  int legend_y = top + 10;
  for (const auto& [key, points] : series) {
    const char* colour = kPalette[idx % kPalette.size()];
    const bool pink = key.size() >= 4 && key.compare(key.size() - 4, 4, "pink") == 0;
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\""
       << (pink ? " stroke-dasharray=\"2,3\"" : "") << " points=\"";
    bool first = true;
    for (const auto& [snr, acc] : points) {
      os << (first ? "" : " ") << num(sx(snr)) << ',' << num(sy(acc));
      first = false;
    }
    os << "\"/>\n";
    for (const auto& [snr, acc] : points) {
      os << "<circle cx=\"" << num(sx(snr)) << "\" cy=\"" << num(sy(acc)) << "\" r=\"3\" fill=\"" << colour
         << "\"/>\n";
    }
    os << "<text x=\"" << left + plot_w + 15 << "\" y=\"" << legend_y << "\" font-size=\"12\" fill=\"" << colour
       << "\">" << escape(key) << "</text>\n";
    legend_y += 18;
    ++idx;
  }
  for (const auto& model : model_order) {
    auto it = clean.find(model);
    if (it == clean.end()) continue;
    os << "<line x1=\"" << left << "\" x2=\"" << left + plot_w << "\" y1=\"" << num(sy(it->second))
       << "\" y2=\"" << num(sy(it->second)) << "\" stroke=\"#888\" stroke-dasharray=\"6,4\"/>\n";
    os << "<text x=\"" << left + plot_w + 15 << "\" y=\"" << legend_y << "\" font-size=\"12\" fill=\"#888\">"
       << escape(model) << " clean " << num(it->second) << "</text>\n";
    legend_y += 18;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace genreforge::svg
