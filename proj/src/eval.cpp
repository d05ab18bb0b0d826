#include "ss2d/eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <thread>

#include "ss2d/csv.hpp"
#include "ss2d/denoise.hpp"
#include "ss2d/error.hpp"

namespace ss2d::eval {

namespace {

constexpr std::size_t kChunk = 4096;

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string rgb_hex(double r, double g, double b) {
  char buf[8];
  auto c = [](double v) { return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", c(r), c(g), c(b));
  return buf;
}

/// Blue-to-yellow ramp, t in [0, 1].
std::string ramp_color(double t) {
  static constexpr std::array<std::array<double, 3>, 5> stops{{{0.267, 0.005, 0.329},
                                                               {0.229, 0.322, 0.546},
                                                               {0.128, 0.567, 0.551},
                                                               {0.369, 0.789, 0.383},
                                                               {0.993, 0.906, 0.144}}};
  t = std::clamp(t, 0.0, 1.0) * static_cast<double>(stops.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(t), stops.size() - 2);
  const double f = t - static_cast<double>(i);
  const auto& a = stops[i];
  const auto& b = stops[i + 1];
  return rgb_hex(a[0] + (b[0] - a[0]) * f, a[1] + (b[1] - a[1]) * f, a[2] + (b[2] - a[2]) * f);
}

struct Layout {
  static constexpr int cell_w = 28;
  static constexpr int cell_h = 14;
  static constexpr int left = 70;
  static constexpr int top = 40;
  static constexpr int legend = 190;
  static constexpr int bottom = 60;
  int rows;
  int cols;

  int width() const { return left + cols * cell_w + legend; }
  int height() const { return top + rows * cell_h + bottom; }
  int x(int col) const { return left + col * cell_w; }
  int y(int row) const { return top + (rows - 1 - row) * cell_h; }
};

void svg_open(std::ostream& os, const Layout& l, const std::string& title, const std::string& provenance) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << l.width() << "\" height=\"" << l.height()
     << "\" viewBox=\"0 0 " << l.width() << ' ' << l.height() << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  if (!provenance.empty()) os << "<!-- " << xml_escape(provenance) << " -->\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << l.left << "\" y=\"22\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
}

void svg_axes(std::ostream& os, const Layout& l, const GridSpec& spec) {
  const int x0 = l.x(0);
  const int y1 = l.top + l.rows * Layout::cell_h;
  os << "<rect x=\"" << x0 << "\" y=\"" << l.top << "\" width=\"" << l.cols * Layout::cell_w << "\" height=\""
     << l.rows * Layout::cell_h << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int c = 0; c <= l.cols; c += 2) {
    os << "<text x=\"" << l.x(c) << "\" y=\"" << y1 + 14 << "\" text-anchor=\"middle\">"
       << fixed(c * spec.dist_bin, 0) << "</text>\n";
  }
  for (int r = 0; r < l.rows; r += 5) {
    os << "<text x=\"" << x0 - 6 << "\" y=\"" << l.y(r) + Layout::cell_h - 3 << "\" text-anchor=\"end\">" << r
       << (r == spec.max_pos_count ? "+" : "") << "</text>\n";
  }
  os << "<text x=\"" << x0 + l.cols * Layout::cell_w / 2 << "\" y=\"" << y1 + 36
     << "\" text-anchor=\"middle\">distance (m)</text>\n";
  const int cy = l.top + l.rows * Layout::cell_h / 2;
  os << "<text x=\"20\" y=\"" << cy << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " << cy
     << ")\">pos_count</text>\n";
}

void svg_cell(std::ostream& os, const Layout& l, int row, int col, const std::string& fill) {
  os << "<rect x=\"" << l.x(col) << "\" y=\"" << l.y(row) << "\" width=\"" << Layout::cell_w << "\" height=\""
     << Layout::cell_h << "\" fill=\"" << fill << "\"/>\n";
}

void svg_swatch(std::ostream& os, int x, int y, const std::string& fill, const std::string& label) {
  os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"14\" height=\"14\" fill=\"" << fill
     << "\" stroke=\"#333\"/>\n";
  os << "<text x=\"" << x + 20 << "\" y=\"" << y + 11 << "\">" << xml_escape(label) << "</text>\n";
}

}  // namespace

double position_error(Vec2 pred, Vec2 truth) { return distance(pred, truth); }

int GridSpec::cols() const { return static_cast<int>(std::lround(max_dist / dist_bin)); }

ErrorGrid::ErrorGrid(GridSpec s, std::string name) : spec(s), estimator(std::move(name)) {
  if (spec.max_pos_count < 0 || !(spec.dist_bin > 0) || !(spec.max_dist > 0) || spec.cols() < 1)
    fail(ErrorCategory::Validation, "invalid grid binning");
  const auto n = static_cast<std::size_t>(spec.rows() * spec.cols());
  sum.assign(n, 0.0);
  count.assign(n, 0);
}

int ErrorGrid::row_of(int pos_count) const { return std::clamp(pos_count, 0, spec.max_pos_count); }

int ErrorGrid::col_of(double dist) const {
  if (!(dist >= 0) || dist >= spec.max_dist) return -1;
  return std::min(static_cast<int>(std::floor(dist / spec.dist_bin)), spec.cols() - 1);
}

void ErrorGrid::add(int pos_count, double dist, double error) {
  const int col = col_of(dist);
  if (col < 0) {
    ++discarded;
    return;
  }
  const std::size_t c = cell(row_of(pos_count), col);
  sum[c] += error;
  ++count[c];
}

void ErrorGrid::merge(const ErrorGrid& other) {
  if (!(other.spec == spec)) fail(ErrorCategory::Validation, "cannot merge grids with different binning");
  for (std::size_t i = 0; i < sum.size(); ++i) {
    sum[i] += other.sum[i];
    count[i] += other.count[i];
  }
  discarded += other.discarded;
}

double ErrorGrid::mean(int row, int col) const {
  const std::size_t c = cell(row, col);
  return count[c] > 0 ? sum[c] / static_cast<double>(count[c]) : 0.0;
}

long long ErrorGrid::total() const {
  long long n = 0;
  for (auto c : count) n += c;
  return n;
}

void EstimatorRegistry::add(const std::string& name, Estimator fn) { entries_[name] = std::move(fn); }

const Estimator& EstimatorRegistry::get(const std::string& name) const {
  const auto it = entries_.find(name);
  if (it == entries_.end()) {
    std::string known;
    for (const auto& n : names()) known += (known.empty() ? "" : ", ") + n;
    fail(ErrorCategory::Validation, "unknown estimator '" + name + "' (registered: " + known + ")");
  }
  return it->second;
}

std::vector<std::string> EstimatorRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) out.push_back(k);
  return out;
}

EstimatorRegistry classical_registry(const sim::KinematicsConfig& kin) {
  EstimatorRegistry reg;
  reg.add("last_seen", [](const std::vector<DatasetRecord>& recs, std::span<const std::size_t> idx) {
    std::vector<Vec2> out;
    out.reserve(idx.size());
    for (auto i : idx) {
      sensor::Track t{recs[i].naive_pos, {}, recs[i].pos_count, true};
      out.push_back(denoise::last_seen_estimate(t));
    }
    return out;
  });
  reg.add("helios", [](const std::vector<DatasetRecord>& recs, std::span<const std::size_t> idx) {
    std::vector<Vec2> out;
    out.reserve(idx.size());
    for (auto i : idx) {
      sensor::Track t{recs[i].est_pos, recs[i].est_vel, recs[i].pos_count, true};
      out.push_back(denoise::last_seen_estimate(t));
    }
    return out;
  });
  const double decay = kin.player_decay;
  reg.add("extrapolate", [decay](const std::vector<DatasetRecord>& recs, std::span<const std::size_t> idx) {
    std::vector<Vec2> out;
    out.reserve(idx.size());
    for (auto i : idx) {
      sensor::Track t{recs[i].est_pos, recs[i].est_vel, recs[i].pos_count, true};
      out.push_back(denoise::extrapolate_estimate(t, decay));
    }
    return out;
  });
  return reg;
}

ErrorGrid build_error_grid(const std::string& estimator, const EstimatorRegistry& registry,
                           const std::vector<DatasetRecord>& records, const std::vector<std::size_t>& windows,
                           const GridSpec& spec, int jobs) {
  const Estimator& fn = registry.get(estimator);
  const std::size_t n_chunks = (windows.size() + kChunk - 1) / kChunk;
  std::vector<ErrorGrid> partial(n_chunks, ErrorGrid(spec, estimator));

  auto run_chunk = [&](std::size_t k) {
    const std::size_t start = k * kChunk;
    const auto idx = std::span(windows).subspan(start, std::min(kChunk, windows.size() - start));
    const auto preds = fn(records, idx);
    if (preds.size() != idx.size()) fail(ErrorCategory::Validation, estimator + ": wrong number of predictions");
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const auto& r = records[idx[i]];
      partial[k].add(r.pos_count, distance(r.observer_pos, r.true_pos), position_error(preds[i], r.true_pos));
    }
  };

  const int threads = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(n_chunks, 1)));
  if (threads == 1) {
    for (std::size_t k = 0; k < n_chunks; ++k) run_chunk(k);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t k = static_cast<std::size_t>(t); k < n_chunks; k += static_cast<std::size_t>(threads))
            run_chunk(k);
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  ErrorGrid grid(spec, estimator);
  for (const auto& p : partial) grid.merge(p);
  return grid;
}

double rmse(const std::vector<Vec2>& preds, const std::vector<DatasetRecord>& records,
            std::span<const std::size_t> windows, int min_pos_count) {
  if (preds.size() != windows.size()) fail(ErrorCategory::Validation, "rmse: prediction count mismatch");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto& r = records[windows[i]];
    if (r.pos_count < min_pos_count) continue;
    const double e = position_error(preds[i], r.true_pos);
    sum += e * e;
    ++n;
  }
  if (n == 0) fail(ErrorCategory::Validation, "rmse: no samples pass the pos_count filter");
  return std::sqrt(sum / static_cast<double>(n));
}

ComparisonGrid compare_grids(const ErrorGrid& a, const ErrorGrid& b, long long min_samples) {
  if (!(a.spec == b.spec)) fail(ErrorCategory::Validation, "compare_grids: binning mismatch");
  ComparisonGrid cmp;
  cmp.spec = a.spec;
  cmp.name_a = a.estimator;
  cmp.name_b = b.estimator;
  cmp.min_samples = min_samples;
  const std::size_t n = a.sum.size();
  cmp.winner.resize(n);
  cmp.count_a = a.count;
  cmp.count_b = b.count;
  cmp.mean_a.resize(n);
  cmp.mean_b.resize(n);
  for (int r = 0; r < a.spec.rows(); ++r) {
    for (int c = 0; c < a.spec.cols(); ++c) {
      const std::size_t k = a.cell(r, c);
      cmp.mean_a[k] = a.mean(r, c);
      cmp.mean_b[k] = b.mean(r, c);
      if (a.count[k] < min_samples || b.count[k] < min_samples || a.count[k] == 0 || b.count[k] == 0) {
        cmp.winner[k] = Winner::Insufficient;
      } else {
        cmp.winner[k] = cmp.mean_a[k] <= cmp.mean_b[k] ? Winner::A : Winner::B;
      }
    }
  }
  return cmp;
}

WinShare count_winners(const ComparisonGrid& cmp, int min_pos_count) {
  WinShare s;
  for (int r = std::max(min_pos_count, 0); r < cmp.spec.rows(); ++r) {
    for (int c = 0; c < cmp.spec.cols(); ++c) {
      switch (cmp.winner[static_cast<std::size_t>(r * cmp.spec.cols() + c)]) {
        case Winner::A: ++s.a; break;
        case Winner::B: ++s.b; break;
        case Winner::Insufficient: ++s.insufficient; break;
      }
    }
  }
  return s;
}

void write_grid_csv(std::ostream& os, const ErrorGrid& grid, const std::string& header_comment) {
  os << "# estimator=" << grid.estimator << " max_pos_count=" << grid.spec.max_pos_count
     << " dist_bin=" << csv::fmt(grid.spec.dist_bin) << " max_dist=" << csv::fmt(grid.spec.max_dist)
     << " discarded=" << grid.discarded;
  if (!header_comment.empty()) os << ' ' << header_comment;
  os << "\npos_count,dist_lo,dist_hi,count,sum,mean\n";
  for (int r = 0; r < grid.spec.rows(); ++r) {
    for (int c = 0; c < grid.spec.cols(); ++c) {
      const std::size_t k = grid.cell(r, c);
      os << r << ',' << csv::fmt(c * grid.spec.dist_bin) << ',' << csv::fmt((c + 1) * grid.spec.dist_bin) << ','
         << grid.count[k] << ',' << csv::fmt(grid.sum[k]) << ',';
      if (grid.count[k] > 0) os << csv::fmt(grid.mean(r, c));
      os << '\n';
    }
  }
}

ErrorGrid read_grid_csv(std::istream& is) {
  const auto header = csv::read_comment_header(is);
  GridSpec spec;
  std::string name = "grid";
  long long discarded = 0;
  for (const auto& [k, v] : header) {
    if (k == "estimator") name = v;
    if (k == "max_pos_count") spec.max_pos_count = static_cast<int>(csv::to_int(v));
    if (k == "dist_bin") spec.dist_bin = csv::to_double(v);
    if (k == "max_dist") spec.max_dist = csv::to_double(v);
    if (k == "discarded") discarded = csv::to_int(v);
  }
  ErrorGrid grid(spec, name);
  grid.discarded = discarded;
  std::string line;
  if (!csv::next_row(is, line) || line != "pos_count,dist_lo,dist_hi,count,sum,mean")
    fail(ErrorCategory::Format, "grid csv: unexpected header row");
  while (csv::next_row(is, line)) {
    const auto f = csv::split(line);
    if (f.size() != 6) fail(ErrorCategory::Format, "grid csv: expected 6 columns: " + line);
    const int r = static_cast<int>(csv::to_int(f[0]));
    const int c = grid.col_of(csv::to_double(f[1]));
    if (r < 0 || r >= spec.rows() || c < 0) fail(ErrorCategory::Format, "grid csv: cell outside binning: " + line);
    grid.count[grid.cell(r, c)] = csv::to_int(f[3]);
    grid.sum[grid.cell(r, c)] = csv::to_double(f[4]);
  }
  return grid;
}

void write_comparison_csv(std::ostream& os, const ComparisonGrid& cmp, const std::string& header_comment) {
  os << "# a=" << cmp.name_a << " b=" << cmp.name_b << " min_samples=" << cmp.min_samples;
  if (!header_comment.empty()) os << ' ' << header_comment;
  os << "\npos_count,dist_lo,dist_hi,winner,count_a,count_b,mean_a,mean_b\n";
  for (int r = 0; r < cmp.spec.rows(); ++r) {
    for (int c = 0; c < cmp.spec.cols(); ++c) {
      const auto k = static_cast<std::size_t>(r * cmp.spec.cols() + c);
      const char* w = cmp.winner[k] == Winner::A ? cmp.name_a.c_str()
                      : cmp.winner[k] == Winner::B ? cmp.name_b.c_str()
                                                   : "insufficient";
      os << r << ',' << csv::fmt(c * cmp.spec.dist_bin) << ',' << csv::fmt((c + 1) * cmp.spec.dist_bin) << ',' << w
         << ',' << cmp.count_a[k] << ',' << cmp.count_b[k] << ',';
      if (cmp.count_a[k] > 0) os << csv::fmt(cmp.mean_a[k]);
      os << ',';
      if (cmp.count_b[k] > 0) os << csv::fmt(cmp.mean_b[k]);
      os << '\n';
    }
  }
}

std::string estimator_color(const std::string& name) {
  const std::string base = name.substr(0, name.find(':'));
  if (base == "dnn") return "#2ca02c";
  if (base == "lstm") return "#d62728";
  if (base == "last_seen") return "#1f77b4";
  if (base == "helios") return "#ff7f0e";
  if (base == "extrapolate") return "#9467bd";
  return "#7f7f7f";
}

void render_grid_svg(std::ostream& os, const ErrorGrid& grid, long long min_samples, const std::string& provenance) {
  const Layout l{grid.spec.rows(), grid.spec.cols()};
  double hi = 0.0;
  for (int r = 0; r < l.rows; ++r)
    for (int c = 0; c < l.cols; ++c)
      if (grid.count[grid.cell(r, c)] >= std::max(min_samples, 1LL)) hi = std::max(hi, grid.mean(r, c));

  svg_open(os, l, "mean position error: " + grid.estimator, provenance);
  for (int r = 0; r < l.rows; ++r) {
    for (int c = 0; c < l.cols; ++c) {
      const bool ok = grid.count[grid.cell(r, c)] >= std::max(min_samples, 1LL);
      svg_cell(os, l, r, c, ok ? ramp_color(hi > 0 ? grid.mean(r, c) / hi : 0.0) : "#000000");
    }
  }
  svg_axes(os, l, grid.spec);
  const int lx = l.x(l.cols) + 20;
  for (int i = 0; i < 10; ++i) {
    os << "<rect x=\"" << lx << "\" y=\"" << l.top + (9 - i) * 18 << "\" width=\"14\" height=\"18\" fill=\""
       << ramp_color((i + 0.5) / 10.0) << "\"/>\n";
  }
  os << "<text x=\"" << lx + 20 << "\" y=\"" << l.top + 10 << "\">" << fixed(hi, 2) << " m</text>\n";
  os << "<text x=\"" << lx + 20 << "\" y=\"" << l.top + 178 << "\">0.00 m</text>\n";
  svg_swatch(os, lx, l.top + 200, "#000000", "insufficient data");
  os << "</svg>\n";
}

void render_comparison_svg(std::ostream& os, const ComparisonGrid& cmp, const std::string& provenance) {
  const Layout l{cmp.spec.rows(), cmp.spec.cols()};
  const std::string color_a = estimator_color(cmp.name_a);
  std::string color_b = estimator_color(cmp.name_b);
  if (color_b == color_a) color_b = "#bcbd22";
  svg_open(os, l, cmp.name_a + " vs " + cmp.name_b, provenance);
  for (int r = 0; r < l.rows; ++r) {
    for (int c = 0; c < l.cols; ++c) {
      const Winner w = cmp.winner[static_cast<std::size_t>(r * l.cols + c)];
      svg_cell(os, l, r, c, w == Winner::A ? color_a : w == Winner::B ? color_b : "#000000");
    }
  }
  svg_axes(os, l, cmp.spec);
  const int lx = l.x(l.cols) + 20;
  svg_swatch(os, lx, l.top, color_a, cmp.name_a + " better");
  svg_swatch(os, lx, l.top + 22, color_b, cmp.name_b + " better");
  svg_swatch(os, lx, l.top + 44, "#000000", "insufficient data");
  os << "</svg>\n";
}

}  // namespace ss2d::eval
