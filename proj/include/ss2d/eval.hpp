#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ss2d/dataset.hpp"
#include "ss2d/world_sim.hpp"

namespace ss2d::eval {

using dataset::DatasetRecord;

double position_error(Vec2 pred, Vec2 truth);

/// Rows are pos_count 0..max_pos_count (larger counts land in the last row); columns are
/// half-open distance bins [k*bin, (k+1)*bin) up to max_dist.
struct GridSpec {
  int max_pos_count = 30;
  double dist_bin = 2.0;
  double max_dist = 40.0;

  int rows() const { return max_pos_count + 1; }
  int cols() const;
  bool operator==(const GridSpec&) const = default;
};

struct ErrorGrid {
  GridSpec spec;
  std::string estimator;
  std::vector<double> sum;
  std::vector<long long> count;
  /// Samples at or beyond max_dist.
  long long discarded = 0;

  ErrorGrid() = default;
  ErrorGrid(GridSpec s, std::string name);

  int row_of(int pos_count) const;
  /// -1 when the distance falls outside the grid.
  int col_of(double dist) const;
  std::size_t cell(int row, int col) const { return static_cast<std::size_t>(row * spec.cols() + col); }

  void add(int pos_count, double dist, double error);
  void merge(const ErrorGrid& other);
  double mean(int row, int col) const;
  long long total() const;
};

/// Batch estimator over window-end record indices.
using Estimator = std::function<std::vector<Vec2>(const std::vector<DatasetRecord>&, std::span<const std::size_t>)>;

class EstimatorRegistry {
 public:
  void add(const std::string& name, Estimator fn);
  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  const Estimator& get(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, Estimator> entries_;
};

/// last_seen (raw quantized sighting), helios (interval-midpoint sighting) and
/// extrapolate (decay-aware dead reckoning from the helios track).
EstimatorRegistry classical_registry(const sim::KinematicsConfig& kin);

ErrorGrid build_error_grid(const std::string& estimator, const EstimatorRegistry& registry,
                           const std::vector<DatasetRecord>& records, const std::vector<std::size_t>& windows,
                           const GridSpec& spec, int jobs = 1);

/// Root-mean-square error over samples with pos_count >= min_pos_count.
double rmse(const std::vector<Vec2>& preds, const std::vector<DatasetRecord>& records,
            std::span<const std::size_t> windows, int min_pos_count = 0);

enum class Winner { A, B, Insufficient };

struct ComparisonGrid {
  GridSpec spec;
  std::string name_a;
  std::string name_b;
  long long min_samples = 20;
  std::vector<Winner> winner;
  std::vector<long long> count_a;
  std::vector<long long> count_b;
  std::vector<double> mean_a;
  std::vector<double> mean_b;
};

/// Lower mean wins, ties go to A; cells where either side has fewer than
/// `min_samples` are Insufficient.
ComparisonGrid compare_grids(const ErrorGrid& a, const ErrorGrid& b, long long min_samples = 20);

struct WinShare {
  int a = 0;
  int b = 0;
  int insufficient = 0;
  double share_a() const { return a + b > 0 ? static_cast<double>(a) / (a + b) : 0.0; }
};

WinShare count_winners(const ComparisonGrid& cmp, int min_pos_count = 0);

void write_grid_csv(std::ostream& os, const ErrorGrid& grid, const std::string& header_comment);
ErrorGrid read_grid_csv(std::istream& is);
void write_comparison_csv(std::ostream& os, const ComparisonGrid& cmp, const std::string& header_comment);

/// Mean-error heatmap; cells below `min_samples` are black.
void render_grid_svg(std::ostream& os, const ErrorGrid& grid, long long min_samples, const std::string& provenance);
/// Winner-per-cell heatmap; insufficient cells are black.
void render_comparison_svg(std::ostream& os, const ComparisonGrid& cmp, const std::string& provenance);

/// Fill colour used for an estimator in comparison maps.
std::string estimator_color(const std::string& name);

}  // namespace ss2d::eval
