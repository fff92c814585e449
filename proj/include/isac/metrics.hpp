#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "isac/gmphd.hpp"
#include "isac/scenario.hpp"

namespace isac {

/// Cost assigned to pairs outside the association gates; any total cost of
/// real matches stays far below one sentinel.
inline constexpr double kGateSentinel = 1e9;

/// Minimum-cost assignment of a square cost matrix (shortest augmenting
/// path with potentials, O(n^3)). Returns the column matched to each row.
std::vector<int> hungarian(const Eigen::MatrixXd& cost);

struct AssociationGate {
  double range_gate_m = 5.0;
  double speed_gate_mps = 5.0;
};

struct AssociationResult {
  std::vector<std::pair<int, int>> matches;  // (truth index, estimate index)
  std::vector<int> unmatched_truths;
  std::vector<int> unmatched_estimates;
};

/// One-to-one truth/estimate association. A pair is admissible when both
/// the range and speed errors are inside the gates; admissible cost is the
/// sum of the gate-normalized absolute errors. The assignment maximizes
/// the number of admissible matches, then minimizes their cost.
AssociationResult associate_frame(const std::vector<ObjectState>& truths,
                                  const std::vector<Estimate>& estimates,
                                  const AssociationGate& gate = {});

/// Detection probability with an 11-frame grace window: an alive object
/// counts as detected at frame k if it was matched anywhere in the centered
/// window intersected with its lifetime. matched[k] holds the trajectory
/// indices matched at frame k.
double windowed_pd(const Scenario& scenario,
                   const std::vector<std::vector<int>>& matched,
                   int window = 11);

/// Mean count of unmatched estimates per scan.
double false_alarms_per_scan(const std::vector<int>& unmatched_counts);

/// Centered moving average of the estimate count, window clipped at the
/// sequence ends.
std::vector<double> smoothed_cardinality(const std::vector<int>& counts,
                                         int window = 51);

struct MaeResult {
  double range_m = 0.0;
  double speed_mps = 0.0;
  long matched_pairs = 0;
};

/// Mean absolute error accumulated over matched pairs.
class MaeAccumulator {
 public:
  void add(double range_err_m, double speed_err_mps) {
    sum_range_ += std::abs(range_err_m);
    sum_speed_ += std::abs(speed_err_mps);
    ++count_;
  }
  MaeResult result() const {
    if (count_ == 0) return {};
    return {sum_range_ / count_, sum_speed_ / count_, count_};
  }

 private:
  double sum_range_ = 0.0;
  double sum_speed_ = 0.0;
  long count_ = 0;
};

struct MetricsReport {
  std::string scenario;
  std::string mode;
  double mae_range_m = 0.0;
  double mae_speed_mps = 0.0;
  double pd = 0.0;
  double fa_per_scan = 0.0;
  long matched_pairs = 0;
  int frames = 0;
};

}  // namespace isac
