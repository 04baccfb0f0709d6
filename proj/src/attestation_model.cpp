#include "attestgame/attestation_model.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <set>
#include <sstream>

#include "attestgame/errors.hpp"
#include "attestgame/random.hpp"

namespace attestgame {

namespace {

void check_counts(const MemoryLayout& layout, std::uint64_t modified,
                  std::uint64_t covered) {
  if (layout.total_blocks == 0) throw DomainError("memory layout has no blocks");
  if (modified > layout.total_blocks)
    throw DomainError("modified blocks (" + std::to_string(modified) +
                      ") exceed total blocks (" +
                      std::to_string(layout.total_blocks) + ")");
  if (covered > layout.total_blocks)
    throw DomainError("covered blocks (" + std::to_string(covered) +
                      ") exceed total blocks (" +
                      std::to_string(layout.total_blocks) + ")");
}

struct Fit {
  double slope;
  double intercept;
  double residual;
};

Fit least_squares(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mean_x) * (x[i] - mean_x);
    sxy += (x[i] - mean_x) * (y[i] - mean_y);
  }
  const double slope = sxy / sxx;
  const double intercept = mean_y - slope * mean_x;
  double sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (slope * x[i] + intercept);
    sq += r * r;
  }
  return {slope, intercept, std::sqrt(sq / n)};
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

double checksum_detection_probability(const MemoryLayout& layout,
                                      std::uint64_t modified_blocks,
                                      std::uint64_t covered_blocks) {
  check_counts(layout, modified_blocks, covered_blocks);
  const std::uint64_t n = layout.total_blocks;
  if (modified_blocks == 0 || covered_blocks == 0) return 0.0;
  if (covered_blocks > n - modified_blocks) return 1.0;

  // C(N-k, b) / C(N, b) = C(N-b, k) / C(N, k); iterate over the shorter side.
  // Draw the short side one element at a time: after i misses, the next draw
  // hits with probability long / (N - i). Accumulating the hit probability
  // directly avoids the cancellation in 1 - product.
  const std::uint64_t steps = std::min(modified_blocks, covered_blocks);
  const auto other = static_cast<double>(std::max(modified_blocks, covered_blocks));
  double hit = 0.0;
  for (std::uint64_t i = 0; i < steps; ++i) {
    const double q = other / static_cast<double>(n - i);
    if (q >= 1.0) return 1.0;
    hit += (1.0 - hit) * q;
  }
  return std::min(hit, 1.0);
}

double simulate_attestation(const MemoryLayout& layout,
                            std::uint64_t modified_blocks,
                            std::uint64_t covered_blocks, std::uint64_t trials,
                            std::uint64_t seed) {
  check_counts(layout, modified_blocks, covered_blocks);
  if (trials == 0) throw DomainError("simulation needs at least one trial");
  if (modified_blocks == 0) return 0.0;

  const std::uint64_t n = layout.total_blocks;
  // Blocks [0, k) are the modified ones. Partial Fisher-Yates draws the
  // covered subset; swaps are undone after each trial so the permutation
  // buffer never needs a full reset.
  std::vector<std::uint64_t> blocks(n);
  for (std::uint64_t i = 0; i < n; ++i) blocks[i] = i;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> swaps;
  swaps.reserve(covered_blocks);

  Rng rng(seed);
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    for (std::uint64_t i = 0; i < covered_blocks; ++i) {
      const std::uint64_t j = i + rng.below(n - i);
      std::swap(blocks[i], blocks[j]);
      swaps.emplace_back(i, j);
      if (blocks[i] < modified_blocks) {
        ++hits;
        break;
      }
    }
    for (auto it = swaps.rbegin(); it != swaps.rend(); ++it)
      std::swap(blocks[it->first], blocks[it->second]);
    swaps.clear();
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

double CoverageCalibration::detection_rate(double coverage) const {
  return std::clamp(detection_slope * coverage + detection_intercept, 0.0, 1.0);
}

double CoverageCalibration::runtime_ms(double coverage) const {
  return std::max(0.0, cost_slope * coverage + cost_intercept);
}

CoverageCalibration default_calibration() {
  CoverageCalibration c;
  c.synthetic = true;
  return c;
}

CoverageCalibration calibrate(std::span<const CalibrationPoint> measurements) {
  std::set<double> distinct;
  for (const auto& m : measurements) distinct.insert(m.coverage);
  if (distinct.size() < 2)
    throw DegenerateFit("calibration needs at least two distinct coverage values, got " +
                        std::to_string(distinct.size()));

  std::vector<double> x, detection, runtime;
  for (const auto& m : measurements) {
    x.push_back(m.coverage);
    detection.push_back(m.detection_rate);
    runtime.push_back(m.runtime_ms);
  }
  const Fit d = least_squares(x, detection);
  const Fit r = least_squares(x, runtime);

  CoverageCalibration c;
  c.detection_slope = d.slope;
  c.detection_intercept = d.intercept;
  c.detection_residual = d.residual;
  c.cost_slope = r.slope;
  c.cost_intercept = r.intercept;
  c.cost_residual = r.residual;
  c.synthetic = false;
  return c;
}

std::vector<CalibrationPoint> read_calibration_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  std::vector<CalibrationPoint> points;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (!header) {
      std::string compact;
      for (char ch : line)
        if (ch != ' ' && ch != '\t') compact += ch;
      if (compact != "coverage,detection_rate,runtime_ms")
        throw ParseError("calibration line " + std::to_string(line_no) +
                         ": expected header coverage,detection_rate,runtime_ms");
      header = true;
      continue;
    }
    std::istringstream row(line);
    std::string cell;
    double values[3];
    int column = 0;
    static constexpr const char* kNames[] = {"coverage", "detection_rate", "runtime_ms"};
    while (std::getline(row, cell, ',')) {
      if (column >= 3)
        throw ParseError("calibration line " + std::to_string(line_no) +
                         ": too many columns");
      cell = trim(cell);
      std::size_t used = 0;
      try {
        values[column] = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (cell.empty() || used != cell.size() || !std::isfinite(values[column]))
        throw ParseError("calibration line " + std::to_string(line_no) + ": field " +
                         kNames[column] + " is not a number: '" + cell + "'");
      ++column;
    }
    if (column != 3)
      throw ParseError("calibration line " + std::to_string(line_no) +
                       ": expected 3 columns, got " + std::to_string(column));
    if (values[0] < 0.0 || values[0] > 1.0)
      throw ParseError("calibration line " + std::to_string(line_no) +
                       ": coverage must be a fraction in [0, 1]");
    points.push_back({values[0], values[1], values[2]});
  }
  if (!header) throw ParseError("calibration file is empty");
  return points;
}

AttestationMethod method_from_coverage(double coverage,
                                       const CoverageCalibration& calibration,
                                       double cost_scale, std::string id) {
  if (!(coverage >= 0.0 && coverage <= 1.0))
    throw DomainError("coverage must lie in [0, 1]");
  return {std::move(id), calibration.detection_rate(coverage),
          calibration.runtime_ms(coverage) * cost_scale};
}

}  // namespace attestgame
