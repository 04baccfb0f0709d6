#pragma once

// Memory-checksum attestation as a game parameter source.
//
// A pseudo-random checksum pass reads a uniformly random subset of the
// program's memory blocks; it detects a modification iff the subset hits one
// of the modified blocks. Coverage also drives running time. Linear fits of
// both against coverage turn a coverage level into an AttestationMethod.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "attestgame/game_model.hpp"

namespace attestgame {

struct MemoryLayout {
  std::uint64_t total_blocks = 1;
  std::uint64_t block_size_bytes = 500;
};

// 1 - C(N-k, b) / C(N, b) for N = total_blocks, k modified and b covered
// blocks. Throws DomainError if k or b exceeds N or the layout is empty.
double checksum_detection_probability(const MemoryLayout& layout,
                                      std::uint64_t modified_blocks,
                                      std::uint64_t covered_blocks);

// Fraction of `trials` uniformly drawn b-subsets that hit the k modified
// blocks. Deterministic in `seed`.
double simulate_attestation(const MemoryLayout& layout,
                            std::uint64_t modified_blocks,
                            std::uint64_t covered_blocks, std::uint64_t trials,
                            std::uint64_t seed);

struct CalibrationPoint {
  double coverage = 0.0;  // fraction of memory in [0, 1]
  double detection_rate = 0.0;
  double runtime_ms = 0.0;
};

struct CoverageCalibration {
  double detection_slope = 1.0;
  double detection_intercept = 0.0;
  double detection_residual = 0.0;  // RMS
  double cost_slope = 10.0;         // milliseconds per unit coverage
  double cost_intercept = 0.0;
  double cost_residual = 0.0;  // RMS
  bool synthetic = false;      // true for default_calibration()

  // Clamped to [0, 1].
  double detection_rate(double coverage) const;
  // Clamped to >= 0, in milliseconds.
  double runtime_ms(double coverage) const;
};

// Identity detection curve and 10 ms at full coverage. Not measured data.
CoverageCalibration default_calibration();

// Ordinary least squares of detection rate and running time on coverage.
// Throws DegenerateFit with fewer than two distinct coverage values.
CoverageCalibration calibrate(std::span<const CalibrationPoint> measurements);

// CSV with the header `coverage,detection_rate,runtime_ms`. Throws ParseError
// naming the line of the first malformed row.
std::vector<CalibrationPoint> read_calibration_csv(std::istream& in);

// Detection rate from the fit; cost = runtime(coverage) * cost_scale.
// Throws DomainError for coverage outside [0, 1].
AttestationMethod method_from_coverage(double coverage,
                                       const CoverageCalibration& calibration,
                                       double cost_scale,
                                       std::string id = "checksum");

}  // namespace attestgame
