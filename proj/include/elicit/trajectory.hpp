#pragma once

#include <cstddef>

#include "elicit/core.hpp"

namespace elicit {

struct PreprocessConfig {
  double target_fps = 25.0;
  bool normalize_height = true;
  bool translate_to_origin = true;
  std::size_t reference_joint = 0;
  // Coordinate index treated as "up" when measuring skeleton height
  // (1 = y, the usual depth-camera convention).
  std::size_t vertical_axis = 1;
};

// Resamples to cfg.target_fps by linear interpolation, translates every frame
// so the reference joint sits at the origin, then scales uniformly so the
// vertical extent over the whole trajectory is 1.
//
// The output keeps both the first and the last input frame; its frame count
// is floor(duration * target_fps) + 1 (at least 2), spread evenly over the
// original duration, and its frame_rate is reported as target_fps.
//
// Throws AnalysisError for invalid input or a zero vertical extent
// ("degenerate skeleton").
Trajectory preprocess(const Trajectory& trajectory, const PreprocessConfig& cfg = {});

struct DtwOptions {
  // Divide the accumulated cost by the number of cells on the warping path.
  bool normalize_by_path_length = false;
};

// Per-frame cost between two poses: sum over joints of Euclidean distance.
double frame_distance(const Frame& a, const Frame& b);

// Classic DTW with steps (1,0), (0,1), (1,1). Symmetric and zero on
// identical inputs; not a metric (no triangle inequality).
double dtw_distance(const Trajectory& a, const Trajectory& b, const DtwOptions& opts = {});

}  // namespace elicit
