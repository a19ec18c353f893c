#include "elicit/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "elicit/errors.hpp"

namespace elicit {

namespace {

void require_valid(const Trajectory& t) {
  const auto report = validate_trajectory(t);
  if (!report.ok()) throw AnalysisError(report.violations.front().message);
}

Frame lerp(const Frame& a, const Frame& b, double w) {
  Frame out;
  out.joints.resize(a.joints.size());
  for (std::size_t j = 0; j < a.joints.size(); ++j) {
    for (std::size_t c = 0; c < 3; ++c) {
      out.joints[j][c] = a.joints[j][c] + w * (b.joints[j][c] - a.joints[j][c]);
    }
  }
  return out;
}

}  // namespace

Trajectory preprocess(const Trajectory& in, const PreprocessConfig& cfg) {
  require_valid(in);
  if (!(cfg.target_fps > 0.0) || !std::isfinite(cfg.target_fps)) {
    throw AnalysisError("target frame rate must be positive");
  }
  if (cfg.vertical_axis > 2) throw AnalysisError("vertical axis must be 0, 1 or 2");
  if (cfg.translate_to_origin && cfg.reference_joint >= in.joint_count()) {
    throw AnalysisError("reference joint " + std::to_string(cfg.reference_joint) +
                        " out of range for " + std::to_string(in.joint_count()) +
                        " joints");
  }

  const std::size_t n = in.frames.size();
  const double duration = static_cast<double>(n - 1) / in.frame_rate;
  const auto steps = static_cast<std::size_t>(std::floor(duration * cfg.target_fps + 1e-9));
  const std::size_t count = std::max<std::size_t>(steps + 1, 2);

  Trajectory out;
  out.participant = in.participant;
  out.referent = in.referent;
  out.trial = in.trial;
  out.frame_rate = cfg.target_fps;
  out.frames.reserve(count);

  // Interpolation runs in input-index space.
  const double stride = static_cast<double>(n - 1) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) {
    if (k == count - 1) {
      out.frames.push_back(in.frames.back());
      continue;
    }
    const double pos = static_cast<double>(k) * stride;
    const auto i = std::min(static_cast<std::size_t>(pos), n - 2);
    const double w = pos - static_cast<double>(i);
    out.frames.push_back(w == 0.0 ? in.frames[i] : lerp(in.frames[i], in.frames[i + 1], w));
  }

  if (cfg.translate_to_origin) {
    for (auto& frame : out.frames) {
      const Point3 origin = frame.joints[cfg.reference_joint];
      for (auto& p : frame.joints) {
        for (std::size_t c = 0; c < 3; ++c) p[c] -= origin[c];
      }
    }
  }

  if (cfg.normalize_height) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& frame : out.frames) {
      for (const auto& p : frame.joints) {
        lo = std::min(lo, p[cfg.vertical_axis]);
        hi = std::max(hi, p[cfg.vertical_axis]);
      }
    }
    const double extent = hi - lo;
    if (!(extent > 0.0)) {
      throw AnalysisError("degenerate skeleton: zero vertical extent for '" +
                          in.participant + "' / '" + in.referent + "'");
    }
    const double scale = 1.0 / extent;
    for (auto& frame : out.frames) {
      for (auto& p : frame.joints) {
        for (auto& c : p) c *= scale;
      }
    }
  }
  return out;
}

double frame_distance(const Frame& a, const Frame& b) {
  double sum = 0.0;
  for (std::size_t j = 0; j < a.joints.size(); ++j) {
    const double dx = a.joints[j][0] - b.joints[j][0];
    const double dy = a.joints[j][1] - b.joints[j][1];
    const double dz = a.joints[j][2] - b.joints[j][2];
    sum += std::sqrt(dx * dx + dy * dy + dz * dz);
  }
  return sum;
}

double dtw_distance(const Trajectory& a, const Trajectory& b, const DtwOptions& opts) {
  if (a.frames.empty() || b.frames.empty()) {
    throw AnalysisError("dtw: trajectories must have at least one frame");
  }
  if (a.joint_count() != b.joint_count()) {
    throw AnalysisError("dtw: joint count mismatch (" + std::to_string(a.joint_count()) +
                        " vs " + std::to_string(b.joint_count()) + ")");
  }
  for (const auto* t : {&a, &b}) {
    for (const auto& f : t->frames) {
      if (f.joints.size() != a.joint_count()) {
        throw AnalysisError("dtw: inconsistent joint count within a trajectory");
      }
    }
  }

  const std::size_t n = a.frames.size();
  const std::size_t m = b.frames.size();
  constexpr double inf = std::numeric_limits<double>::infinity();

  struct Cell {
    double cost;
    std::size_t length;
  };
  // Equal-cost predecessors: the shorter path wins.
  auto better = [](const Cell& x, const Cell& y) {
    return x.cost < y.cost || (x.cost == y.cost && x.length < y.length);
  };

  std::vector<Cell> prev(m + 1, Cell{inf, 0});
  std::vector<Cell> curr(m + 1, Cell{inf, 0});
  prev[0] = Cell{0.0, 0};
  for (std::size_t i = 1; i <= n; ++i) {
    curr[0] = Cell{inf, 0};
    for (std::size_t j = 1; j <= m; ++j) {
      Cell best = prev[j - 1];
      if (better(prev[j], best)) best = prev[j];
      if (better(curr[j - 1], best)) best = curr[j - 1];
      curr[j] = Cell{best.cost + frame_distance(a.frames[i - 1], b.frames[j - 1]),
                     best.length + 1};
    }
    std::swap(prev, curr);
  }
  const Cell& end = prev[m];
  return opts.normalize_by_path_length ? end.cost / static_cast<double>(end.length)
                                       : end.cost;
}

}  // namespace elicit
