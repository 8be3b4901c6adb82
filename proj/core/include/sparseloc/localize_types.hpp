#pragma once

#include <string>
#include <vector>

namespace sparseloc {

struct SupportEntry {
  int rp = 0;            ///< RP index (0-based)
  int orientation = 0;   ///< orientation index; -1 when not applicable
  double coefficient = 0.0;
};

/// A single position fix with its supporting evidence and diagnostics.
struct PositionEstimate {
  double x = 0.0;
  double y = 0.0;
  std::vector<SupportEntry> support;
  std::vector<int> outlier_aps; ///< original AP indices flagged by the solve
  std::string method;
  bool low_confidence = false;

  // Solve diagnostics (sparse methods only).
  double objective = 0.0;
  int iterations = 0;
  bool converged = true;
  double kkt_residual = 0.0;
  double residual_norm2 = 0.0;
  int roi_size = 0;
  std::vector<int> selected_aps;
};

}  // namespace sparseloc
