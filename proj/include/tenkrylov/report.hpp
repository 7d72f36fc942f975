#ifndef TENKRYLOV_REPORT_HPP
#define TENKRYLOV_REPORT_HPP

#include "tenkrylov/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tenkrylov {

enum class Termination { converged, breakdown, max_rank };

const char* to_string(Termination t);

struct StepRecord {
    int step = 0;  // strictly increasing across the run, 1-based
    int mode = 0;  // which mode grew (1..3); 0 when not mode-specific
    std::array<Index, 3> sizes{0, 0, 0};  // basis sizes after the step
    double err_estimate = 0.0;
    double nrm = 0.0;
    std::optional<double> true_error;
    long tenvecs = 0;  // cumulative tenvec count at the step
    double ms = 0.0;   // wall time since run start
};

/// Per-run record: step history, final ranks, tenvec accounting, timing and
/// termination reasons. tenvec_count always equals the reading of a
/// CountingSource wrapped around the same run.
struct RunReport {
    std::string algorithm;
    std::vector<StepRecord> steps;
    std::array<Index, 3> final_ranks{0, 0, 0};
    long tenvec_count = 0;
    double wall_time_ms = 0.0;
    Termination termination = Termination::converged;
    std::array<Termination, 3> mode_termination{Termination::converged,
                                                Termination::converged,
                                                Termination::converged};
    int breakdown_mode = 0;  // valid when termination == breakdown
    int breakdown_step = 0;
    std::string estimator;  // which err estimator the run used
};

}  // namespace tenkrylov

#endif
