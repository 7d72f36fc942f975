#ifndef TENKRYLOV_EXPERIMENT_HPP
#define TENKRYLOV_EXPERIMENT_HPP

#include "tenkrylov/io.hpp"
#include "tenkrylov/report.hpp"
#include "tenkrylov/types.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tenkrylov {

struct ExperimentConfig {
    // exactly one of input_path / generator
    std::string input_path;
    TensorFormat format = TensorFormat::dense;
    std::string generator;  // exact-tucker | two-slice | decaying-spectrum | hadamard-square
    Index gen_n = 10;
    std::array<Index, 3> gen_ranks{2, 2, 2};
    double gen_rate = 0.5;
    std::string gen_tucker_path;  // operand file for hadamard-square

    std::string algo = "wlncr";  // mkr opt-mkr wsvd wlnc wsvdr wlncr hosvd tucker-als
    double eps = 1e-8;
    double tol = 1e-12;
    std::array<int, 3> r_max{5, 5, 5};
    int p_als = 3;
    int p_pow = 3;
    std::uint64_t seed = 0;
    bool oracle = true;
    std::string out_prefix;  // writes <prefix>.csv and <prefix>.json when set
    std::size_t mem_budget = 200000000;  // max entries densified for the oracle
    std::string start = "random";        // or "e1"
};

struct ExperimentResult {
    RunReport report;
    TuckerTensor tucker;
    bool oracle_used = false;
    std::optional<double> final_true_error;  // relative Frobenius residual
    std::vector<std::string> warnings;
};

/// Builds the source (file or generator), runs the chosen algorithm over a
/// counting wrapper, fills per-step true errors from the densified oracle
/// when it fits the memory budget, and writes the CSV/JSON artifacts when an
/// output prefix is set. CSV columns: rank, err_estimate, true_error,
/// tenvecs, ms (true_error is the relative Frobenius residual of the
/// optimal-core approximation in the step's basis prefixes; empty when the
/// oracle is off).
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Exit code mapping: converged 0, breakdown 2, max_rank 3.
int exit_code_for(Termination t);

std::unique_ptr<TenvecSource> build_source(const ExperimentConfig& cfg);

}  // namespace tenkrylov

#endif
