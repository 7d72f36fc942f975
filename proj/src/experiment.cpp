#include "tenkrylov/experiment.hpp"

#include "tenkrylov/generators.hpp"
#include "tenkrylov/oracle.hpp"
#include "tenkrylov/rng.hpp"
#include "tenkrylov/tensor_krylov.hpp"
#include "tenkrylov/tensor_ops.hpp"
#include "tenkrylov/tensor_wedderburn.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace tenkrylov {

int exit_code_for(Termination t) {
    switch (t) {
        case Termination::converged: return 0;
        case Termination::breakdown: return 2;
        default: return 3;
    }
}

std::unique_ptr<TenvecSource> build_source(const ExperimentConfig& cfg) {
    if (!cfg.input_path.empty() && !cfg.generator.empty())
        throw std::invalid_argument("run_experiment: give either an input file or a generator");
    if (!cfg.input_path.empty()) return load_tensor(cfg.input_path, cfg.format);
    if (cfg.generator == "exact-tucker") {
        TuckerTensor t = generate_exact_tucker({cfg.gen_n, cfg.gen_n, cfg.gen_n},
                                               cfg.gen_ranks, cfg.seed);
        return std::make_unique<TuckerSource>(std::move(t));
    }
    if (cfg.generator == "two-slice")
        return std::make_unique<DenseSource>(generate_two_slice(cfg.gen_n, cfg.seed));
    if (cfg.generator == "decaying-spectrum")
        return std::make_unique<DenseSource>(
            generate_decaying_spectrum(cfg.gen_n, cfg.gen_rate, cfg.seed));
    if (cfg.generator == "hadamard-square") {
        TuckerTensor t = load_tucker(cfg.gen_tucker_path);
        TuckerTensor t2 = t;
        return std::make_unique<HadamardTuckerSource>(std::move(t), std::move(t2));
    }
    throw std::invalid_argument("run_experiment: unknown generator '" + cfg.generator + "'");
}

namespace {

Vector start_vector(const std::string& kind, Index n, std::mt19937_64& rng) {
    if (kind == "e1") {
        Vector e = Vector::Zero(n);
        e[0] = 1.0;
        return e;
    }
    return random_unit_vector(n, rng);
}

std::array<int, 3> clamp_ranks(std::array<int, 3> r, Shape3 s) {
    for (int l = 0; l < 3; ++l)
        r[static_cast<size_t>(l)] =
            static_cast<int>(std::min<Index>(r[static_cast<size_t>(l)], s[l + 1]));
    return r;
}

// Relative residual ||A - A x (P_U, P_V, P_W)||_F / ||A||_F of the
// optimal-core approximation in the given basis prefixes, by direct
// subtraction on the densified tensor (an energy difference would floor at
// sqrt(machine epsilon)).
double prefix_true_error(const DenseTensor3& dense, double dense_norm,
                         const std::array<Matrix, 3>& factors,
                         const std::array<Index, 3>& sizes) {
    if (dense_norm == 0.0) return 0.0;
    for (int l = 0; l < 3; ++l)
        if (sizes[static_cast<size_t>(l)] == 0) return 1.0;
    DenseTensor3 g = mode_multiply(dense, 1, factors[0].leftCols(sizes[0]).transpose());
    g = mode_multiply(g, 2, factors[1].leftCols(sizes[1]).transpose());
    g = mode_multiply(g, 3, factors[2].leftCols(sizes[2]).transpose());
    g = mode_multiply(g, 1, factors[0].leftCols(sizes[0]));
    g = mode_multiply(g, 2, factors[1].leftCols(sizes[1]));
    g = mode_multiply(g, 3, factors[2].leftCols(sizes[2]));
    double acc = 0.0;
    for (Index i = 0; i < dense.size(); ++i) {
        const double d = dense.data()[i] - g.data()[i];
        acc += d * d;
    }
    return std::sqrt(acc) / dense_norm;
}

void write_csv(const std::string& path, const RunReport& rep) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error(path + ": cannot open file for writing");
    std::fprintf(f, "rank,err_estimate,true_error,tenvecs,ms\n");
    for (const auto& s : rep.steps) {
        const Index rank = s.sizes[static_cast<size_t>(s.mode > 0 ? s.mode - 1 : 0)];
        std::fprintf(f, "%lld,%.17g,", static_cast<long long>(rank), s.err_estimate);
        if (s.true_error) std::fprintf(f, "%.17g", *s.true_error);
        std::fprintf(f, ",%ld,%.3f\n", s.tenvecs, s.ms);
    }
    std::fclose(f);
}

void write_json(const std::string& path, const ExperimentConfig& cfg,
                const ExperimentResult& res) {
    nlohmann::json j;
    j["algorithm"] = res.report.algorithm;
    j["config"] = {{"algo", cfg.algo},
                   {"eps", cfg.eps},
                   {"tol", cfg.tol},
                   {"rmax", cfg.r_max},
                   {"pals", cfg.p_als},
                   {"ppow", cfg.p_pow},
                   {"seed", cfg.seed},
                   {"oracle", cfg.oracle},
                   {"start", cfg.start}};
    if (!cfg.input_path.empty()) {
        j["config"]["input"] = cfg.input_path;
        j["config"]["format"] = to_string(cfg.format);
    } else {
        j["config"]["generator"] = cfg.generator;
    }
    j["final_ranks"] = res.report.final_ranks;
    j["tenvec_count"] = res.report.tenvec_count;
    j["termination"] = to_string(res.report.termination);
    j["mode_termination"] = {to_string(res.report.mode_termination[0]),
                             to_string(res.report.mode_termination[1]),
                             to_string(res.report.mode_termination[2])};
    if (res.report.termination == Termination::breakdown) {
        j["breakdown"] = {{"mode", res.report.breakdown_mode},
                          {"step", res.report.breakdown_step}};
    }
    j["estimator"] = res.report.estimator;
    j["steps"] = res.report.steps.size();
    j["wall_time_ms"] = res.report.wall_time_ms;
    j["oracle_used"] = res.oracle_used;
    if (res.final_true_error) j["final_true_error"] = *res.final_true_error;
    j["warnings"] = res.warnings;
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open file for writing");
    out << j.dump(2) << "\n";
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    const auto src_holder = build_source(cfg);
    const CountingSource src(*src_holder);
    const Shape3 shape = src.shape();
    const auto r_max = clamp_ranks(cfg.r_max, shape);
    ExperimentResult res;

    // decorrelated from the generator stream, which consumes cfg.seed itself
    const std::uint64_t algo_seed = derive_seed(cfg.seed, 1);
    auto rng = make_rng(algo_seed);

    if (cfg.algo == "mkr") {
        const Vector u1 = start_vector(cfg.start, shape.n1, rng);
        const Vector v1 = start_vector(cfg.start, shape.n2, rng);
        auto kr = mkr(src, u1, v1, *std::min_element(r_max.begin(), r_max.end()), cfg.tol);
        long tenvecs = kr.report.tenvec_count;
        res.tucker.core = compute_core(src, kr.bases[0], kr.bases[1], kr.bases[2], &tenvecs);
        kr.report.tenvec_count = tenvecs;
        for (int l = 0; l < 3; ++l) {
            res.tucker.factors[static_cast<size_t>(l)] = std::move(kr.bases[static_cast<size_t>(l)]);
            res.tucker.orthonormal[static_cast<size_t>(l)] = true;
        }
        res.report = std::move(kr.report);
    } else if (cfg.algo == "opt-mkr") {
        const Vector u1 = start_vector(cfg.start, shape.n1, rng);
        const Vector v1 = start_vector(cfg.start, shape.n2, rng);
        OptMkrConfig oc;
        oc.r_max = r_max;
        oc.tol = cfg.tol;
        oc.eps = cfg.eps;
        oc.p_als = cfg.p_als;
        oc.seed = algo_seed;
        auto kr = optimized_mkr(src, u1, v1, oc);
        long tenvecs = kr.report.tenvec_count;
        res.tucker.core = compute_core(src, kr.bases[0], kr.bases[1], kr.bases[2], &tenvecs);
        kr.report.tenvec_count = tenvecs;
        for (int l = 0; l < 3; ++l) {
            res.tucker.factors[static_cast<size_t>(l)] = std::move(kr.bases[static_cast<size_t>(l)]);
            res.tucker.orthonormal[static_cast<size_t>(l)] = true;
        }
        res.report = std::move(kr.report);
    } else if (cfg.algo == "wsvd" || cfg.algo == "wlnc" || cfg.algo == "wsvdr" ||
               cfg.algo == "wlncr") {
        ApproxConfig ac;
        ac.strategy.kind = cfg.algo == "wsvd"    ? PivotStrategy::Wsvd
                           : cfg.algo == "wlnc"  ? PivotStrategy::Wlnc
                           : cfg.algo == "wsvdr" ? PivotStrategy::WsvdR
                                                 : PivotStrategy::WlncR;
        ac.strategy.p_als = cfg.p_als;
        ac.strategy.p_pow = cfg.p_pow;
        ac.tol = cfg.tol;
        ac.eps = cfg.eps;
        ac.r_max = r_max;
        ac.seed = algo_seed;
        if (cfg.start == "e1") {
            Vector e1u = Vector::Zero(shape.n1), e1v = Vector::Zero(shape.n2),
                   e1w = Vector::Zero(shape.n3);
            e1u[0] = e1v[0] = e1w[0] = 1.0;
            ac.start_u = e1u;
            ac.start_v = e1v;
            ac.start_w = e1w;
        }
        auto ta = tucker_approximate(src, ac);
        res.tucker = std::move(ta.tucker);
        res.report = std::move(ta.report);
    } else if (cfg.algo == "hosvd") {
        if (static_cast<std::size_t>(shape.count()) > cfg.mem_budget)
            throw std::invalid_argument("hosvd: tensor exceeds the densification budget");
        const DenseTensor3 dense = src.densify();
        std::array<Index, 3> rk{r_max[0], r_max[1], r_max[2]};
        res.tucker = hosvd(dense, rk);
        res.report.algorithm = "hosvd";
        res.report.final_ranks = rk;
        res.report.termination = Termination::converged;
        res.report.estimator = "none";
    } else if (cfg.algo == "tucker-als") {
        TuckerTensor init;
        init.core = DenseTensor3(r_max[0], r_max[1], r_max[2]);
        for (int l = 0; l < 3; ++l) {
            init.factors[static_cast<size_t>(l)] =
                random_orthonormal(shape[l + 1], r_max[static_cast<size_t>(l)], rng);
            init.orthonormal[static_cast<size_t>(l)] = true;
        }
        // --pals doubles as the iteration count for the baseline
        res.tucker = tucker_als(src, init, cfg.p_als, &res.warnings);
        res.report.algorithm = "tucker-als";
        res.report.final_ranks = res.tucker.ranks();
        res.report.termination = Termination::converged;
        res.report.estimator = "none";
        res.report.tenvec_count = src.read_count();
    } else {
        throw std::invalid_argument("run_experiment: unknown algorithm '" + cfg.algo + "'");
    }

    // internal tally must agree with the counting wrapper
    if (res.report.tenvec_count != src.read_count())
        throw std::logic_error("run_experiment: tenvec accounting mismatch (" +
                               std::to_string(res.report.tenvec_count) + " vs " +
                               std::to_string(src.read_count()) + ")");

    // oracle: per-step true errors on the densified tensor
    const bool densifiable = static_cast<std::size_t>(shape.count()) <= cfg.mem_budget;
    if (cfg.oracle && densifiable) {
        const DenseTensor3 dense = src.densify();
        const double nrm = frobenius_norm(dense);
        for (auto& step : res.report.steps)
            step.true_error =
                prefix_true_error(dense, nrm, res.tucker.factors, step.sizes);
        if (nrm == 0.0) {
            res.final_true_error = 0.0;
        } else {
            TuckerTensor dense_as_tucker;
            dense_as_tucker.core = dense;
            for (int l = 0; l < 3; ++l)
                dense_as_tucker.factors[static_cast<size_t>(l)] =
                    Matrix::Identity(shape[l + 1], shape[l + 1]);
            res.final_true_error = tucker_residual_norm(res.tucker, dense_as_tucker) / nrm;
        }
        res.oracle_used = true;
    } else if (cfg.oracle) {
        res.warnings.push_back("oracle disabled: tensor exceeds the memory budget");
    }

    if (!cfg.out_prefix.empty()) {
        write_csv(cfg.out_prefix + ".csv", res.report);
        write_json(cfg.out_prefix + ".json", cfg, res);
    }
    return res;
}

}  // namespace tenkrylov
