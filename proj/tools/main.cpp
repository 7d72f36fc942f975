// Command-line experiment harness: load or synthesize tensors, run any of the
// approximation algorithms, and emit CSV/JSON convergence reports.

#include "tenkrylov/experiment.hpp"
#include "tenkrylov/generators.hpp"
#include "tenkrylov/io.hpp"
#include "tenkrylov/oracle.hpp"
#include "tenkrylov/rng.hpp"
#include "tenkrylov/tensor_ops.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <future>
#include <iostream>
#include <sstream>

namespace {

using namespace tenkrylov;

std::uint64_t env_seed() {
    const char* s = std::getenv("TENKRYLOV_SEED");
    if (!s) return 0;
    return std::strtoull(s, nullptr, 10);
}

std::array<int, 3> parse_rmax(const std::string& s) {
    std::array<int, 3> r{};
    std::stringstream ss(s);
    std::string tok;
    std::vector<int> vals;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stoi(tok));
    if (vals.size() == 1) return {vals[0], vals[0], vals[0]};
    if (vals.size() == 3) return {vals[0], vals[1], vals[2]};
    throw CLI::ValidationError("--rmax expects r or r1,r2,r3");
}

void add_common(CLI::App* cmd, ExperimentConfig& cfg, std::string& gen_ranks_str,
                std::string& format_str, std::string& oracle_str) {
    cmd->add_option("--input", cfg.input_path, "input tensor file");
    cmd->add_option("--format", format_str, "input format: dense|coo|canonical|tucker");
    cmd->add_option("--gen", cfg.generator,
                    "generator: exact-tucker|two-slice|decaying-spectrum|hadamard-square");
    cmd->add_option("--n", cfg.gen_n, "generator mode size");
    cmd->add_option("--ranks", gen_ranks_str, "generator ranks r or r1,r2,r3");
    cmd->add_option("--rate", cfg.gen_rate, "decay rate for decaying-spectrum");
    cmd->add_option("--tucker-path", cfg.gen_tucker_path, "operand for hadamard-square");
    cmd->add_option("--eps", cfg.eps, "relative accuracy stop");
    cmd->add_option("--tol", cfg.tol, "breakdown tolerance");
    cmd->add_option("--pals", cfg.p_als, "inner alternating sweeps (and tucker-als iterations)");
    cmd->add_option("--ppow", cfg.p_pow, "inner power-iteration sweeps");
    cmd->add_option("--seed", cfg.seed, "random seed (TENKRYLOV_SEED as fallback)");
    cmd->add_option("--oracle", oracle_str, "on|off: densified true-error tracking");
    cmd->add_option("--out", cfg.out_prefix, "output prefix for <prefix>.csv/.json");
    cmd->add_option("--mem-budget", cfg.mem_budget, "max entries densified for the oracle");
    cmd->add_option("--start", cfg.start, "initial vectors: random|e1");
}

void finalize_common(ExperimentConfig& cfg, const std::string& rmax_str,
                     const std::string& gen_ranks_str, const std::string& format_str,
                     const std::string& oracle_str, bool seed_given) {
    if (!rmax_str.empty()) {
        const auto r = parse_rmax(rmax_str);
        cfg.r_max = r;
        cfg.gen_ranks = {r[0], r[1], r[2]};  // convenient default for generators
    }
    if (!gen_ranks_str.empty()) {
        const auto r = parse_rmax(gen_ranks_str);
        cfg.gen_ranks = {r[0], r[1], r[2]};
    }
    if (!format_str.empty()) cfg.format = parse_format(format_str);
    if (!oracle_str.empty()) {
        if (oracle_str != "on" && oracle_str != "off")
            throw CLI::ValidationError("--oracle expects on or off");
        cfg.oracle = oracle_str == "on";
    }
    if (!seed_given) cfg.seed = env_seed();
}

int run_single(const ExperimentConfig& cfg) {
    const ExperimentResult res = run_experiment(cfg);
    std::printf("algorithm:    %s\n", res.report.algorithm.c_str());
    std::printf("final ranks:  (%lld, %lld, %lld)\n",
                static_cast<long long>(res.report.final_ranks[0]),
                static_cast<long long>(res.report.final_ranks[1]),
                static_cast<long long>(res.report.final_ranks[2]));
    std::printf("tenvecs:      %ld\n", res.report.tenvec_count);
    std::printf("termination:  %s", to_string(res.report.termination));
    if (res.report.termination == Termination::breakdown)
        std::printf(" (mode %d, step %d)", res.report.breakdown_mode,
                    res.report.breakdown_step);
    std::printf("\n");
    if (res.final_true_error)
        std::printf("true error:   %.3e (relative Frobenius)\n", *res.final_true_error);
    std::printf("wall time:    %.1f ms\n", res.report.wall_time_ms);
    for (const auto& w : res.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    return exit_code_for(res.report.termination);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tenkrylov: matrix-free Tucker approximation toolkit"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string rmax_str, gen_ranks_str, format_str, oracle_str;

    auto* approx = app.add_subcommand("approximate", "run one algorithm on one tensor");
    approx->add_option("--algo", cfg.algo,
                       "mkr|opt-mkr|wsvd|wlnc|wsvdr|wlncr|hosvd|tucker-als");
    add_common(approx, cfg, gen_ranks_str, format_str, oracle_str);
    approx->add_option("--rmax", rmax_str, "maximum ranks r or r1,r2,r3");

    std::string algos_str = "mkr,opt-mkr,wsvd,wlnc,wsvdr,wlncr";
    auto* compare = app.add_subcommand("compare", "run several algorithms on one tensor");
    compare->add_option("--algos", algos_str, "comma-separated algorithm list");
    add_common(compare, cfg, gen_ranks_str, format_str, oracle_str);
    compare->add_option("--rmax", rmax_str, "maximum ranks r or r1,r2,r3");

    auto* gen = app.add_subcommand("gen", "synthesize a tensor and write it to a file");
    std::string gen_out, gen_format = "dense";
    bool gen_binary = false;
    gen->add_option("--gen", cfg.generator,
                    "exact-tucker|two-slice|decaying-spectrum")->required();
    gen->add_option("--n", cfg.gen_n, "mode size");
    gen->add_option("--ranks", gen_ranks_str, "ranks for exact-tucker");
    gen->add_option("--rate", cfg.gen_rate, "decay rate");
    gen->add_option("--seed", cfg.seed, "random seed");
    gen->add_option("--out", gen_out, "output file")->required();
    gen->add_option("--format", gen_format, "output format: dense|tucker");
    gen->add_flag("--binary", gen_binary, "write the TKV1 binary variant");

    auto* had = app.add_subcommand("hadamard", "approximate the elementwise square of a Tucker file");
    had->add_option("--algo", cfg.algo, "approximation algorithm");
    add_common(had, cfg, gen_ranks_str, format_str, oracle_str);
    had->add_option("--rmax", rmax_str, "maximum ranks r or r1,r2,r3");

    auto* info = app.add_subcommand("info", "describe a tensor file");
    std::string info_path, info_format = "dense";
    info->add_option("--input", info_path, "tensor file")->required();
    info->add_option("--format", info_format, "dense|coo|canonical|tucker");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            if (!gen_ranks_str.empty()) {
                const auto r = parse_rmax(gen_ranks_str);
                cfg.gen_ranks = {r[0], r[1], r[2]};
            }
            if (cfg.generator == "exact-tucker") {
                const TuckerTensor t = generate_exact_tucker(
                    {cfg.gen_n, cfg.gen_n, cfg.gen_n}, cfg.gen_ranks, cfg.seed);
                if (gen_format == "tucker")
                    save_tucker(gen_out, t, gen_binary);
                else
                    save_dense(gen_out, tucker_reconstruct(t), gen_binary);
            } else if (cfg.generator == "two-slice") {
                save_dense(gen_out, generate_two_slice(cfg.gen_n, cfg.seed), gen_binary);
            } else if (cfg.generator == "decaying-spectrum") {
                save_dense(gen_out, generate_decaying_spectrum(cfg.gen_n, cfg.gen_rate, cfg.seed),
                           gen_binary);
            } else {
                throw std::invalid_argument("gen: unknown generator " + cfg.generator);
            }
            std::printf("wrote %s\n", gen_out.c_str());
            return 0;
        }

        if (info->parsed()) {
            const auto fmt = parse_format(info_format);
            const auto src = load_tensor(info_path, fmt);
            const Shape3 s = src->shape();
            std::printf("format: %s\n", to_string(fmt));
            std::printf("shape:  %lld x %lld x %lld\n", static_cast<long long>(s.n1),
                        static_cast<long long>(s.n2), static_cast<long long>(s.n3));
            if (fmt == TensorFormat::coo) {
                const auto t = load_coo(info_path);
                std::printf("nnz:    %lld\n", static_cast<long long>(t.nnz()));
            } else if (fmt == TensorFormat::canonical) {
                std::printf("rank:   %lld\n",
                            static_cast<long long>(load_canonical(info_path).rank()));
            } else if (fmt == TensorFormat::tucker) {
                const auto rk = load_tucker(info_path).ranks();
                std::printf("ranks:  (%lld, %lld, %lld)\n", static_cast<long long>(rk[0]),
                            static_cast<long long>(rk[1]), static_cast<long long>(rk[2]));
            }
            return 0;
        }

        const bool seed_given = approx->count("--seed") || compare->count("--seed") ||
                                had->count("--seed");
        finalize_common(cfg, rmax_str, gen_ranks_str, format_str, oracle_str, seed_given);

        if (had->parsed()) {
            if (cfg.input_path.empty())
                throw std::invalid_argument("hadamard: --input <tucker file> is required");
            cfg.gen_tucker_path = cfg.input_path;
            cfg.input_path.clear();
            cfg.generator = "hadamard-square";
            return run_single(cfg);
        }
        if (approx->parsed()) return run_single(cfg);

        // compare: independent runs, one per algorithm, on worker threads
        std::vector<std::string> algos;
        {
            std::stringstream ss(algos_str);
            std::string tok;
            while (std::getline(ss, tok, ',')) algos.push_back(tok);
        }
        std::vector<std::future<ExperimentResult>> futures;
        std::vector<ExperimentConfig> cfgs;
        for (const auto& a : algos) {
            ExperimentConfig c = cfg;
            c.algo = a;
            if (!c.out_prefix.empty()) c.out_prefix += "-" + a;
            cfgs.push_back(std::move(c));
        }
        futures.reserve(cfgs.size());
        for (const auto& c : cfgs)
            futures.push_back(std::async(std::launch::async, [&c] { return run_experiment(c); }));
        int worst = 0;
        for (size_t i = 0; i < futures.size(); ++i) {
            const ExperimentResult r = futures[i].get();
            std::printf("%-8s ranks (%lld,%lld,%lld)  tenvecs %6ld  %-10s",
                        cfgs[i].algo.c_str(), static_cast<long long>(r.report.final_ranks[0]),
                        static_cast<long long>(r.report.final_ranks[1]),
                        static_cast<long long>(r.report.final_ranks[2]),
                        r.report.tenvec_count, to_string(r.report.termination));
            if (r.final_true_error) std::printf("  true error %.3e", *r.final_true_error);
            std::printf("\n");
            worst = std::max(worst, exit_code_for(r.report.termination));
        }
        return worst;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
