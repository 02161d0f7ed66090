#pragma once

// Desk-scale experiments behind the CLI subcommands. Each run_* function is
// deterministic in its seed and independent of the worker count.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mgs/accum.hpp"
#include "mgs/dmac.hpp"
#include "mgs/fp8.hpp"

namespace mgs::experiments {

// ---------------------------------------------------------------------------
// FP8 error curve

inline const std::vector<std::string> kErrorCurveStrategies = {"sequential", "pairwise", "kahan", "mgs_narrow",
                                                               "mgs_full"};

struct ErrorCurveConfig {
    std::vector<std::int64_t> lengths = {10, 20, 50, 100, 200, 500, 1000, 2000};
    std::int64_t trials = 100;
    double sigma = 1.0;
    std::uint64_t seed = 1;
    bool skipping = false;
    std::vector<std::string> strategies = kErrorCurveStrategies;
};

struct ErrorCurvePoint {
    std::string strategy;
    std::int64_t length = 0;
    // Percent error of every trial, relative to the exact sum of the FP8 products.
    std::vector<double> errors;
    // Trials where the reference sum was 0 (absolute error reported instead).
    std::int64_t absolute_fallbacks = 0;
    // mgs_full only: trials that differ from the fixed-point ProductTerm oracle.
    std::int64_t oracle_mismatches = 0;
    double mean() const;
    double median() const;
};

/// One Gaussian FP8 vector pair; trial t of length n uses stream (seed, n, t).
void gaussian_fp8_pair(std::int64_t length, std::int64_t trial, double sigma, std::uint64_t seed,
                       std::vector<fp8::Fp8Value>& w, std::vector<fp8::Fp8Value>& x);

std::vector<ErrorCurvePoint> run_error_curve(const ErrorCurveConfig& cfg, int threads = 0);
std::string error_curve_csv(const std::vector<ErrorCurvePoint>& points);

// ---------------------------------------------------------------------------
// Overflow probability

struct OverflowProbConfig {
    std::vector<std::int64_t> ks = {1, 2, 5, 10, 20, 50, 100};
    std::vector<int> acc_bits = {8, 9, 10, 11, 12, 13, 14, 15, 16, 17};
    double sigma_w = 5.0;
    double sigma_x = 21.0;
    int w_bits = 5;
    int x_bits = 7;
    std::int64_t trials = 20000;
    std::uint64_t seed = 1;
};

struct OverflowProbRow {
    std::int64_t k = 0;
    int acc_bits = 0;
    double clt = 0.0;
    double monte_carlo = 0.0;
};

std::vector<OverflowProbRow> run_overflow_prob(const OverflowProbConfig& cfg, int threads = 0);
std::string overflow_prob_csv(const std::vector<OverflowProbRow>& rows);

// ---------------------------------------------------------------------------
// Markov chain vs simulation

struct MarkovValidateConfig {
    std::vector<int> acc_bits = {8, 9, 10, 11, 12};
    double sigma_w = 5.0;
    double sigma_x = 21.0;
    int w_bits = 5;   // signed normal weights in [-(2^(w-1)-1), 2^(w-1)-1]
    int x_bits = 7;   // half-normal activations in [0, 2^x - 1]
    std::int64_t pmf_samples = 200000;
    std::int64_t trials = 20000;
    std::uint64_t seed = 1;
};

struct MarkovValidateRow {
    int acc_bits = 0;
    double chain_length = 0.0;
    double simulated_length = 0.0;
    double relative_difference = 0.0;
    // w_bits + x_bits + ceil(log2(chain_length)): worst-case width for that length.
    int naive_bound_bits = 0;
};

std::vector<MarkovValidateRow> run_markov_validate(const MarkovValidateConfig& cfg, int threads = 0);
std::string markov_validate_csv(const std::vector<MarkovValidateRow>& rows);

// ---------------------------------------------------------------------------

std::string skip_census_csv();
std::string dump_table_csv();

// ---------------------------------------------------------------------------
// Quantized MLP

struct MlpShape {
    std::uint32_t inputs = 784;
    std::uint32_t hidden = 32;
    std::uint32_t outputs = 10;
};

struct MlpFiles {
    std::filesystem::path w1;
    std::filesystem::path w2;
    std::filesystem::path inputs;
    std::filesystem::path labels;
};

/// Writes a seeded synthetic teacher (w1.mgt, w2.mgt), inputs.mgt and
/// labels.csv (argmax of the float forward pass) into `dir`.
MlpFiles generate_mlp(const std::filesystem::path& dir, std::int64_t samples, std::uint64_t seed,
                      MlpShape shape = {});

struct MlpInferConfig {
    MlpFiles files;
    std::vector<std::string> strategies = {"wide", "mgs", "clip"};
    std::vector<int> narrow_bits = {12};
    int wide_bits = 32;
    int w_bits = 5;
    int x_bits = 7;
};

struct MlpInferRow {
    std::string strategy;
    int narrow_bits = 0;
    std::int64_t samples = 0;
    // Top-1 agreement with the quantized pass under exact accumulation.
    double agreement_pct = 0.0;
    // Samples whose integer logits equal the exact-accumulation logits.
    std::int64_t logits_equal = 0;
    // Top-1 agreement with the float teacher labels.
    double label_accuracy_pct = 0.0;
    // Mean events per dot product.
    double terms = 0.0;
    double narrow_adds = 0.0;
    double wide_adds = 0.0;
    double flushes = 0.0;
    double clip_events = 0.0;
};

std::vector<MlpInferRow> run_mlp_infer(const MlpInferConfig& cfg, int threads = 0);
std::string mlp_infer_csv(const std::vector<MlpInferRow>& rows);

// ---------------------------------------------------------------------------

/// "%.17g"; nan and inf spelled "nan", "inf", "-inf".
std::string fmt(double v);

}  // namespace mgs::experiments
