#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gfsc/solver.hpp"
#include "gfsc/types.hpp"

namespace gfsc {

enum class MethodKind
{
    Gfsc,
    Gf,
    /// Spectral clustering on one view's stand-alone graph.
    ScView,
    /// Spectral clustering on the mean of the stand-alone graphs.
    ScAve,
    /// k-means on the stacked features of all views.
    KMeansConcat,
};

struct Method
{
    MethodKind kind = MethodKind::Gfsc;
    /// 1-based view index for ScView.
    int view = 1;

    /// Parses gfsc, gf, sc-view:<v>, sc-ave, kmeans-concat.
    static Method parse(const std::string& text);
    std::string name() const;
    /// Row label in result tables: GFSC, GF, SC(v), SC(Ave), KM.
    std::string label() const;

    bool operator==(const Method&) const = default;
};

struct ParameterGrid
{
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> gamma;

    /// Powers of ten from 1e-7 to 1e7 on every axis.
    static ParameterGrid logarithmic(int lo_exp = -7, int hi_exp = 7);
    std::size_t size() const { return alpha.size() * beta.size() * gamma.size(); }
};

struct ExperimentConfig
{
    std::string manifest_path;
    Method method;
    Hyperparams params;
    int repetitions = 10;
    std::optional<ParameterGrid> grid;
    std::string output_path;
    int workers = 1;
    SolverOptions solver;

    void validate() const;
};

struct RunRecord
{
    int repetition = 0;
    std::uint64_t seed = 0;
    bool ok = true;
    /// "numerics", "dataset", "input" or "error" when !ok.
    std::string error_kind;
    std::string error;
    ClusteringResult result;
};

struct MetricSummary
{
    double mean = 0;
    /// Sample standard deviation (n - 1 denominator); 0 for a single run.
    double std = 0;
    int count = 0;

    static MetricSummary of(const std::vector<double>& values);
};

struct ExperimentReport
{
    std::string dataset;
    Method method;
    Hyperparams params;
    int repetitions = 0;
    std::vector<RunRecord> runs;
    MetricSummary acc;
    MetricSummary nmi;
    MetricSummary purity;

    int failed_runs() const;
    bool any_numerics_failure() const;
};

/// One clustering of `data` with `method`; seeds come from params.seed.
ClusteringResult run_method(const MultiViewDataset<double>& data, const Method& method,
                            const Hyperparams& params, const SolverOptions& options = {});

/// Runs the configured method `repetitions` times; run r uses seed params.seed + r.
ExperimentReport run_experiment(const ExperimentConfig& config, const MultiViewDataset<double>& data,
                                const std::string& dataset_name = "");

struct GridCell
{
    double alpha = 0;
    double beta = 0;
    double gamma = 0;
    ExperimentReport report;
};

struct GridReport
{
    std::string dataset;
    Method method;
    std::vector<GridCell> cells;
    /// Cell with the highest mean accuracy (first on ties).
    std::size_t best = 0;
};

/// Evaluates every (alpha, beta, gamma) cell with the repetition protocol.
GridReport grid_search(const ExperimentConfig& config, const MultiViewDataset<double>& data,
                       const std::string& dataset_name = "");

nlohmann::json to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GridReport& report);

/// Per-iteration trace including wall times (kept out of the main report so
/// reports stay byte-reproducible).
nlohmann::json trace_to_json(const SolverTrace& trace);

/// Method | Acc | Purity | NMI rows with mean(std) in percent.
std::string format_table(const std::vector<ExperimentReport>& reports, const std::string& title = "");

/// alpha,beta,gamma,acc_mean,acc_std,nmi_mean,nmi_std,purity_mean,purity_std; one row per cell.
std::string format_surface_csv(const GridReport& grid);

void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace gfsc
