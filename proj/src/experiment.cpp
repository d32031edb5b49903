#include "gfsc/experiment.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "gfsc/fusion.hpp"
#include "gfsc/graph_learning.hpp"
#include "gfsc/spectral.hpp"

namespace gfsc {

using json = nlohmann::json;

Method Method::parse(const std::string& text)
{
    if (text == "gfsc") return {MethodKind::Gfsc, 1};
    if (text == "gf") return {MethodKind::Gf, 1};
    if (text == "sc-ave") return {MethodKind::ScAve, 1};
    if (text == "kmeans-concat" || text == "km") return {MethodKind::KMeansConcat, 1};
    const std::string prefix = "sc-view:";
    if (text.rfind(prefix, 0) == 0) {
        const std::string rest = text.substr(prefix.size());
        int view = 0;
        std::size_t used = 0;
        try {
            view = std::stoi(rest, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != rest.size() || rest.empty() || view < 1)
            throw InputError("bad view index in method '" + text + "'");
        return {MethodKind::ScView, view};
    }
    throw InputError("unknown method '" + text + "' (expected gfsc, gf, sc-view:<v>, sc-ave, kmeans-concat)");
}

std::string Method::name() const
{
    switch (kind) {
    case MethodKind::Gfsc: return "gfsc";
    case MethodKind::Gf: return "gf";
    case MethodKind::ScView: return "sc-view:" + std::to_string(view);
    case MethodKind::ScAve: return "sc-ave";
    case MethodKind::KMeansConcat: return "kmeans-concat";
    }
    return "unknown";
}

std::string Method::label() const
{
    switch (kind) {
    case MethodKind::Gfsc: return "GFSC";
    case MethodKind::Gf: return "GF";
    case MethodKind::ScView: return "SC(" + std::to_string(view) + ")";
    case MethodKind::ScAve: return "SC(Ave)";
    case MethodKind::KMeansConcat: return "KM";
    }
    return "?";
}

ParameterGrid ParameterGrid::logarithmic(int lo_exp, int hi_exp)
{
    std::vector<double> axis;
    for (int e = lo_exp; e <= hi_exp; ++e) axis.push_back(std::pow(10.0, e));
    return {axis, axis, axis};
}

void ExperimentConfig::validate() const
{
    if (repetitions < 1) throw InputError("repetitions must be at least 1");
    if (workers < 1) throw InputError("workers must be at least 1");
    if (grid) {
        if (grid->size() == 0) throw InputError("parameter grid is empty");
        for (const auto* axis : {&grid->alpha, &grid->beta, &grid->gamma})
            for (double v : *axis)
                if (!(v > 0) || !std::isfinite(v)) throw InputError("grid values must be positive");
    }
}

MetricSummary MetricSummary::of(const std::vector<double>& values)
{
    MetricSummary s;
    s.count = static_cast<int>(values.size());
    if (values.empty()) return s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

int ExperimentReport::failed_runs() const
{
    return static_cast<int>(std::count_if(runs.begin(), runs.end(), [](const RunRecord& r) { return !r.ok; }));
}

bool ExperimentReport::any_numerics_failure() const
{
    return std::any_of(runs.begin(), runs.end(),
                       [](const RunRecord& r) { return !r.ok && r.error_kind == "numerics"; });
}

ClusteringResult run_method(const MultiViewDataset<double>& data, const Method& method,
                            const Hyperparams& params, const SolverOptions& options)
{
    params.validate();
    ClusteringResult result;
    const SpectralClusteringOptions sc_options{true, options.kmeans};
    switch (method.kind) {
    case MethodKind::Gfsc:
        return gfsc(data, params, options).result;
    case MethodKind::Gf:
        return gf(data, params, options).result;
    case MethodKind::ScView: {
        if (method.view > data.t())
            throw InputError("method " + method.name() + " but the dataset has " +
                             std::to_string(data.t()) + " views");
        const auto z = learn_single_view_graph(data.view(method.view - 1), params.alpha,
                                               method.view - 1, options.route);
        result.labels = spectral_clustering(ConsensusGraph<double>(z.matrix), params.k,
                                            params.seed, sc_options);
        break;
    }
    case MethodKind::ScAve: {
        std::vector<ViewGraph<double>> graphs;
        for (Index v = 0; v < data.t(); ++v)
            graphs.push_back(learn_single_view_graph(data.view(v), params.alpha, v, options.route));
        result.labels = spectral_clustering(average_graph(graphs), params.k, params.seed, sc_options);
        break;
    }
    case MethodKind::KMeansConcat: {
        Index rows = 0;
        for (const auto& x : data.views()) rows += x.rows();
        Matrix<double> stacked(data.n(), rows);
        Index offset = 0;
        for (const auto& x : data.views()) {
            stacked.middleCols(offset, x.rows()) = x.transpose();
            offset += x.rows();
        }
        result.labels = kmeans(stacked, params.k, params.seed, options.kmeans).labels;
        break;
    }
    }
    if (data.has_labels()) {
        const auto s = score(result.labels, *data.labels());
        result.acc = s.acc;
        result.nmi = s.nmi;
        result.purity = s.purity;
    }
    return result;
}

namespace {

/// Runs job(i) for i in [0, count) on up to `workers` threads.
template <typename Job>
void parallel_for(std::size_t count, int workers, Job&& job)
{
    const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, workers)), count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) job(i);
        });
    }
}

RunRecord run_once(const MultiViewDataset<double>& data, const Method& method, Hyperparams params,
                   const SolverOptions& options, int repetition)
{
    RunRecord record;
    record.repetition = repetition;
    record.seed = params.seed + static_cast<std::uint64_t>(repetition);
    params.seed = record.seed;
    try {
        record.result = run_method(data, method, params, options);
    } catch (const NumericsError& e) {
        record.ok = false;
        record.error_kind = "numerics";
        record.error = e.what();
    } catch (const DatasetError& e) {
        record.ok = false;
        record.error_kind = "dataset";
        record.error = e.what();
    } catch (const InputError& e) {
        record.ok = false;
        record.error_kind = "input";
        record.error = e.what();
    } catch (const Error& e) {
        record.ok = false;
        record.error_kind = "error";
        record.error = e.what();
    }
    return record;
}

void summarize(ExperimentReport& report)
{
    std::vector<double> acc, nmi, purity;
    for (const auto& run : report.runs) {
        if (!run.ok) continue;
        if (run.result.acc) acc.push_back(*run.result.acc);
        if (run.result.nmi) nmi.push_back(*run.result.nmi);
        if (run.result.purity) purity.push_back(*run.result.purity);
    }
    report.acc = MetricSummary::of(acc);
    report.nmi = MetricSummary::of(nmi);
    report.purity = MetricSummary::of(purity);
}

} // namespace

ExperimentReport run_experiment(const ExperimentConfig& config, const MultiViewDataset<double>& data,
                                const std::string& dataset_name)
{
    config.validate();
    config.params.validate();
    ExperimentReport report;
    report.dataset = dataset_name;
    report.method = config.method;
    report.params = config.params;
    report.repetitions = config.repetitions;
    report.runs.resize(static_cast<std::size_t>(config.repetitions));
    parallel_for(report.runs.size(), config.workers, [&](std::size_t r) {
        report.runs[r] = run_once(data, config.method, config.params, config.solver, static_cast<int>(r));
    });
    summarize(report);
    return report;
}

GridReport grid_search(const ExperimentConfig& config, const MultiViewDataset<double>& data,
                       const std::string& dataset_name)
{
    config.validate();
    if (!config.grid) throw InputError("grid search needs a parameter grid");
    const auto& grid = *config.grid;

    GridReport out;
    out.dataset = dataset_name;
    out.method = config.method;
    for (double a : grid.alpha)
        for (double b : grid.beta)
            for (double g : grid.gamma) out.cells.push_back({a, b, g, {}});

    const std::size_t reps = static_cast<std::size_t>(config.repetitions);
    std::vector<RunRecord> runs(out.cells.size() * reps);
    parallel_for(runs.size(), config.workers, [&](std::size_t i) {
        const auto& cell = out.cells[i / reps];
        Hyperparams params = config.params;
        params.alpha = cell.alpha;
        params.beta = cell.beta;
        params.gamma = cell.gamma;
        runs[i] = run_once(data, config.method, params, config.solver, static_cast<int>(i % reps));
    });

    for (std::size_t c = 0; c < out.cells.size(); ++c) {
        auto& report = out.cells[c].report;
        report.dataset = dataset_name;
        report.method = config.method;
        report.params = config.params;
        report.params.alpha = out.cells[c].alpha;
        report.params.beta = out.cells[c].beta;
        report.params.gamma = out.cells[c].gamma;
        report.repetitions = config.repetitions;
        report.runs.assign(std::make_move_iterator(runs.begin() + static_cast<long>(c * reps)),
                           std::make_move_iterator(runs.begin() + static_cast<long>((c + 1) * reps)));
        summarize(report);
        if (report.acc.mean > out.cells[out.best].report.acc.mean) out.best = c;
    }
    return out;
}

namespace {

json summary_json(const MetricSummary& s)
{
    return {{"mean", s.mean}, {"std", s.std}, {"count", s.count}};
}

MetricSummary summary_from(const json& j)
{
    return {j.at("mean").get<double>(), j.at("std").get<double>(), j.at("count").get<int>()};
}

json params_json(const Hyperparams& p)
{
    return {{"alpha", p.alpha}, {"beta", p.beta},         {"gamma", p.gamma}, {"k", p.k},
            {"max_iter", p.max_iter}, {"tol", p.tol}, {"seed", p.seed}};
}

Hyperparams params_from(const json& j)
{
    Hyperparams p;
    p.alpha = j.at("alpha").get<double>();
    p.beta = j.at("beta").get<double>();
    p.gamma = j.at("gamma").get<double>();
    p.k = j.at("k").get<int>();
    p.max_iter = j.at("max_iter").get<int>();
    p.tol = j.at("tol").get<double>();
    p.seed = j.at("seed").get<std::uint64_t>();
    return p;
}

json optional_json(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

std::optional<double> optional_from(const json& j)
{
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

} // namespace

json trace_to_json(const SolverTrace& trace)
{
    json iterations = json::array();
    for (const auto& it : trace.iterations)
        iterations.push_back({{"iteration", it.iteration},
                              {"objective", it.objective},
                              {"relative_change", it.relative_change},
                              {"weights", it.weights},
                              {"seconds", it.seconds}});
    return {{"converged", trace.converged},
            {"monotonicity_violations", trace.monotonicity_violations},
            {"warnings", trace.warnings},
            {"iterations", std::move(iterations)}};
}

json to_json(const ExperimentReport& report)
{
    json runs = json::array();
    for (const auto& run : report.runs) {
        json trace = json::array();
        for (const auto& it : run.result.trace.iterations)
            trace.push_back({{"iteration", it.iteration},
                             {"objective", it.objective},
                             {"relative_change", it.relative_change},
                             {"weights", it.weights}});
        json r = {{"repetition", run.repetition},
                  {"seed", run.seed},
                  {"ok", run.ok},
                  {"acc", optional_json(run.result.acc)},
                  {"nmi", optional_json(run.result.nmi)},
                  {"purity", optional_json(run.result.purity)},
                  {"iterations", run.result.trace.iteration_count()},
                  {"converged", run.result.trace.converged},
                  {"warnings", run.result.trace.warnings},
                  {"trace", std::move(trace)}};
        if (!run.ok) {
            r["error_kind"] = run.error_kind;
            r["error"] = run.error;
        }
        runs.push_back(std::move(r));
    }
    return {{"dataset", report.dataset},
            {"method", report.method.name()},
            {"params", params_json(report.params)},
            {"repetitions", report.repetitions},
            {"summary",
             {{"acc", summary_json(report.acc)},
              {"nmi", summary_json(report.nmi)},
              {"purity", summary_json(report.purity)}}},
            {"runs", std::move(runs)}};
}

ExperimentReport report_from_json(const json& j)
{
    ExperimentReport report;
    report.dataset = j.at("dataset").get<std::string>();
    report.method = Method::parse(j.at("method").get<std::string>());
    report.params = params_from(j.at("params"));
    report.repetitions = j.at("repetitions").get<int>();
    const auto& summary = j.at("summary");
    report.acc = summary_from(summary.at("acc"));
    report.nmi = summary_from(summary.at("nmi"));
    report.purity = summary_from(summary.at("purity"));
    for (const auto& r : j.at("runs")) {
        RunRecord run;
        run.repetition = r.at("repetition").get<int>();
        run.seed = r.at("seed").get<std::uint64_t>();
        run.ok = r.at("ok").get<bool>();
        run.error_kind = r.value("error_kind", "");
        run.error = r.value("error", "");
        run.result.acc = optional_from(r.at("acc"));
        run.result.nmi = optional_from(r.at("nmi"));
        run.result.purity = optional_from(r.at("purity"));
        run.result.trace.converged = r.at("converged").get<bool>();
        run.result.trace.warnings = r.at("warnings").get<std::vector<std::string>>();
        for (const auto& it : r.at("trace")) {
            IterationRecord rec;
            rec.iteration = it.at("iteration").get<int>();
            rec.objective = it.at("objective").get<double>();
            rec.relative_change = it.at("relative_change").get<double>();
            rec.weights = it.at("weights").get<std::vector<double>>();
            run.result.trace.iterations.push_back(std::move(rec));
        }
        report.runs.push_back(std::move(run));
    }
    return report;
}

json to_json(const GridReport& grid)
{
    json cells = json::array();
    for (const auto& cell : grid.cells)
        cells.push_back({{"alpha", cell.alpha},
                         {"beta", cell.beta},
                         {"gamma", cell.gamma},
                         {"failed_runs", cell.report.failed_runs()},
                         {"acc", summary_json(cell.report.acc)},
                         {"nmi", summary_json(cell.report.nmi)},
                         {"purity", summary_json(cell.report.purity)}});
    json best = nullptr;
    if (!grid.cells.empty()) {
        const auto& b = grid.cells[grid.best];
        best = {{"index", grid.best}, {"alpha", b.alpha}, {"beta", b.beta}, {"gamma", b.gamma},
                {"acc", summary_json(b.report.acc)}};
    }
    return {{"dataset", grid.dataset}, {"method", grid.method.name()}, {"best", best}, {"cells", cells}};
}

namespace {

std::string percent(const MetricSummary& s)
{
    if (s.count == 0) return "--";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f(%.2f)", 100.0 * s.mean, 100.0 * s.std);
    return buf;
}

std::string pad(const std::string& s, std::size_t width)
{
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

} // namespace

std::string format_table(const std::vector<ExperimentReport>& reports, const std::string& title)
{
    std::ostringstream out;
    if (!title.empty()) out << title << '\n';
    const std::size_t w0 = 10, w = 16;
    const std::string rule(w0 + 3 * w + 6, '-');
    out << rule << '\n'
        << pad("Method", w0) << " | " << pad("Acc", w) << pad("Purity", w) << "NMI" << '\n'
        << rule << '\n';
    for (const auto& r : reports) {
        out << pad(r.method.label(), w0) << " | " << pad(percent(r.acc), w) << pad(percent(r.purity), w)
            << percent(r.nmi);
        if (r.failed_runs() > 0) out << "  [" << r.failed_runs() << " failed]";
        out << '\n';
    }
    out << rule << '\n';
    return out.str();
}

std::string format_surface_csv(const GridReport& grid)
{
    std::string out = "alpha,beta,gamma,acc_mean,acc_std,nmi_mean,nmi_std,purity_mean,purity_std\n";
    auto put = [&out](double x, char sep) {
        char buffer[32];
        const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), x);
        out.append(buffer, ptr);
        out.push_back(sep);
    };
    for (const auto& c : grid.cells) {
        const auto& r = c.report;
        for (double x : {c.alpha, c.beta, c.gamma, r.acc.mean, r.acc.std, r.nmi.mean, r.nmi.std, r.purity.mean})
            put(x, ',');
        put(r.purity.std, '\n');
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DatasetError("cannot write " + path.string());
    out << text;
}

} // namespace gfsc
