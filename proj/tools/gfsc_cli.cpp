#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

#include "gfsc/experiment.hpp"
#include "gfsc/io.hpp"

namespace fs = std::filesystem;
using namespace gfsc;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_dataset = 2;
constexpr int exit_numerics = 3;

struct CommonOptions
{
    std::string manifest;
    std::string method = "gfsc";
    double alpha = Hyperparams{}.alpha;
    double beta = Hyperparams{}.beta;
    double gamma = Hyperparams{}.gamma;
    int k = 0;
    int max_iter = 200;
    double tol = 1e-3;
    std::uint64_t seed = 0;
    int reps = 10;
    std::string out;
    std::string table;
    int workers = 1;
    std::string init = "random";
    bool normalize_rows = false;
    int restarts = 20;
    std::string trace_dir;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_method)
{
    cmd->add_option("--manifest", o.manifest, "Dataset manifest (JSON)")->required();
    if (with_method)
        cmd->add_option("--method", o.method, "gfsc | gf | sc-view:<v> | sc-ave | kmeans-concat");
    cmd->add_option("--alpha", o.alpha, "Self-expression regularization")->capture_default_str();
    cmd->add_option("--beta", o.beta, "Fusion weight")->capture_default_str();
    cmd->add_option("--gamma", o.gamma, "Structure weight")->capture_default_str();
    cmd->add_option("--k", o.k, "Cluster count (default: number of label classes)");
    cmd->add_option("--max-iter", o.max_iter, "Outer iteration cap")->capture_default_str();
    cmd->add_option("--tol", o.tol, "Relative change of S that stops the solver")->capture_default_str();
    cmd->add_option("--seed", o.seed, "Base seed; run r uses seed + r")->capture_default_str();
    cmd->add_option("--reps", o.reps, "Repetitions per setting")->capture_default_str();
    cmd->add_option("--out", o.out, "Machine-readable results (JSON)");
    cmd->add_option("--table", o.table, "Also write the plain-text table here");
    cmd->add_option("--workers", o.workers, "Concurrent runs")->capture_default_str();
    cmd->add_option("--init", o.init, "random | warm")->capture_default_str();
    cmd->add_flag("--normalize-rows", o.normalize_rows,
                  "Unit-normalize embedding rows before the final k-means (GFSC)");
    cmd->add_option("--restarts", o.restarts, "k-means restarts")->capture_default_str();
}

struct Loaded
{
    DatasetManifest manifest;
    MultiViewDataset<double> data;
};

Loaded load(const CommonOptions& o)
{
    auto manifest = read_manifest(o.manifest);
    auto data = load_dataset(manifest);
    return {std::move(manifest), std::move(data)};
}

ExperimentConfig make_config(const CommonOptions& o, const MultiViewDataset<double>& data)
{
    ExperimentConfig config;
    config.manifest_path = o.manifest;
    config.method = Method::parse(o.method);
    config.params.alpha = o.alpha;
    config.params.beta = o.beta;
    config.params.gamma = o.gamma;
    config.params.k = o.k > 0 ? o.k : data.num_classes();
    if (config.params.k == 0)
        throw InputError("--k is required when the dataset has no labels");
    config.params.max_iter = o.max_iter;
    config.params.tol = o.tol;
    config.params.seed = o.seed;
    config.repetitions = o.reps;
    config.output_path = o.out;
    config.workers = o.workers;
    if (o.init == "random")
        config.solver.init = InitMode::Random;
    else if (o.init == "warm")
        config.solver.init = InitMode::WarmStart;
    else
        throw InputError("--init must be random or warm");
    config.solver.normalize_embedding_rows = o.normalize_rows;
    config.solver.kmeans.restarts = o.restarts;
    config.params.validate();
    config.validate();
    return config;
}

void emit(const std::string& out, const std::string& table_path, const std::string& json_text,
          const std::string& table)
{
    if (!out.empty()) write_text(out, json_text);
    if (!table_path.empty()) write_text(table_path, table);
    std::cout << table;
}

int exit_for(const std::vector<ExperimentReport>& reports)
{
    for (const auto& r : reports)
        if (r.any_numerics_failure()) return exit_numerics;
    return exit_ok;
}

int cmd_run(const CommonOptions& o)
{
    const auto loaded = load(o);
    const auto config = make_config(o, loaded.data);
    const auto report = run_experiment(config, loaded.data, loaded.manifest.name);
    emit(o.out, o.table, to_json(report).dump(2) + "\n",
         format_table({report}, loaded.manifest.name + " (" + std::to_string(config.repetitions) + " runs)"));
    if (!o.trace_dir.empty()) {
        for (const auto& run : report.runs)
            write_text(fs::path(o.trace_dir) / ("trace_" + std::to_string(run.repetition) + ".json"),
                       trace_to_json(run.result.trace).dump(2) + "\n");
    }
    return exit_for({report});
}

int cmd_baseline(const CommonOptions& o, bool include_fusion)
{
    const auto loaded = load(o);
    auto config = make_config(o, loaded.data);
    std::vector<Method> methods;
    for (int v = 1; v <= loaded.data.t(); ++v) methods.push_back({MethodKind::ScView, v});
    methods.push_back({MethodKind::ScAve, 1});
    methods.push_back({MethodKind::KMeansConcat, 1});
    if (include_fusion) {
        methods.push_back({MethodKind::Gf, 1});
        methods.push_back({MethodKind::Gfsc, 1});
    }
    std::vector<ExperimentReport> reports;
    nlohmann::json all = nlohmann::json::array();
    for (const auto& m : methods) {
        config.method = m;
        reports.push_back(run_experiment(config, loaded.data, loaded.manifest.name));
        all.push_back(to_json(reports.back()));
    }
    emit(o.out, o.table, all.dump(2) + "\n",
         format_table(reports, loaded.manifest.name + " (" + std::to_string(config.repetitions) + " runs)"));
    return exit_for(reports);
}

std::vector<double> parse_axis(const std::string& text)
{
    std::vector<double> values;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        try {
            values.push_back(std::stod(token));
        } catch (const std::exception&) {
            throw InputError("bad grid value '" + token + "'");
        }
    }
    return values;
}

int cmd_grid(const CommonOptions& o, const std::string& alphas, const std::string& betas,
             const std::string& gammas, const std::string& surface)
{
    const auto loaded = load(o);
    auto config = make_config(o, loaded.data);
    auto grid = ParameterGrid::logarithmic();
    if (!alphas.empty()) grid.alpha = parse_axis(alphas);
    if (!betas.empty()) grid.beta = parse_axis(betas);
    if (!gammas.empty()) grid.gamma = parse_axis(gammas);
    config.grid = grid;
    const auto result = grid_search(config, loaded.data, loaded.manifest.name);

    std::vector<ExperimentReport> best{result.cells.at(result.best).report};
    std::ostringstream title;
    title << loaded.manifest.name << " grid of " << result.cells.size() << " cells, best alpha="
          << result.cells[result.best].alpha << " beta=" << result.cells[result.best].beta
          << " gamma=" << result.cells[result.best].gamma;
    emit(o.out, o.table, to_json(result).dump(2) + "\n", format_table(best, title.str()));
    if (!surface.empty()) write_text(surface, format_surface_csv(result));
    std::vector<ExperimentReport> all;
    for (const auto& c : result.cells) all.push_back(c.report);
    return exit_for(all);
}

int cmd_synth(long n, int t, int k, double noise, std::uint64_t seed, const std::string& dir,
              const std::string& name)
{
    const auto data = generate_synthetic(n, t, k, noise, seed);
    const auto manifest = write_dataset(data, name, dir);
    std::cout << "wrote " << (fs::path(dir) / "manifest.json").string() << " (n=" << data.n()
              << ", t=" << data.t() << ", k=" << data.num_classes() << ")\n";
    return exit_ok;
}

int cmd_convert(const std::vector<std::string>& inputs, const std::vector<std::string>& names,
                bool header, const std::string& label_column, const std::string& labels_file,
                const std::string& orientation, const std::string& dir, const std::string& name)
{
    const Orientation orient = parse_orientation(orientation);
    std::vector<Matrix<double>> views;
    std::optional<Labels> labels;
    for (std::size_t v = 0; v < inputs.size(); ++v) {
        Matrix<double> m = read_csv_matrix(inputs[v], header);
        if (orient == Orientation::FeaturesBySamples) m.transposeInPlace();
        if (label_column == "last" || label_column == "first") {
            if (m.cols() < 2) throw DatasetError(inputs[v] + ": no feature columns besides the label");
            const Index col = label_column == "last" ? m.cols() - 1 : 0;
            Labels view_labels(static_cast<std::size_t>(m.rows()));
            for (Index i = 0; i < m.rows(); ++i) view_labels[static_cast<std::size_t>(i)] = static_cast<int>(m(i, col));
            if (labels && *labels != view_labels)
                throw DatasetError(inputs[v] + ": label column disagrees with " + inputs.front());
            labels = std::move(view_labels);
            Matrix<double> features(m.rows(), m.cols() - 1);
            if (col == 0)
                features = m.rightCols(m.cols() - 1);
            else
                features = m.leftCols(m.cols() - 1);
            m = std::move(features);
        } else if (label_column != "none") {
            throw InputError("--label-column must be last, first or none");
        }
        views.push_back(m.transpose());
    }
    if (!labels_file.empty()) labels = read_labels(labels_file);
    std::vector<std::string> view_names = names;
    if (view_names.empty())
        for (const auto& in : inputs) view_names.push_back(fs::path(in).stem().string());
    if (view_names.size() != views.size()) throw InputError("--view-name count must match --input count");
    MultiViewDataset<double> data(std::move(views), std::move(labels), std::move(view_names));
    write_dataset(data, name, dir);
    std::cout << "wrote " << (fs::path(dir) / "manifest.json").string() << " (n=" << data.n()
              << ", t=" << data.t() << ", k=" << data.num_classes() << ")\n";
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multi-graph fusion spectral clustering"};
    app.require_subcommand(1);

    CommonOptions run_opts;
    auto* run = app.add_subcommand("run", "Run one method with the repetition protocol");
    add_common(run, run_opts, true);
    run->add_option("--trace-dir", run_opts.trace_dir, "Write per-run traces (with timings) here");

    CommonOptions base_opts;
    bool include_fusion = false;
    auto* baseline = app.add_subcommand("baseline", "Run SC(v), SC(Ave) and KM baselines");
    add_common(baseline, base_opts, false);
    baseline->add_flag("--include-fusion", include_fusion, "Also run GF and GFSC");

    CommonOptions grid_opts;
    std::string alphas, betas, gammas, surface;
    auto* grid = app.add_subcommand("grid", "Grid search over alpha, beta, gamma");
    add_common(grid, grid_opts, true);
    grid->add_option("--alpha-grid", alphas, "Comma-separated alpha values (default 1e-7..1e7)");
    grid->add_option("--beta-grid", betas, "Comma-separated beta values (default 1e-7..1e7)");
    grid->add_option("--gamma-grid", gammas, "Comma-separated gamma values (default 1e-7..1e7)");
    grid->add_option("--surface", surface, "Accuracy surface CSV");

    long synth_n = 150;
    int synth_t = 2, synth_k = 3;
    double synth_noise = 0.0;
    std::uint64_t synth_seed = 0;
    std::string synth_dir, synth_name = "synthetic";
    auto* synth = app.add_subcommand("synth", "Generate a planted-partition dataset");
    synth->add_option("--n", synth_n, "Samples")->capture_default_str();
    synth->add_option("--t", synth_t, "Views")->capture_default_str();
    synth->add_option("--k", synth_k, "Clusters")->capture_default_str();
    synth->add_option("--noise", synth_noise, "Gaussian noise scale")->capture_default_str();
    synth->add_option("--seed", synth_seed, "Seed")->capture_default_str();
    synth->add_option("--out-dir", synth_dir, "Output directory")->required();
    synth->add_option("--name", synth_name, "Dataset name")->capture_default_str();

    std::vector<std::string> conv_inputs, conv_names;
    bool conv_header = false;
    std::string conv_label_col = "none", conv_labels, conv_orient = "samples", conv_dir, conv_name = "dataset";
    auto* convert = app.add_subcommand("convert", "Convert per-view CSV files into a manifest dataset");
    convert->add_option("--input", conv_inputs, "One CSV per view, in view order")->required();
    convert->add_option("--view-name", conv_names, "Names for the views");
    convert->add_flag("--header", conv_header, "Inputs start with a header row");
    convert->add_option("--label-column", conv_label_col, "last | first | none")->capture_default_str();
    convert->add_option("--labels", conv_labels, "Separate labels file");
    convert->add_option("--orientation", conv_orient, "Input layout: samples | features")->capture_default_str();
    convert->add_option("--out-dir", conv_dir, "Output directory")->required();
    convert->add_option("--name", conv_name, "Dataset name")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(run_opts);
        if (*baseline) return cmd_baseline(base_opts, include_fusion);
        if (*grid) return cmd_grid(grid_opts, alphas, betas, gammas, surface);
        if (*synth) return cmd_synth(synth_n, synth_t, synth_k, synth_noise, synth_seed, synth_dir, synth_name);
        if (*convert)
            return cmd_convert(conv_inputs, conv_names, conv_header, conv_label_col, conv_labels,
                               conv_orient, conv_dir, conv_name);
    } catch (const DatasetError& e) {
        std::cerr << "dataset error: " << e.what() << '\n';
        return exit_dataset;
    } catch (const NumericsError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return exit_numerics;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}
