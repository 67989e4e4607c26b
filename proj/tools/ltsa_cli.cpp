// Command-line front end: generate synthetic datasets, run embeddings,
// evaluate against ground truth, and emit CSV/SVG artifacts.
//
// Exit codes: 0 success, 2 invalid arguments or malformed input data,
// 3 I/O failure, 4 eigensolver non-convergence (report still written).
// stdout carries key=value summaries only; diagnostics go to stderr.

#include "ltsa/analysis.hpp"
#include "ltsa/csv.hpp"
#include "ltsa/dataset.hpp"
#include "ltsa/reconstruct.hpp"
#include "ltsa/svg.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace ltsa;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void emit(const std::string& key, const std::string& value) {
    std::cout << key << '=' << value << '\n';
}

struct GenerateArgs {
    std::string curve;
    bool peak = false;
    bool three_gaussians = false;
    Index n = 400;
    Index n_per = 100;
    double eta = 0.0;
    std::uint64_t seed = 1;
    std::string embed_mode;  // "", "orthogonal", "affine"
    Index target_dim = 0;
    std::string output;
};

int run_generate(const GenerateArgs& args) {
    const int chosen = (args.curve.empty() ? 0 : 1) + (args.peak ? 1 : 0) +
                       (args.three_gaussians ? 1 : 0);
    if (chosen != 1)
        throw InvalidArgument("choose exactly one of --curve, --peak, --three-gaussians");

    std::map<std::string, std::string> meta;
    meta["seed"] = std::to_string(args.seed);

    if (args.three_gaussians) {
        if (!args.embed_mode.empty())
            throw InvalidArgument("--embed is not supported for --three-gaussians");
        const LabeledSet set = gen_three_gaussians(args.n_per, args.seed);
        meta["generator"] = "three_gaussians";
        meta["n_per"] = std::to_string(args.n_per);
        save_dataset(args.output, set.data, nullptr, &set.labels, meta);
        emit("written", args.output + ".csv");
        emit("n", std::to_string(set.data.N()));
        return 0;
    }

    auto [data, truth] = args.peak ? gen_peak_surface(args.n, args.eta, args.seed)
                                   : gen_curve(args.curve, args.n, args.eta, args.seed);
    meta["generator"] = args.peak ? "peak" : args.curve;

    if (!args.embed_mode.empty()) {
        if (args.target_dim < data.m())
            throw InvalidArgument("--target-dim must be at least the source dimension");
        const EmbedMode mode =
            args.embed_mode == "orthogonal" ? EmbedMode::Orthogonal : EmbedMode::Affine;
        HighDimEmbedding embedded = embed_highdim(data, args.target_dim, mode, args.seed);
        meta["embed"] = args.embed_mode;
        meta["embed_source_m"] = std::to_string(data.m());
        save_dataset(args.output, embedded.data, &truth, nullptr, meta, &embedded.transform);
        emit("written", args.output + ".csv");
        emit("m", std::to_string(embedded.data.m()));
        emit("n", std::to_string(embedded.data.N()));
        return 0;
    }

    save_dataset(args.output, data, &truth, nullptr, meta);
    emit("written", args.output + ".csv");
    emit("m", std::to_string(data.m()));
    emit("n", std::to_string(data.N()));
    return 0;
}

struct EmbedArgs {
    std::string input;
    Index k = 8;
    int d = 1;
    std::string method = "ltsa";
    double tol = 1e-10;
    Index dense_threshold = 2000;
    Index max_iter = 0;
    std::string solver = "auto";
    double reg = 1e-3;
    std::string output = "coords.csv";
    std::string report = "solver_report.txt";
    std::string rmap;  // optional: fit and save the reconstruction map (ltsa only)
};

void write_solver_report(const std::string& path, const Embedding& emb) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    out << emb.solver_report.to_key_values();
    for (Index i = 0; i < emb.eigenvalues.size(); ++i)
        out << "eigenvalue_" << i << '=' << fmt(emb.eigenvalues[i]) << '\n';
}

int run_embed(const EmbedArgs& args) {
    const DatasetBundle bundle = load_dataset(args.input);

    SolverOptions solver;
    solver.tol = args.tol;
    solver.dense_threshold = args.dense_threshold;
    solver.max_iter = args.max_iter;
    if (args.solver == "dense") solver.method = SolverOptions::Method::Dense;
    if (args.solver == "lanczos") solver.method = SolverOptions::Method::Lanczos;

    Embedding emb;
    try {
        if (args.method == "ltsa") {
            LtsaOptions options;
            options.solver = solver;
            const LtsaResult result = ltsa_embed(bundle.data, args.k, args.d, options);
            emb = result.embedding;
            if (!args.rmap.empty()) {
                const ReconstructionMap rmap =
                    fit_reconstruction(bundle.data, result.embedding, result.frames, result.nbrs);
                save_rmap(args.rmap, rmap);
                emit("written_rmap", args.rmap);
            }
        } else if (args.method == "lle") {
            LleOptions options;
            options.reg = args.reg;
            options.solver = solver;
            emb = lle_embed(bundle.data, args.k, args.d, options).embedding;
        } else {
            emb = linear_embed(bundle.data, args.d).embedding;
        }
    } catch (const SolverError& e) {
        std::ofstream out(args.report, std::ios::binary);
        out << "method=failed\nerror=" << e.what() << '\n';
        for (std::size_t i = 0; i < e.best_residuals.size(); ++i)
            out << "residual_" << i << '=' << fmt(e.best_residuals[i]) << '\n';
        throw;
    }

    save_csv_matrix(args.output, emb.T.transpose());
    write_solver_report(args.report, emb);
    for (const auto& w : emb.solver_report.warnings) std::cerr << "warning: " << w << '\n';
    emit("written", args.output);
    emit("method", args.method);
    emit("d", std::to_string(emb.d));
    return 0;
}

struct EvaluateArgs {
    std::string input;
    std::string coords;
    Index k = 8;
    int d = 1;
    double dim_threshold = 0.3;
    std::string out_prefix;
};

int run_evaluate(const EvaluateArgs& args) {
    const DatasetBundle bundle = load_dataset(args.input);
    const std::string prefix =
        args.out_prefix.empty() ? args.input.substr(0, args.input.find_last_of('.')) + "_eval"
                                : args.out_prefix;

    Matrix coords = load_csv_matrix(args.coords).transpose();  // d x N
    if (coords.cols() != bundle.data.N())
        throw InvalidArgument("coordinate count does not match the dataset");
    if (coords.rows() != args.d)
        throw InvalidArgument("coordinate dimension does not match --d");

    const NeighborhoodIndex nbrs = knn_tree(bundle.data, args.k);
    const std::vector<LocalFrame> frames = all_frames(bundle.data, nbrs, args.d);

    // Ratio profile is always available.
    {
        const Index ranks = frames.front().sigmas.size() - 1;
        std::ofstream out(prefix + "_ratios.csv", std::ios::binary);
        if (!out) throw IoError("cannot write file: " + prefix + "_ratios.csv");
        out << "i";
        for (Index j = 1; j <= ranks; ++j) out << ",rho" << j;
        out << '\n';
        std::vector<RatioProfile> profiles;
        for (Index j = 1; j <= ranks; ++j)
            profiles.push_back(singular_ratio_profile(frames, static_cast<int>(j)));
        for (Index i = 0; i < bundle.data.N(); ++i) {
            out << i;
            for (Index j = 0; j < ranks; ++j) out << ',' << fmt(profiles[j].ratios[i]);
            out << '\n';
        }
        emit("written_ratios", prefix + "_ratios.csv");
    }
    const auto dim = estimate_dim(frames, args.dim_threshold);
    emit("estimated_dim", dim ? std::to_string(*dim) : "undetermined");

    if (!bundle.labels.empty()) {
        const double score = cluster_separation(coords, bundle.labels);
        emit("cluster_separation", fmt(score));
    }

    if (!bundle.truth.has_value()) {
        std::cerr << "warning: no ground truth sidecar; only the ratio profile was computed\n";
        return 0;
    }
    const GroundTruth& gt = *bundle.truth;
    if (coords.rows() != gt.params.rows())
        throw InvalidArgument("coordinate dimension does not match the ground truth");

    const AffineFit fit = affine_align(coords, gt.params);
    save_affine_fit_csv(prefix + "_affine.csv", fit);
    emit("written_affine", prefix + "_affine.csv");
    emit("rms", fmt(fit.rms));
    emit("rms_rel", fmt(fit.rms_rel));

    if (gt.has_evaluators()) {
        Embedding emb;
        emb.d = args.d;
        emb.T = coords;
        const BoundReport report = theorem_bounds(bundle.data, gt, frames, nbrs, emb);
        save_bound_report_csv(prefix + "_bounds.csv", report);
        emit("written_bounds", prefix + "_bounds.csv");
        Index applicable = 0, sat = 0, inapplicable = 0;
        for (const auto& r : report.records) {
            if (!r.applicable) {
                ++inapplicable;
                continue;
            }
            ++applicable;
            if (r.sat2 && (!r.applicable34 || (r.sat3 && r.sat4))) ++sat;
        }
        emit("bounds_applicable", std::to_string(applicable));
        emit("bounds_inapplicable", std::to_string(inapplicable));
        emit("bounds_satisfied", std::to_string(sat));
    } else {
        std::cerr << "warning: ground truth has no evaluators (unknown generator); "
                     "theorem bounds skipped\n";
    }
    return 0;
}

struct PlotArgs {
    std::string input;
    std::string coords;
    std::string out_prefix;
    std::vector<int> axes{0, 1};
};

int run_plot(const PlotArgs& args) {
    const DatasetBundle bundle = load_dataset(args.input);
    const Index m = bundle.data.m();
    if (args.axes.size() != 2)
        throw InvalidArgument("--axes takes exactly two projection axes (2-D views only)");
    const int ax = args.axes[0], ay = args.axes[1];
    if (ax < 0 || ay < 0 || ax >= m || ay >= m || ax == ay)
        throw InvalidArgument("--axes must name two distinct input dimensions");

    svg::ScatterSpec data_spec;
    data_spec.title = "data";
    data_spec.x_label = "x" + std::to_string(ax);
    data_spec.y_label = "x" + std::to_string(ay);
    data_spec.x = bundle.data.values.row(ax).transpose();
    data_spec.y = bundle.data.values.row(ay).transpose();
    if (!bundle.labels.empty())
        data_spec.labels = bundle.labels;
    else if (bundle.truth.has_value())
        data_spec.color_by = bundle.truth->params.row(0).transpose();
    svg::write_scatter(args.out_prefix + "_data.svg", data_spec);
    emit("written_data", args.out_prefix + "_data.svg");

    if (args.coords.empty()) return 0;
    const Matrix coords = load_csv_matrix(args.coords).transpose();
    if (coords.cols() != bundle.data.N())
        throw InvalidArgument("coordinate count does not match the dataset");

    if (bundle.truth.has_value()) {
        svg::ScatterSpec spec;
        spec.title = "computed vs true coordinate";
        spec.x_label = "tau*";
        spec.y_label = "tau";
        spec.x = bundle.truth->params.row(0).transpose();
        spec.y = coords.row(0).transpose();
        spec.color_by = spec.x;
        svg::write_scatter(args.out_prefix + "_tau_vs_taustar.svg", spec);
        emit("written_tau_vs_taustar", args.out_prefix + "_tau_vs_taustar.svg");
    }
    if (!bundle.labels.empty()) {
        svg::ScatterSpec spec;
        spec.title = "1-D coordinate by class";
        spec.x_label = "tau";
        spec.y_label = "class";
        spec.x = coords.row(0).transpose();
        spec.y.resize(coords.cols());
        for (Index i = 0; i < coords.cols(); ++i)
            spec.y[i] = static_cast<double>(bundle.labels[static_cast<std::size_t>(i)]);
        spec.labels = bundle.labels;
        svg::write_scatter(args.out_prefix + "_strip.svg", spec);
        emit("written_strip", args.out_prefix + "_strip.svg");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Local tangent space alignment toolkit"};
    app.set_config("--config", "", "key=value config file (flags take precedence)");
    app.allow_config_extras(false);
    bool print_config = false;
    app.add_flag("--print-config", print_config, "print the effective configuration and exit");
    app.require_subcommand(0, 1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "generate a synthetic dataset");
    generate->add_option("--curve", gen.curve, "curve id")
        ->check(CLI::IsMember(curve_names()));
    generate->add_flag("--peak", gen.peak, "peak surface");
    generate->add_flag("--three-gaussians", gen.three_gaussians, "three labeled Gaussians");
    generate->add_option("--n", gen.n, "sample count");
    generate->add_option("--n-per", gen.n_per, "points per Gaussian component");
    generate->add_option("--eta", gen.eta, "noise level")->check(CLI::NonNegativeNumber);
    generate->add_option("--seed", gen.seed, "RNG seed");
    generate->add_option("--embed", gen.embed_mode, "lift into a higher-dimensional space")
        ->check(CLI::IsMember({"orthogonal", "affine"}));
    generate->add_option("--target-dim", gen.target_dim, "embedding target dimension");
    generate->add_option("-o,--output", gen.output, "output stem")->required();

    EmbedArgs emb;
    auto* embed = app.add_subcommand("embed", "compute a low-dimensional embedding");
    embed->add_option("-i,--input", emb.input, "input data CSV")->required();
    embed->add_option("--k", emb.k, "neighborhood size")->required();
    embed->add_option("--d", emb.d, "feature dimension")->required();
    embed->add_option("--method", emb.method, "embedding method")
        ->check(CLI::IsMember({"ltsa", "lle", "pca"}));
    embed->add_option("--tol", emb.tol, "eigensolver residual tolerance");
    embed->add_option("--dense-threshold", emb.dense_threshold,
                      "max N for the dense eigensolver path");
    embed->add_option("--max-iter", emb.max_iter, "Lanczos iteration cap (0 = 300*count)");
    embed->add_option("--solver", emb.solver, "eigensolver path")
        ->check(CLI::IsMember({"auto", "dense", "lanczos"}));
    embed->add_option("--reg", emb.reg, "LLE regularization weight");
    embed->add_option("-o,--output", emb.output, "coordinates CSV");
    embed->add_option("--report", emb.report, "solver report path");
    embed->add_option("--rmap", emb.rmap, "also fit and save the reconstruction map (ltsa)");

    EvaluateArgs eval;
    auto* evaluate = app.add_subcommand("evaluate", "score an embedding against ground truth");
    evaluate->add_option("-i,--input", eval.input, "input data CSV or stem")->required();
    evaluate->add_option("--coords", eval.coords, "coordinates CSV from embed")->required();
    evaluate->add_option("--k", eval.k, "neighborhood size")->required();
    evaluate->add_option("--d", eval.d, "feature dimension")->required();
    evaluate->add_option("--dim-threshold", eval.dim_threshold,
                         "singular-value-ratio threshold for dimension detection");
    evaluate->add_option("-o,--out-prefix", eval.out_prefix, "output file prefix");

    PlotArgs plot;
    auto* plot_cmd = app.add_subcommand("plot", "emit SVG scatter plots");
    plot_cmd->add_option("-i,--input", plot.input, "input data CSV or stem")->required();
    plot_cmd->add_option("--coords", plot.coords, "coordinates CSV from embed");
    plot_cmd->add_option("-o,--out-prefix", plot.out_prefix, "output file prefix")->required();
    plot_cmd->add_option("--axes", plot.axes, "two projection axes, e.g. 0,1")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }

    if (print_config) {
        std::cout << app.config_to_str(true, false);
        return 0;
    }

    try {
        if (generate->parsed()) return run_generate(gen);
        if (embed->parsed()) return run_embed(emb);
        if (evaluate->parsed()) return run_evaluate(eval);
        if (plot_cmd->parsed()) return run_plot(plot);
        std::cerr << app.help();
        return 2;
    } catch (const CsvError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
