// Command-line surface for the compressive-analysis toolkit.
//
// Exit codes: 0 success, 1 runtime failure (bad data, solver failure),
// 2 usage error (unknown flags, missing arguments).

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ca/classify.hpp"
#include "ca/datasets.hpp"
#include "ca/hash.hpp"
#include "ca/io.hpp"
#include "ca/privacy.hpp"
#include "ca/reconstruction.hpp"
#include "ca/regression.hpp"
#include "ca/sensing.hpp"
#include "ca/tradeoff.hpp"
#include "ca/version.hpp"

namespace {

struct GenMatrixArgs {
    std::uint64_t seed = 0;
    int rows = 0;
    int cols = 0;
    std::string ensemble = "gaussian";
    std::string out;
    bool header_only = false;
};

void run_gen_matrix(const GenMatrixArgs& args) {
    const ca::SensingMatrix phi =
        ca::generate_matrix(args.seed, args.rows, args.cols, ca::parse_ensemble(args.ensemble));
    ca::save_matrix(phi, args.out, args.header_only);
    std::cout << "wrote " << phi.rows() << "x" << phi.cols() << " " << to_string(phi.id.ensemble)
              << " matrix (seed " << phi.id.seed << ", ratio "
              << ca::compression_ratio(phi) << ") to " << args.out << "\n";
}

struct AcquireArgs {
    std::string matrix;
    std::string input;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::string out;
};

void run_acquire(const AcquireArgs& args) {
    const ca::SensingMatrix phi = ca::load_matrix(args.matrix);
    const ca::Signal x = ca::make_signal(ca::load_vector_csv(args.input));
    const ca::Measurement y = args.sigma > 0.0
                                  ? ca::acquire_noisy(phi, x, args.sigma, args.seed)
                                  : ca::acquire(phi, x);
    if (args.out.empty()) {
        for (int i = 0; i < y.values.size(); ++i)
            std::cout << ca::detail::format_double(y.values[i]) << "\n";
    } else {
        ca::save_vector_csv(y.values, args.out);
        std::cout << "wrote " << y.size() << " measurements to " << args.out << "\n";
    }
}

struct ReconstructArgs {
    std::string matrix;
    std::string input;
    std::string method = "omp";
    int k = 0; // 0: default to m/2
    double lambda = 0.1;
    int max_iters = 500;
    double tol = 1e-8;
    std::string out;
    std::string truth;
    double peak = 0.0; // 0: no psnr
};

void run_reconstruct(const ReconstructArgs& args) {
    const ca::SensingMatrix phi = ca::load_matrix(args.matrix);
    ca::Measurement y;
    y.values = ca::load_vector_csv(args.input);
    y.matrix_id = phi.id;

    ca::SparseEstimate estimate;
    if (args.method == "omp") {
        const int k = args.k > 0 ? args.k : std::max(1, phi.rows() / 2);
        estimate = ca::omp(phi, y, k);
    } else if (args.method == "ista") {
        estimate = ca::ista(phi, y, args.lambda, args.max_iters, args.tol);
    } else {
        throw ca::parameter_error("method must be omp or ista");
    }

    std::cout << "method=" << args.method << " iterations=" << estimate.iterations
              << " support=" << estimate.support.size()
              << " residual_norm=" << ca::detail::format_double(estimate.residual_norm) << "\n";
    if (!args.truth.empty()) {
        const ca::Signal truth = ca::make_signal(ca::load_vector_csv(args.truth));
        const std::optional<double> peak =
            args.peak > 0.0 ? std::optional<double>(args.peak) : std::nullopt;
        const ca::ReconMetrics metrics = ca::evaluate_reconstruction(truth, estimate, peak);
        std::cout << "relative_l2=" << ca::detail::format_double(metrics.relative_l2);
        if (metrics.psnr_db)
            std::cout << " psnr_db=" << ca::detail::format_double(*metrics.psnr_db);
        std::cout << " support_recovered=" << (metrics.support_recovered ? "true" : "false")
                  << "\n";
    }
    if (!args.out.empty()) {
        ca::save_vector_csv(estimate.values, args.out);
        std::cout << "wrote estimate to " << args.out << "\n";
    }
}

struct ClassifyArgs {
    std::string matrix;
    std::string templates;
    std::string input;
    bool scores = false;
};

void run_classify(const ClassifyArgs& args) {
    const ca::SensingMatrix phi = ca::load_matrix(args.matrix);
    const ca::ClassTemplates templates = ca::load_templates_csv(args.templates);
    ca::Measurement y;
    y.values = ca::load_vector_csv(args.input);
    y.matrix_id = phi.id;
    const ca::ClassificationResult result = ca::classify(y, phi, templates);
    std::cout << result.label << "\n";
    if (args.scores) {
        std::cout << "margin=" << ca::detail::format_double(result.margin) << "\n";
        for (int c = 0; c < templates.num_classes(); ++c)
            std::cout << "score," << templates.classes[static_cast<std::size_t>(c)] << ","
                      << ca::detail::format_double(result.scores[static_cast<std::size_t>(c)])
                      << "\n";
    }
}

struct HashArgs {
    std::string kind = "dhash";
    std::vector<std::string> files;
    int threshold = 10;
};

void run_hash(const HashArgs& args) {
    const ca::HashKind kind = ca::parse_hash_kind(args.kind);
    const auto hash_file = [&](const std::string& path) {
        const ca::GrayImage img = ca::load_pgm(path);
        switch (kind) {
            case ca::HashKind::AHash: return ca::ahash(img);
            case ca::HashKind::DHash: return ca::dhash(img);
            case ca::HashKind::PHash: return ca::phash(img);
        }
        throw ca::parameter_error("unknown hash kind");
    };
    const ca::PerceptualHash first = hash_file(args.files.front());
    std::cout << ca::to_string(first) << "\n";
    if (args.files.size() == 2) {
        const ca::PerceptualHash second = hash_file(args.files[1]);
        std::cout << ca::to_string(second) << "\n";
        const int distance = ca::hamming(first, second);
        std::cout << "distance=" << distance << " duplicate="
                  << (ca::is_duplicate(first, second, args.threshold) ? "true" : "false") << "\n";
    }
}

struct RegressArgs {
    std::string data;
    int mask_rows = 0; // 0: raw OLS
    bool orthogonal = false;
    std::string ensemble = "gaussian";
    std::uint64_t seed = 0;
    std::string out;
};

void run_regress(const RegressArgs& args) {
    auto [x, y] = ca::load_dataset_csv(args.data);
    const ca::RegressionProblem problem = ca::make_problem(std::move(x), std::move(y));

    ca::RegressionFit fit;
    if (args.orthogonal) {
        fit = ca::masked_ols(problem, ca::orthonormal_mask(args.seed, static_cast<int>(problem.X.rows())));
    } else if (args.mask_rows > 0) {
        const ca::SensingMatrix mask =
            ca::generate_matrix(args.seed, args.mask_rows, static_cast<int>(problem.X.rows()),
                                ca::parse_ensemble(args.ensemble));
        fit = ca::masked_ols(problem, mask);
    } else {
        fit = ca::ols(problem);
    }

    nlohmann::ordered_json doc;
    doc["beta"] = std::vector<double>(fit.beta.data(), fit.beta.data() + fit.beta.size());
    doc["rss"] = fit.rss;
    doc["masked"] = fit.masked;
    doc["mask_rows"] = fit.mask_rows;
    const std::string text = doc.dump(2) + "\n";
    if (args.out.empty()) {
        std::cout << text;
    } else {
        ca::detail::write_file(args.out, text);
        std::cout << "wrote fit to " << args.out << "\n";
    }
}

struct TradeoffArgs {
    std::string config;
    std::string out;
    std::string csv;
    int workers = 1;
    std::optional<std::uint64_t> seed;
    std::optional<double> target;
};

void run_tradeoff_cmd(const TradeoffArgs& args) {
    ca::ExperimentConfig cfg = ca::parse_experiment_config(ca::load_config(args.config));
    if (args.seed) cfg.master_seed = *args.seed;
    const ca::TradeoffReport report = ca::run_tradeoff(cfg, args.workers);

    for (const ca::TradeoffRow& row : report.rows) {
        std::printf("m=%5d  ratio=%7.4f%%  ", row.m, 100.0 * row.ratio);
        if (row.skipped) {
            std::printf("skipped (%s)\n", row.skip_reason.c_str());
            continue;
        }
        std::printf("utility=%.4f+-%.4f  leakage_l2=%.4f  psnr=%.2fdB  attack=%s  [%.2fs]\n",
                    row.utility_accuracy_mean, row.utility_accuracy_std,
                    row.leakage_relative_l2_median, row.leakage_psnr_db_median,
                    row.attack_used.c_str(), row.wall_time_s);
    }
    if (args.target) {
        const auto m = ca::scan_min_components(report, *args.target);
        if (m)
            std::printf("min m with utility >= %.4f: %d\n", *args.target, *m);
        else
            std::printf("no sweep point reaches utility %.4f\n", *args.target);
    }
    if (!args.out.empty()) ca::detail::write_file(args.out, ca::report_to_json(report));
    if (!args.csv.empty()) ca::detail::write_file(args.csv, ca::report_to_csv(report));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(ca::kToolkitName) + " " + ca::kToolkitVersion +
                 " - inference on compressed data without reconstruction"};
    app.require_subcommand(1);

    GenMatrixArgs gen;
    CLI::App* gen_cmd = app.add_subcommand("gen-matrix", "generate a seeded sensing matrix");
    gen_cmd->add_option("--seed", gen.seed, "matrix stream seed");
    gen_cmd->add_option("--rows,-m", gen.rows, "measurement count m")->required();
    gen_cmd->add_option("--cols,-n", gen.cols, "signal dimension n")->required();
    gen_cmd->add_option("--ensemble", gen.ensemble, "gaussian | bernoulli | identity");
    gen_cmd->add_option("--out", gen.out, "output .csmx path")->required();
    gen_cmd->add_flag("--header-only", gen.header_only,
                      "write only the 22-byte header; entries regenerate on load");
    gen_cmd->callback([&] { run_gen_matrix(gen); });

    AcquireArgs acq;
    CLI::App* acq_cmd = app.add_subcommand("acquire", "compressively acquire a signal: y = Phi x");
    acq_cmd->add_option("--matrix", acq.matrix, "sensing matrix (.csmx)")->required();
    acq_cmd->add_option("--in", acq.input, "signal vector csv")->required();
    acq_cmd->add_option("--sigma", acq.sigma, "gaussian measurement-noise level");
    acq_cmd->add_option("--seed", acq.seed, "noise stream seed");
    acq_cmd->add_option("--out", acq.out, "measurement csv (default: stdout)");
    acq_cmd->callback([&] { run_acquire(acq); });

    ReconstructArgs rec;
    CLI::App* rec_cmd = app.add_subcommand("reconstruct", "sparse-recovery attack on measurements");
    rec_cmd->add_option("--matrix", rec.matrix, "sensing matrix (.csmx)")->required();
    rec_cmd->add_option("--in", rec.input, "measurement csv")->required();
    rec_cmd->add_option("--method", rec.method, "omp | ista");
    rec_cmd->add_option("--k", rec.k, "omp sparsity (default m/2)");
    rec_cmd->add_option("--lambda", rec.lambda, "ista l1 weight");
    rec_cmd->add_option("--max-iters", rec.max_iters, "ista iteration cap");
    rec_cmd->add_option("--tol", rec.tol, "ista iterate-change tolerance");
    rec_cmd->add_option("--out", rec.out, "estimate csv");
    rec_cmd->add_option("--truth", rec.truth, "ground-truth csv for recovery metrics");
    rec_cmd->add_option("--peak", rec.peak, "peak value for psnr (with --truth)");
    rec_cmd->callback([&] { run_reconstruct(rec); });

    ClassifyArgs cls;
    CLI::App* cls_cmd = app.add_subcommand("classify", "smashed-filter classification of a measurement");
    cls_cmd->add_option("--matrix", cls.matrix, "sensing matrix (.csmx)")->required();
    cls_cmd->add_option("--templates", cls.templates, "templates csv (class id, values...)")->required();
    cls_cmd->add_option("--in", cls.input, "measurement csv")->required();
    cls_cmd->add_flag("--scores", cls.scores, "also print margin and per-class distances");
    cls_cmd->callback([&] { run_classify(cls); });

    HashArgs hash;
    CLI::App* hash_cmd = app.add_subcommand("hash", "perceptual hash of PGM images");
    hash_cmd->add_option("--kind", hash.kind, "ahash | dhash | phash");
    hash_cmd->add_option("files", hash.files, "one image, or two to compare")
        ->expected(1, 2)
        ->required();
    hash_cmd->add_option("--threshold", hash.threshold, "duplicate decision threshold");
    hash_cmd->callback([&] { run_hash(hash); });

    RegressArgs reg;
    CLI::App* reg_cmd = app.add_subcommand("regress-mask", "least squares on matrix-masked data");
    reg_cmd->add_option("--data", reg.data, "dataset csv, last column = response")->required();
    reg_cmd->add_option("--mask-rows", reg.mask_rows, "rows of the random mask (default: no mask)");
    reg_cmd->add_flag("--orthogonal", reg.orthogonal, "use a square orthonormal mask");
    reg_cmd->add_option("--ensemble", reg.ensemble, "mask ensemble (with --mask-rows)");
    reg_cmd->add_option("--seed", reg.seed, "mask stream seed");
    reg_cmd->add_option("--out", reg.out, "fit json (default: stdout)");
    reg_cmd->callback([&] { run_regress(reg); });

    TradeoffArgs tr;
    CLI::App* tr_cmd = app.add_subcommand("tradeoff", "sweep m and report utility vs leakage");
    tr_cmd->add_option("--config", tr.config, "experiment config file")->required();
    tr_cmd->add_option("--out", tr.out, "report json path");
    tr_cmd->add_option("--csv", tr.csv, "report csv path (includes wall times)");
    tr_cmd->add_option("--workers", tr.workers, "trial-level worker threads");
    tr_cmd->add_option("--seed", tr.seed, "override master_seed from the config");
    tr_cmd->add_option("--target", tr.target, "report the smallest m reaching this utility");
    tr_cmd->callback([&] { run_tradeoff_cmd(tr); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return 2;
    } catch (const ca::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
