// Command-line harness: auto-encoder training, single-point paired
// simulation, SNR sweeps, and parity-matrix export.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "semturbo/autoencoder.hpp"
#include "semturbo/dataio.hpp"
#include "semturbo/experiment.hpp"
#include "semturbo/ldpc.hpp"
#include "semturbo/model.hpp"

namespace {

using namespace semturbo;

struct CommonOpts {
    std::uint64_t seed = 1;
    std::string data_dir = "data/cifar-10-batches-bin";
    int code_n = 900, code_dv = 2, code_dc = 3;
    std::uint64_t code_seed = 4;
};

void add_common(CLI::App* app, CommonOpts& c) {
    app->add_option("--seed", c.seed, "master seed");
    app->add_option("--data", c.data_dir, "CIFAR-10 binary batch directory");
    app->add_option("--code-n", c.code_n, "LDPC codeword length");
    app->add_option("--code-dv", c.code_dv, "parity checks per bit");
    app->add_option("--code-dc", c.code_dc, "bits per parity check");
    app->add_option("--code-seed", c.code_seed, "LDPC construction seed");
}

ldpc::CodeSpec code_spec(const CommonOpts& c) {
    return {c.code_n, c.code_dv, c.code_dc, c.code_seed};
}

std::vector<bitcodec::PixelImage> load_scaled(const std::string& dir, dataio::Split split,
                                              std::size_t limit) {
    auto raw = dataio::read_cifar10(dir, split, limit);
    std::vector<bitcodec::PixelImage> scaled;
    scaled.reserve(raw.size());
    for (const auto& img : raw) scaled.push_back(dataio::resize_nn(img, 3));
    return scaled;
}

std::string default_agg_path(const std::string& csv) {
    const auto pos = csv.rfind(".csv");
    if (pos != std::string::npos && pos == csv.size() - 4)
        return csv.substr(0, pos) + "_agg.csv";
    return csv + "_agg.csv";
}

int cmd_train(const CommonOpts& common, const std::string& out_path, const std::string& log_path,
              const std::string& profile, int images_override, autoenc::TrainingConfig cfg) {
    int image_count = profile == "paper" ? 50000 : 2000;
    if (profile == "paper" && cfg.epochs == 0) cfg.epochs = 200;
    if (profile == "desk" && cfg.epochs == 0) cfg.epochs = 20;
    if (images_override > 0) image_count = images_override;
    cfg.seed = common.seed;

    auto dataset = load_scaled(common.data_dir, dataio::Split::train, image_count);
    if (dataset.empty()) throw std::runtime_error("train: no images found in " + common.data_dir);
    std::cout << "training on " << dataset.size() << " images, " << cfg.epochs << " epochs, batch "
              << cfg.batch_size << ", lr " << cfg.learning_rate << "\n";

    auto model = autoenc::build_codec(autoenc::default_codec_spec(), common.seed);
    const auto log = autoenc::train(model, dataset, cfg);
    for (const auto& e : log)
        std::cout << "epoch " << e.epoch << " mean_loss " << experiment::format_value(e.mean_loss)
                  << "\n";
    nn::save_weights(model, out_path);
    std::cout << "weights written to " << out_path << "\n";
    if (!log_path.empty()) experiment::write_training_log_csv(log, log_path);
    return 0;
}

int run_points(const CommonOpts& common, experiment::ExperimentConfig cfg,
               const std::string& weights, const std::string& csv, std::string agg_csv) {
    cfg.seed = common.seed;
    cfg.code = code_spec(common);
    auto code = ldpc::SystematicCode(ldpc::construct_regular_code(cfg.code));
    std::cout << "code: n=" << code.n() << " m=" << code.parity().rows() << " rank=" << code.rank()
              << " k=" << code.k() << "\n";

    nn::Model<float> model;
    if (!cfg.baseline_only) model = nn::load_weights(weights);

    auto images = load_scaled(common.data_dir, dataio::Split::test, cfg.image_count);
    auto result = experiment::run_sweep(cfg, code, cfg.baseline_only ? nullptr : &model, images);

    if (!csv.empty()) {
        experiment::write_round_csv(result.rows, csv);
        if (agg_csv.empty()) agg_csv = default_agg_path(csv);
        experiment::write_aggregate_csv(result.aggregates, agg_csv);
        std::cout << "per-round CSV: " << csv << "\naggregate CSV: " << agg_csv << "\n";
    }
    for (const auto& a : result.aggregates)
        std::cout << "snr " << a.snr_db << " dB: ber_ic=" << experiment::format_value(a.ber_ic)
                  << " ber_noic=" << experiment::format_value(a.ber_noic)
                  << " ed_ic=" << experiment::format_value(a.ed_ic)
                  << " ed_noic=" << experiment::format_value(a.ed_noic)
                  << " mi_gain=" << experiment::format_value(a.mi.gain) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LDPC + semantic auto-encoder turbo receiver simulator"};
    app.set_config("--config", "", "flat key=value config file; flags take precedence");
    app.require_subcommand(1);

    CommonOpts common;

    // train
    auto* train = app.add_subcommand("train", "train the semantic auto-encoder");
    add_common(train, common);
    std::string train_out = "weights.semw", train_log, profile = "desk";
    int train_images = 0;
    autoenc::TrainingConfig tcfg;
    tcfg.epochs = 0;  // resolved from profile unless overridden
    train->add_option("--out", train_out, "output weights file");
    train->add_option("--log", train_log, "training log CSV (epoch,mean_loss)");
    train->add_option("--profile", profile, "desk (2000 imgs, 20 epochs) or paper (50000, 200)")
        ->check(CLI::IsMember({"desk", "paper"}));
    train->add_option("--images", train_images, "override training image count");
    train->add_option("--epochs", tcfg.epochs, "override epoch count");
    train->add_option("--batch-size", tcfg.batch_size, "mini-batch size");
    train->add_option("--lr", tcfg.learning_rate, "Adam learning rate");
    train->add_option("--corrupt-ber-lo", tcfg.corruption.ber_low, "training bitflip BER low");
    train->add_option("--corrupt-ber-hi", tcfg.corruption.ber_high, "training bitflip BER high");
    std::string corrupt_mode = "bitflip";
    train->add_option("--corrupt-mode", corrupt_mode, "bitflip | gaussian | none")
        ->check(CLI::IsMember({"bitflip", "gaussian", "none"}));
    train->add_option("--corrupt-sigma", tcfg.corruption.gaussian_sigma, "gaussian corruption sigma");

    // simulate / sweep share most options
    experiment::ExperimentConfig ecfg;
    std::string weights = "weights.semw", csv, agg_csv;
    double snr_db = 0.0, snr_from = -5.0, snr_to = 8.0, snr_step = 1.0;

    auto add_sim_opts = [&](CLI::App* sub) {
        add_common(sub, common);
        sub->add_option("--weights", weights, "trained weights file");
        sub->add_option("--images", ecfg.image_count, "test image count");
        sub->add_option("--rounds", ecfg.turbo.rounds, "outer turbo rounds T");
        sub->add_option("--inner-iters", ecfg.turbo.inner_bp_iters, "BP iterations per round L");
        sub->add_option("--alpha", ecfg.turbo.alpha, "a priori LLR magnitude");
        sub->add_flag("--apriori-all-bits", ecfg.turbo.apriori_all_bits,
                      "re-encode and apply a priori to parity bits too");
        sub->add_flag("--uniform-apriori",
                      [&](std::int64_t) { ecfg.turbo.adaptive_apriori = false; },
                      "constant magnitude alpha on every systematic bit instead of "
                      "confidence-gated per-plane magnitudes");
        sub->add_flag("--early-stop", ecfg.turbo.early_stop,
                      "stop outer rounds once all blocks converge");
        sub->add_flag("--baseline-only", ecfg.baseline_only, "skip the semantic stage entirely");
        sub->add_flag("--noiseless", ecfg.noiseless, "disable channel noise");
        sub->add_option("--csv", csv, "per-round CSV output");
        sub->add_option("--agg-csv", agg_csv, "aggregate CSV output (default <csv>_agg.csv)");
        sub->add_option("--dump-images", ecfg.dump_dir, "directory for per-round PNG dumps");
        sub->add_option("--threads", ecfg.threads,
                        "worker threads (0 = auto; SEMANTIC_TURBO_THREADS caps)");
    };

    auto* simulate = app.add_subcommand("simulate", "paired run at one SNR point");
    add_sim_opts(simulate);
    simulate->add_option("--snr-db", snr_db, "SNR in dB");

    auto* sweep = app.add_subcommand("sweep", "paired runs over an SNR range");
    add_sim_opts(sweep);
    sweep->add_option("--snr-from", snr_from, "sweep start (dB)");
    sweep->add_option("--snr-to", snr_to, "sweep end, inclusive (dB)");
    sweep->add_option("--snr-step", snr_step, "sweep step (dB)");

    // render-h
    auto* render = app.add_subcommand("render-h", "dump the parity-check matrix in alist format");
    add_common(render, common);
    std::string alist_out = "code.alist";
    render->add_option("--out", alist_out, "output alist path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) {
            if (corrupt_mode == "none")
                tcfg.corruption.mode = autoenc::CorruptionSpec::Mode::none;
            else if (corrupt_mode == "gaussian")
                tcfg.corruption.mode = autoenc::CorruptionSpec::Mode::gaussian;
            if (tcfg.epochs < 0) throw std::invalid_argument("train: epochs must be >= 1");
            return cmd_train(common, train_out, train_log, profile, train_images, tcfg);
        }
        if (simulate->parsed()) {
            ecfg.snr_db = {snr_db};
            return run_points(common, ecfg, weights, csv, agg_csv);
        }
        if (sweep->parsed()) {
            if (snr_step <= 0) throw std::invalid_argument("sweep: step must be positive");
            for (double s = snr_from; s <= snr_to + 1e-9; s += snr_step) ecfg.snr_db.push_back(s);
            return run_points(common, ecfg, weights, csv, agg_csv);
        }
        if (render->parsed()) {
            auto h = ldpc::construct_regular_code(code_spec(common));
            std::ofstream os(alist_out, std::ios::trunc);
            if (!os) throw std::runtime_error("cannot open " + alist_out);
            ldpc::write_alist(h, os);
            std::cout << "alist written to " << alist_out << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
