#include "semturbo/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "semturbo/dataio.hpp"
#include "semturbo/parallel.hpp"

namespace semturbo::experiment {

std::string format_value(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

TransmittedImage transmit_image(const bitcodec::PixelImage& img, const ldpc::SystematicCode& code,
                                const phy::SnrConfig& snr, std::uint64_t seed, int image_idx,
                                bool noiseless) {
    TransmittedImage out;
    out.frame = bitcodec::frame_image(bitcodec::quantize_image(img), code.k());
    const int blocks = out.frame.block_count();
    out.received.resize(blocks);
    for (int b = 0; b < blocks; ++b) {
        const auto codeword = code.encode(out.frame.block(b));
        auto noise = rng::derive(seed, rng::StreamTag::channel_noise, image_idx, b);
        out.received[b] = phy::transmit(codeword, snr, noise, noiseless);
    }
    return out;
}

namespace {

struct ImageOutcome {
    std::vector<RoundRow> rows;
    bitcodec::Bits sent, ic_payload, noic_payload;
    double final_ed_ic = 0, final_ed_noic = 0, final_ed_sem = 0;
};

void dump_rounds(const std::string& dir, double snr_db, int image_idx, const char* tag,
                 const std::vector<bitcodec::PixelImage>& imgs) {
    for (std::size_t r = 0; r < imgs.size(); ++r) {
        char name[128];
        std::snprintf(name, sizeof(name), "snr%+g_img%03d_round%zu_%s.png", snr_db, image_idx, r + 1,
                      tag);
        dataio::write_png(imgs[r], dir + "/" + name);
    }
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg, const ldpc::SystematicCode& code,
                      const nn::Model<float>* model,
                      const std::vector<bitcodec::PixelImage>& test_images) {
    if (cfg.snr_db.empty()) throw std::invalid_argument("run_sweep: SNR list is empty");
    if (cfg.image_count < 1) throw std::invalid_argument("run_sweep: image count must be >= 1");
    if (static_cast<int>(test_images.size()) < cfg.image_count)
        throw std::invalid_argument("run_sweep: requested " + std::to_string(cfg.image_count) +
                                    " images but only " + std::to_string(test_images.size()) +
                                    " available");
    if (!cfg.baseline_only && (model == nullptr || model->layers.empty()))
        throw std::invalid_argument("run_sweep: no trained model loaded");
    const bool dump = !cfg.dump_dir.empty();
    if (dump) std::filesystem::create_directories(cfg.dump_dir);

    turbo::TurboConfig ic_cfg = cfg.turbo;
    ic_cfg.semantic_enabled = !cfg.baseline_only;
    turbo::TurboConfig noic_cfg = cfg.turbo;
    noic_cfg.semantic_enabled = false;

    SweepResult result;
    for (double snr_db : cfg.snr_db) {
        const phy::SnrConfig snr{snr_db};
        std::vector<ImageOutcome> outcomes(cfg.image_count);
        parallel::for_each_index(cfg.image_count, cfg.threads, [&](std::size_t idx) {
            const int image_idx = static_cast<int>(idx);
            const bitcodec::PixelImage& source = test_images[idx];
            const auto tx = transmit_image(source, code, snr, cfg.seed, image_idx, cfg.noiseless);

            auto ic = turbo::run_turbo_decode(tx.received, code, model, snr, ic_cfg, tx.frame,
                                              source.h, source.w, &source, dump);
            auto noic = cfg.baseline_only
                            ? ic
                            : turbo::run_turbo_decode(tx.received, code, nullptr, snr, noic_cfg,
                                                      tx.frame, source.h, source.w, &source, dump);

            ImageOutcome& out = outcomes[idx];
            out.rows.reserve(ic.trace.size());
            for (std::size_t r = 0; r < ic.trace.size(); ++r) {
                const auto& a = ic.trace[r];
                const auto& b = noic.trace[std::min(r, noic.trace.size() - 1)];
                out.rows.push_back({snr_db, image_idx, a.round, a.ber, b.ber, a.ed, b.ed, a.psnr,
                                    b.psnr, a.ed_sem, a.psnr_sem});
            }
            out.sent = bitcodec::quantize_image(source);
            out.ic_payload = ic.payload_bits;
            out.noic_payload = noic.payload_bits;
            out.final_ed_ic = ic.trace.back().ed;
            out.final_ed_noic = noic.trace.back().ed;
            out.final_ed_sem = ic.trace.back().ed_sem;
            if (dump) {
                dump_rounds(cfg.dump_dir, snr_db, image_idx, "ic", ic.round_channel_images);
                dump_rounds(cfg.dump_dir, snr_db, image_idx, "sem", ic.round_semantic_images);
                if (!cfg.baseline_only)
                    dump_rounds(cfg.dump_dir, snr_db, image_idx, "noic", noic.round_channel_images);
                char name[64];
                std::snprintf(name, sizeof(name), "img%03d_source.png", image_idx);
                dataio::write_png(source, cfg.dump_dir + "/" + name);
            }
        });

        SnrAggregate agg{};
        agg.snr_db = snr_db;
        metrics::JointHistogram hist_sem, hist_chan;
        const double samples = static_cast<double>(test_images[0].sample_count());
        double mse_ic = 0, mse_noic = 0, mse_sem = 0;
        for (const auto& out : outcomes) {
            result.rows.insert(result.rows.end(), out.rows.begin(), out.rows.end());
            const auto& last = out.rows.back();
            agg.ber_ic += last.ber_ic;
            agg.ber_noic += last.ber_noic;
            agg.ed_ic += last.ed_ic;
            agg.ed_noic += last.ed_noic;
            agg.ed_sem += last.ed_sem;
            mse_ic += out.final_ed_ic * out.final_ed_ic / samples;
            mse_noic += out.final_ed_noic * out.final_ed_noic / samples;
            mse_sem += out.final_ed_sem * out.final_ed_sem / samples;
            hist_sem.accumulate(out.sent, out.ic_payload);
            hist_chan.accumulate(out.sent, out.noic_payload);
        }
        const double inv_n = 1.0 / cfg.image_count;
        agg.ber_ic *= inv_n;
        agg.ber_noic *= inv_n;
        agg.ed_ic *= inv_n;
        agg.ed_noic *= inv_n;
        agg.ed_sem *= inv_n;
        auto psnr_of = [](double mean_mse) {
            return mean_mse == 0.0 ? std::numeric_limits<double>::infinity()
                                   : 10.0 * std::log10(255.0 * 255.0 / mean_mse);
        };
        agg.psnr_ic = psnr_of(mse_ic * inv_n);
        agg.psnr_noic = psnr_of(mse_noic * inv_n);
        agg.psnr_sem = psnr_of(mse_sem * inv_n);
        agg.mi.i_semantic = hist_sem.mutual_information(&agg.mi.degenerate_semantic);
        agg.mi.i_channel = hist_chan.mutual_information(&agg.mi.degenerate_channel);
        agg.mi.gain = agg.mi.i_semantic - agg.mi.i_channel;
        result.aggregates.push_back(agg);
    }
    return result;
}

void write_round_csv(const std::vector<RoundRow>& rows, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open CSV output " + path);
    os << "snr_db,image_idx,round,ber_ic,ber_noic,ed_ic,ed_noic,psnr_ic,psnr_noic,ed_sem,psnr_sem\n";
    for (const auto& r : rows) {
        os << format_value(r.snr_db) << ',' << r.image_idx << ',' << r.round << ','
           << format_value(r.ber_ic) << ',' << format_value(r.ber_noic) << ','
           << format_value(r.ed_ic) << ',' << format_value(r.ed_noic) << ','
           << format_value(r.psnr_ic) << ',' << format_value(r.psnr_noic) << ','
           << format_value(r.ed_sem) << ',' << format_value(r.psnr_sem) << '\n';
    }
    if (!os) throw std::runtime_error("write failed for CSV output " + path);
}

void write_aggregate_csv(const std::vector<SnrAggregate>& aggs, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open CSV output " + path);
    os << "snr_db,ber_ic,ber_noic,ed_ic,ed_noic,psnr_ic,psnr_noic,ed_sem,psnr_sem,mi_s,mi_c,mi_gain\n";
    for (const auto& a : aggs) {
        os << format_value(a.snr_db) << ',' << format_value(a.ber_ic) << ','
           << format_value(a.ber_noic) << ',' << format_value(a.ed_ic) << ','
           << format_value(a.ed_noic) << ',' << format_value(a.psnr_ic) << ','
           << format_value(a.psnr_noic) << ',' << format_value(a.ed_sem) << ','
           << format_value(a.psnr_sem) << ',' << format_value(a.mi.i_semantic) << ','
           << format_value(a.mi.i_channel) << ',' << format_value(a.mi.gain) << '\n';
    }
    if (!os) throw std::runtime_error("write failed for CSV output " + path);
}

void write_training_log_csv(const std::vector<autoenc::EpochStats>& log, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open CSV output " + path);
    os << "epoch,mean_loss\n";
    for (const auto& e : log) os << e.epoch << ',' << format_value(e.mean_loss) << '\n';
    if (!os) throw std::runtime_error("write failed for CSV output " + path);
}

}  // namespace semturbo::experiment
