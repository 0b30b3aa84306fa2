// xtalkprint: device and locality fingerprinting of a simulated quantum
// fleet through crosstalk idle tomography.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "xtalkprint/pipeline.hpp"

namespace xp = xtalkprint;

namespace {

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> batches;
    std::optional<int> jobs;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON run configuration file");
    cmd->add_option("--seed", opts.seed, "master seed (overrides config)");
    cmd->add_option("--out", opts.out, "output directory (overrides config)");
    cmd->add_option("--batches", opts.batches, "number of enrollment batches");
    cmd->add_option("--jobs", opts.jobs, "worker threads for enrollment/eval");
}

xp::RunConfig resolve_config(const CommonOpts& opts) {
    xp::RunConfig config;
    if (!opts.config_path.empty())
        config = xp::run_config_from_json(
            xp::Json::parse(xp::read_text_file(opts.config_path)));
    if (opts.seed) config.seed = *opts.seed;
    if (opts.out) config.out_dir = *opts.out;
    if (opts.batches) config.batches = *opts.batches;
    if (opts.jobs) config.jobs = *opts.jobs;
    return config;
}

std::string map_string(const std::vector<int>& map) {
    std::string s;
    for (std::size_t i = 0; i < map.size(); ++i) s += (i ? "," : "") + std::to_string(map[i]);
    return s;
}

std::vector<int> parse_map(const std::string& s) {
    std::vector<int> map;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) map.push_back(std::stoi(item));
    return map;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"crosstalk fingerprinting of a simulated shared quantum fleet"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto* fleet_init = app.add_subcommand("fleet-init", "generate the fleet and error models");
    add_common(fleet_init, opts);

    auto* enroll = app.add_subcommand("enroll", "run all enrollment batches");
    add_common(enroll, opts);

    auto* slice_cmd = app.add_subcommand("slice", "slice a full-device fingerprint to a locality");
    add_common(slice_cmd, opts);
    std::string slice_pattern, slice_device, slice_map, slice_out = "probe.json";
    int slice_batch = 0;
    slice_cmd->add_option("--pattern", slice_pattern, "pattern name")->required();
    slice_cmd->add_option("--device", slice_device, "device id")->required();
    slice_cmd->add_option("--map", slice_map, "comma-separated vertex map")->required();
    slice_cmd->add_option("--batch", slice_batch, "enrollment batch index");
    slice_cmd->add_option("--out-file", slice_out, "output fingerprint file");

    auto* train = app.add_subcommand("train", "train classifiers for the configured patterns");
    add_common(train, opts);

    auto* infer = app.add_subcommand("infer", "predict the embedding behind a probe fingerprint");
    add_common(infer, opts);
    std::string infer_pattern, infer_probe;
    infer->add_option("--pattern", infer_pattern, "pattern name")->required();
    infer->add_option("--probe", infer_probe, "probe fingerprint JSON file")->required();

    auto* eval = app.add_subcommand("eval", "emit the distance/accuracy report suite");
    add_common(eval, opts);

    auto* embeddings = app.add_subcommand("embeddings", "enumerate embeddings over the fleet");
    add_common(embeddings, opts);
    std::string emb_pattern;
    bool emb_count = false;
    embeddings->add_option("--pattern", emb_pattern, "pattern name")->required();
    embeddings->add_flag("--count", emb_count, "print only the census count");

    CLI11_PARSE(app, argc, argv);

    try {
        const xp::RunConfig config = resolve_config(opts);

        if (fleet_init->parsed()) {
            const xp::Fleet fleet = xp::cmd_fleet_init(config);
            std::cout << "initialized fleet of " << fleet.devices.size() << " devices under "
                      << xp::output_paths(config).root.string() << "\n";
        } else if (enroll->parsed()) {
            const auto result = xp::cmd_enroll(config);
            std::cout << "enrolled " << result.simulated << " device-batches ("
                      << result.skipped << " already complete)\n";
        } else if (slice_cmd->parsed()) {
            xp::Embedding emb;
            emb.pattern = xp::pattern_from_string(slice_pattern);
            emb.device_id = slice_device;
            emb.vertex_map = parse_map(slice_map);
            const auto fp = xp::cmd_slice(config, emb, slice_batch, slice_out);
            std::cout << "wrote " << slice_out << " (" << fp.features.size() << " features)\n";
        } else if (train->parsed()) {
            for (const auto& outcome : xp::cmd_train(config)) {
                std::cout << xp::to_string(outcome.pattern) << ": loss "
                          << outcome.final_loss << " after " << outcome.epochs << " epochs ("
                          << (outcome.converged ? "converged" : "hit set cap") << "), "
                          << outcome.retained_components << " components\n";
            }
        } else if (infer->parsed()) {
            const auto result = xp::cmd_infer(config, infer_probe,
                                              xp::pattern_from_string(infer_pattern));
            std::cout << "device: " << result.embedding.device_id << "\n"
                      << "vertex_map: " << map_string(result.embedding.vertex_map) << "\n"
                      << "margin: " << result.margin << "\n";
        } else if (eval->parsed()) {
            const auto summary = xp::cmd_eval(config);
            for (const auto& d : summary.distances)
                std::cout << xp::to_string(d.pattern) << ": inter/intra "
                          << (d.median_intra > 0 ? d.ratio : 0.0) << "\n";
            for (const auto& r : summary.pattern_reports)
                std::cout << xp::to_string(r.pattern) << ": device "
                          << 100.0 * r.device_accuracy << "% embedding "
                          << 100.0 * r.embedding_accuracy << "%\n";
            std::cout << "reports under " << xp::output_paths(config).report("").string() << "\n";
        } else if (embeddings->parsed()) {
            const auto fleet = xp::default_fleet(config.seed);
            const auto pattern = xp::pattern_topology(xp::pattern_from_string(emb_pattern));
            const auto all = xp::enumerate_embeddings(pattern, fleet);
            if (emb_count) {
                std::cout << all.size() << "\n";
            } else {
                for (const auto& emb : all)
                    std::cout << emb.device_id << " " << map_string(emb.vertex_map) << "\n";
            }
        }
    } catch (const xp::LayoutMismatchError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
