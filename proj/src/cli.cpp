#include "rmo/cli.hpp"

#include "rmo/curve_refine.hpp"
#include "rmo/parallel.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace rmo::cli {

namespace {

std::string read_text(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw CommandError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out || !(out << text)) {
        throw CommandError("cannot write " + path.string());
    }
}

std::string stem_of(const fs::path& p)
{
    return p.stem().string();
}

fs::path sibling(const fs::path& gather, const std::string& suffix_ext)
{
    return gather.parent_path() / (stem_of(gather) + suffix_ext);
}

std::string config_comment(const PipelineConfig& config)
{
    std::string out;
    std::istringstream lines(to_config_text(config));
    for (std::string line; std::getline(lines, line);) {
        out += "# " + line + "\n";
    }
    return out;
}

/// Segment one gather and run the cascade.
CascadeResult process_gather(const fs::path& path, const Gather& gather, const SegmenterKind& kind,
                             const PipelineConfig& config)
{
    SegmentInput input;
    input.gather_path = path;
    input.gather = &gather;
    BinaryMask label;
    if (std::holds_alternative<OracleSegmenter>(kind)) {
        label = BinaryMask::from_raster(read_raster(mask_path_for(path)));
        input.label = &label;
    }
    return run_cascade(segment(kind, input, config.feature), config);
}

}  // namespace

PipelineConfig resolve_config(const ConfigSources& sources)
{
    PipelineConfig config;
    try {
        config = preset(sources.preset);
        if (sources.config_file) {
            apply_config_text(config, read_text(*sources.config_file));
        }
        for (const auto& kv : sources.overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                throw CommandError("override must be key=value: " + kv);
            }
            config.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        config.validate();
    } catch (const CommandError&) {
        throw;
    } catch (const std::exception& e) {
        throw CommandError(e.what());
    }
    return config;
}

void add_count(std::map<int, int>& counts, const std::string& text)
{
    const auto eq = text.find('=');
    try {
        if (eq == std::string::npos) {
            throw std::invalid_argument(text);
        }
        std::size_t used_k = 0, used_n = 0;
        const std::string ks = text.substr(0, eq), ns = text.substr(eq + 1);
        const int k = std::stoi(ks, &used_k);
        const int n = std::stoi(ns, &used_n);
        if (used_k != ks.size() || used_n != ns.size() || k < 1 || n < 0) {
            throw std::invalid_argument(text);
        }
        counts[k] += n;
    } catch (const std::exception&) {
        throw CommandError("count must be K=N with K >= 1, N >= 0: " + text);
    }
}

DatasetManifest cmd_synth(const SynthOptions& options)
{
    if (options.counts.empty()) {
        throw CommandError("synth: no gathers requested (use --count K=N or --recipe)");
    }
    if (options.out_dir.empty()) {
        throw CommandError("synth: output directory required");
    }
    try {
        return generate_dataset(options.spec, options.counts, options.out_dir, options.jobs);
    } catch (const std::invalid_argument& e) {
        throw CommandError(std::string("synth: ") + e.what());
    }
}

std::vector<fs::path> manifest_gathers(const fs::path& manifest_or_dir)
{
    const fs::path path =
        fs::is_directory(manifest_or_dir) ? manifest_or_dir / kManifestName : manifest_or_dir;
    DatasetManifest m;
    try {
        m = read_manifest(path);
    } catch (const std::exception& e) {
        throw CommandError(e.what());
    }
    std::vector<fs::path> out;
    for (const auto& e : m.entries) {
        out.push_back(path.parent_path() / e.gather_file);
    }
    return out;
}

fs::path mask_path_for(const fs::path& gather)
{
    return sibling(gather, "_mask.cigr");
}

fs::path truth_path_for(const fs::path& gather)
{
    return sibling(gather, "_truth.csv");
}

std::vector<PickRecord> cmd_pick(const PickOptions& options)
{
    if (options.gathers.empty()) {
        throw CommandError("pick: no input gathers");
    }
    if (options.out_dir.empty()) {
        throw CommandError("pick: output directory required");
    }
    const PipelineConfig config = resolve_config(options.config);
    fs::create_directories(options.out_dir);

    std::vector<PickRecord> records(options.gathers.size());
    parallel_for(records.size(), options.jobs, [&](std::size_t i) {
        PickRecord& r = records[i];
        r.gather = options.gathers[i];
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const Gather gather(read_raster(r.gather));
            const auto result = process_gather(r.gather, gather, options.segmenter, config);
            const std::string stem = stem_of(r.gather);
            r.picks_file = options.out_dir / (stem + "_picks.csv");
            r.field_file = options.out_dir / (stem + "_field.cigr");
            write_curves(result.picks, r.picks_file);
            write_raster(result.field.to_raster(), r.field_file);
            r.n_raw = result.raw.size();
            r.n_merged = result.merged.size();
            r.n_picks = result.picks.size();
            r.ok = true;
            r.message = "ok";
        } catch (const std::exception& e) {
            r.ok = false;
            r.message = e.what();
            r.picks_file.clear();
            r.field_file.clear();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    });

    // The run manifest excludes timings so it is byte-identical across runs.
    std::string manifest = config_comment(config);
    manifest += "gather,status,picks,field,n_raw,n_merged,n_picks,message\n";
    std::string timing = "gather,seconds\n";
    char buf[64];
    for (const auto& r : records) {
        std::string msg = r.message;
        std::replace(msg.begin(), msg.end(), ',', ';');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        manifest += r.gather.string() + "," + (r.ok ? "ok" : "error") + "," +
                    r.picks_file.string() + "," + r.field_file.string() + "," +
                    std::to_string(r.n_raw) + "," + std::to_string(r.n_merged) + "," +
                    std::to_string(r.n_picks) + "," + msg + "\n";
        std::snprintf(buf, sizeof buf, ",%.6f\n", r.seconds);
        timing += r.gather.string() + buf;
    }
    write_text(options.out_dir / "run_manifest.csv", manifest);
    write_text(options.out_dir / "run_timing.csv", timing);
    return records;
}

MetricReport cmd_eval(const EvalOptions& options, std::ostream& out)
{
    const PipelineConfig config = resolve_config(options.config);
    if (!fs::is_directory(options.manual_dir)) {
        throw CommandError("eval: manual directory not found: " + options.manual_dir.string());
    }
    const std::string tail = options.manual_suffix + ".csv";
    std::vector<std::string> stems;
    for (const auto& entry : fs::directory_iterator(options.manual_dir)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.size() > tail.size() &&
            name.compare(name.size() - tail.size(), tail.size(), tail) == 0) {
            stems.push_back(name.substr(0, name.size() - tail.size()));
        }
    }
    std::sort(stems.begin(), stems.end());

    struct Loaded {
        Gather gather;
        std::vector<Curve> autos, manuals;
    };
    std::vector<Loaded> loaded(stems.size());
    std::vector<GatherPicks> picks;
    try {
        for (std::size_t i = 0; i < stems.size(); ++i) {
            auto& l = loaded[i];
            l.gather = Gather(read_raster(options.gather_dir / (stems[i] + ".cigr")));
            l.manuals = read_curves(options.manual_dir / (stems[i] + tail));
            const fs::path auto_file = options.auto_dir / (stems[i] + options.auto_suffix + ".csv");
            if (fs::exists(auto_file)) {
                l.autos = read_curves(auto_file);
            }
        }
    } catch (const std::exception& e) {
        throw CommandError(std::string("eval: ") + e.what());
    }
    for (std::size_t i = 0; i < stems.size(); ++i) {
        picks.push_back({stems[i], &loaded[i].gather, loaded[i].autos, loaded[i].manuals});
    }
    MetricReport rep = report(picks, config);
    const std::string text = format_report(rep);
    out << text;
    if (options.out_file) {
        write_text(*options.out_file, text);
    }
    return rep;
}

void cmd_plot(const PlotOptions& options)
{
    Gather gather;
    std::vector<Curve> curves;
    std::optional<Raster> field;
    try {
        gather = Gather(read_raster(options.gather));
        if (options.curves) {
            curves = read_curves(*options.curves);
        }
        if (options.field) {
            field = read_raster(*options.field);
        }
    } catch (const std::exception& e) {
        throw CommandError(std::string("plot: ") + e.what());
    }
    const std::size_t h = gather.n_depth();
    const std::size_t w0 = gather.n_offset();
    const std::size_t gap = field ? 4 : 0;
    const std::size_t width = field ? 2 * w0 + gap : w0;
    std::vector<std::uint8_t> rgb(width * h * 3, 255);
    auto put = [&](std::size_t r, std::size_t c, std::uint8_t R, std::uint8_t G, std::uint8_t B) {
        std::uint8_t* px = &rgb[(r * width + c) * 3];
        px[0] = R;
        px[1] = G;
        px[2] = B;
    };

    float peak = 0.0f;
    for (float v : gather.raster().values()) {
        peak = std::max(peak, std::fabs(v));
    }
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w0; ++c) {
            const double v = peak > 0.0f ? gather(r, c) / peak : 0.0;
            const auto g = static_cast<std::uint8_t>(std::lround(127.5 + 127.5 * v));
            put(r, c, g, g, g);
        }
    }
    for (const auto& curve : curves) {
        for (const auto& p : curve) {
            const long r = std::lround(p.depth);
            if (p.offset >= 0 && static_cast<std::size_t>(p.offset) < w0 && r >= 0 &&
                static_cast<std::size_t>(r) < h) {
                put(static_cast<std::size_t>(r), static_cast<std::size_t>(p.offset), 255, 0, 0);
            }
        }
    }
    if (field && !field->empty()) {
        double fmax = 0.0;
        for (float v : field->values()) {
            fmax = std::max(fmax, std::fabs(static_cast<double>(v)));
        }
        for (std::size_t r = 0; r < h; ++r) {
            const std::size_t fr = std::min(field->rows() - 1, r * field->rows() / h);
            for (std::size_t c = 0; c < w0; ++c) {
                const std::size_t fc = std::min(field->cols() - 1, c * field->cols() / w0);
                const double v = fmax > 0.0 ? (*field)(fr, fc) / fmax : 0.0;
                const auto fade = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - std::fabs(v))));
                if (v >= 0.0) {
                    put(r, w0 + gap + c, 255, fade, fade);
                } else {
                    put(r, w0 + gap + c, fade, fade, 255);
                }
            }
        }
    }

    std::ofstream out(options.out_image, std::ios::binary | std::ios::trunc);
    const std::string header = "P6\n" + std::to_string(width) + " " + std::to_string(h) + "\n255\n";
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
    if (!out) {
        throw CommandError("plot: cannot write " + options.out_image.string());
    }
}

std::vector<SweepRow> cmd_sweep(const SweepOptions& options, std::ostream& out)
{
    if (options.values.empty()) {
        throw CommandError("sweep: no values");
    }
    if (options.gathers.empty()) {
        throw CommandError("sweep: no input gathers");
    }
    resolve_config(options.config);
    const auto& keys = PipelineConfig::keys();
    if (std::find(keys.begin(), keys.end(), options.param) == keys.end()) {
        throw CommandError("sweep: unknown parameter " + options.param);
    }

    struct Input {
        Gather gather;
        std::vector<Curve> truth;
    };
    std::vector<Input> inputs(options.gathers.size());
    try {
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            inputs[i].gather = Gather(read_raster(options.gathers[i]));
            inputs[i].truth = read_curves(truth_path_for(options.gathers[i]));
        }
    } catch (const std::exception& e) {
        throw CommandError(std::string("sweep: ") + e.what());
    }

    std::vector<SweepRow> rows;
    std::string text = std::string(kSweepHeader) + "\n";
    for (const auto& value : options.values) {
        ConfigSources sources = options.config;
        sources.overrides.push_back(options.param + "=" + value);
        const PipelineConfig config = resolve_config(sources);

        std::vector<CascadeResult> results(inputs.size());
        parallel_for(inputs.size(), options.jobs, [&](std::size_t i) {
            results[i] = process_gather(options.gathers[i], inputs[i].gather, options.segmenter, config);
        });
        SweepRow row;
        row.value = value;
        std::vector<GatherPicks> picks;
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            row.n_raw += results[i].raw.size();
            row.n_merged += results[i].merged.size();
            row.n_picks += results[i].picks.size();
            picks.push_back({stem_of(options.gathers[i]), &inputs[i].gather, results[i].picks,
                             inputs[i].truth});
        }
        row.metrics = report(picks, config);
        const auto& a = row.metrics.aggregate;
        char buf[256];
        std::snprintf(buf, sizeof buf, ",%zu,%zu,%zu,%.6f,%.6f,%.8f\n", row.n_raw, row.n_merged,
                      row.n_picks, a.semblance_auto, a.track_rate, a.slope_mse);
        text += options.param + "," + value + buf;
        rows.push_back(std::move(row));
    }
    out << text;
    if (options.out_file) {
        write_text(*options.out_file, text);
    }
    return rows;
}

namespace {

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(text);
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

struct SegmenterArgs {
    std::string kind = "oracle";
    double blur = 1.0;
    std::string map_dir;
    std::string map_suffix = "_seg";

    void add_to(CLI::App* cmd)
    {
        cmd->add_option("--segmenter", kind, "oracle | baseline | external")
            ->check(CLI::IsMember({"oracle", "baseline", "external"}));
        cmd->add_option("--blur", blur, "Oracle blur sigma (pixels)");
        cmd->add_option("--map-dir", map_dir,
                        "External maps directory; gather X.cigr reads <map-dir>/X<suffix>.cigr");
        cmd->add_option("--map-suffix", map_suffix, "External map file-name suffix");
    }

    SegmenterKind build() const
    {
        if (kind == "baseline") {
            return BaselineSegmenter{};
        }
        if (kind == "external") {
            if (map_dir.empty()) {
                throw CommandError("--segmenter external needs --map-dir");
            }
            return ExternalSegmenter{map_dir, map_suffix};
        }
        return OracleSegmenter{blur};
    }
};

std::vector<fs::path> gather_inputs(const std::vector<std::string>& paths, const std::string& manifest)
{
    std::vector<fs::path> out(paths.begin(), paths.end());
    if (!manifest.empty()) {
        const auto listed = manifest_gathers(manifest);
        out.insert(out.end(), listed.begin(), listed.end());
    }
    return out;
}

}  // namespace

int run(int argc, char** argv)
{
    CLI::App app{"Residual-moveout picking: synthetic data, picking cascade, evaluation"};
    app.require_subcommand(1);
    app.fallthrough();

    ConfigSources sources;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string config_file;
    app.add_option("--preset", sources.preset, "Hyperparameter preset")
        ->check(CLI::IsMember({"bp", "fa", "fb"}));
    app.add_option("--seed", seed, "Base random seed");
    app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--config", config_file, "key=value config file (overrides the preset)");
    app.add_option("--set", sources.overrides, "key=value override (repeatable)");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate labeled synthetic gathers");
    std::vector<std::string> counts;
    std::string recipe, synth_out;
    SynthSpec spec;
    synth->add_option("--count", counts, "K=N: N gathers with K curves (repeatable)");
    synth->add_option("--recipe", recipe, "train | val dataset composition")
        ->check(CLI::IsMember({"train", "val"}));
    synth->add_option("--out", synth_out, "Output directory")->required();
    synth->add_option("--n-depth", spec.n_depth, "Depth samples");
    synth->add_option("--n-offset", spec.n_offset, "Offset traces");
    synth->add_option("--d-max", spec.d_max, "Ladder depth span");
    synth->add_option("--noise", spec.noise_frac, "Noise power fraction");

    // pick
    auto* pick = app.add_subcommand("pick", "Run the picking cascade on gathers");
    std::vector<std::string> pick_paths;
    std::string pick_manifest, pick_out;
    SegmenterArgs pick_seg;
    pick->add_option("gathers", pick_paths, "Gather CIGR files");
    pick->add_option("--manifest", pick_manifest, "Synthetic manifest (file or directory)");
    pick->add_option("--out", pick_out, "Output directory")->required();
    pick_seg.add_to(pick);

    // eval
    auto* eval = app.add_subcommand("eval", "Compare automatic and manual picks");
    EvalOptions eval_opts;
    std::string eval_auto, eval_manual, eval_gathers, eval_out;
    eval->add_option("--auto", eval_auto, "Directory with <stem>_picks.csv")->required();
    eval->add_option("--manual", eval_manual, "Directory with <stem><manual-suffix>.csv")->required();
    eval->add_option("--gathers", eval_gathers, "Directory with <stem>.cigr")->required();
    eval->add_option("--manual-suffix", eval_opts.manual_suffix, "Manual file-name suffix");
    eval->add_option("--auto-suffix", eval_opts.auto_suffix, "Automatic file-name suffix");
    eval->add_option("--out", eval_out, "Also write the report here");

    // plot
    auto* plot = app.add_subcommand("plot", "Render a gather with picks as a PPM image");
    std::string plot_gather, plot_curves, plot_field, plot_out;
    plot->add_option("--gather", plot_gather, "Gather CIGR file")->required();
    plot->add_option("--curves", plot_curves, "Curve CSV to overlay");
    plot->add_option("--field", plot_field, "Slope-field CIGR for a side panel");
    plot->add_option("--out", plot_out, "Output .ppm")->required();

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Vary one hyperparameter, holding the rest");
    std::string sweep_param, sweep_values, sweep_manifest, sweep_out;
    std::vector<std::string> sweep_paths;
    SegmenterArgs sweep_seg;
    sweep->add_option("--param", sweep_param, "Config key")->required();
    sweep->add_option("--values", sweep_values, "Comma-separated values")->required();
    sweep->add_option("gathers", sweep_paths, "Gather CIGR files with _mask/_truth siblings");
    sweep->add_option("--manifest", sweep_manifest, "Synthetic manifest (file or directory)");
    sweep->add_option("--out", sweep_out, "Also write the table here");
    sweep_seg.add_to(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (!config_file.empty()) {
            sources.config_file = config_file;
        }
        if (synth->parsed()) {
            SynthOptions o;
            o.spec = spec;
            o.spec.seed = seed;
            o.out_dir = synth_out;
            o.jobs = jobs;
            if (!recipe.empty()) {
                o.counts = dataset_recipe(recipe);
            }
            for (const auto& c : counts) {
                add_count(o.counts, c);
            }
            const auto m = cmd_synth(o);
            std::cout << "wrote " << m.entries.size() << " gathers to " << synth_out << "\n";
        } else if (pick->parsed()) {
            PickOptions o;
            o.gathers = gather_inputs(pick_paths, pick_manifest);
            o.segmenter = pick_seg.build();
            o.config = sources;
            o.out_dir = pick_out;
            o.jobs = jobs;
            const auto records = cmd_pick(o);
            std::size_t failed = 0;
            for (const auto& r : records) {
                if (!r.ok) {
                    ++failed;
                    std::cerr << r.gather.string() << ": " << r.message << "\n";
                }
            }
            std::cout << records.size() - failed << "/" << records.size() << " gathers picked\n";
        } else if (eval->parsed()) {
            eval_opts.auto_dir = eval_auto;
            eval_opts.manual_dir = eval_manual;
            eval_opts.gather_dir = eval_gathers;
            eval_opts.config = sources;
            if (!eval_out.empty()) {
                eval_opts.out_file = eval_out;
            }
            cmd_eval(eval_opts, std::cout);
        } else if (plot->parsed()) {
            PlotOptions o;
            o.gather = plot_gather;
            if (!plot_curves.empty()) {
                o.curves = plot_curves;
            }
            if (!plot_field.empty()) {
                o.field = plot_field;
            }
            o.out_image = plot_out;
            cmd_plot(o);
        } else if (sweep->parsed()) {
            SweepOptions o;
            o.param = sweep_param;
            o.values = split_list(sweep_values);
            o.gathers = gather_inputs(sweep_paths, sweep_manifest);
            o.segmenter = sweep_seg.build();
            o.config = sources;
            o.jobs = jobs;
            if (!sweep_out.empty()) {
                o.out_file = sweep_out;
            }
            cmd_sweep(o, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace rmo::cli
