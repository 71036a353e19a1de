#include "eventcast/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "eventcast/engine.hpp"
#include "eventcast/eval.hpp"
#include "eventcast/generator.hpp"
#include "eventcast/model_io.hpp"
#include "eventcast/streams.hpp"

namespace eventcast {

namespace {

struct RunOptions {
    std::string pattern_path;
    std::string data_path;
    std::string test_data_path;
    std::string out_path;
    std::string out_dir;
    std::string mode = "psa-embedding";
    double split = 0.75;
    bool enrich_amount = false;
    std::int64_t d = 1;
    double distance_lo = 0.2;
    double distance_hi = 0.4;
    int theta_points = 101;
    int state_budget = kDefaultStateBudget;
    std::uint64_t seed = 1;
    bool measure_perf = false;
    LearnConfig learn;
    ForecastConfig forecast;
};

void apply_manifest(const std::string& path, RunOptions& opt) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_io("cannot open manifest '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw_config(std::string("bad manifest JSON: ") + e.what());
    }
    if (j.contains("pattern")) opt.pattern_path = j["pattern"].get<std::string>();
    if (j.contains("data")) opt.data_path = j["data"].get<std::string>();
    if (j.contains("testData")) opt.test_data_path = j["testData"].get<std::string>();
    if (j.contains("out")) opt.out_dir = j["out"].get<std::string>();
    if (j.contains("mode")) opt.mode = j["mode"].get<std::string>();
    if (j.contains("split")) opt.split = j["split"].get<double>();
    if (j.contains("seed")) opt.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("d")) opt.d = j["d"].get<std::int64_t>();
    if (j.contains("enrich")) {
        for (const auto& field : j["enrich"]) {
            if (field.get<std::string>() == "amountDiff") opt.enrich_amount = true;
        }
    }
    if (j.contains("distance")) {
        opt.distance_lo = j["distance"].at(0).get<double>();
        opt.distance_hi = j["distance"].at(1).get<double>();
    }
    if (j.contains("stateBudget")) opt.state_budget = j["stateBudget"].get<int>();
    if (j.contains("learn")) {
        const auto& l = j["learn"];
        if (l.contains("m")) opt.learn.m = l["m"].get<int>();
        if (l.contains("alpha")) opt.learn.alpha = l["alpha"].get<double>();
        if (l.contains("n")) opt.learn.n = l["n"].get<int>();
        if (l.contains("theta1")) opt.learn.theta1 = l["theta1"].get<double>();
        if (l.contains("theta2")) opt.learn.theta2 = l["theta2"].get<double>();
        if (l.contains("fullExpansion")) opt.learn.full_expansion = l["fullExpansion"].get<bool>();
    }
    if (j.contains("forecast")) {
        const auto& f = j["forecast"];
        if (f.contains("thetaFc")) opt.forecast.theta_fc = f["thetaFc"].get<double>();
        if (f.contains("w")) opt.forecast.w = f["w"].get<int>();
        if (f.contains("horizon")) opt.forecast.horizon = f["horizon"].get<int>();
        if (f.contains("cutoff")) opt.forecast.cutoff = f["cutoff"].get<double>();
        if (f.contains("maxSpread")) opt.forecast.max_spread = f["maxSpread"].get<int>();
        if (f.contains("type")) {
            const std::string type = f["type"].get<std::string>();
            if (type == "interval") opt.forecast.type = ForecastType::Interval;
            else if (type == "point") opt.forecast.type = ForecastType::Point;
            else if (type == "classify-next-w") opt.forecast.type = ForecastType::ClassifyNextW;
            else throw_config("forecast type must be interval, point or classify-next-w");
        }
    }
}

void add_common_flags(CLI::App* cmd, RunOptions& opt, std::string& manifest) {
    cmd->add_option("--manifest", manifest, "run manifest JSON; flags override its fields");
    cmd->add_option("--pattern", opt.pattern_path, "pattern config JSON");
    cmd->add_option("--data", opt.data_path, "event CSV");
    cmd->add_option("--test-data", opt.test_data_path, "separate test CSV (otherwise --split)");
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--mode", opt.mode,
                    "engine: psa-embedding | pst-direct | full-order | mean-baseline | iid");
    cmd->add_option("--split", opt.split, "sequential train fraction");
    cmd->add_option("--seed", opt.seed, "RNG seed");
    cmd->add_option("--order", opt.learn.m, "maximum model order m");
    cmd->add_option("--alpha", opt.learn.alpha, "smoothing knob (floor = alpha/|alphabet|)");
    cmd->add_option("--theta1", opt.learn.theta1, "frequency threshold");
    cmd->add_option("--theta2", opt.learn.theta2, "ratio threshold");
    cmd->add_option("--psa-states", opt.learn.n, "suffix-automaton state budget");
    cmd->add_option("--theta-fc", opt.forecast.theta_fc, "forecast confidence threshold");
    cmd->add_option("--w", opt.forecast.w, "classification window");
    cmd->add_option("--horizon", opt.forecast.horizon, "waiting-time horizon");
    cmd->add_option("--cutoff", opt.forecast.cutoff, "tree-path pruning threshold");
    cmd->add_option("--state-budget", opt.state_budget, "automaton state budget");
    cmd->add_flag("--enrich-amount-diff", opt.enrich_amount,
                  "derive amountDiff from per-partition amount changes");
    cmd->add_option("--distance-lo", opt.distance_lo, "checkpoint distance range, lower bound");
    cmd->add_option("--distance-hi", opt.distance_hi, "checkpoint distance range, upper bound");
    cmd->add_option("--d", opt.d, "regression checkpoint distance (events before a match)");
    cmd->add_option("--theta-points", opt.theta_points, "threshold grid size for ROC sweeps");
    cmd->add_flag("--measure-perf", opt.measure_perf, "include throughput measurements");
}

std::filesystem::path out_file(const RunOptions& opt, const std::string& name) {
    if (!opt.out_dir.empty()) {
        std::filesystem::create_directories(opt.out_dir);
        return std::filesystem::path(opt.out_dir) / name;
    }
    return std::filesystem::path(name);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_io("cannot write '" + path.string() + "'");
    out << text;
}

struct PipelineData {
    CompiledPattern compiled;
    std::vector<Event> train_events;
    std::vector<Event> test_events;
    SymbolizedStream train_symbols;
    SymbolizedStream test_symbols;
    double determinize_seconds = 0.0;
};

PipelineData prepare(const RunOptions& opt, bool need_test) {
    if (opt.pattern_path.empty()) throw_config("a pattern config is required (--pattern)");
    if (opt.data_path.empty()) throw_config("an event CSV is required (--data)");

    PatternConfig pattern_config = load_pattern_config(opt.pattern_path);
    const auto t0 = std::chrono::steady_clock::now();
    PipelineData data{compile_pattern(pattern_config, {}, opt.state_budget), {}, {}, {}, {}, 0.0};
    data.determinize_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    auto read = read_event_csv(opt.data_path);
    std::vector<Event> events = std::move(read.events);
    if (opt.enrich_amount) events = enrich_amount_diff(std::move(events));

    if (!opt.test_data_path.empty()) {
        data.train_events = std::move(events);
        auto test_read = read_event_csv(opt.test_data_path);
        data.test_events = std::move(test_read.events);
        if (opt.enrich_amount) data.test_events = enrich_amount_diff(std::move(data.test_events));
    } else if (need_test) {
        if (opt.split <= 0.0 || opt.split >= 1.0)
            throw_config("--split must lie in (0, 1) when no test data is given");
        const auto cut = static_cast<std::size_t>(static_cast<double>(events.size()) * opt.split);
        data.test_events.assign(events.begin() + static_cast<long>(cut), events.end());
        events.resize(cut);
        data.train_events = std::move(events);
    } else {
        data.train_events = std::move(events);
    }

    data.train_symbols = symbolize(data.train_events, data.compiled.minterms);
    if (!data.test_events.empty())
        data.test_symbols = symbolize(data.test_events, data.compiled.minterms);
    return data;
}

Engine build_engine(const RunOptions& opt, const PipelineData& data, ForecastType type) {
    EngineConfig cfg;
    cfg.mode = engine_mode_from_string(opt.mode);
    cfg.learn = opt.learn;
    cfg.forecast = opt.forecast;
    cfg.forecast.type = type;
    if (type == ForecastType::ClassifyNextW) cfg.forecast.horizon = cfg.forecast.w;
    cfg.state_budget = opt.state_budget;
    Engine engine(&data.compiled.dsfa, cfg);
    engine.train(data.train_symbols.sequences);
    engine.times().extra_seconds = data.determinize_seconds;
    return engine;
}

nlohmann::json timing_json(const TrainingTimes& times) {
    return nlohmann::json{{"modelTime", times.model_seconds},
                          {"wtTime", times.wt_seconds},
                          {"inTime", times.in_seconds},
                          {"extraTime", times.extra_seconds},
                          {"totalTime", times.total()}};
}

// --------------------------------------------------------------------------
// subcommands

int cmd_compile(const RunOptions& opt) {
    if (opt.pattern_path.empty()) throw_config("a pattern config is required (--pattern)");
    PatternConfig config = load_pattern_config(opt.pattern_path);
    CompiledPattern compiled = compile_pattern(config, {}, opt.state_budget);
    write_text(out_file(opt, "dsfa.json"), dsfa_to_json(compiled.dsfa, compiled.minterms));
    std::cout << "pattern: " << to_string(compiled.pattern) << "\n"
              << "streaming: " << to_string(compiled.streaming) << "\n"
              << "minterms: " << compiled.minterms.size()
              << " (unsatisfiable: " << compiled.unsatisfiable_minterms << ")\n"
              << "states: " << compiled.dsfa.num_states << "\n";
    return 0;
}

int cmd_recognize(const RunOptions& opt) {
    PipelineData data = prepare(opt, false);
    const auto result = recognize(data.compiled.dsfa, data.train_events, data.compiled.minterms);
    std::string csv = "partition,matchEndIndex\n";
    for (const auto& [partition, index] : result.matches_global)
        csv += partition + "," + std::to_string(index) + "\n";
    write_text(out_file(opt, "matches.csv"), csv);
    std::cout << "events: " << result.events_consumed << ", skipped: " << result.events_skipped
              << ", matches: " << result.matches_global.size() << "\n";
    return 0;
}

int cmd_learn(const RunOptions& opt) {
    PipelineData data = prepare(opt, false);
    Engine engine = build_engine(opt, data, opt.forecast.type);
    if (!engine.pst()) throw_config("mode '" + opt.mode + "' does not learn a suffix-tree model");
    save_model(out_file(opt, "model.json").string(), *engine.pst(), data.compiled.minterms,
               engine.psa());
    nlohmann::json report;
    report["mode"] = opt.mode;
    report["order"] = opt.learn.m;
    report["pstNodes"] = engine.pst()->node_count();
    if (engine.psa()) report["psaStates"] = engine.psa()->num_states();
    if (engine.embedding()) report["embeddingStates"] = engine.embedding()->num_states();
    report["timing"] = timing_json(engine.times());
    write_text(out_file(opt, "learn-report.json"), report.dump(2));
    std::cout << report.dump(2) << "\n";
    return 0;
}

int cmd_forecast(const RunOptions& opt) {
    PipelineData data = prepare(opt, true);
    Engine engine = build_engine(opt, data, opt.forecast.type);

    std::string csv = "partition,eventIndex,state,kind,start,end,probability\n";
    const auto& symbols = data.test_symbols;
    for (size_t p = 0; p < symbols.partitions.size(); ++p) {
        const auto& partition = symbols.partitions[p];
        for (size_t i = 0; i < symbols.sequences[p].size(); ++i) {
            const auto step = engine.step(partition, symbols.sequences[p][i]);
            if (!step.forecast || step.forecast->kind == ForecastKind::None) continue;
            const Forecast& fc = *step.forecast;
            std::string kind;
            switch (fc.kind) {
                case ForecastKind::Interval: kind = "interval"; break;
                case ForecastKind::Point: kind = "point"; break;
                case ForecastKind::Classification: kind = fc.positive ? "positive" : "negative"; break;
                case ForecastKind::None: kind = "none"; break;
            }
            std::ostringstream row;
            row << partition << "," << symbols.global_index[p][i] << "," << step.dsfa_state << ","
                << kind << "," << fc.start << "," << fc.end << ",";
            row.precision(17);
            row << fc.probability << "\n";
            csv += row.str();
        }
    }
    write_text(out_file(opt, "forecasts.csv"), csv);
    std::cout << "forecasts written\n";
    return 0;
}

int cmd_evaluate_sde(const RunOptions& opt) {
    PipelineData data = prepare(opt, true);
    Engine engine = build_engine(opt, data, opt.forecast.type);
    if (!engine.pst()) throw_config("SDE evaluation needs a model-learning mode");
    const double loss = avg_log_loss(*engine.pst(), data.test_symbols.sequences);

    nlohmann::json report;
    report["mode"] = opt.mode;
    report["order"] = opt.learn.m;
    report["avgLogLoss"] = loss;
    std::int64_t symbols = 0;
    for (const auto& seq : data.test_symbols.sequences)
        symbols += static_cast<std::int64_t>(seq.size());
    report["testSymbols"] = symbols;
    report["skippedEvents"] = data.test_symbols.skipped;
    report["pstNodes"] = engine.pst()->node_count();
    report["timing"] = timing_json(engine.times());
    write_text(out_file(opt, "sde-report.json"), report.dump(2));
    std::cout << report.dump(2) << "\n";
    return 0;
}

int cmd_evaluate_regression(const RunOptions& opt) {
    PipelineData data = prepare(opt, true);
    Engine engine = build_engine(opt, data, ForecastType::Point);
    const auto report = regression_run(engine, data.test_symbols.as_map(), opt.d,
                                       opt.forecast.theta_fc);
    nlohmann::json j;
    j["mode"] = opt.mode;
    j["order"] = opt.learn.m;
    j["d"] = opt.d;
    j["valid"] = report.valid;
    j["checkpoints"] = report.checkpoints;
    j["noForecast"] = report.no_forecast;
    j["rmse"] = report.rmse;
    j["mae"] = report.mae;
    j["anois"] = report.anois;
    j["timing"] = timing_json(engine.times());
    write_text(out_file(opt, "regression-report.json"), j.dump(2));
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_evaluate_classification(const RunOptions& opt) {
    PipelineData data = prepare(opt, true);
    Engine engine = build_engine(opt, data, ForecastType::ClassifyNextW);
    const auto thetas = default_theta_grid(opt.theta_points);
    const auto report = classification_run(engine, data.test_symbols.as_map(), opt.distance_lo,
                                           opt.distance_hi, opt.forecast.w, thetas);

    std::string roc_csv = "theta,tp,fp,tn,fn,precision,recall,specificity\n";
    for (const auto& pt : report.roc) {
        std::ostringstream row;
        row.precision(17);
        row << pt.theta << "," << pt.tp << "," << pt.fp << "," << pt.tn << "," << pt.fn << ","
            << pt.precision << "," << pt.recall << "," << pt.specificity << "\n";
        roc_csv += row.str();
    }
    write_text(out_file(opt, "roc.csv"), roc_csv);

    nlohmann::json j;
    j["mode"] = opt.mode;
    j["order"] = opt.learn.m;
    j["distance"] = {opt.distance_lo, opt.distance_hi};
    j["w"] = opt.forecast.w;
    j["valid"] = report.valid;
    j["checkpoints"] = report.checkpoints;
    j["positives"] = report.positives;
    j["auc"] = report.auc;
    j["timing"] = timing_json(engine.times());
    if (opt.measure_perf) {
        const auto perf = measure_throughput(engine, data.test_symbols.as_map());
        j["throughputEventsPerSec"] = perf.events_per_second;
    }
    write_text(out_file(opt, "classification-report.json"), j.dump(2));
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_generate_fraud(const RunOptions& opt, GeneratorConfig gen) {
    gen.seed = opt.seed;
    const auto dataset = generate_fraud_dataset(gen);
    write_event_csv(out_file(opt, "dataset.csv").string(), dataset.events, {"amount"});
    write_ground_truth_csv(out_file(opt, "truth.csv").string(), dataset.truth);
    std::int64_t frauds = 0;
    for (const auto& entry : dataset.truth)
        if (entry.kind == "fraud") ++frauds;
    std::cout << "events: " << dataset.events.size() << ", fraud runs: " << frauds
              << ", interrupted runs: " << (dataset.truth.size() - static_cast<size_t>(frauds))
              << "\n";
    return 0;
}

int cmd_resample(const RunOptions& opt, std::int64_t interval, std::int64_t max_gap) {
    if (opt.data_path.empty()) throw_config("an event CSV is required (--data)");
    auto read = read_event_csv(opt.data_path);
    const auto resampled = resample_fixed_interval(read.events, interval, max_gap);
    write_event_csv(out_file(opt, "resampled.csv").string(), resampled, read.attribute_columns);
    std::cout << "events in: " << read.events.size() << ", out: " << resampled.size() << "\n";
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"symbolic pattern forecasting over event streams"};
    app.require_subcommand(1);

    RunOptions opt;
    std::string manifest;

    auto* compile = app.add_subcommand("compile", "compile a pattern to its automaton");
    add_common_flags(compile, opt, manifest);
    auto* recognize_cmd = app.add_subcommand("recognize", "detect pattern matches in a stream");
    add_common_flags(recognize_cmd, opt, manifest);
    auto* learn = app.add_subcommand("learn", "train a probabilistic model");
    add_common_flags(learn, opt, manifest);
    auto* forecast = app.add_subcommand("forecast", "emit per-event forecasts on the test stream");
    add_common_flags(forecast, opt, manifest);
    auto* eval_sde = app.add_subcommand("evaluate-sde", "average log-loss of next-symbol prediction");
    add_common_flags(eval_sde, opt, manifest);
    auto* eval_reg = app.add_subcommand("evaluate-regression", "RMSE/MAE/ANOIS at fixed distances");
    add_common_flags(eval_reg, opt, manifest);
    auto* eval_cls = app.add_subcommand("evaluate-classification", "ROC/AUC over distance-gated checkpoints");
    add_common_flags(eval_cls, opt, manifest);

    GeneratorConfig gen;
    auto* generate = app.add_subcommand("generate-fraud", "synthesize a transaction stream");
    add_common_flags(generate, opt, manifest);
    generate->add_option("--events", gen.total_events, "total transactions");
    generate->add_option("--cards", gen.num_cards, "number of cards");
    generate->add_option("--fraud-fraction", gen.fraud_fraction, "share of fraud-run events");
    generate->add_option("--genuine-fraction", gen.genuine_fraction,
                         "share of interrupted-run events");

    std::int64_t interval = 60, max_gap = 3600;
    auto* resample = app.add_subcommand("resample", "fixed-interval linear resampling");
    add_common_flags(resample, opt, manifest);
    resample->add_option("--interval", interval, "grid spacing in time units");
    resample->add_option("--max-gap", max_gap, "segment break threshold");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad flags are config errors
    }

    try {
        if (!manifest.empty()) {
            // manifest first, then re-apply flags so they win
            RunOptions from_manifest;
            apply_manifest(manifest, from_manifest);
            std::swap(opt, from_manifest);
            std::vector<std::string> reversed(args.rbegin(), args.rend());
            app.clear();
            app.parse(reversed);
        }
        if (compile->parsed()) return cmd_compile(opt);
        if (recognize_cmd->parsed()) return cmd_recognize(opt);
        if (learn->parsed()) return cmd_learn(opt);
        if (forecast->parsed()) return cmd_forecast(opt);
        if (eval_sde->parsed()) return cmd_evaluate_sde(opt);
        if (eval_reg->parsed()) return cmd_evaluate_regression(opt);
        if (eval_cls->parsed()) return cmd_evaluate_classification(opt);
        if (generate->parsed()) return cmd_generate_fraud(opt, gen);
        if (resample->parsed()) return cmd_resample(opt, interval, max_gap);
        throw_config("no subcommand given");
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return static_cast<int>(ErrorKind::Internal);
    }
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

}  // namespace eventcast
