#include "seqlsh/corpus.hpp"
#include "seqlsh/errors.hpp"
#include "seqlsh/eval.hpp"
#include "seqlsh/pipeline.hpp"
#include "seqlsh/sketches.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace seqlsh;

Measure parse_measure(const std::string& name) {
    if (name == "jaccard") return Measure::Jaccard;
    if (name == "cosine") return Measure::Cosine;
    throw config_error("unknown measure '" + name + "' (jaccard|cosine)");
}

CorpusFormat pick_format(const std::string& format, Measure measure) {
    if (format == "set") return CorpusFormat::SetTsv;
    if (format == "weighted") return CorpusFormat::WeightedTsv;
    if (format == "auto") {
        return measure == Measure::Jaccard ? CorpusFormat::SetTsv : CorpusFormat::WeightedTsv;
    }
    throw config_error("unknown corpus format '" + format + "' (set|weighted|auto)");
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw config_error("cannot open output file " + path);
    return file;
}

void metric(const std::string& name, double value) {
    std::cout << "#METRIC\t" << name << '\t' << value << '\n';
}

std::vector<PlantedLevel> parse_levels(const std::string& text) {
    // "0.4:100,0.6:50" -> pairs of (similarity, count)
    std::vector<PlantedLevel> levels;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
            throw config_error("planted level '" + item + "' must be sim:count");
        }
        PlantedLevel level;
        level.similarity = std::stod(item.substr(0, colon));
        level.count = std::stoi(item.substr(colon + 1));
        levels.push_back(level);
    }
    if (levels.empty()) {
        throw config_error("no planted levels given");
    }
    return levels;
}

struct CommonOpts {
    std::string measure = "jaccard";
    std::string format = "auto";
    std::string input;
    std::string output;
};

// key=value config file, applied only where the flag was not given on the
// command line (flags win). '#' starts a comment.
void apply_config_file(const CLI::App* cmd, const std::string& path, RunConfig& cfg,
                       std::string& measure, std::string& mode, std::string& format) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file " + path);
    auto flag_given = [&](const std::string& name) {
        const auto* opt = cmd->get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
    };
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        if (strip(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw config_error("config line " + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        try {
            if (key == "measure") {
                if (!flag_given("--measure")) measure = value;
            } else if (key == "mode") {
                if (!flag_given("--mode")) mode = value;
            } else if (key == "format") {
                if (!flag_given("--format")) format = value;
            } else if (key == "threshold") {
                if (!flag_given("--threshold")) cfg.threshold = std::stod(value);
            } else if (key == "alpha") {
                if (!flag_given("--alpha")) cfg.alpha = std::stod(value);
            } else if (key == "tau") {
                if (!flag_given("--tau")) cfg.tau = std::stod(value);
            } else if (key == "epsilon") {
                if (!flag_given("--epsilon")) cfg.epsilon = std::stod(value);
            } else if (key == "mu") {
                if (!flag_given("--mu")) cfg.mu = std::stod(value);
            } else if (key == "delta") {
                if (!flag_given("--delta")) cfg.delta = std::stod(value);
            } else if (key == "gamma") {
                if (!flag_given("--gamma")) cfg.gamma = std::stod(value);
            } else if (key == "batch") {
                if (!flag_given("--batch")) cfg.batch = std::stoi(value);
            } else if (key == "horizon") {
                if (!flag_given("--horizon")) cfg.horizon = std::stoi(value);
            } else if (key == "smoothing") {
                if (!flag_given("--smoothing")) cfg.smoothing = std::stod(value);
            } else if (key == "band-k") {
                if (!flag_given("--band-k")) cfg.band_k = std::stoi(value);
            } else if (key == "phi") {
                if (!flag_given("--phi")) cfg.phi = std::stod(value);
            } else if (key == "seed") {
                if (!flag_given("--seed")) cfg.seed = std::stoull(value);
            } else if (key == "fresh-hashes") {
                if (!flag_given("--fresh-hashes")) cfg.fresh_hashes = (value == "true" || value == "1");
            } else if (key == "threads") {
                if (!flag_given("--threads")) cfg.threads = std::stoi(value);
            } else if (key == "plan-cache") {
                if (!flag_given("--plan-cache")) cfg.plan_cache_path = value;
            } else {
                throw config_error("config line " + std::to_string(lineno) + ": unknown key '" +
                                   key + "'");
            }
        } catch (const config_error&) {
            throw;
        } catch (const std::exception&) {
            throw config_error("config line " + std::to_string(lineno) + ": bad value for '" +
                               key + "'");
        }
    }
}

void add_run_config_flags(CLI::App* cmd, RunConfig& cfg, std::string& measure, std::string& mode) {
    cmd->add_option("--measure", measure, "Similarity measure: jaccard|cosine");
    cmd->add_option("--mode", mode, "Pipeline mode: exact|sketch");
    cmd->add_option("--threshold", cfg.threshold, "Similarity threshold (user scale)");
    cmd->add_option("--alpha", cfg.alpha, "Recall budget (Type I target)");
    cmd->add_option("--tau", cfg.tau, "SPRT indifference half-width (default per mode)");
    cmd->add_option("--epsilon", cfg.epsilon, "Width-heuristic safety margin");
    cmd->add_option("--mu", cfg.mu, "Hybrid switch threshold on the width");
    cmd->add_option("--delta", cfg.delta, "Estimation half-width (sketch mode)");
    cmd->add_option("--gamma", cfg.gamma, "Estimation non-coverage target (default alpha)");
    cmd->add_option("--batch", cfg.batch, "Hash comparison batch size");
    cmd->add_option("--horizon", cfg.horizon, "Maximum hashes per pair");
    cmd->add_option("--smoothing", cfg.smoothing, "Wald-rule pseudo-count a");
    cmd->add_option("--band-k", cfg.band_k, "Hashes per band (0 = auto)");
    cmd->add_option("--phi", cfg.phi, "Banding miss budget");
    cmd->add_option("--seed", cfg.seed, "Hash family seed");
    cmd->add_flag("--fresh-hashes", cfg.fresh_hashes,
                  "Reserve banding hashes away from the sequential tests");
    cmd->add_option("--threads", cfg.threads, "Worker threads for the pair phase");
    cmd->add_option("--plan-cache", cfg.plan_cache_path, "Plan cache sidecar file");
}

int dispatch(int argc, char** argv) {
    CLI::App app{"All-pairs similarity search with sequential hypothesis-test pruning"};
    // synth ----------------------------------------------------------------
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus");
    CommonOpts synth_opts;
    std::string levels_text = "0.4:50,0.6:50,0.8:50";
    int noise = 200;
    std::uint64_t synth_seed = 1;
    synth_cmd->add_option("--measure", synth_opts.measure);
    synth_cmd->add_option("--levels", levels_text, "Planted pairs as sim:count,...");
    synth_cmd->add_option("--noise", noise, "Background noise vectors");
    synth_cmd->add_option("--seed", synth_seed);
    synth_cmd->add_option("--output,-o", synth_opts.output);

    // sketch ---------------------------------------------------------------
    auto* sketch_cmd = app.add_subcommand("sketch", "Write signatures to a sketch file");
    CommonOpts sketch_opts;
    int sketch_h = 256;
    std::uint64_t sketch_seed = 1;
    sketch_cmd->add_option("--measure", sketch_opts.measure);
    sketch_cmd->add_option("--format", sketch_opts.format);
    sketch_cmd->add_option("--input,-i", sketch_opts.input)->required();
    sketch_cmd->add_option("--output,-o", sketch_opts.output)->required();
    sketch_cmd->add_option("--horizon", sketch_h, "Hashes per signature");
    sketch_cmd->add_option("--seed", sketch_seed);

    // run ------------------------------------------------------------------
    auto* run_cmd = app.add_subcommand("run", "All-pairs similarity search");
    std::string run_config_path;
    run_cmd->add_option("--config", run_config_path, "Config file with key=value lines");
    CommonOpts run_opts;
    RunConfig run_cfg;
    std::string run_measure = "jaccard", run_mode = "exact";
    bool dump_candidates = false;
    add_run_config_flags(run_cmd, run_cfg, run_measure, run_mode);
    run_cmd->add_option("--format", run_opts.format);
    run_cmd->add_option("--input,-i", run_opts.input)->required();
    run_cmd->add_option("--output,-o", run_opts.output);
    run_cmd->add_flag("--dump-candidates", dump_candidates,
                      "Also print candidate pairs as idA<TAB>idB lines");

    // oracle ---------------------------------------------------------------
    auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force exact all-pairs");
    CommonOpts oracle_opts;
    double oracle_t = 0.7;
    oracle_cmd->add_option("--measure", oracle_opts.measure);
    oracle_cmd->add_option("--format", oracle_opts.format);
    oracle_cmd->add_option("--input,-i", oracle_opts.input)->required();
    oracle_cmd->add_option("--output,-o", oracle_opts.output);
    oracle_cmd->add_option("--threshold", oracle_t);

    // compare --------------------------------------------------------------
    auto* compare_cmd = app.add_subcommand("compare", "Compare pruning strategies");
    std::string compare_config_path;
    compare_cmd->add_option("--config", compare_config_path, "Config file with key=value lines");
    CommonOpts compare_opts;
    RunConfig compare_cfg;
    std::string compare_measure = "jaccard", compare_mode = "exact";
    add_run_config_flags(compare_cmd, compare_cfg, compare_measure, compare_mode);
    compare_cmd->add_option("--format", compare_opts.format);
    compare_cmd->add_option("--input,-i", compare_opts.input)->required();

    app.require_subcommand(1);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (synth_cmd->parsed()) {
        SynthSpec spec;
        spec.measure = parse_measure(synth_opts.measure);
        spec.levels = parse_levels(levels_text);
        spec.noise_vectors = noise;
        spec.seed = synth_seed;
        const SynthResult result = synth(spec);
        std::ofstream file;
        std::ostream& out = open_output(file, synth_opts.output);
        write_corpus(out, result.corpus, pick_format("auto", spec.measure));
        return 0;
    }

    if (sketch_cmd->parsed()) {
        const Measure measure = parse_measure(sketch_opts.measure);
        const auto corpus = ingest(sketch_opts.input, pick_format(sketch_opts.format, measure));
        HashFamily family;
        family.scheme = measure == Measure::Jaccard ? Scheme::MinHash : Scheme::SimHash;
        family.seed = sketch_seed;
        family.h = sketch_h;
        SketchFile file;
        file.family = family;
        for (const auto& v : corpus) {
            v.validate();
            file.ids.push_back(v.id);
            file.signatures.push_back(sign(v, family));
        }
        write_sketches(sketch_opts.output, file);
        return 0;
    }

    if (run_cmd->parsed()) {
        if (!run_config_path.empty()) {
            apply_config_file(run_cmd, run_config_path, run_cfg, run_measure, run_mode,
                              run_opts.format);
        }
        run_cfg.measure = parse_measure(run_measure);
        if (run_mode == "exact") {
            run_cfg.mode = Mode::Exact;
        } else if (run_mode == "sketch") {
            run_cfg.mode = Mode::Sketch;
        } else {
            throw config_error("unknown mode '" + run_mode + "' (exact|sketch)");
        }
        const auto corpus =
            ingest(run_opts.input, pick_format(run_opts.format, run_cfg.measure));
        if (dump_candidates) {
            const double tn = transform_threshold(run_cfg.threshold, run_cfg.measure);
            (void)tn;
            for (const auto& cand :
                 exact_candidates(corpus, run_cfg.threshold, run_cfg.measure)) {
                std::cout << cand.a << '\t' << cand.b << '\n';
            }
        }
        const RunResult result = run(run_cfg, corpus);
        std::ofstream file;
        std::ostream& out = open_output(file, run_opts.output);
        out.precision(12);
        for (const auto& pair : result.results) {
            out << pair.a << '\t' << pair.b << '\t' << pair.similarity << '\n';
        }
        for (const auto& note : result.report.notes) {
            std::cout << "# " << note << '\n';
        }
        metric("candidates", static_cast<double>(result.report.candidates));
        metric("pruned", static_cast<double>(result.report.pruned));
        metric("kept_for_exact", static_cast<double>(result.report.kept_exact));
        metric("truncated", static_cast<double>(result.report.truncated));
        metric("emitted", static_cast<double>(result.report.emitted));
        metric("hash_comparisons", static_cast<double>(result.report.total_hash_comparisons));
        metric("wall_ms", result.report.wall_ms);
        return 0;
    }

    if (oracle_cmd->parsed()) {
        const Measure measure = parse_measure(oracle_opts.measure);
        const auto corpus = ingest(oracle_opts.input, pick_format(oracle_opts.format, measure));
        const auto pairs = oracle_allpairs(corpus, oracle_t, measure);
        std::ofstream file;
        std::ostream& out = open_output(file, oracle_opts.output);
        out.precision(12);
        for (const auto& pair : pairs) {
            out << pair.a << '\t' << pair.b << '\t' << pair.similarity << '\n';
        }
        return 0;
    }

    if (compare_cmd->parsed()) {
        if (!compare_config_path.empty()) {
            apply_config_file(compare_cmd, compare_config_path, compare_cfg, compare_measure,
                              compare_mode, compare_opts.format);
        }
        compare_cfg.measure = parse_measure(compare_measure);
        const auto corpus =
            ingest(compare_opts.input, pick_format(compare_opts.format, compare_cfg.measure));
        const EvalReport report = compare_strategies(
            corpus, compare_cfg,
            {Strategy::SprtOnly, Strategy::OneSidedCiOnly, Strategy::Hybrid});
        metric("candidates", static_cast<double>(report.candidates));
        metric("oracle_pairs", static_cast<double>(report.oracle_pairs));
        for (const auto& stats : report.strategies) {
            const std::string prefix = strategy_name(stats.strategy) + ".";
            metric(prefix + "hash_comparisons", static_cast<double>(stats.hash_comparisons));
            metric(prefix + "pruned", static_cast<double>(stats.pruned));
            metric(prefix + "recall", stats.recall);
            metric(prefix + "precision", stats.precision);
            metric(prefix + "type1", stats.type1);
            metric(prefix + "wall_ms", stats.wall_ms);
        }
        return 0;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const seqlsh::parse_error& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const seqlsh::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const seqlsh::invariant_error& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
}
