#include "gridfuse/cli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "gridfuse/cli/svg_plot.hpp"
#include "gridfuse/error.hpp"
#include "gridfuse/experiment.hpp"
#include "gridfuse/feeder.hpp"
#include "gridfuse/gp_training.hpp"
#include "gridfuse/imputation.hpp"
#include "gridfuse/measurement_csv.hpp"
#include "gridfuse/prior_io.hpp"
#include "gridfuse/rng.hpp"
#include "gridfuse/state_matrix.hpp"

namespace gridfuse::cli {

namespace {

namespace fs = std::filesystem;

/// Flat JSON object as a config source: scalars become one input, arrays one
/// input per element, and snake_case keys match kebab-case flags. Keys apply
/// to the subcommand being run.
class JsonConfig : public CLI::Config {
public:
    explicit JsonConfig(const CLI::App& root) : root_(root) {}

    std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}\n"; }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        nlohmann::json j;
        try {
            input >> j;
        } catch (const nlohmann::json::exception& e) {
            throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) throw CLI::ConversionError("config file must contain a JSON object");
        std::vector<std::string> parents;
        for (const auto* sub : root_.get_subcommands()) parents.push_back(sub->get_name());
        std::vector<CLI::ConfigItem> items;
        for (const auto& [key, value] : j.items()) {
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            for (auto& c : item.name)
                if (c == '_') c = '-';
            if (value.is_array()) {
                for (const auto& e : value) item.inputs.push_back(scalar(e, key));
            } else {
                item.inputs.push_back(scalar(value, key));
            }
            items.push_back(std::move(item));
        }
        return items;
    }

private:
    const CLI::App& root_;

    static std::string scalar(const nlohmann::json& v, const std::string& key) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        if (v.is_number_integer()) return std::to_string(v.get<long long>());
        if (v.is_number()) return format_double(v.get<double>());
        throw CLI::ConversionError("config key '" + key + "' must be a scalar or an array of scalars");
    }
};

class Log {
public:
    Log(std::ostream& err, const int& verbosity) : err_(err), verbosity_(verbosity) {}
    void info(const std::string& msg) const {
        if (verbosity_ >= 1) err_ << "gridfuse: " << msg << '\n';
    }

private:
    std::ostream& err_;
    const int& verbosity_;
};

struct Common {
    std::uint64_t seed = 0;
    fs::path feeder;
};

FeederModel open_feeder(const fs::path& path) { return load_feeder(path.empty() ? bundled_feeder_path() : path); }

std::string to_text(std::span<const TimeSeriesTask> tasks) {
    std::ostringstream os;
    write_measurements(os, tasks);
    return os.str();
}

std::optional<InputEncoding> parse_encoding(const std::string& s) {
    if (s == "time") return InputEncoding::TimeOnly;
    if (s == "features") return InputEncoding::TimePlusTaskFeatures;
    return std::nullopt;
}

/// Keeps at most one sample per `step` seconds (the first in each bucket).
TimeSeriesTask thin(const TimeSeriesTask& t, double step) {
    std::vector<double> ts, vs;
    double next = -INFINITY;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i].t < next) continue;
        ts.push_back(t[i].t);
        vs.push_back(t[i].value);
        next = (std::floor(t[i].t / step) + 1.0) * step;
    }
    return t.with_samples(std::move(ts), std::move(vs));
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
    fs::path out;
    double noise = 0.005;
    double ami_step = 900.0;
    double scada_step = 60.0;
    double pf = 0.87;
};

void cmd_generate(const Common& c, const GenerateArgs& a, const Log& log) {
    const FeederModel feeder = open_feeder(c.feeder);
    SamplingConfig sc;
    sc.ami_step = a.ami_step;
    sc.scada_step = a.scada_step;
    sc.noise_relative = a.noise;

    log.info("simulating test and training days, seed " + std::to_string(c.seed));
    const SimulatedDay day = simulate_day(feeder, derive_seed(c.seed, "day"), a.pf);
    sc.noise_seed = derive_seed(c.seed, "noise");
    const auto meas = sample_measurements(feeder, day, sc);

    const auto grid = TimeGrid::day(60.0).instants();
    std::vector<TimeSeriesTask> truth;
    for (const auto& t : meas) truth.push_back(truth_task(feeder, day, t, grid));

    const SimulatedDay train_day = simulate_day(feeder, derive_seed(c.seed, "train-day"), a.pf);
    sc.noise_seed = derive_seed(c.seed, "train-noise");
    const auto train = sample_measurements(feeder, train_day, sc);

    fs::create_directories(a.out);
    write_file_atomic(a.out / "meas.csv", to_text(meas));
    write_file_atomic(a.out / "truth.csv", to_text(truth));
    write_file_atomic(a.out / "train.csv", to_text(train));
    log.info("wrote " + std::to_string(meas.size()) + " tasks to " + a.out.string());
}

// ------------------------------------------------------------------ impute

struct ImputeArgs {
    fs::path data, out, prior, train_data, save_prior, masked_out;
    std::string method = "gp";
    std::string encoding = "features";
    double grid = 60.0;
    double missing = 0.0;
    int epochs = 100;
    double lr = 0.01;
    double train_step = 900.0;
    double level = 0.95;
};

void cmd_impute(const Common& c, const ImputeArgs& a, const Log& log) {
    const auto method = parse_method(a.method);
    if (!method) throw InvalidArgument("unknown method '" + a.method + "' (valid: gp, linear)");
    if (!(a.missing >= 0.0 && a.missing < 1.0)) throw InvalidArgument("--missing must lie in [0, 1)");
    const auto tasks = read_measurements(a.data);
    if (tasks.empty()) throw NoDataError("no tasks in '" + a.data.string() + "'");

    std::vector<TimeSeriesTask> observed;
    for (const auto& t : tasks)
        observed.push_back(apply_missingness(t, a.missing, derive_seed(c.seed, t.task_id())).first);
    if (!a.masked_out.empty()) write_file_atomic(a.masked_out, to_text(observed));

    std::optional<GpPrior> prior;
    if (*method == ImputationMethod::Gp) {
        if (!a.prior.empty()) {
            prior = load_prior(a.prior);
            log.info("loaded prior from " + a.prior.string());
        } else {
            const auto enc = parse_encoding(a.encoding);
            if (!enc) throw InvalidArgument("unknown encoding '" + a.encoding + "' (valid: time, features)");
            const auto source = a.train_data.empty() ? observed : read_measurements(a.train_data);
            std::vector<TimeSeriesTask> train;
            for (const auto& t : source) train.push_back(thin(t, a.train_step));
            TrainConfig tc;
            tc.epochs = a.epochs;
            tc.learning_rate = a.lr;
            tc.encoding = *enc;
            tc.seed = derive_seed(c.seed, "prior-train");
            GpPrior init = GpPrior::make(*enc, derive_seed(c.seed, "prior-init"), tc.hidden);
            init.bus_depth = normalized_depths(open_feeder(c.feeder));
            log.info("training prior on " + std::to_string(train.size()) + " tasks for " + std::to_string(a.epochs) +
                     " epochs");
            const auto res = train_prior(train, tc, std::move(init));
            log.info("log marginal likelihood " + format_double(res.initial_lml) + " -> " +
                     format_double(res.final_lml));
            prior = res.prior;
        }
        if (!a.save_prior.empty()) save_prior(*prior, a.save_prior);
    }

    const auto grid = TimeGrid::day(a.grid).instants();
    std::vector<ImputedTask> out;
    for (const auto& t : observed) {
        ImputedTask it{t.task_id(), {}};
        if (*method == ImputationMethod::Gp) {
            auto pred = impute_gp(*prior, t, grid, a.level);
            it.series.times = grid;
            it.series.stddev = pred.stddev();
            it.series.mean = std::move(pred.mean);
        } else {
            it.series = impute(*method, nullptr, t, grid);
        }
        out.push_back(std::move(it));
    }
    std::ostringstream os;
    write_imputed(os, out);
    write_file_atomic(a.out, os.str());
    log.info("wrote " + std::to_string(out.size()) + " imputed tasks to " + a.out.string());
}

// -------------------------------------------------------------------- dsse

struct DsseArgs {
    fs::path data, imputed, out, observed_out;
    double time = 0.0;
    double fad = 0.9;
    std::optional<double> mu;
    int max_iters = 500;
};

void cmd_dsse(const Common& c, const DsseArgs& a, const Log& log) {
    const FeederModel feeder = open_feeder(c.feeder);
    const auto tasks = read_measurements(a.data);
    std::map<std::string, ImputedSeries> imputed;
    if (!a.imputed.empty())
        for (auto& t : read_imputed(a.imputed)) imputed.emplace(t.task_id, std::move(t.series));

    const std::vector<double> at{a.time};
    SnapshotInputs in;
    for (const auto& t : tasks) {
        double v;
        if (auto it = imputed.find(t.task_id()); it != imputed.end()) {
            const auto& s = it->second;
            v = linear_interpolate(t.with_samples(s.times, s.mean), at).front();
        } else {
            if (t.empty()) continue;
            v = linear_interpolate(t, at).front();
        }
        switch (t.quantity()) {
            case Quantity::ActivePower_kW: in.p_kw[t.bus_id()] = v; break;
            case Quantity::ReactivePower_kVAr: in.q_kvar[t.bus_id()] = v; break;
            case Quantity::VoltageMag_pu: in.v_mag[t.bus_id()] = v; break;
        }
    }

    CompletionConfig cc;
    cc.mu = a.mu;
    cc.max_iters = a.max_iters;
    const auto res = dsse_snapshot(in, feeder, a.fad, c.seed, cc);
    log.info("completion: " + std::to_string(res.completion.iterations) + " iterations, " +
             (res.completion.converged ? "converged" : "not converged"));

    std::ostringstream os;
    os << "bus_id,re_v,im_v,v_mag,p_kw,q_kvar,consistency_residual\n";
    for (const auto& s : res.states)
        os << s.bus_id << ',' << format_double(s.v.real()) << ',' << format_double(s.v.imag()) << ','
           << format_double(s.v_mag) << ',' << format_double(s.s.real()) << ',' << format_double(s.s.imag()) << ','
           << format_double(s.consistency_residual) << '\n';
    write_file_atomic(a.out, os.str());
    if (!a.observed_out.empty()) {
        std::ostringstream ss;
        write_snapshot(ss, res.observed);
        write_file_atomic(a.observed_out, ss.str());
    }
}

// ------------------------------------------------------------------- sweep

struct SweepArgs {
    fs::path out, table;
    std::string which = "all";
    std::vector<double> fractions = {0.6, 0.4, 0.2, 0.1};
    std::vector<double> fads = {0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<std::string> methods = {"gp", "linear"};
    int trials = 10;
    double grid = 60.0;
    double snapshot_step = 900.0;
    double fad_missing = 0.6;
    double noise = 0.005;
    int epochs = 100;
    double lr = 0.01;
    int threads = 1;
};

void cmd_sweep(const Common& c, const SweepArgs& a, std::ostream& out, const Log& log) {
    ExperimentConfig cfg;
    cfg.seed = c.seed;
    cfg.feeder_path = c.feeder;
    cfg.missing_fractions = a.fractions;
    cfg.fads = a.fads;
    cfg.methods.clear();
    for (const auto& m : a.methods) {
        const auto pm = parse_method(m);
        if (!pm) throw InvalidArgument("unknown method '" + m + "' (valid: gp, linear)");
        cfg.methods.push_back(*pm);
    }
    cfg.trials = a.trials;
    cfg.grid_step = a.grid;
    cfg.snapshot_step = a.snapshot_step;
    cfg.fad_missing_fraction = a.fad_missing;
    cfg.sampling.noise_relative = a.noise;
    cfg.training.epochs = a.epochs;
    cfg.training.learning_rate = a.lr;
    cfg.threads = a.threads;

    log.info("running " + a.which + " sweep, " + std::to_string(a.trials) + " trial(s), seed " +
             std::to_string(c.seed));
    ResultTable table;
    if (a.which == "imputation") table = imputation_experiment(cfg);
    else if (a.which == "fad") table = fad_sweep(cfg);
    else table = run_sweep(cfg);

    if (a.out.empty()) out << table.to_csv();
    else write_file_atomic(a.out, table.to_csv());
    if (!a.table.empty()) write_file_atomic(a.table, table.to_text());
}

// -------------------------------------------------------------------- plot

struct PlotArgs {
    fs::path imputed, data, truth, out;
    std::string task;
    std::string title;
    double level = 0.95;
};

const TimeSeriesTask* find_task(const std::vector<TimeSeriesTask>& tasks, const std::string& id) {
    for (const auto& t : tasks)
        if (t.task_id() == id) return &t;
    return nullptr;
}

void cmd_plot(const PlotArgs& a) {
    const auto imputed = read_imputed(a.imputed);
    const ImputedTask* it = nullptr;
    for (const auto& t : imputed)
        if (t.task_id == a.task) it = &t;
    if (!it) throw InvalidArgument("task '" + a.task + "' not found in '" + a.imputed.string() + "'");

    std::vector<PlotSeries> series;
    std::string y_label;
    if (!a.truth.empty()) {
        const auto truth = read_measurements(a.truth);
        const auto* t = find_task(truth, a.task);
        if (!t) throw InvalidArgument("task '" + a.task + "' not found in '" + a.truth.string() + "'");
        series.push_back({"truth", {t->times().begin(), t->times().end()}, {t->values().begin(), t->values().end()}});
        y_label = std::string(to_string(t->quantity()));
    }
    series.push_back({"imputed mean", it->series.times, it->series.mean});
    if (!a.data.empty()) {
        const auto data = read_measurements(a.data);
        const auto* t = find_task(data, a.task);
        if (!t) throw InvalidArgument("task '" + a.task + "' not found in '" + a.data.string() + "'");
        if (!t->empty())
            series.push_back({"observed", {t->times().begin(), t->times().end()},
                              {t->values().begin(), t->values().end()}, true});
        y_label = std::string(to_string(t->quantity()));
    }

    std::optional<PlotBand> band;
    if (!it->series.stddev.empty()) {
        const double z = two_sided_z(a.level);
        PlotBand b;
        b.name = format_double(100.0 * a.level) + "% CI";
        b.x = it->series.times;
        for (std::size_t i = 0; i < b.x.size(); ++i) {
            b.lower.push_back(it->series.mean[i] - z * it->series.stddev[i]);
            b.upper.push_back(it->series.mean[i] + z * it->series.stddev[i]);
        }
        band = std::move(b);
    }
    PlotOptions opts;
    opts.title = a.title.empty() ? a.task : a.title;
    opts.y_label = y_label;
    write_file_atomic(a.out, emit_svg_plot(series, band, opts));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-rate sensor imputation and distribution state estimation", "gridfuse"};
    app.set_version_flag("--version", GRIDFUSE_VERSION);
    app.require_subcommand(1);
    app.fallthrough();

    int verbosity = 0;
    Common common;
    const Log log(err, verbosity);
    app.add_flag("-v,--verbose", verbosity, "Increase diagnostic output (repeatable)");
    app.config_formatter(std::make_shared<JsonConfig>(app));
    app.allow_config_extras(false);
    app.set_config("--config", "", "JSON file with option values for the subcommand; flags override it");

    auto add_common = [&](CLI::App* sub, bool feeder) {
        sub->add_option("--seed", common.seed, "Random seed")->envname("GRIDFUSE_SEED");
        if (feeder) sub->add_option("--feeder", common.feeder, "Feeder JSON (default: bundled 37-bus model)");
    };
    const auto methods = CLI::IsMember({"gp", "linear"});

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Simulate a day and write measurement and truth CSVs");
    add_common(g, true);
    g->add_option("--out", gen.out, "Output directory")->required();
    g->add_option("--noise", gen.noise, "Measurement noise std relative to signal std");
    g->add_option("--ami-step", gen.ami_step, "AMI sampling step in seconds");
    g->add_option("--scada-step", gen.scada_step, "SCADA sampling step in seconds");
    g->add_option("--pf", gen.pf, "Load power factor");

    ImputeArgs imp;
    auto* i = app.add_subcommand("impute", "Mask and impute measurement tasks on a regular grid");
    add_common(i, true);
    i->add_option("--data", imp.data, "Measurement CSV")->required();
    i->add_option("--out", imp.out, "Imputed CSV (task_id,timestamp_s,mean,std)")->required();
    i->add_option("--method", imp.method, "Imputation method")->check(methods);
    i->add_option("--grid", imp.grid, "Output grid step in seconds");
    i->add_option("--missing", imp.missing, "Fraction of samples to drop before imputing");
    i->add_option("--prior", imp.prior, "Trained prior JSON (skips training)");
    i->add_option("--train-data", imp.train_data, "Measurement CSV to train on (default: the masked input)");
    i->add_option("--save-prior", imp.save_prior, "Write the trained prior to this path");
    i->add_option("--masked-out", imp.masked_out, "Write the masked observations to this path");
    i->add_option("--encoding", imp.encoding, "Mean-network inputs")->check(CLI::IsMember({"time", "features"}));
    i->add_option("--epochs", imp.epochs, "Training epochs");
    i->add_option("--lr", imp.lr, "Adam learning rate");
    i->add_option("--train-step", imp.train_step, "Thin training tasks to one sample per this many seconds");
    i->add_option("--level", imp.level, "Confidence level for intervals");

    DsseArgs ds;
    auto* d = app.add_subcommand("dsse", "Estimate per-bus states at one instant by matrix completion");
    add_common(d, true);
    d->add_option("--data", ds.data, "Measurement CSV (task identities and fallback values)")->required();
    d->add_option("--imputed", ds.imputed, "Imputed CSV; its means replace the raw values");
    d->add_option("--time", ds.time, "Snapshot time in seconds since midnight")->required();
    d->add_option("--fad", ds.fad, "Fraction of available data to keep");
    d->add_option("--mu", ds.mu, "Nuclear-norm weight (default: scaled to the data)");
    d->add_option("--max-iters", ds.max_iters, "Soft-impute iteration cap");
    d->add_option("--out", ds.out, "State CSV")->required();
    d->add_option("--observed-out", ds.observed_out, "Snapshot CSV of the retained entries");

    SweepArgs sw;
    auto* s = app.add_subcommand("sweep", "Run the missing-fraction and FAD experiments");
    add_common(s, true);
    s->add_option("--out", sw.out, "Result CSV (default: standard output)");
    s->add_option("--table", sw.table, "Aligned text table output");
    s->add_option("--which", sw.which, "Experiments to run")->check(CLI::IsMember({"all", "imputation", "fad"}));
    s->add_option("--fractions", sw.fractions, "Missing fractions")->delimiter(',');
    s->add_option("--fads", sw.fads, "FAD values")->delimiter(',');
    s->add_option("--methods", sw.methods, "Imputation methods")->delimiter(',')->check(methods);
    s->add_option("--trials", sw.trials, "Seeded trials per cell");
    s->add_option("--grid", sw.grid, "Imputation grid step in seconds");
    s->add_option("--snapshot-step", sw.snapshot_step, "Seconds between DSSE snapshots");
    s->add_option("--fad-missing", sw.fad_missing, "Missing fraction used in the FAD sweep");
    s->add_option("--noise", sw.noise, "Measurement noise std relative to signal std");
    s->add_option("--epochs", sw.epochs, "Training epochs");
    s->add_option("--lr", sw.lr, "Adam learning rate");
    s->add_option("--threads", sw.threads, "Worker threads (0: all cores)");

    PlotArgs pl;
    auto* p = app.add_subcommand("plot", "Render one imputed task as SVG");
    p->add_option("--imputed", pl.imputed, "Imputed CSV")->required();
    p->add_option("--task", pl.task, "Task id to plot")->required();
    p->add_option("--data", pl.data, "Measurement CSV with the observed samples");
    p->add_option("--truth", pl.truth, "Measurement CSV with the ground truth");
    p->add_option("--title", pl.title, "Plot title (default: task id)");
    p->add_option("--level", pl.level, "Confidence level of the band");
    p->add_option("--out", pl.out, "SVG output path")->required();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ConfigError& e) {
        std::string msg = e.what();
        const std::string ini = "INI was not able to parse ";
        if (msg.rfind(ini, 0) == 0) msg = "unknown config key '" + msg.substr(ini.size()) + "'";
        err << "gridfuse: " << msg << '\n';
        return kExitUserError;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUserError;
    }

    try {
        if (g->parsed()) cmd_generate(common, gen, log);
        else if (i->parsed()) cmd_impute(common, imp, log);
        else if (d->parsed()) cmd_dsse(common, ds, log);
        else if (s->parsed()) cmd_sweep(common, sw, out, log);
        else if (p->parsed()) cmd_plot(pl);
        return kExitOk;
    } catch (const NumericalFailure& e) {
        err << "gridfuse: numerical failure: " << e.what() << '\n';
        return kExitNumericalFailure;
    } catch (const std::exception& e) {
        err << "gridfuse: error: " << e.what() << '\n';
        return kExitUserError;
    }
}

}  // namespace gridfuse::cli
