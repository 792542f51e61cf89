#include "gridfuse/experiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "gridfuse/error.hpp"
#include "gridfuse/metrics.hpp"
#include "gridfuse/rng.hpp"
#include "gridfuse/state_matrix.hpp"

namespace gridfuse {

TrainConfig ExperimentConfig::default_training() {
    TrainConfig t;
    t.encoding = InputEncoding::TimePlusTaskFeatures;
    return t;
}

namespace {

bool divides_day(double step) {
    if (!(step > 0.0) || !std::isfinite(step)) return false;
    const double k = kSecondsPerDay / step;
    return std::abs(k - std::round(k)) < 1e-9;
}

bool on_step(double t, double step) {
    const double k = t / step;
    return std::abs(k - std::round(k)) < 1e-9;
}

bool is_multiple(double a, double b) { return a >= b && on_step(a, b); }

}  // namespace

void ExperimentConfig::validate() const {
    if (trials < 1) throw InvalidArgument("trials must be >= 1");
    for (double f : missing_fractions)
        if (!(f >= 0.0 && f < 1.0)) throw InvalidArgument("missing fractions must lie in [0, 1)");
    for (double f : fads)
        if (!(f > 0.0 && f <= 1.0)) throw InvalidArgument("FAD values must lie in (0, 1]");
    if (!(fad_missing_fraction >= 0.0 && fad_missing_fraction < 1.0))
        throw InvalidArgument("fad_missing_fraction must lie in [0, 1)");
    if (!divides_day(grid_step)) throw InvalidArgument("grid_step must be positive and divide 86400");
    if (!divides_day(snapshot_step) || !is_multiple(snapshot_step, grid_step))
        throw InvalidArgument("snapshot_step must divide 86400 and be a multiple of grid_step");
    if (methods.empty()) throw InvalidArgument("at least one method is required");
    for (std::size_t i = 0; i < methods.size(); ++i)
        for (std::size_t j = i + 1; j < methods.size(); ++j)
            if (methods[i] == methods[j]) throw InvalidArgument("duplicate method in method set");
    if (!(ci_level > 0.0 && ci_level < 1.0)) throw InvalidArgument("ci_level must lie in (0, 1)");
    if (!(power_factor > 0.0 && power_factor <= 1.0)) throw InvalidArgument("power_factor must lie in (0, 1]");
    if (!divides_day(sampling.ami_step) || !divides_day(sampling.scada_step))
        throw InvalidArgument("sampling steps must divide 86400");
    if (!(sampling.noise_relative >= 0.0)) throw InvalidArgument("noise_relative must be >= 0");
    if (training.epochs < 0 || !(training.learning_rate > 0.0))
        throw InvalidArgument("training epochs must be >= 0 and learning rate > 0");
    if (threads < 0) throw InvalidArgument("threads must be >= 0");
    completion.validate();
}

namespace {

constexpr std::array<Quantity, 3> kQuantities = {Quantity::ActivePower_kW, Quantity::ReactivePower_kVAr,
                                                 Quantity::VoltageMag_pu};
constexpr std::size_t kP = 0, kQ = 1, kV = 2;

std::size_t qindex(Quantity q) {
    switch (q) {
        case Quantity::ActivePower_kW: return kP;
        case Quantity::ReactivePower_kVAr: return kQ;
        case Quantity::VoltageMag_pu: return kV;
    }
    return kP;
}

enum SweepSet : unsigned { kImputation = 1u, kFad = 2u };

using PerQuantity = std::array<double, 3>;

struct TrialOutput {
    std::vector<std::vector<PerQuantity>> rmse;  // [fraction][method]
    std::vector<PerQuantity> coverage;           // [fraction], gp only
    std::vector<std::vector<PerQuantity>> mae;   // [fad][method]
};

bool has_gp(const ExperimentConfig& c) {
    return std::find(c.methods.begin(), c.methods.end(), ImputationMethod::Gp) != c.methods.end();
}

std::vector<TimeSeriesTask> thin_to_step(const std::vector<TimeSeriesTask>& tasks, double step) {
    std::vector<TimeSeriesTask> out;
    out.reserve(tasks.size());
    for (const auto& t : tasks) {
        if (t.quantity() != Quantity::VoltageMag_pu) {
            out.push_back(t);
            continue;
        }
        std::vector<double> ts, vs;
        for (std::size_t i = 0; i < t.size(); ++i)
            if (on_step(t[i].t, step)) {
                ts.push_back(t[i].t);
                vs.push_back(t[i].value);
            }
        out.push_back(t.with_samples(std::move(ts), std::move(vs)));
    }
    return out;
}

class Trial {
public:
    Trial(const ExperimentConfig& cfg, const FeederModel& feeder, int index)
        : cfg_(cfg), feeder_(feeder), seed_(derive_seed(cfg.seed, static_cast<std::uint64_t>(index))) {}

    TrialOutput run(unsigned sweeps) {
        prepare();
        TrialOutput out;
        if (sweeps & kImputation) run_imputation(out);
        if (sweeps & kFad) run_fad(out);
        return out;
    }

private:
    void prepare() {
        SamplingConfig sampling = cfg_.sampling;
        test_day_ = simulate_day(feeder_, derive_seed(seed_, "test-day"), cfg_.power_factor);
        sampling.noise_seed = derive_seed(seed_, "test-noise");
        test_tasks_ = sample_measurements(feeder_, test_day_, sampling);

        if (!has_gp(cfg_)) return;
        const SimulatedDay train_day = simulate_day(feeder_, derive_seed(seed_, "train-day"), cfg_.power_factor);
        sampling.noise_seed = derive_seed(seed_, "train-noise");
        const auto train_tasks = thin_to_step(sample_measurements(feeder_, train_day, sampling), sampling.ami_step);

        TrainConfig tc = cfg_.training;
        tc.seed = derive_seed(seed_, "prior-train");
        GpPrior init = GpPrior::make(tc.encoding, derive_seed(seed_, "prior-init"), tc.hidden);
        init.bus_depth = normalized_depths(feeder_);
        prior_ = train_prior(train_tasks, tc, std::move(init)).prior;
    }

    TimeSeriesTask observed(const TimeSeriesTask& task, double fraction) const {
        return apply_missingness(task, fraction, derive_seed(derive_seed(seed_, "missing"), task.task_id())).first;
    }

    void run_imputation(TrialOutput& out) {
        const auto grid = TimeGrid::day(cfg_.grid_step).instants();
        std::vector<const TimeSeriesTask*> scored;
        for (const auto& t : test_tasks_)
            if (t.quantity() != Quantity::VoltageMag_pu) scored.push_back(&t);
        std::vector<TimeSeriesTask> truth;
        for (const auto* t : scored) truth.push_back(truth_task(feeder_, test_day_, *t, grid));

        for (double fraction : cfg_.missing_fractions) {
            std::vector<PerQuantity> per_method;
            PerQuantity coverage{0.0, 0.0, 0.0};
            for (ImputationMethod method : cfg_.methods) {
                std::array<std::vector<double>, 3> ref, est;
                std::array<std::size_t, 3> inside{}, total{};
                for (std::size_t k = 0; k < scored.size(); ++k) {
                    const auto qi = qindex(scored[k]->quantity());
                    const auto obs = observed(*scored[k], fraction);
                    const auto tv = truth[k].values();
                    ref[qi].insert(ref[qi].end(), tv.begin(), tv.end());
                    if (method == ImputationMethod::Linear) {
                        const auto m = linear_interpolate(obs, grid);
                        est[qi].insert(est[qi].end(), m.begin(), m.end());
                        continue;
                    }
                    const auto pred = impute_gp(*prior_, obs, grid, cfg_.ci_level);
                    est[qi].insert(est[qi].end(), pred.mean.begin(), pred.mean.end());
                    for (std::size_t i = 0; i < pred.size(); ++i)
                        if (std::abs(tv[i] - pred.mean[i]) <= pred.ci_halfwidth[i]) ++inside[qi];
                    total[qi] += pred.size();
                }
                PerQuantity r{0.0, 0.0, 0.0};
                for (std::size_t qi : {kP, kQ}) r[qi] = rmse_percent(ref[qi], est[qi]);
                per_method.push_back(r);
                if (method == ImputationMethod::Gp)
                    for (std::size_t qi : {kP, kQ})
                        coverage[qi] = static_cast<double>(inside[qi]) / static_cast<double>(total[qi]);
            }
            out.rmse.push_back(std::move(per_method));
            out.coverage.push_back(coverage);
        }
    }

    void run_fad(TrialOutput& out) {
        const auto snapshots = TimeGrid::day(cfg_.snapshot_step).instants();
        const std::size_t n_snap = snapshots.size();

        // Imputed values at the snapshot instants: [method][task][snapshot].
        std::vector<std::vector<std::vector<double>>> imputed;
        for (ImputationMethod method : cfg_.methods) {
            std::vector<std::vector<double>> per_task;
            for (const auto& t : test_tasks_)
                per_task.push_back(impute(method, prior_ ? &*prior_ : nullptr, observed(t, cfg_.fad_missing_fraction),
                                          snapshots)
                                       .mean);
            imputed.push_back(std::move(per_task));
        }

        const auto load_buses = feeder_.load_buses();
        std::vector<bool> is_load(feeder_.size(), false);
        for (auto b : load_buses) is_load[b] = true;

        const std::uint64_t fad_seed = derive_seed(seed_, "fad");
        for (double fad : cfg_.fads) {
            std::vector<PerQuantity> per_method;
            for (std::size_t mi = 0; mi < cfg_.methods.size(); ++mi) {
                PerQuantity sum{0.0, 0.0, 0.0};
                std::array<std::size_t, 3> count{};
                for (std::size_t s = 0; s < n_snap; ++s) {
                    SnapshotInputs in;
                    for (std::size_t k = 0; k < test_tasks_.size(); ++k) {
                        const auto& t = test_tasks_[k];
                        const double v = imputed[mi][k][s];
                        switch (t.quantity()) {
                            case Quantity::ActivePower_kW: in.p_kw[t.bus_id()] = v; break;
                            case Quantity::ReactivePower_kVAr: in.q_kvar[t.bus_id()] = v; break;
                            case Quantity::VoltageMag_pu: in.v_mag[t.bus_id()] = v; break;
                        }
                    }
                    const auto res = dsse_snapshot(in, feeder_, fad, derive_seed(fad_seed, s), cfg_.completion);
                    const double t = snapshots[s];
                    for (std::size_t b = 0; b < feeder_.size(); ++b) {
                        const auto& st = res.states[b];
                        sum[kV] += std::abs(st.v_mag - test_day_.v_mag(b, t));
                        ++count[kV];
                        if (!is_load[b]) continue;
                        sum[kP] += std::abs(st.s.real() - test_day_.p_kw(feeder_, b, t));
                        sum[kQ] += std::abs(st.s.imag() - test_day_.q_kvar(feeder_, b, t));
                        ++count[kP];
                        ++count[kQ];
                    }
                }
                PerQuantity mae{};
                for (std::size_t qi = 0; qi < 3; ++qi)
                    mae[qi] = count[qi] ? sum[qi] / static_cast<double>(count[qi]) : 0.0;
                per_method.push_back(mae);
            }
            out.mae.push_back(std::move(per_method));
        }
    }

    const ExperimentConfig& cfg_;
    const FeederModel& feeder_;
    std::uint64_t seed_;
    SimulatedDay test_day_;
    std::vector<TimeSeriesTask> test_tasks_;
    std::optional<GpPrior> prior_;
};

std::vector<TrialOutput> run_trials(const ExperimentConfig& cfg, unsigned sweeps) {
    cfg.validate();
    const FeederModel feeder = load_feeder(cfg.feeder_path.empty() ? bundled_feeder_path() : cfg.feeder_path);
    const auto n = static_cast<std::size_t>(cfg.trials);
    std::vector<TrialOutput> outputs(n);
    std::vector<std::exception_ptr> errors(n);

    auto work = [&](std::size_t i) {
        try {
            outputs[i] = Trial(cfg, feeder, static_cast<int>(i)).run(sweeps);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };

    std::size_t workers = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                           : static_cast<std::size_t>(cfg.threads);
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) work(i);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < n; i += workers) work(i);
            });
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return outputs;
}

std::string qname(std::size_t qi) { return std::string(to_string(kQuantities[qi])); }

ResultTable imputation_table(const ExperimentConfig& cfg, const std::vector<TrialOutput>& trials) {
    ResultTable table;
    for (std::size_t fi = 0; fi < cfg.missing_fractions.size(); ++fi) {
        const double f = cfg.missing_fractions[fi];
        for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
            const std::string method(to_string(cfg.methods[mi]));
            for (std::size_t qi : {kP, kQ}) {
                std::vector<double> v;
                for (const auto& t : trials) v.push_back(t.rmse[fi][mi][qi]);
                table.add({method, qname(qi), "missing_fraction", f, "rmse_percent"}, std::move(v));
                if (cfg.methods[mi] != ImputationMethod::Gp) continue;
                std::vector<double> c;
                for (const auto& t : trials) c.push_back(t.coverage[fi][qi]);
                table.add({method, qname(qi), "missing_fraction", f, "ci_coverage"}, std::move(c));
            }
        }
    }
    return table;
}

ResultTable fad_table(const ExperimentConfig& cfg, const std::vector<TrialOutput>& trials) {
    ResultTable table;
    for (std::size_t fi = 0; fi < cfg.fads.size(); ++fi)
        for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi)
            for (std::size_t qi : {kP, kQ, kV}) {
                std::vector<double> v;
                for (const auto& t : trials) v.push_back(t.mae[fi][mi][qi]);
                table.add({std::string(to_string(cfg.methods[mi])), qname(qi), "fad", cfg.fads[fi], "mae"},
                          std::move(v));
            }
    return table;
}

}  // namespace

ResultTable imputation_experiment(const ExperimentConfig& config) {
    return imputation_table(config, run_trials(config, kImputation));
}

ResultTable fad_sweep(const ExperimentConfig& config) {
    return fad_table(config, run_trials(config, kFad));
}

ResultTable run_sweep(const ExperimentConfig& config) {
    const auto trials = run_trials(config, kImputation | kFad);
    ResultTable table = imputation_table(config, trials);
    table.append(fad_table(config, trials));
    return table;
}

}  // namespace gridfuse
